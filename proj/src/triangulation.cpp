#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "effham/effham_table.hpp"
#include "effham/errors.hpp"

namespace effham {

namespace {

using Tri = std::array<std::size_t, 3>;

struct Pt {
    long double x, y;
};

long double orient(const Pt& a, const Pt& b, const Pt& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 when d lies strictly inside the circumcircle of the counter-clockwise
// triangle (a, b, c).
long double incircle(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
    const long double adx = a.x - d.x, ady = a.y - d.y;
    const long double bdx = b.x - d.x, bdy = b.y - d.y;
    const long double cdx = c.x - d.x, cdy = c.y - d.y;
    const long double ad = adx * adx + ady * ady;
    const long double bd = bdx * bdx + bdy * bdy;
    const long double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

long double hull_area(std::vector<Pt> p) {
    std::sort(p.begin(), p.end(), [](const Pt& a, const Pt& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    std::vector<Pt> h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && orient(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && orient(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    h.resize(k > 0 ? k - 1 : 0);
    long double area = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const Pt& a = h[i];
        const Pt& b = h[(i + 1) % h.size()];
        area += a.x * b.y - b.x * a.y;
    }
    return area / 2;
}

std::vector<std::vector<std::size_t>> delaunay(const std::vector<std::vector<double>>& v) {
    const std::size_t n = v.size();
    if (n < 3) throw ConfigError({"2D tables need at least 3 vertices"});
    long double xmin = v[0][0], xmax = xmin, ymin = v[0][1], ymax = ymin;
    for (const auto& p : v) {
        xmin = std::min<long double>(xmin, p[0]);
        xmax = std::max<long double>(xmax, p[0]);
        ymin = std::min<long double>(ymin, p[1]);
        ymax = std::max<long double>(ymax, p[1]);
    }
    const long double scale = std::max({xmax - xmin, ymax - ymin, 1e-300L});
    std::vector<Pt> pts(n + 3);
    for (std::size_t i = 0; i < n; ++i)
        pts[i] = {(v[i][0] - xmin) / scale, (v[i][1] - ymin) / scale};
    const long double big = 1e5L;
    pts[n] = {-big, -big};
    pts[n + 1] = {big, -big};
    pts[n + 2] = {0.5L, big};

    std::vector<Tri> tris{{n, n + 1, n + 2}};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Tri> keep;
        std::map<std::pair<std::size_t, std::size_t>, int> edges;
        for (const Tri& t : tris) {
            if (incircle(pts[t[0]], pts[t[1]], pts[t[2]], pts[i]) > 1e-18L) {
                for (int e = 0; e < 3; ++e) {
                    const std::size_t a = t[e], b = t[(e + 1) % 3];
                    ++edges[{std::min(a, b), std::max(a, b)}];
                }
            } else {
                keep.push_back(t);
            }
        }
        if (edges.empty()) {
            // On a circumcircle boundary only: fall back to the containing triangle.
            for (std::size_t j = 0; j < keep.size(); ++j) {
                const Tri& t = keep[j];
                if (orient(pts[t[0]], pts[t[1]], pts[i]) >= 0 &&
                    orient(pts[t[1]], pts[t[2]], pts[i]) >= 0 &&
                    orient(pts[t[2]], pts[t[0]], pts[i]) >= 0) {
                    for (int e = 0; e < 3; ++e) {
                        const std::size_t a = t[e], b = t[(e + 1) % 3];
                        ++edges[{std::min(a, b), std::max(a, b)}];
                    }
                    keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(j));
                    break;
                }
            }
        }
        for (const auto& [e, count] : edges) {
            if (count != 1) continue;
            Tri t{e.first, e.second, i};
            const long double o = orient(pts[t[0]], pts[t[1]], pts[t[2]]);
            if (o == 0) continue;
            if (o < 0) std::swap(t[0], t[1]);
            keep.push_back(t);
        }
        tris = std::move(keep);
    }

    std::vector<std::vector<std::size_t>> out;
    long double area = 0;
    for (const Tri& t : tris) {
        if (t[0] >= n || t[1] >= n || t[2] >= n) continue;
        const long double a = orient(pts[t[0]], pts[t[1]], pts[t[2]]);
        if (std::abs(a) <= 1e-24L) continue;
        area += std::abs(a) / 2;
        std::vector<std::size_t> s{t[0], t[1], t[2]};
        std::sort(s.begin(), s.end());
        out.push_back(std::move(s));
    }
    const long double hull = hull_area(std::vector<Pt>(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n)));
    if (hull <= 0) throw ConfigError({"2D table vertices are collinear"});
    if (std::abs(area - hull) > 1e-9L * hull)
        throw ConfigError({"triangulation does not cover the convex hull of the vertices"});
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> triangulate(const std::vector<std::vector<double>>& vertices,
                                                  std::size_t dim) {
    if (dim != 1 && dim != 2) throw ConfigError({"tables support dimension 1 or 2"});
    for (const auto& p : vertices) {
        if (p.size() != dim) throw ConfigError({"vertex dimension mismatch"});
        for (double c : p)
            if (!std::isfinite(c)) throw ConfigError({"non-finite vertex coordinate"});
    }
    std::vector<std::size_t> order(vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return vertices[a] < vertices[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (vertices[order[i]] == vertices[order[i - 1]])
            throw ConfigError({"duplicate vertex at index " + std::to_string(order[i])});
    }
    if (dim == 2) return delaunay(vertices);
    std::vector<std::vector<std::size_t>> segs;
    for (std::size_t i = 1; i < order.size(); ++i) {
        std::vector<std::size_t> s{order[i - 1], order[i]};
        std::sort(s.begin(), s.end());
        segs.push_back(std::move(s));
    }
    std::sort(segs.begin(), segs.end());
    return segs;
}

}  // namespace effham
