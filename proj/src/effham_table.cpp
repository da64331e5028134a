#include "effham/effham_table.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "effham/errors.hpp"
#include "json.hpp"

namespace effham {

using ordered_json = nlohmann::ordered_json;

double EffHamTable::max_diameter() const {
    double k = 0.0;
    for (const auto& s : simplices) {
        for (std::size_t a = 0; a < s.size(); ++a) {
            for (std::size_t b = a + 1; b < s.size(); ++b) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    const double d = vertices[s[a]][c] - vertices[s[b]][c];
                    d2 += d * d;
                }
                k = std::max(k, std::sqrt(d2));
            }
        }
    }
    return k;
}

bool operator==(const EffHamTable& a, const EffHamTable& b) {
    if (a.dim != b.dim || a.vertices != b.vertices || a.values != b.values ||
        a.simplices != b.simplices || a.provenance.size() != b.provenance.size() ||
        a.failures.size() != b.failures.size())
        return false;
    for (std::size_t i = 0; i < a.provenance.size(); ++i) {
        const auto& x = a.provenance[i];
        const auto& y = b.provenance[i];
        if (x.method != y.method || x.nodes != y.nodes || x.dt != y.dt || x.alpha != y.alpha ||
            x.tau != y.tau || x.residual != y.residual || x.error_bar != y.error_bar)
            return false;
    }
    for (std::size_t i = 0; i < a.failures.size(); ++i) {
        if (a.failures[i].p != b.failures[i].p || a.failures[i].code != b.failures[i].code ||
            a.failures[i].message != b.failures[i].message)
            return false;
    }
    return true;
}

std::string to_string(TableMethod m) {
    switch (m) {
        case TableMethod::barles: return "barles";
        case TableMethod::imbert_monneau: return "imbert-monneau";
        case TableMethod::discounted: return "discounted";
    }
    return "unknown";
}

TableMethod parse_table_method(const std::string& name) {
    if (name == "barles") return TableMethod::barles;
    if (name == "im" || name == "imbert-monneau" || name == "imbert_monneau")
        return TableMethod::imbert_monneau;
    if (name == "discounted") return TableMethod::discounted;
    throw UnknownName("unknown table method '" + name +
                      "' (expected barles, imbert-monneau or discounted)");
}

// ---------------------------------------------------------------------------
// Tabulation

namespace {

struct VertexResult {
    bool ok = false;
    double value = 0.0;
    VertexProvenance prov;
    std::string code, message;
};

VertexProvenance provenance_of(const CellSolution& s, std::string method,
                               std::vector<std::size_t> nodes, double alpha) {
    VertexProvenance p;
    p.method = std::move(method);
    p.nodes = std::move(nodes);
    p.dt = s.dt * static_cast<double>(s.substeps);
    p.alpha = alpha;
    p.tau = s.tau;
    p.residual = s.residual;
    p.error_bar = s.lambda_error_bar;
    return p;
}

VertexResult solve_barles_vertex(const AnalyticHamiltonian& H, const std::vector<double>& p,
                                 const TabulateParams& prm, LongTimeOptions lt,
                                 const std::string& label) {
    const auto s = solve_barles(H, p, prm.nodes, prm.dt, prm.scheme, lt, prm.flux);
    return {true, s.lambda, provenance_of(s, label, prm.nodes, 0.0), {}, {}};
}

VertexResult solve_vertex(const AnalyticHamiltonian& H, const std::vector<double>& p,
                          const TabulateParams& prm) {
    LongTimeOptions lt = prm.longtime;
    lt.exec = Exec::serial;
    switch (prm.method) {
        case TableMethod::barles:
            return solve_barles_vertex(H, p, prm, lt, "barles");
        case TableMethod::imbert_monneau: {
            std::vector<Rational> r;
            try {
                for (double c : p) r.push_back(to_rational(c, 1000));
            } catch (const IrrationalSlope&) {
                return solve_barles_vertex(H, p, prm, lt, "barles (irrational slope)");
            }
            const auto s =
                solve_imbert_monneau(H, r, prm.nodes_per_unit, prm.dt, prm.scheme, lt, prm.flux);
            return {true, s.lambda, provenance_of(s, "imbert-monneau", {prm.nodes_per_unit}, 0.0),
                    {}, {}};
        }
        case TableMethod::discounted: {
            std::vector<Axis> axes;
            if (prm.nodes.size() != H.dim + 1)
                throw ConfigError({"discounted grid needs " + std::to_string(H.dim + 1) +
                                   " node counts"});
            for (std::size_t k = 0; k < H.dim; ++k) axes.push_back({prm.nodes[k], H.x_period[k]});
            axes.push_back({prm.nodes[H.dim], H.u_period});
            CellProblemSpec spec;
            spec.flux = make_flux(H, prm.flux);
            spec.P = p;
            spec.P.push_back(-1.0);
            spec.grid = PeriodicGrid(axes);
            spec.alpha = prm.alpha;
            spec.scheme = prm.scheme;
            spec.exec = Exec::serial;
            double rate = 0.0;
            for (std::size_t k = 0; k < axes.size(); ++k)
                rate += 2.0 * spec.flux.lip_C1t() / axes[k].step();
            const double dt = prm.dt > 0.0 ? prm.dt : 1.0 / rate;
            const auto Nt = static_cast<std::size_t>(std::ceil(H.time_period / dt - 1e-9));
            spec.time = {H.time_period / static_cast<double>(Nt), Nt};
            const auto s = solve_discounted(spec, prm.period_tol, prm.max_periods);
            return {true, s.lambda, provenance_of(s, "discounted", prm.nodes, prm.alpha), {}, {}};
        }
    }
    return {};
}

}  // namespace

EffHamTable tabulate(const AnalyticHamiltonian& H, const std::vector<std::vector<double>>& p_set,
                     const TabulateParams& params) {
    if (p_set.empty()) throw ConfigError({"p-set is empty"});
    for (const auto& p : p_set) {
        if (p.size() != H.dim)
            throw ConfigError({"every p needs " + std::to_string(H.dim) + " components"});
    }
    triangulate(p_set, H.dim);  // rejects duplicates before any solve

    const auto n = static_cast<std::ptrdiff_t>(p_set.size());
    std::vector<VertexResult> results(p_set.size());
    const int workers = params.workers > 0 ? static_cast<int>(params.workers) : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto& r = results[static_cast<std::size_t>(i)];
        try {
            r = solve_vertex(H, p_set[static_cast<std::size_t>(i)], params);
        } catch (const Error& e) {
            r.ok = false;
            r.code = e.code();
            r.message = e.what();
        } catch (const std::exception& e) {
            r.ok = false;
            r.code = "Error";
            r.message = e.what();
        }
    }

    EffHamTable t;
    t.dim = H.dim;
    for (std::size_t i = 0; i < p_set.size(); ++i) {
        if (results[i].ok) {
            t.vertices.push_back(p_set[i]);
            t.values.push_back(results[i].value);
            t.provenance.push_back(results[i].prov);
        } else {
            t.failures.push_back({p_set[i], results[i].code, results[i].message});
        }
    }
    if (t.vertices.size() >= t.dim + 1) {
        try {
            t.simplices = triangulate(t.vertices, t.dim);
        } catch (const ConfigError&) {
            t.simplices.clear();
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Interpolation

namespace {

/// Barycentric weights of p in simplex s; false if the simplex is degenerate.
bool barycentric(const EffHamTable& t, const std::vector<std::size_t>& s,
                 std::span<const double> p, double* w) {
    if (t.dim == 1) {
        const double a = t.vertices[s[0]][0], b = t.vertices[s[1]][0];
        if (a == b) return false;
        w[1] = (p[0] - a) / (b - a);
        w[0] = 1.0 - w[1];
        return true;
    }
    const auto& A = t.vertices[s[0]];
    const auto& B = t.vertices[s[1]];
    const auto& C = t.vertices[s[2]];
    const double det = (B[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (B[1] - A[1]);
    if (det == 0.0) return false;
    w[1] = ((p[0] - A[0]) * (C[1] - A[1]) - (C[0] - A[0]) * (p[1] - A[1])) / det;
    w[2] = ((B[0] - A[0]) * (p[1] - A[1]) - (p[0] - A[0]) * (B[1] - A[1])) / det;
    w[0] = 1.0 - w[1] - w[2];
    return true;
}

double hull_tolerance(const EffHamTable& t) { return 1e-12 * std::max(1.0, t.max_diameter()); }

std::ptrdiff_t find_vertex(const EffHamTable& t, std::span<const double> p) {
    for (std::size_t i = 0; i < t.vertices.size(); ++i) {
        if (std::equal(p.begin(), p.end(), t.vertices[i].begin()))
            return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
}

std::ptrdiff_t containing_simplex(const EffHamTable& t, std::span<const double> p, double* w) {
    const double tol = hull_tolerance(t) / std::max(1e-300, t.max_diameter());
    for (std::size_t k = 0; k < t.simplices.size(); ++k) {
        if (!barycentric(t, t.simplices[k], p, w)) continue;
        bool inside = true;
        for (std::size_t j = 0; j <= t.dim; ++j) inside = inside && w[j] >= -tol;
        if (inside) return static_cast<std::ptrdiff_t>(k);
    }
    return -1;
}

}  // namespace

bool in_hull(const EffHamTable& table, std::span<const double> p) {
    if (p.size() != table.dim) return false;
    double w[3];
    return find_vertex(table, p) >= 0 || containing_simplex(table, p, w) >= 0;
}

double interpolate(const EffHamTable& table, std::span<const double> p) {
    if (p.size() != table.dim)
        throw ConfigError({"interpolation point needs " + std::to_string(table.dim) + " components"});
    if (const auto v = find_vertex(table, p); v >= 0) return table.values[static_cast<std::size_t>(v)];
    double w[3];
    // Simplices are sorted, so the first hit is the lexicographically smallest.
    if (const auto k = containing_simplex(table, p, w); k >= 0) {
        const auto& s = table.simplices[static_cast<std::size_t>(k)];
        double v = 0.0;
        for (std::size_t j = 0; j <= table.dim; ++j) v += w[j] * table.values[s[j]];
        return v;
    }
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.vertices.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t c = 0; c < table.dim; ++c) {
            const double d = table.vertices[i][c] - p[c];
            d2 += d * d;
        }
        if (d2 < best) {
            best = d2;
            nearest = i;
        }
    }
    std::ostringstream msg;
    msg << std::setprecision(17) << "p = (";
    for (std::size_t c = 0; c < p.size(); ++c) msg << (c ? ", " : "") << p[c];
    msg << ") lies outside the table hull; nearest vertex " << nearest;
    throw OutOfHull(msg.str(), nearest);
}

// ---------------------------------------------------------------------------
// Verification

TableReport verify_table(const EffHamTable& table, double F_lip, double margin) {
    TableReport rep;
    for (const auto& s : table.simplices) {
        for (std::size_t a = 0; a < s.size(); ++a) {
            for (std::size_t b = a + 1; b < s.size(); ++b) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < table.dim; ++c) {
                    const double d = table.vertices[s[a]][c] - table.vertices[s[b]][c];
                    d2 += d * d;
                }
                const double slope = std::abs(table.values[s[a]] - table.values[s[b]]) / std::sqrt(d2);
                rep.max_edge_slope = std::max(rep.max_edge_slope, slope);
                if (slope > F_lip + margin) ++rep.lipschitz_violations;
            }
        }
    }
    rep.lipschitz_pass = rep.lipschitz_violations == 0;

    double c2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.size(); ++i) {
        double norm = 0.0;
        for (double c : table.vertices[i]) norm += c * c;
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        rep.coercivity_checked = true;
        c2 = std::min(c2, table.values[i] / norm);
    }
    if (rep.coercivity_checked) {
        rep.coercivity_C2 = c2;
        rep.coercivity_pass = c2 > 0.0;
    }

    if (table.dim == 1 && table.size() >= 3) {
        std::vector<std::size_t> order(table.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return table.vertices[a][0] < table.vertices[b][0];
        });
        for (std::size_t i = 1; i + 1 < order.size(); ++i) {
            const double x0 = table.vertices[order[i - 1]][0], x1 = table.vertices[order[i]][0],
                         x2 = table.vertices[order[i + 1]][0];
            const double v0 = table.values[order[i - 1]], v1 = table.values[order[i]],
                         v2 = table.values[order[i + 1]];
            rep.second_differences.push_back(
                2.0 * ((v2 - v1) / (x2 - x1) - (v1 - v0) / (x1 - x0)) / (x2 - x0));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Persistence

std::string to_json(const EffHamTable& t) {
    ordered_json j;
    j["dim"] = t.dim;
    j["vertices"] = t.vertices;
    j["values"] = t.values;
    j["simplices"] = t.simplices;
    ordered_json prov = ordered_json::array();
    for (const auto& p : t.provenance) {
        ordered_json e;
        e["method"] = p.method;
        e["nx"] = p.nodes.empty() ? 0 : p.nodes.front();
        e["ny"] = p.nodes.size() > 1 ? p.nodes.back() : 0;
        e["nodes"] = p.nodes;
        e["dt"] = p.dt;
        e["alpha"] = p.alpha;
        e["tau"] = p.tau;
        e["residual"] = p.residual;
        e["error_bar"] = p.error_bar;
        prov.push_back(std::move(e));
    }
    j["provenance"] = std::move(prov);
    ordered_json fail = ordered_json::array();
    for (const auto& f : t.failures) fail.push_back({{"p", f.p}, {"code", f.code}, {"message", f.message}});
    j["failures"] = std::move(fail);
    return j.dump(1) + "\n";
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw FormatError(path + ": " + what, 0);
}

double finite_number(const ordered_json& v, const std::string& path) {
    if (!v.is_number()) bad(path, "expected a finite number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) bad(path, "expected a finite number");
    return x;
}

std::size_t count(const ordered_json& v, const std::string& path) {
    if (!v.is_number_unsigned()) bad(path, "expected a non-negative integer");
    return v.get<std::size_t>();
}

const ordered_json& field(const ordered_json& obj, const char* key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) bad(path, std::string("missing key '") + key + "'");
    return *it;
}

}  // namespace

EffHamTable from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(
                                         std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto > 0 ? upto - 1 : 0), '\n'));
        throw FormatError(std::string("malformed JSON at line ") + std::to_string(line) + ": " +
                              e.what(),
                          line);
    }
    if (!j.is_object()) bad("$", "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "dim" && key != "vertices" && key != "values" && key != "simplices" &&
            key != "provenance" && key != "failures")
            bad("$." + key, "unknown key");
    }
    EffHamTable t;
    t.dim = count(field(j, "dim", "$"), "$.dim");
    if (t.dim != 1 && t.dim != 2) bad("$.dim", "must be 1 or 2");
    const auto& V = field(j, "vertices", "$");
    const auto& F = field(j, "values", "$");
    const auto& S = field(j, "simplices", "$");
    if (!V.is_array()) bad("$.vertices", "expected an array");
    if (!F.is_array()) bad("$.values", "expected an array");
    if (!S.is_array()) bad("$.simplices", "expected an array");
    if (V.size() != F.size()) bad("$.values", "length differs from vertices");
    for (std::size_t i = 0; i < V.size(); ++i) {
        const std::string path = "$.vertices[" + std::to_string(i) + "]";
        if (!V[i].is_array() || V[i].size() != t.dim)
            bad(path, "expected " + std::to_string(t.dim) + " coordinates");
        std::vector<double> p;
        for (std::size_t c = 0; c < t.dim; ++c)
            p.push_back(finite_number(V[i][c], path + "[" + std::to_string(c) + "]"));
        for (std::size_t k = 0; k < t.vertices.size(); ++k) {
            if (t.vertices[k] == p) bad(path, "duplicate of vertex " + std::to_string(k));
        }
        t.vertices.push_back(std::move(p));
        t.values.push_back(finite_number(F[i], "$.values[" + std::to_string(i) + "]"));
    }
    for (std::size_t s = 0; s < S.size(); ++s) {
        const std::string path = "$.simplices[" + std::to_string(s) + "]";
        if (!S[s].is_array() || S[s].size() != t.dim + 1)
            bad(path, "expected " + std::to_string(t.dim + 1) + " vertex indices");
        std::vector<std::size_t> idx;
        for (std::size_t c = 0; c <= t.dim; ++c) {
            const std::size_t k = count(S[s][c], path + "[" + std::to_string(c) + "]");
            if (k >= t.vertices.size()) bad(path, "vertex index out of range");
            idx.push_back(k);
        }
        t.simplices.push_back(std::move(idx));
    }
    if (const auto it = j.find("provenance"); it != j.end()) {
        if (!it->is_array() || it->size() != t.vertices.size())
            bad("$.provenance", "expected one record per vertex");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "$.provenance[" + std::to_string(i) + "]";
            const auto& e = (*it)[i];
            if (!e.is_object()) bad(path, "expected an object");
            VertexProvenance p;
            const auto& m = field(e, "method", path);
            if (!m.is_string()) bad(path + ".method", "expected a string");
            p.method = m.get<std::string>();
            if (const auto nd = e.find("nodes"); nd != e.end()) {
                if (!nd->is_array()) bad(path + ".nodes", "expected an array");
                for (std::size_t c = 0; c < nd->size(); ++c)
                    p.nodes.push_back(count((*nd)[c], path + ".nodes[" + std::to_string(c) + "]"));
            }
            p.dt = finite_number(field(e, "dt", path), path + ".dt");
            p.alpha = finite_number(field(e, "alpha", path), path + ".alpha");
            p.tau = finite_number(field(e, "tau", path), path + ".tau");
            p.residual = finite_number(field(e, "residual", path), path + ".residual");
            p.error_bar = finite_number(field(e, "error_bar", path), path + ".error_bar");
            t.provenance.push_back(std::move(p));
        }
    }
    if (const auto it = j.find("failures"); it != j.end()) {
        if (!it->is_array()) bad("$.failures", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "$.failures[" + std::to_string(i) + "]";
            const auto& e = (*it)[i];
            FailedVertex f;
            const auto& p = field(e, "p", path);
            if (!p.is_array()) bad(path + ".p", "expected an array");
            for (std::size_t c = 0; c < p.size(); ++c)
                f.p.push_back(finite_number(p[c], path + ".p[" + std::to_string(c) + "]"));
            const auto& code = field(e, "code", path);
            const auto& msg = field(e, "message", path);
            if (!code.is_string() || !msg.is_string()) bad(path, "code and message must be strings");
            f.code = code.get<std::string>();
            f.message = msg.get<std::string>();
            t.failures.push_back(std::move(f));
        }
    }
    return t;
}

void save(const EffHamTable& table, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os << to_json(table);
    if (!os) throw IoError("write to '" + path.string() + "' failed");
}

EffHamTable load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    return from_json(ss.str());
}

void export_csv(const EffHamTable& t, std::ostream& os) {
    for (std::size_t c = 0; c < t.dim; ++c) os << "p" << (c + 1) << ",";
    os << "value,error_bar\n" << std::setprecision(17);
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (double c : t.vertices[i]) os << c << ",";
        os << t.values[i] << "," << (i < t.provenance.size() ? t.provenance[i].error_bar : 0.0)
           << "\n";
    }
}

// ---------------------------------------------------------------------------
// p-set mini-language

namespace {

double parse_number(const std::string& s, const std::string& item) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError({"p-set item '" + item + "': '" + s + "' is not a number"});
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::vector<double> parse_p_set(const std::string& text) {
    std::vector<double> pts;
    for (const auto& item : split(text, ',')) {
        if (item.empty()) throw ConfigError({"empty p-set item in '" + text + "'"});
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            pts.push_back(parse_number(parts[0], item));
            continue;
        }
        if (parts.size() < 3 || parts.size() > 4)
            throw ConfigError({"p-set item '" + item + "' must be v, a:b:n or a:b:refined@c[:n]"});
        const double a = parse_number(parts[0], item), b = parse_number(parts[1], item);
        if (!(b > a)) throw ConfigError({"p-set item '" + item + "' needs a < b"});
        std::size_t n = 13;
        std::vector<double> breaks;
        if (parts[2].rfind("refined", 0) == 0) {
            auto marks = split(parts[2], '@');
            if (marks.size() < 2) throw ConfigError({"p-set item '" + item + "' lists no breakpoint"});
            for (std::size_t m = 1; m < marks.size(); ++m) {
                std::string c = marks[m];
                bool both = false;
                if (c.rfind("+-", 0) == 0) {
                    both = true;
                    c = c.substr(2);
                } else if (c.rfind("\xC2\xB1", 0) == 0) {  // UTF-8 plus-minus sign
                    both = true;
                    c = c.substr(2);
                }
                const double v = parse_number(c, item);
                breaks.push_back(v);
                if (both) breaks.push_back(-v);
            }
            if (parts.size() == 4) n = static_cast<std::size_t>(parse_number(parts[3], item));
        } else {
            if (parts.size() != 3) throw ConfigError({"p-set item '" + item + "' has extra fields"});
            const double nn = parse_number(parts[2], item);
            if (nn < 2 || nn != std::floor(nn))
                throw ConfigError({"p-set item '" + item + "' needs an integer count >= 2"});
            n = static_cast<std::size_t>(nn);
        }
        if (n < 2) throw ConfigError({"p-set item '" + item + "' needs at least 2 points"});
        const double s = (b - a) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) pts.push_back(i + 1 == n ? b : a + static_cast<double>(i) * s);
        for (double c : breaks) {
            if (c < a || c > b) continue;
            pts.push_back(c);
            for (int k = 1; k <= 4; ++k) {
                const double d = s / std::ldexp(1.0, k);
                if (c - d >= a) pts.push_back(c - d);
                if (c + d <= b) pts.push_back(c + d);
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double v : pts) {
        if (v == 0.0) v = 0.0;  // fold -0 into +0
        if (out.empty() || std::abs(v - out.back()) > 1e-12 * std::max(1.0, std::abs(v)))
            out.push_back(v);
    }
    return out;
}

}  // namespace effham
