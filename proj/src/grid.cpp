#include "effham/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "effham/errors.hpp"

namespace effham {

PeriodicGrid::PeriodicGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw ConfigError({"grid needs at least one axis"});
    std::vector<std::string> bad;
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        if (axes_[k].count == 0) bad.push_back("axis " + std::to_string(k) + " has zero nodes");
        if (!(axes_[k].period > 0.0) || !std::isfinite(axes_[k].period))
            bad.push_back("axis " + std::to_string(k) + " period must be positive");
    }
    if (!bad.empty()) throw ConfigError(bad);
    strides_.assign(axes_.size(), 1);
    for (std::size_t k = axes_.size() - 1; k > 0; --k)
        strides_[k - 1] = strides_[k] * axes_[k].count;
    size_ = strides_[0] * axes_[0].count;
}

double PeriodicGrid::min_step() const {
    double h = std::numeric_limits<double>::infinity();
    for (const auto& a : axes_) h = std::min(h, a.step());
    return h;
}

std::size_t PeriodicGrid::index(std::span<const long> multi) const {
    std::size_t l = 0;
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        const long n = static_cast<long>(axes_[k].count);
        long i = multi[k] % n;
        if (i < 0) i += n;
        l += static_cast<std::size_t>(i) * strides_[k];
    }
    return l;
}

void PeriodicGrid::coordinates(std::size_t linear, std::span<double> out) const {
    for (std::size_t k = 0; k < axes_.size(); ++k) out[k] = coordinate(linear, k);
}

std::size_t PeriodicGrid::neighbor(std::size_t linear, std::size_t k, long offset) const {
    const long n = static_cast<long>(axes_[k].count);
    const long i = static_cast<long>(coordinate_index(linear, k));
    long j = (i + offset) % n;
    if (j < 0) j += n;
    return linear + static_cast<std::size_t>(j) * strides_[k] -
           static_cast<std::size_t>(i) * strides_[k];
}

bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) {
    if (a.axes_.size() != b.axes_.size()) return false;
    for (std::size_t k = 0; k < a.axes_.size(); ++k) {
        if (a.axes_[k].count != b.axes_[k].count || a.axes_[k].period != b.axes_[k].period)
            return false;
    }
    return true;
}

GridFunction::GridFunction(PeriodicGrid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.size(), fill) {}

GridFunction::GridFunction(PeriodicGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ConfigError({"grid function has " + std::to_string(values_.size()) +
                           " values for a grid of " + std::to_string(grid_.size()) + " nodes"});
    }
}

bool GridFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double fwd_diff(const GridFunction& f, std::size_t axis, std::span<const long> i) {
    const auto& g = f.grid();
    const std::size_t l = g.index(i);
    return (f[g.neighbor(l, axis, 1)] - f[l]) / g.step(axis);
}

GridFunction sample(const FieldFn& fn, const PeriodicGrid& grid, double t) {
    GridFunction f(grid);
    std::vector<double> x(grid.dim());
    for (std::size_t l = 0; l < grid.size(); ++l) {
        grid.coordinates(l, x);
        f[l] = fn(t, x);
    }
    return f;
}

double oscillation(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

double median(std::span<const double> v) {
    if (v.empty()) return 0.0;
    std::vector<double> tmp(v.begin(), v.end());
    const auto k = (tmp.size() - 1) / 2;
    std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(k), tmp.end());
    return tmp[k];
}

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

void write_csv(const GridFunction& f, std::ostream& os) {
    const auto& g = f.grid();
    os << "# grid dims=" << g.dim() << " counts=";
    for (std::size_t k = 0; k < g.dim(); ++k) os << (k ? "," : "") << g.axis(k).count;
    os << " periods=";
    os << std::setprecision(17);
    for (std::size_t k = 0; k < g.dim(); ++k) os << (k ? "," : "") << g.axis(k).period;
    os << "\n";
    for (std::size_t k = 0; k < g.dim(); ++k) os << "x" << k << ",";
    os << "value\n";
    std::vector<double> x(g.dim());
    for (std::size_t l = 0; l < g.size(); ++l) {
        g.coordinates(l, x);
        for (double c : x) os << c << ",";
        os << f[l] << "\n";
    }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

double parse_double(const std::string& s, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError("not a number: '" + s + "'", line);
    }
}

}  // namespace

GridFunction read_csv(std::istream& is) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(is, line) || line.rfind("# grid ", 0) != 0)
        throw FormatError("missing '# grid' metadata line", lineno);
    std::vector<std::size_t> counts;
    std::vector<double> periods;
    for (const auto& tok : split(line.substr(7), ' ')) {
        if (tok.rfind("counts=", 0) == 0) {
            for (const auto& c : split(tok.substr(7), ','))
                counts.push_back(static_cast<std::size_t>(parse_double(c, lineno)));
        } else if (tok.rfind("periods=", 0) == 0) {
            for (const auto& c : split(tok.substr(8), ',')) periods.push_back(parse_double(c, lineno));
        }
    }
    if (counts.empty() || counts.size() != periods.size())
        throw FormatError("inconsistent counts/periods in metadata", lineno);
    std::vector<Axis> axes;
    for (std::size_t k = 0; k < counts.size(); ++k) axes.push_back({counts[k], periods[k]});
    PeriodicGrid grid(axes);
    ++lineno;
    if (!std::getline(is, line)) throw FormatError("missing header row", lineno);
    std::vector<double> values;
    values.reserve(grid.size());
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != grid.dim() + 1)
            throw FormatError("expected " + std::to_string(grid.dim() + 1) + " columns", lineno);
        const double v = parse_double(cols.back(), lineno);
        if (!std::isfinite(v)) throw FormatError("non-finite value", lineno);
        values.push_back(v);
    }
    if (values.size() != grid.size())
        throw FormatError("expected " + std::to_string(grid.size()) + " rows, got " +
                              std::to_string(values.size()),
                          lineno);
    return GridFunction(std::move(grid), std::move(values));
}

}  // namespace effham
