#include "effham/highorder.hpp"

#include <array>
#include <string>
#include <vector>

#include "effham/errors.hpp"
#include "effham/kernels.hpp"

namespace effham {

double weno_one_sided(const GridFunction& f, std::size_t axis, Bias bias, std::span<const long> i,
                      double epsilon_w) {
    const auto& g = f.grid();
    if (g.axis(axis).count < 6)
        throw GridTooCoarse("WENO5 needs at least 6 nodes along axis " + std::to_string(axis));
    std::vector<long> j(i.begin(), i.end());
    const long i0 = j[axis];
    // d(m) = forward difference at offset m along the axis.
    auto d = [&](long m) {
        j[axis] = i0 + m;
        return fwd_diff(f, axis, j);
    };
    if (bias == Bias::minus)
        return kernels::weno5_combine(d(-3), d(-2), d(-1), d(0), d(1), epsilon_w);
    return kernels::weno5_combine(d(2), d(1), d(0), d(-1), d(-2), epsilon_w);
}

WenoWorkspace::WenoWorkspace(const PeriodicGrid& g, double eps)
    : grid(g), epsilon_w(eps), stage1(g), stage2(g), work(g) {
    if (!(eps > 0.0)) throw ConfigError({"epsilon_w must be positive"});
}

GridFunction rk3_step(const GridRhs& rhs, const GridFunction& f, double dt) {
    const std::size_t n = f.size();
    GridFunction f1 = rhs(f);
    for (std::size_t l = 0; l < n; ++l) f1[l] = f[l] + dt * f1[l];
    GridFunction f2 = rhs(f1);
    for (std::size_t l = 0; l < n; ++l) f2[l] = 0.75 * f[l] + 0.25 * (f1[l] + dt * f2[l]);
    GridFunction f3 = rhs(f2);
    for (std::size_t l = 0; l < n; ++l) f3[l] = f[l] / 3.0 + 2.0 / 3.0 * (f2[l] + dt * f3[l]);
    return f3;
}

double rk3_step(const std::function<double(double)>& rhs, double y, double dt) {
    const double y1 = y + dt * rhs(y);
    const double y2 = 0.75 * y + 0.25 * (y1 + dt * rhs(y1));
    return y / 3.0 + 2.0 / 3.0 * (y2 + dt * rhs(y2));
}

}  // namespace effham
