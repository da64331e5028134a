#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "effham/grid.hpp"

namespace effham {

enum class Bias { minus, plus };

/// Fifth-order HJ-WENO approximation of the first derivative of f along
/// `axis` at multi-index i, left-biased (minus) or right-biased (plus).
/// Throws GridTooCoarse when the axis has fewer than 6 nodes.
double weno_one_sided(const GridFunction& f, std::size_t axis, Bias bias, std::span<const long> i,
                      double epsilon_w = 1e-6);

/// Stage storage for RK3 steps on one grid.
struct WenoWorkspace {
    explicit WenoWorkspace(const PeriodicGrid& g, double epsilon_w = 1e-6);
    PeriodicGrid grid;
    double epsilon_w;
    GridFunction stage1, stage2, work;
};

using GridRhs = std::function<GridFunction(const GridFunction&)>;

/// Shu-Osher TVD RK3 for f' = rhs(f):
///   f1 = f + dt rhs(f)
///   f2 = 3/4 f + 1/4 (f1 + dt rhs(f1))
///   f3 = 1/3 f + 2/3 (f2 + dt rhs(f2))
GridFunction rk3_step(const GridRhs& rhs, const GridFunction& f, double dt);

/// Scalar form of the same combination, for ODE checks.
double rk3_step(const std::function<double(double)>& rhs, double y, double dt);

}  // namespace effham
