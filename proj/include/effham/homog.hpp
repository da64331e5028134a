#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "effham/effham_table.hpp"
#include "effham/grid.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/kernels.hpp"
#include "effham/numflux.hpp"

namespace effham {

/// u0(x) = slope . x + periodic(x).
struct InitialDatum {
    std::string name = "affine";
    std::vector<double> slope;
    /// Periodic part; empty means zero.
    std::function<double(std::span<const double> x)> periodic;
    /// Period of the periodic part along each axis (ignored when it is zero).
    std::vector<double> period;
    /// Lipschitz bound of the periodic part (sup |D periodic|).
    double periodic_lip = 0.0;

    std::size_t dim() const noexcept { return slope.size(); }
    double operator()(std::span<const double> x) const;
};

InitialDatum affine_datum(std::vector<double> slope);
/// amplitude * sin(2 pi x) in one dimension.
InitialDatum sine_datum(double amplitude = 1.0);
/// "affine:p" (1D), "affine:p1,p2" (2D), "sin" or "sin:amplitude".
InitialDatum parse_initial_datum(const std::string& text);

/// Evolution of the periodic remainder w, with u = slope . x + w.
struct Trajectory {
    PeriodicGrid grid;
    std::vector<double> slope;
    std::vector<double> times;
    std::vector<GridFunction> frames;  ///< remainder w at each recorded time
    double dt = 0.0;                   ///< step actually used
    std::size_t steps = 0;

    const GridFunction& final_frame() const { return frames.back(); }
    /// Full solution u = slope . x + w at frame k.
    GridFunction full(std::size_t k) const;
};

struct MarchOptions {
    /// Nominal step; <= 0 selects the CFL step. Larger steps are split so
    /// that the march still lands exactly on T.
    double dt = 0.0;
    /// Record a frame every `record_every` in time; <= 0 keeps only 0 and T.
    double record_every = 0.0;
    Exec exec = Exec::parallel;
};

/// Lax-Friedrichs march of u_t + Hbar(Du) = 0 with the piecewise-linear
/// table interpolant (sigma = largest edge slope). Throws GradientOutOfHull
/// when a one-sided slope leaves the table hull.
Trajectory solve_homogenized(const EffHamTable& table, const InitialDatum& u0,
                             const PeriodicGrid& grid, double T, const MarchOptions& opt = {});

/// The table interpolant as a state-free Hamiltonian with u_lip = 0 and
/// lip_C1 = largest edge slope.
AnalyticHamiltonian table_hamiltonian(const EffHamTable& table);

/// u_t + H(t/eps, x/eps, u/eps, Du) = 0. The domain period along each axis
/// must be a multiple of eps x_period and of the datum's period, the slope
/// must satisfy slope_k L_k / eps in u_period Z, and h <= eps/nodes_per_eps.
Trajectory solve_oscillatory(const AnalyticHamiltonian& H, double eps, const InitialDatum& u0,
                             const PeriodicGrid& grid, double T, std::size_t nodes_per_eps = 50,
                             FluxKind flux = FluxKind::godunov, const MarchOptions& opt = {});

struct RateRow {
    double eps = 0.0;
    double h = 0.0;
    double dt = 0.0;
    double sup_error = 0.0;
    double pair_slope = 0.0;  ///< NaN on the first row or when an error vanishes
};

struct RateReport {
    std::vector<RateRow> rows;
    double slope = 0.0;   ///< least-squares slope of log E against log eps
    bool flagged = false; ///< fewer than two errors above 1e-12; slope is NaN
    std::string note;
};

struct RateOptions {
    double T = 0.5;
    std::vector<double> domain = {1.0};  ///< domain period per axis
    std::size_t nodes_per_eps = 50;
    double dt = 0.0;  ///< <= 0: CFL for both solvers
    FluxKind flux = FluxKind::godunov;
    /// > 1 runs the eps values concurrently with serial kernels.
    std::size_t workers = 1;
};

/// For each eps: oscillatory and homogenized solves on the grid with
/// h = eps / nodes_per_eps and E(eps) = sup |u_eps(T) - u_hom(T)|.
RateReport rate_experiment(const AnalyticHamiltonian& H, const EffHamTable& table,
                           const InitialDatum& u0, const std::vector<double>& eps_list,
                           const RateOptions& opt = {});

/// Uniform vertices of spacing `step` covering |p - slope| <= periodic_lip +
/// margin, plus the slope itself (1D).
std::vector<double> rate_p_set(const InitialDatum& u0, double step = 0.25, double margin = 0.5);

}  // namespace effham
