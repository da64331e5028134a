#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effham/errors.hpp"
#include "effham/grid.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/kernels.hpp"
#include "effham/numflux.hpp"

namespace effham {

enum class Statistic { median, mean };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);
std::string to_string(Statistic s);
Statistic parse_statistic(const std::string& name);

/// Exact rational number num/den with den > 0, kept in lowest terms.
struct Rational {
    long num = 0;
    long den = 1;
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Parses "a/b", an integer, or a finite decimal such as "1.3" exactly.
/// Throws IrrationalSlope for anything else.
Rational parse_rational(std::string_view text);
/// Continued-fraction recovery of a rational with denominator <= max_den
/// within 1e-12 relative; throws IrrationalSlope if none exists.
Rational to_rational(double x, long max_den = 1000000);

/// Discounted / long-time cell problem for the level-set flux on a grid with
/// axes (x_0, ..., x_{N-1}, y).
struct CellProblemSpec {
    NumericalHamiltonian flux;
    std::vector<double> P;  ///< (p_x..., p_y)
    PeriodicGrid grid;
    TimeGrid time;
    double alpha = 0.0;
    Scheme scheme = Scheme::implicit_euler;
    Exec exec = Exec::parallel;
    double inner_tol = 1e-11;
    std::size_t max_inner = 2000;
};

struct HistoryPoint {
    double tau = 0.0;
    double stat = 0.0;             ///< median or mean of the field
    double scaled = 0.0;           ///< stat / tau
    double node_minus_stat = 0.0;  ///< field at node 0 minus stat
};

struct CellSolution {
    std::string method;
    /// Discounted: the periodic orbit W^0..W^{N_t} (W^0 only when the orbit
    /// is too large to keep). Long-time routes: the final field.
    std::vector<GridFunction> W;
    double lambda = 0.0;  ///< approximation of the effective value Fbar(P)
    double lambda_error_bar = 0.0;
    /// Long-time routes: -stat/tau at the final time.
    double lambda_scaled = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;  ///< periods (discounted) or nominal steps
    std::size_t inner_iterations = 0;
    std::vector<HistoryPoint> history;
    std::vector<double> oscillation;  ///< per stored field or history record
    double max_oscillation = 0.0;
    bool converged = false;
    double dt = 0.0;  ///< step actually used
    std::size_t substeps = 1;
    double tau = 0.0;
};

class MaxPeriodsExceeded : public Error {
public:
    MaxPeriodsExceeded(const std::string& what, CellSolution last, double defect)
        : Error("MaxPeriodsExceeded", what), last_(std::move(last)), defect_(defect) {}
    const CellSolution& last() const noexcept { return last_; }
    double defect() const noexcept { return defect_; }

private:
    CellSolution last_;
    double defect_;
};

/// The long-time statistic did not settle within tau_max; carries the run.
class NotConverged : public Error {
public:
    NotConverged(const std::string& what, CellSolution solution)
        : Error("NotConverged", what), solution_(std::move(solution)) {}
    const CellSolution& solution() const noexcept { return solution_; }

private:
    CellSolution solution_;
};

/// g(t, x_i, y_j, D+W + P, D-W + P) at multi-index i with periodic wrap.
double stencil_S(const NumericalHamiltonian& flux, std::span<const double> P, const GridFunction& W,
                 double t, std::span<const long> i);

/// One implicit step (W - W_prev)/dt + alpha W + S(t, [W]) = 0 by damped
/// fixed-point iteration; throws InnerIterationDiverged.
GridFunction implicit_step(const NumericalHamiltonian& flux, std::span<const double> P,
                           double alpha, const GridFunction& W_prev, double t, double dt,
                           double inner_tol, std::size_t max_inner);

/// Time-periodic solution of the discounted scheme. lambda = -mean(alpha W^0),
/// error bar alpha * oscillation(W^0).
CellSolution solve_discounted(const CellProblemSpec& spec, double period_tol,
                              std::size_t max_periods,
                              const std::optional<GridFunction>& W0 = std::nullopt);

struct LongTimeOptions {
    double tau_max = 60.0;
    Statistic stat = Statistic::median;
    double window = 5.0;  ///< trailing window (in tau) for the convergence test
    /// Stop once stat/tau varies by <= tol over the window. tol <= 0 runs to
    /// tau_max and never throws NotConverged.
    double tol = 0.0;
    double record_every = 0.01;  ///< rounded to a whole number of nominal steps
    double weno_eps = 1e-6;
    Exec exec = Exec::parallel;
};

/// Marches V^{n+1} = V^n - dt S(t_n, [V^n]) (or the RK3/implicit variant)
/// from V0. A nominal dt above the scheme's bound is split into equal
/// substeps; dt <= 0 selects the bound itself. lambda is minus the
/// least-squares slope of stat(V) against tau over [tau/2, tau].
CellSolution solve_longtime(const CellProblemSpec& spec, const GridFunction& V0,
                            const LongTimeOptions& opt);

/// Smallest positive integers q_k with p_k q_k x_period_k in u_period Z.
std::vector<long> im_period(const AnalyticHamiltonian& H, std::span<const Rational> p);

/// v_t + H(t, x, v + p.x, p + Dv) = 0, v(0) = 0 on the q-periodic cell.
CellSolution solve_imbert_monneau(const AnalyticHamiltonian& H, std::span<const Rational> p,
                                  std::size_t nodes_per_unit, double dt, Scheme scheme,
                                  const LongTimeOptions& opt, FluxKind flux = FluxKind::godunov,
                                  std::vector<double> sigma = {});

/// w_t + F(t, x, y, p + D_x w, -1 + D_y w) = 0, w(0) = 0 on
/// [0, x_period] x [0, u_period] (or [0, 1] in y with full_y_period).
/// `nodes` lists the node counts per x axis followed by the y count.
CellSolution solve_barles(const AnalyticHamiltonian& H, std::span<const double> p,
                          std::span<const std::size_t> nodes, double dt, Scheme scheme,
                          const LongTimeOptions& opt, FluxKind flux = FluxKind::godunov,
                          bool full_y_period = false);

/// sup over (i, n) of |(W^{n+1} - W^n)/dt + S(t_n, [W^{n+1}]) - lambda| for the
/// orbit W^0..W^{N_t} with t_n = t0 + n dt.
double residual_ergodic(const NumericalHamiltonian& flux, std::span<const double> P, double lambda,
                        std::span<const GridFunction> W, double dt, double t0 = 0.0);

}  // namespace effham
