#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "effham/grid.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/kernels.hpp"
#include "effham/numflux.hpp"

namespace effham {

/// Discrete spatial operator S(t, [w]) of a monotone scheme
/// w_t + S(t, [w]) = 0 on a periodic grid.
///
/// `evaluate` consumes one-sided derivatives (first-order or WENO) and is the
/// production kernel. `evaluate_node` recomputes a single node from first-order
/// differences through the public flux API and serves as the serial reference.
class SpatialOperator {
public:
    virtual ~SpatialOperator() = default;

    const PeriodicGrid& grid() const noexcept { return stencil_.grid(); }
    const Stencil& stencil() const noexcept { return stencil_; }

    /// Largest forward-Euler step that keeps the first-order scheme monotone.
    virtual double cfl_dt() const = 0;
    virtual bool time_dependent() const = 0;
    virtual void evaluate(double t, std::span<const double> w, const OneSided& d,
                          std::span<double> out, Exec exec) const = 0;
    virtual double evaluate_node(double t, std::span<const double> w, std::size_t l) const = 0;

protected:
    explicit SpatialOperator(const PeriodicGrid& grid) : stencil_(grid) {}
    Stencil stencil_;
};

/// S = g(t, x_i, y_j, D+W + P, D-W + P) for the level-set (Barles) form on
/// a grid with axes (x_0, ..., x_{N-1}, y).
class LevelSetOperator final : public SpatialOperator {
public:
    LevelSetOperator(NumericalHamiltonian flux, std::vector<double> P, const PeriodicGrid& grid);

    double cfl_dt() const override;
    bool time_dependent() const override { return flux_.time_dependent(); }
    void evaluate(double t, std::span<const double> w, const OneSided& d, std::span<double> out,
                  Exec exec) const override;
    double evaluate_node(double t, std::span<const double> w, std::size_t l) const override;

    const NumericalHamiltonian& flux() const noexcept { return flux_; }
    std::span<const double> P() const noexcept { return P_; }

private:
    NumericalHamiltonian flux_;
    std::vector<double> P_;
    std::vector<double> coords_;  // node-major (x..., y)
    std::vector<double> a_, b_;   // cached transport coefficients (time-independent only)
};

/// S = H(t/eps, x/eps, (w + p.x)/eps, p + Dw) discretised on the graph of the
/// unknown, with the u-argument evaluated exactly at every node. eps = 1 and
/// slope p gives the Imbert-Monneau cell operator; general eps gives the
/// oscillatory equation for the periodic remainder of p.x + w.
class GraphOperator final : public SpatialOperator {
public:
    GraphOperator(AnalyticHamiltonian H, std::vector<double> slope, double eps,
                  const PeriodicGrid& grid, FluxKind flux, std::vector<double> sigma = {});

    double cfl_dt() const override;
    bool time_dependent() const override { return H_.time_dependent; }
    void evaluate(double t, std::span<const double> w, const OneSided& d, std::span<double> out,
                  Exec exec) const override;
    double evaluate_node(double t, std::span<const double> w, std::size_t l) const override;

    const AnalyticHamiltonian& hamiltonian() const noexcept { return H_; }
    std::span<const double> slope() const noexcept { return slope_; }
    double eps() const noexcept { return eps_; }
    FluxKind flux() const noexcept { return flux_; }
    std::span<const double> sigma() const noexcept { return sigma_; }

    /// One-sided numerical value for given (fwd, bwd) gradient pairs at node l.
    double node_flux(double t, std::size_t l, double u, std::span<const double> q) const;

private:
    AnalyticHamiltonian H_;
    std::vector<double> slope_;
    double eps_;
    FluxKind flux_;
    std::vector<double> sigma_;
    std::vector<double> xs_;      // node-major x/eps
    std::vector<double> px_;      // slope . x per node
    std::vector<double> a_;       // cached a(x/eps) when time-independent transport
};

/// Explicit Euler, RK3-WENO5 and damped fixed-point implicit Euler on top of
/// a SpatialOperator. Owns its scratch buffers; not shareable across threads.
class Marcher {
public:
    Marcher(const SpatialOperator& op, Scheme scheme, Exec exec = Exec::parallel,
            double weno_eps = 1e-6);

    Scheme scheme() const noexcept { return scheme_; }
    Exec exec() const noexcept { return exec_; }
    const SpatialOperator& op() const noexcept { return op_; }

    /// Step bound for the scheme: Euler CFL, 0.9 x that for RK3. Implicit
    /// Euler has no bound; the Euler value is returned as a reference scale.
    double max_dt() const;

    /// S(t, [w]) with the derivative reconstruction of the scheme.
    void rhs(double t, std::span<const double> w, std::span<double> s);

    /// Advance w from t by dt. For the explicit schemes alpha applies the
    /// discount as w <- (w - dt S)/(1 + alpha dt); RK3 requires alpha = 0.
    /// Returns the number of operator evaluations.
    std::size_t step(double t, std::span<double> w, double dt, double alpha = 0.0);

    /// Solve (w - w_prev)/dt + alpha w + S(t, [w]) = 0 by damped fixed-point
    /// iteration, starting from the explicit predictor. Returns iterations.
    std::size_t implicit_step(double t, std::span<const double> w_prev, std::span<double> w,
                              double dt, double alpha);

    double inner_tol = 1e-11;
    std::size_t max_inner = 2000;
    /// Sup-norm defect after the most recent implicit step.
    double last_defect() const noexcept { return last_defect_; }

private:
    const SpatialOperator& op_;
    Scheme scheme_;
    Exec exec_;
    double weno_eps_;
    OneSided d_;
    std::vector<double> s_, f1_, f2_, prev_;
    double last_defect_ = 0.0;
};

}  // namespace effham
