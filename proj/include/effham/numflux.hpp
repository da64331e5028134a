#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "effham/hamiltonian.hpp"

namespace effham {

inline double pos_part(double q) noexcept { return q > 0.0 ? q : 0.0; }
inline double neg_part(double q) noexcept { return q < 0.0 ? -q : 0.0; }

/// Upwind norm for a|p| with a > 0: [(q_fwd^-)^2 + (q_bwd^+)^2]^{1/2} summed
/// over axes. `q` holds (fwd, bwd) pairs.
inline double godunov_convex_norm(std::span<const double> q) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < q.size(); k += 2) {
        const double m = neg_part(q[k]);
        const double p = pos_part(q[k + 1]);
        s += m * m + p * p;
    }
    return std::sqrt(s);
}

/// Godunov value of b|q| for a scalar coefficient b of either sign.
inline double godunov_signed_abs(double b, double q_fwd, double q_bwd) noexcept {
    if (b > 0.0) {
        const double m = neg_part(q_fwd), p = pos_part(q_bwd);
        return b * std::sqrt(m * m + p * p);
    }
    if (b < 0.0) {
        const double p = pos_part(q_fwd), m = neg_part(q_bwd);
        return b * std::sqrt(p * p + m * m);
    }
    return 0.0;
}

/// Discrete numerical Hamiltonian g(t, x, y, q) for the level-set equation.
///
/// `q` has 2(N_x+1) slots ordered (fwd_0, bwd_0, ..., fwd_{N_x}, bwd_{N_x}),
/// the last pair being the y direction. In the two-dimensional setting this
/// is (q1, q2, q3, q4) with q1 = (D+W)_i + p_x and q2 = (D+W)_{i-1} + p_x.
class NumericalHamiltonian {
public:
    enum class Kind { godunov_transport, lax_friedrichs };

    double operator()(double t, std::span<const double> x, double y,
                      std::span<const double> q) const;

    Kind kind() const noexcept { return kind_; }
    std::string kind_name() const;
    std::size_t x_dim() const noexcept { return target_->x_dim(); }
    std::size_t slots() const noexcept { return 2 * (x_dim() + 1); }
    double lip_C1t() const noexcept { return lip_C1t_; }
    double coer_C2t() const noexcept { return coer_C2t_; }
    double coer_C3t() const noexcept { return coer_C3t_; }
    const LevelSetHamiltonian& target() const noexcept { return *target_; }
    bool time_dependent() const noexcept { return target_->base().time_dependent; }

    /// Transport coefficients (godunov_transport only; null otherwise).
    const TransportForm* transport() const noexcept {
        return kind_ == Kind::godunov_transport ? &*target_->base().transport : nullptr;
    }
    /// Artificial viscosity per axis (lax_friedrichs only).
    std::span<const double> sigma() const noexcept { return sigma_; }

private:
    friend NumericalHamiltonian godunov_transport(std::size_t, TransportForm);
    friend NumericalHamiltonian godunov_transport(const AnalyticHamiltonian&);
    friend NumericalHamiltonian lax_friedrichs(LevelSetHamiltonian, std::vector<double>);

    Kind kind_ = Kind::godunov_transport;
    std::shared_ptr<const LevelSetHamiltonian> target_;
    std::vector<double> sigma_;
    double lip_C1t_ = 0.0;
    double coer_C2t_ = 0.0;
    double coer_C3t_ = 0.0;
};

/// g = a [(q1^-)^2+(q2^+)^2]^{1/2} + b^+ [(q3^-)^2+(q4^+)^2]^{1/2}
///       - b^- [(q3^+)^2+(q4^-)^2]^{1/2},
/// with the x block summed over all x axes inside the first square root.
NumericalHamiltonian godunov_transport(std::size_t x_dim, TransportForm form);
/// Godunov flux for a transport-form Hamiltonian (throws if H is generic).
NumericalHamiltonian godunov_transport(const AnalyticHamiltonian& H);

/// g = F(t,x,y,(q1+q2)/2,...) - sum_k sigma_k (q_fwd,k - q_bwd,k)/2.
NumericalHamiltonian lax_friedrichs(LevelSetHamiltonian F, std::vector<double> sigma);

/// Per-axis sigma = 1.1 x the observed gradient Lipschitz constant of F.
std::vector<double> default_lf_sigma(const LevelSetHamiltonian& F, std::uint64_t seed = 7);

enum class FluxKind { godunov, lax_friedrichs };

/// Level-set flux for H of the requested kind; an empty sigma selects
/// default_lf_sigma.
NumericalHamiltonian make_flux(const AnalyticHamiltonian& H, FluxKind kind,
                               std::vector<double> sigma = {});

std::string to_string(FluxKind kind);
FluxKind parse_flux_kind(const std::string& name);

struct MonotonicityReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_violation = 0.0;
    bool pass() const noexcept { return violations == 0; }
};

/// Random base points q in [-range, range]^slots and positive increments in
/// (0, range): g must not increase with the fwd slots or decrease with the
/// bwd slots beyond 1e-12.
MonotonicityReport check_monotone(const NumericalHamiltonian& g, std::size_t samples, double range,
                                  std::uint64_t seed);

struct PropertyResult {
    bool pass = true;
    double worst = 0.0;
};

struct FluxPropertyReport {
    std::size_t samples = 0;
    PropertyResult monotonicity;  ///< worst wrong-direction change
    PropertyResult consistency;   ///< max |g(q,q,r,r) - F(q,r)|
    PropertyResult periodicity;   ///< max periodicity defect
    PropertyResult lipschitz;     ///< max slot slope minus declared C1t
    PropertyResult coercivity;    ///< min of g - (C2t norm - C3t)
    PropertyResult y_independence;  ///< max |g(y1) - g(y2)| with zero y slots
    bool all_pass() const noexcept {
        return monotonicity.pass && consistency.pass && periodicity.pass && lipschitz.pass &&
               coercivity.pass && y_independence.pass;
    }
};

FluxPropertyReport check_flux_properties(const NumericalHamiltonian& g, std::size_t samples,
                                         double range, std::uint64_t seed);

}  // namespace effham
