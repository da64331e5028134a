#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace effham {

/// Upper bound on the number of spatial variables (x) handled by the
/// fixed-size scratch buffers used in hot evaluation paths.
inline constexpr std::size_t kMaxSpaceDim = 3;

using HamiltonianFn = std::function<double(double t, std::span<const double> x, double u,
                                           std::span<const double> p)>;

/// H(t,x,u,p) = b(t,x,u) + a(t,x)|p|.
///
/// The level-set extension of this form is a|p_x| + b|p_y|, which is what the
/// Godunov flux is built for. The bounds are declared by the caller and used
/// for CFL limits and flux metadata.
struct TransportForm {
    std::function<double(double t, std::span<const double> x)> a;
    std::function<double(double t, std::span<const double> x, double u)> b;
    double a_min = 0.0;
    double a_max = 0.0;
    double b_max_abs = 0.0;
    double b_lip_u = 0.0;  ///< bound on |d b / d u|
};

/// An evaluable Hamiltonian H(t,x,u,p) periodic in (t,x,u).
struct AnalyticHamiltonian {
    std::string name = "generic";
    std::size_t dim = 1;
    HamiltonianFn eval;
    double time_period = 1.0;
    std::vector<double> x_period;  ///< one entry per axis
    double u_period = 1.0;
    std::optional<double> lip_C1;  ///< C1 of the regularity assumption
    std::optional<double> geom_C;  ///< C of |D_pH.p - H| <= C
    std::optional<TransportForm> transport;
    std::optional<double> u_lip;  ///< declared bound on |D_u H|, if known
    bool time_dependent = false;

    double operator()(double t, std::span<const double> x, double u,
                      std::span<const double> p) const {
        return eval(t, x, u, p);
    }

    /// Bound on |D_u H|, used to keep explicit marches with exact u-coupling
    /// monotone.
    double lip_u() const;
};

/// F(t,x,y,p_x,p_y) = |p_y| H(t,x,y,p_x/|p_y|), and H_inf(t,x,y,p_x) at p_y = 0.
class LevelSetHamiltonian {
public:
    LevelSetHamiltonian(AnalyticHamiltonian base, double coercivity_C2);

    double operator()(double t, std::span<const double> x, double y, std::span<const double> px,
                      double py) const;
    double recession(double t, std::span<const double> x, double y,
                     std::span<const double> px) const;

    const AnalyticHamiltonian& base() const noexcept { return base_; }
    std::size_t x_dim() const noexcept { return base_.dim; }
    double coercivity_C2() const noexcept { return coercivity_C2_; }

private:
    AnalyticHamiltonian base_;
    double coercivity_C2_;
};

LevelSetHamiltonian extend_levelset(const AnalyticHamiltonian& H);

/// H_inf(t,x,u,p) = lim_{s->0+} s H(t,x,u,p/s). Closed form a(t,x)|p| for
/// transport-form Hamiltonians, otherwise a three-point numerical limit.
double recession(const AnalyticHamiltonian& H, double t, std::span<const double> x, double u,
                 std::span<const double> p);

/// Builtin Hamiltonians addressable by tag: "first_case", "second_case",
/// "state_free_abs" (H = |p| in one dimension).
AnalyticHamiltonian builtin(std::string_view name);
std::vector<std::string> builtin_names();

AnalyticHamiltonian make_transport(std::size_t dim, TransportForm form,
                                   std::string name = "transport");

/// State-independent H(p) = H0(p). Without declared constants the recession
/// function is computed numerically.
AnalyticHamiltonian make_state_free(std::size_t dim,
                                    std::function<double(std::span<const double>)> H0,
                                    std::optional<double> lip_C1 = std::nullopt,
                                    std::optional<double> geom_C = std::nullopt,
                                    std::string name = "state_free");

struct AssumptionCheck {
    bool pass = true;
    double observed = 0.0;  ///< worst observed quantity for this assumption
    std::string detail;
};

struct AssumptionReport {
    std::size_t samples = 0;
    AssumptionCheck periodicity;   ///< max periodicity defect
    AssumptionCheck regularity;    ///< observed C1 (max of the three ratios)
    AssumptionCheck coercivity;    ///< min over states of H at |p| = 1000
    AssumptionCheck geometric;     ///< observed sup |D_pH.p - H|
    bool all_pass() const {
        return periodicity.pass && regularity.pass && coercivity.pass && geometric.pass;
    }
};

AssumptionReport check_assumptions(const AnalyticHamiltonian& H, std::size_t samples,
                                   std::uint64_t seed);

}  // namespace effham
