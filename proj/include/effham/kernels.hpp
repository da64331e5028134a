#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <vector>

#include "effham/grid.hpp"

namespace effham {

/// Loop execution policy for node kernels. Both policies write each node's
/// result to its own slot, so they produce bit-identical output.
enum class Exec { serial, parallel };

/// Time-marching scheme for the cell and evolution solvers.
enum class Scheme { implicit_euler, explicit_euler, rk3_weno5 };

/// Precomputed periodic neighbour indices (+1 and -1 along every axis).
class Stencil {
public:
    explicit Stencil(const PeriodicGrid& grid);

    const PeriodicGrid& grid() const noexcept { return grid_; }
    std::span<const std::uint32_t> plus(std::size_t k) const { return plus_[k]; }
    std::span<const std::uint32_t> minus(std::size_t k) const { return minus_[k]; }

private:
    PeriodicGrid grid_;
    std::vector<std::vector<std::uint32_t>> plus_, minus_;
};

/// One-sided derivative arrays: fwd[k][l] ~ forward slope at node l along
/// axis k, bwd[k][l] ~ backward slope.
struct OneSided {
    std::vector<std::vector<double>> fwd, bwd;
    void resize(std::size_t dim, std::size_t n);
};

/// Runs fn(l) for l in [0, n). In parallel mode the first exception thrown
/// by any node is rethrown on the calling thread after the loop.
template <class Fn>
void for_each_node(std::size_t n, Exec exec, Fn&& fn) {
    const auto count = static_cast<std::ptrdiff_t>(n);
    if (exec == Exec::parallel) {
        std::exception_ptr error;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t l = 0; l < count; ++l) {
            try {
                fn(static_cast<std::size_t>(l));
            } catch (...) {
#pragma omp critical(effham_for_each_node)
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
    } else {
        for (std::ptrdiff_t l = 0; l < count; ++l) fn(static_cast<std::size_t>(l));
    }
}

namespace kernels {

/// fwd = (w_{i+1} - w_i)/h, bwd = (w_i - w_{i-1})/h on every axis.
void first_order(const Stencil& st, std::span<const double> w, OneSided& out, Exec exec);

/// Fifth-order HJ-WENO one-sided derivatives (three cubic candidates, ideal
/// weights 1/10, 6/10, 3/10, regularisation eps). Requires >= 6 nodes per axis.
void weno5(const Stencil& st, std::span<const double> w, double eps, OneSided& out, Exec exec);

/// Weighted combination of five consecutive difference quotients v1..v5,
/// oriented so v3 is the difference adjacent to the node on the biased side.
double weno5_combine(double v1, double v2, double v3, double v4, double v5, double eps) noexcept;

/// w <- (w - dt * s) / (1 + alpha dt)
void euler_update(std::span<double> w, std::span<const double> s, double dt, double alpha,
                  Exec exec);

/// out = c0 * a + c1 * (b - dt * s)
void axpy_stage(std::span<double> out, double c0, std::span<const double> a, double c1,
                std::span<const double> b, std::span<const double> s, double dt, Exec exec);

}  // namespace kernels
}  // namespace effham
