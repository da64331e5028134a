#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace effham {

struct Axis {
    std::size_t count = 1;  ///< number of nodes N_X along the axis
    double period = 1.0;    ///< length L of the periodic axis
    double step() const noexcept { return period / static_cast<double>(count); }
};

/// Uniform periodic lattice. Nodes are stored row-major: the last axis
/// varies fastest. All multi-index access wraps modulo the node counts.
class PeriodicGrid {
public:
    PeriodicGrid() = default;
    explicit PeriodicGrid(std::vector<Axis> axes);

    std::size_t dim() const noexcept { return axes_.size(); }
    std::size_t size() const noexcept { return size_; }
    const Axis& axis(std::size_t k) const { return axes_[k]; }
    const std::vector<Axis>& axes() const noexcept { return axes_; }
    double step(std::size_t k) const { return axes_[k].step(); }
    double min_step() const;
    std::size_t stride(std::size_t k) const { return strides_[k]; }

    /// Linear index of a (possibly out-of-range) multi-index, wrapped.
    std::size_t index(std::span<const long> multi) const;
    std::size_t coordinate_index(std::size_t linear, std::size_t k) const {
        return (linear / strides_[k]) % axes_[k].count;
    }
    double coordinate(std::size_t linear, std::size_t k) const {
        return static_cast<double>(coordinate_index(linear, k)) * axes_[k].step();
    }
    void coordinates(std::size_t linear, std::span<double> out) const;
    /// Linear index of the node `offset` cells away along axis k, wrapped.
    std::size_t neighbor(std::size_t linear, std::size_t k, long offset) const;

    friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b);

private:
    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

bool operator==(const PeriodicGrid& a, const PeriodicGrid& b);

/// Time lattice t_n = n dt; steps_per_period * dt spans one time period.
struct TimeGrid {
    double dt = 0.0;
    std::size_t steps_per_period = 1;
    double period() const noexcept { return dt * static_cast<double>(steps_per_period); }
};

class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(PeriodicGrid grid, double fill = 0.0);
    GridFunction(PeriodicGrid grid, std::vector<double> values);

    const PeriodicGrid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& storage() noexcept { return values_; }
    double& operator[](std::size_t l) { return values_[l]; }
    double operator[](std::size_t l) const { return values_[l]; }
    double at(std::span<const long> multi) const { return values_[grid_.index(multi)]; }

    bool all_finite() const;

private:
    PeriodicGrid grid_;
    std::vector<double> values_;
};

/// (f(i + e_axis) - f(i)) / h_axis with periodic wrap.
double fwd_diff(const GridFunction& f, std::size_t axis, std::span<const long> i);

using FieldFn = std::function<double(double t, std::span<const double> x)>;
GridFunction sample(const FieldFn& fn, const PeriodicGrid& grid, double t);

double oscillation(std::span<const double> v);
/// Lower median: element of rank (n-1)/2 in sorted order.
double median(std::span<const double> v);
/// Arithmetic mean, summed left to right.
double mean(std::span<const double> v);

inline double oscillation(const GridFunction& f) { return oscillation(f.values()); }
inline double median(const GridFunction& f) { return median(f.values()); }
inline double mean(const GridFunction& f) { return mean(f.values()); }

/// CSV layout: a metadata comment line
///   # grid dims=D counts=n0,n1 periods=L0,L1
/// then a header `x0,...,x{D-1},value` and one row per node in storage order.
void write_csv(const GridFunction& f, std::ostream& os);
GridFunction read_csv(std::istream& is);

}  // namespace effham
