#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "effham/cellsolve.hpp"
#include "effham/hamiltonian.hpp"
#include "effham/numflux.hpp"

namespace effham {

struct VertexProvenance {
    std::string method;
    std::vector<std::size_t> nodes;  ///< grid node counts (IM: nodes per unit)
    double dt = 0.0;
    double alpha = 0.0;
    double tau = 0.0;
    double residual = 0.0;
    double error_bar = 0.0;
};

struct FailedVertex {
    std::vector<double> p;
    std::string code;
    std::string message;
};

/// Hbar sampled at vertices with a simplicial decomposition of their hull.
struct EffHamTable {
    std::size_t dim = 1;
    std::vector<std::vector<double>> vertices;
    std::vector<double> values;
    std::vector<std::vector<std::size_t>> simplices;
    std::vector<VertexProvenance> provenance;
    /// Vertices whose cell solve failed; the table is partial when non-empty.
    std::vector<FailedVertex> failures;

    std::size_t size() const noexcept { return values.size(); }
    bool partial() const noexcept { return !failures.empty(); }
    /// Largest simplex edge length (the mesh size k).
    double max_diameter() const;
};

bool operator==(const EffHamTable& a, const EffHamTable& b);

/// Builds or validates connectivity: sorted segments in 1D, a Delaunay
/// triangulation in 2D. Throws ConfigError on duplicate or degenerate input.
std::vector<std::vector<std::size_t>> triangulate(const std::vector<std::vector<double>>& vertices,
                                                  std::size_t dim);

enum class TableMethod { barles, imbert_monneau, discounted };
std::string to_string(TableMethod m);
TableMethod parse_table_method(const std::string& name);

struct TabulateParams {
    TableMethod method = TableMethod::barles;
    FluxKind flux = FluxKind::godunov;
    Scheme scheme = Scheme::explicit_euler;
    /// Barles / discounted grid: node counts per x axis, then y.
    std::vector<std::size_t> nodes = {200, 50};
    std::size_t nodes_per_unit = 100;  ///< Imbert-Monneau
    /// Nominal step; <= 0 selects the scheme's CFL step.
    double dt = 0.002;
    LongTimeOptions longtime;
    double alpha = 0.01;
    double period_tol = 1e-9;
    std::size_t max_periods = 100000;
    /// Parallel vertex solves; 0 uses the OpenMP default.
    std::size_t workers = 0;
};

/// One cell solve per vertex; value = lambda. Results land in pre-assigned
/// slots, so the table does not depend on the worker count. Vertices whose
/// solve throws are listed in `failures`; irrational slopes under
/// imbert_monneau fall back to the Barles route.
EffHamTable tabulate(const AnalyticHamiltonian& H, const std::vector<std::vector<double>>& p_set,
                     const TabulateParams& params);

/// Piecewise-linear interpolant on the lexicographically smallest simplex
/// containing p. Throws OutOfHull with the nearest vertex.
double interpolate(const EffHamTable& table, std::span<const double> p);
bool in_hull(const EffHamTable& table, std::span<const double> p);

struct TableReport {
    double max_edge_slope = 0.0;
    std::size_t lipschitz_violations = 0;
    bool lipschitz_pass = true;
    bool coercivity_checked = false;
    double coercivity_C2 = 0.0;  ///< min over p != 0 of value / |p|
    bool coercivity_pass = true;
    /// 1D only: second divided differences along sorted vertices.
    std::vector<double> second_differences;
    bool all_pass() const noexcept { return lipschitz_pass && coercivity_pass; }
};

TableReport verify_table(const EffHamTable& table, double F_lip, double margin = 1e-9);

/// JSON: {dim, vertices, values, simplices, provenance, failures}.
std::string to_json(const EffHamTable& table);
EffHamTable from_json(const std::string& text);
void save(const EffHamTable& table, const std::filesystem::path& path);
EffHamTable load(const std::filesystem::path& path);
/// Columns p1..pN, value, error_bar.
void export_csv(const EffHamTable& table, std::ostream& os);

/// 1D p-set mini-language, comma separated items:
///   v             a single value
///   a:b:n         n uniform points on [a, b]
///   a:b:refined@c[@c2...][:n]
///                 n uniform points (default 13) plus each breakpoint c and
///                 the geometric cluster c +- s/2^k, k = 1..4 (s the uniform spacing) around each
///                 breakpoint; "@+-c" or "@±c" adds both c and -c.
std::vector<double> parse_p_set(const std::string& text);

}  // namespace effham
