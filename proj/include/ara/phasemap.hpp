#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ara/equilibrium.hpp"
#include "ara/error.hpp"

namespace ara::phasemap {

using equilibrium::InitialGuess;
using equilibrium::ModelSpec;

struct Resolution {
    int n_s{201};
    int n_lambda{201};
    void validate() const;
};

struct Cell {
    int i{0};  // s index
    int j{0};  // lambda index
    friend bool operator==(const Cell&, const Cell&) = default;
};

// Equilibrium magnetization on the lattice s = i / (n_s - 1), lambda = j / (n_lambda - 1).
struct PhaseGrid {
    Resolution resolution;
    double beta{1.0};
    InitialGuess guess;
    ModelSpec model;
    std::vector<double> m_star;  // row-major in s: index i * n_lambda + j
    std::vector<double> f_star;
    std::vector<std::uint8_t> tie;

    double s_at(int i) const { return static_cast<double>(i) / (resolution.n_s - 1); }
    double lambda_at(int j) const { return static_cast<double>(j) / (resolution.n_lambda - 1); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * resolution.n_lambda + j;
    }
    double m(int i, int j) const { return m_star[index(i, j)]; }
    double f(int i, int j) const { return f_star[index(i, j)]; }
};

// Lattice edges whose magnetization jump exceeds the threshold. Edges are unordered pairs of
// 4-adjacent cells.
class BoundarySet {
public:
    BoundarySet(Resolution resolution, double threshold);

    void flag(Cell a, Cell b);
    bool flagged(Cell a, Cell b) const;
    bool empty() const { return count_ == 0; }
    std::size_t size() const { return count_; }
    double threshold() const { return threshold_; }
    const Resolution& resolution() const { return resolution_; }

    // Every flagged edge as (lower cell, upper cell), s-edges first, in lattice order.
    std::vector<std::pair<Cell, Cell>> edges() const;
    // Largest lambda (over both endpoints) touched by any flagged edge; nullopt when empty.
    std::optional<double> max_lambda_extent() const;
    // Smallest lambda touched by any flagged edge; nullopt when empty.
    std::optional<double> min_lambda_extent() const;
    // Number of connected groups of flagged edges (edges sharing a lattice vertex of the dual
    // grid count as connected).
    int connected_components() const;

private:
    // s_edges_: between (i, j) and (i + 1, j); lambda_edges_: between (i, j) and (i, j + 1).
    // nullptr unless a and b are 4-adjacent cells inside the lattice.
    const std::uint8_t* slot(Cell a, Cell b) const;
    std::uint8_t* slot(Cell a, Cell b);

    Resolution resolution_;
    double threshold_;
    std::vector<std::uint8_t> s_edges_;
    std::vector<std::uint8_t> lambda_edges_;
    std::size_t count_{0};
};

enum class Classification { Success, NoPaths, Paramagnetic };

std::string to_string(Classification c);

struct ScanOptions {
    int threads{1};
    double threshold{0.05};
    equilibrium::SolverOptions solver{};
};

inline constexpr double kParamagneticTol = 1e-6;

// solve_equilibrium on every lattice point. Errors carry the failing cell.
PhaseGrid scan_grid(double beta, const InitialGuess& guess, const ModelSpec& model,
                    Resolution resolution, const ScanOptions& options = {});

BoundarySet detect_boundaries(const PhaseGrid& grid, double threshold = 0.05);

// 4-connected path from the (0, 0) cell to the (1, 1) cell crossing no flagged edge.
bool path_exists(const BoundarySet& boundaries, const PhaseGrid& grid);

// Same predicate as path_exists(detect_boundaries(scan_grid(...))), but solves cells only as
// the search reaches them. Cells that are solved get bit-identical values to a full scan.
bool path_exists_on_demand(double beta, const InitialGuess& guess, const ModelSpec& model,
                           Resolution resolution, const ScanOptions& options = {});

// Final state paramagnetic -> Paramagnetic; otherwise NoPaths unless a transition-avoiding
// path exists.
Classification classify_point(double c, double temperature, const ModelSpec& model,
                              Resolution resolution, const ScanOptions& options = {});

class NonMonotoneError : public NumericalError {
public:
    NonMonotoneError(const std::string& what, std::vector<std::pair<double, bool>> samples)
        : NumericalError(what), samples_(std::move(samples)) {}
    const std::vector<std::pair<double, bool>>& samples() const { return samples_; }

private:
    std::vector<std::pair<double, bool>> samples_;
};

struct Tc1Options {
    ScanOptions scan{};
    int coarse_samples{8};
};

// Largest temperature at which a transition-avoiding path exists, bisected to width `tol`
// below T_c2. nullopt means paths never exist on the coarse ladder. Throws NonMonotoneError if
// the coarse ladder shows a failure followed by a success.
std::optional<double> critical_temperature_tc1(double c, const ModelSpec& model,
                                               Resolution resolution, double tol,
                                               const Tc1Options& options = {});

// Temperature above which the classical endpoint is paramagnetic (free-energy crossing).
double critical_temperature_tc2(const ModelSpec& model, double tol,
                                const equilibrium::SolverOptions& solver = {});

// Largest temperature at which m = tanh(beta p m^(p-1)) still has a positive root.
double spinodal_temperature(const ModelSpec& model, double tol,
                            const equilibrium::SolverOptions& solver = {});

struct CTMap {
    std::vector<double> c_values;
    std::vector<double> temperatures;
    std::vector<Classification> labels;  // index ic * temperatures.size() + it

    Classification at(std::size_t ic, std::size_t it) const {
        return labels[ic * temperatures.size() + it];
    }
};

// Evenly spaced values, both ends included.
std::vector<double> linspace(double lo, double hi, int count);

CTMap build_ct_map(const std::vector<double>& c_values, const std::vector<double>& temperatures,
                   const ModelSpec& model, Resolution resolution, const ScanOptions& options = {});

}  // namespace ara::phasemap
