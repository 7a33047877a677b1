// exact.hpp: lowest eigenpairs of the dimer Hamiltonian and eigenstate probability grids.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvdimer/fock.hpp"
#include "cvdimer/grid.hpp"

namespace cvdimer {

enum class SolverKind { automatic, dense, lanczos };

SolverKind solver_kind_from_string(const std::string& s);

struct SolverOptions {
    SolverKind kind{SolverKind::automatic};
    bool vectors{true};
    /// automatic: dense at or below this dimension, Lanczos above.
    std::size_t dense_threshold{SymmetricMatrix::kDenseThreshold};
    int max_krylov{400};
    long max_matvec{400000};
    /// Ritz pairs are accepted when |beta_m s_mi| <= tol * max(1, |theta_i|).
    double tol{1e-11};
    std::uint64_t seed{0x9e3779b97f4a7c15ULL};
};

/// Thrown when the iterative solver exhausts its matrix-vector budget.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, long matvecs, std::size_t converged)
        : std::runtime_error(what), matvecs_(matvecs), converged_(converged) {}
    long matvecs() const noexcept { return matvecs_; }
    std::size_t converged() const noexcept { return converged_; }

private:
    long matvecs_;
    std::size_t converged_;
};

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors;     // columns aligned with eigenvalues; empty when not requested

    std::size_t count() const noexcept { return eigenvalues.size(); }
    bool has_vectors() const noexcept { return eigenvectors.cols() > 0; }
};

/// The k algebraically smallest eigenpairs. Each eigenvector has its largest-magnitude
/// component positive.
Spectrum lowest_eigenpairs(const SymmetricMatrix& H, std::size_t k, const SolverOptions& opts = {});

/// |c_ij|^2 of eigenvector `which`.
AmplitudeGrid amplitude_grid(const Spectrum& s, std::size_t which, const FockBasis& basis);

inline constexpr double kClusterRelTol = 1e-9;

/// Half-open index ranges of levels whose neighbours lie within rel_tol * max(1, |E|).
std::vector<std::pair<std::size_t, std::size_t>> degenerate_clusters(const Spectrum& s,
                                                                     double rel_tol = kClusterRelTol);

/// Normalized sum of the grids over the degenerate cluster containing `which`.
AmplitudeGrid cluster_grid(const Spectrum& s, std::size_t which, const FockBasis& basis,
                           double rel_tol = kClusterRelTol);

/// E_l - E_0 for every computed level.
std::vector<double> relative_levels(const Spectrum& s);

}  // namespace cvdimer
