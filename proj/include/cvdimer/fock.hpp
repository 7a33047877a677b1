// fock.hpp: fixed-(N_a, N_b) occupation basis and the dimer Hamiltonian matrix.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cvdimer/model.hpp"

namespace cvdimer {

/// Basis |n_L, m_L> with n_R = N_a - n_L, m_R = N_b - m_L, ordered row-major in (n_L, m_L).
class FockBasis {
public:
    static constexpr std::size_t kDefaultCap = 1'000'000;

    FockBasis(int N_a, int N_b, std::size_t cap = kDefaultCap);

    int N_a() const noexcept { return N_a_; }
    int N_b() const noexcept { return N_b_; }
    std::size_t dim() const noexcept { return dim_; }

    std::size_t index(int n_L, int m_L) const noexcept {
        return static_cast<std::size_t>(n_L) * static_cast<std::size_t>(N_b_ + 1) + static_cast<std::size_t>(m_L);
    }
    std::pair<int, int> occupations(std::size_t idx) const noexcept {
        const auto stride = static_cast<std::size_t>(N_b_ + 1);
        return {static_cast<int>(idx / stride), static_cast<int>(idx % stride)};
    }

private:
    int N_a_;
    int N_b_;
    std::size_t dim_;
};

FockBasis build_basis(int N_a, int N_b, std::size_t cap = FockBasis::kDefaultCap);

/// Real symmetric matrix, dense up to a threshold dimension and compressed-sparse above.
class SymmetricMatrix {
public:
    using Dense = Eigen::MatrixXd;
    using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };

    static constexpr std::size_t kDenseThreshold = 4096;

    /// Builds from upper-triangle entries (row <= col); every off-diagonal entry is mirrored.
    /// Duplicate positions are summed.
    static SymmetricMatrix from_upper(std::size_t dim, const std::vector<Entry>& upper,
                                      std::size_t dense_threshold = kDenseThreshold);

    std::size_t dim() const noexcept { return dim_; }
    bool is_dense() const noexcept { return std::holds_alternative<Dense>(storage_); }

    double operator()(std::size_t i, std::size_t j) const;
    Eigen::VectorXd diagonal() const;
    double trace() const { return diagonal().sum(); }

    /// y = A x
    void apply(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) const;
    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

    Dense to_dense() const;
    /// Non-zero entries with row <= col, ordered by (row, col).
    std::vector<Entry> upper_entries() const;

private:
    std::size_t dim_{0};
    std::variant<Dense, Sparse> storage_;
};

/// Diagonal element of the dimer Hamiltonian at occupation (n_L, m_L).
double diagonal_element(const ModelParams& p, int n_L, int m_L) noexcept;

SymmetricMatrix build_hamiltonian(const ModelParams& p, const FockBasis& basis,
                                  std::size_t dense_threshold = SymmetricMatrix::kDenseThreshold);

/// Swaps m_L <-> m_R: the component at (n_L, m_L) moves to (n_L, N_b - m_L).
Eigen::VectorXd b_parity_transform(const FockBasis& basis, std::span<const double> v);

/// "i j value" per line, 0-based, upper triangle, 17 significant digits.
void write_coordinate_list(std::ostream& os, const SymmetricMatrix& m);

}  // namespace cvdimer
