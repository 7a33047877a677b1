// grid.hpp: probability grids over (n_L, m_L) shared by the exact and CV modules.

#pragma once

#include <iosfwd>

#include <Eigen/Dense>

namespace cvdimer {

/// values(i, j) is the probability of |N_a - i, i, N_b - j, j> (i = n_L, j = m_L).
struct AmplitudeGrid {
    Eigen::MatrixXd values;
    /// Set when a Gaussian width is below the lattice spacing.
    bool width_underflow{false};

    int N_a() const noexcept { return static_cast<int>(values.rows()) - 1; }
    int N_b() const noexcept { return static_cast<int>(values.cols()) - 1; }
    double sum() const { return values.sum(); }

    /// Rescales to unit sum; throws std::domain_error on an all-zero grid.
    void normalize();
};

/// Headerless CSV matrix: row i = n_L (N_a + 1 rows), column j = m_L (N_b + 1 columns).
void write_grid_csv(std::ostream& os, const AmplitudeGrid& g);

}  // namespace cvdimer
