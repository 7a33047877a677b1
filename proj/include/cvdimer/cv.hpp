// cv.hpp: continuous-variable analytics for the two-species dimer.
//
// The populations are described by the imbalances x = (n_L - n_R)/N_a and
// y = (m_L - m_R)/N_b. Near a minimum of the effective potential V the
// eigenvalue problem reduces to two decoupled harmonic oscillators in the
// rotated coordinates q = (x + y)/sqrt2, p = (x - y)/sqrt2. Quantum number n
// always labels the q mode and m the p mode.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvdimer/fock.hpp"
#include "cvdimer/grid.hpp"
#include "cvdimer/model.hpp"

namespace cvdimer {

enum class PointKind { minimum, saddle, maximum };
enum class Branch { uniform, plus, minus };

const char* to_string(PointKind k) noexcept;
const char* to_string(Branch b) noexcept;

struct StationaryPoint {
    double x{0.0};
    double y{0.0};
    PointKind kind{PointKind::minimum};
    Branch branch{Branch::uniform};
    double V_value{0.0};
};

/// V(x, y) = -gamma + u_a(1+x^2)/4 + u_b(1+y^2)/4 + w(1+xy)/2 - tau_a sqrt(1-x^2) - tau_b sqrt(1-y^2).
double potential(const EffectiveParams& e, double x, double y);

/// Boson-population equations written as residuals
/// r_x = w y + u_a x + 2 tau_a x / sqrt(1-x^2), r_y = w x + u_b y + 2 tau_b y / sqrt(1-y^2).
/// They equal 2 dV/dx and 2 dV/dy.
std::array<double, 2> population_residual(const EffectiveParams& e, double x, double y);
Eigen::Matrix2d population_jacobian(const EffectiveParams& e, double x, double y);
Eigen::Matrix2d potential_hessian(const EffectiveParams& e, double x, double y);

/// Scale used for residual tolerances: max(u_a + 2 tau_a, u_b + 2 tau_b) + |w|.
double residual_scale(const EffectiveParams& e) noexcept;

/// Closed-form roots for u_a = u_b, tau_a = tau_b: the uniform point and, past the
/// critical coupling, the pair on y = -x (w > 0) or y = x (w < 0).
std::vector<StationaryPoint> stationary_points_symmetric(const EffectiveParams& e);

struct NewtonDiagnostics {
    std::size_t seeds{0};
    std::size_t converged{0};
    std::size_t dropped{0};
};

/// Seed set: origin, closed-form points of the averaged symmetric parameters and an 11x11 grid.
std::vector<std::pair<double, double>> default_seeds(const EffectiveParams& e);

/// Damped Newton on the population equations from each seed. Converged points are
/// deduplicated and classified by the Hessian of V; failures are only counted.
std::vector<StationaryPoint> stationary_points_general(const EffectiveParams& e,
                                                       const std::vector<std::pair<double, double>>& seeds,
                                                       NewtonDiagnostics* diag = nullptr);

/// Local oscillator -mass_coeff (d_q^2 + d_p^2) + stiffness_q q^2 + stiffness_p p^2 + constant.
struct QuadraticForm {
    double constant{0.0};
    double stiffness_q{0.0};
    double stiffness_p{0.0};
    double mass_coeff{0.0};
    Regime regime;

    double omega_q() const;
    double omega_p() const;
};

/// Requires the symmetric case and a minimum (or the uniform point at criticality).
QuadraticForm quadratic_form(const EffectiveParams& e, const StationaryPoint& pt);

/// The minimum the low-lying spectrum is built on: uniform point when |w| <= u + 2 tau,
/// otherwise the plus-branch minimum.
StationaryPoint ground_minimum(const EffectiveParams& e);

struct CVLevel {
    int n{0};
    int m{0};  // -1 on the critical plane-wave branch
    double k{0.0};
    double energy{0.0};
    Regime regime;
    int degeneracy{1};
};

/// All E(n, m) with n <= n_max, m <= m_max, ascending. Strong-regime levels are doublets.
std::vector<CVLevel> cv_levels(const EffectiveParams& e, int n_max, int m_max);

/// E(n, k) = K + 2 sqrt(tau eps^2 (u + 2 tau)) (n + 1/2) + 2 tau eps^2 k at |w| = u + 2 tau,
/// with K = (u + w)/2 - 2 tau - gamma (u - tau - gamma on the repulsive side).
std::vector<CVLevel> collapse_levels(const EffectiveParams& e, int n_max, const std::vector<double>& k_values);

/// Relative levels E_l - E_0 with doublets expanded into two equal entries, truncated to count.
std::vector<double> expanded_relative_levels(const std::vector<CVLevel>& levels, std::size_t count);

/// Physicists' Hermite polynomial by the three-term recurrence.
double hermite(int n, double z) noexcept;

struct CVEigenstate {
    int n{0};
    int m{0};
    double lambda{0.0};  // q width
    double nu{0.0};      // p width
    Regime regime;
    int parity{1};        // strong regime: (Phi+ + parity Phi-)/sqrt2
    double offset{0.0};  // |x1| in the strong regime
};

CVEigenstate cv_eigenstate(const EffectiveParams& e, int n, int m, int parity = 1);

/// Continuum-normalized amplitude at imbalances (x, y).
double eigenfunction_value(const EffectiveParams& e, const CVEigenstate& s, double x, double y);

/// |Psi|^2 sampled on x = 2 i/N_a - 1, y = 2 j/N_b - 1 and renormalized to unit sum.
/// raw_mass receives sum |Psi|^2 dx dy before renormalization.
AmplitudeGrid eigenfunction_density(const EffectiveParams& e, const CVEigenstate& s, const FockBasis& basis,
                                    double* raw_mass = nullptr);

}  // namespace cvdimer
