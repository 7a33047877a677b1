#include "cvdimer/cv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace cvdimer {

namespace {

void check_domain(double x, double y) {
    if (!(std::abs(x) <= 1.0) || !(std::abs(y) <= 1.0))
        throw std::domain_error("imbalance coordinates must lie in [-1, 1]");
}

void require_symmetric(const EffectiveParams& e, const char* who) {
    if (!is_symmetric_case(e)) throw std::invalid_argument(std::string(who) + ": requires u_a = u_b and tau_a = tau_b");
}

PointKind classify_hessian(const Eigen::Matrix2d& h, double scale) {
    const double tol = 1e-9 * scale;
    const double det = h.determinant();
    const double tr = h.trace();
    if (det < -tol * tol) return PointKind::saddle;
    if (det > tol * tol) return tr > 0.0 ? PointKind::minimum : PointKind::maximum;
    // degenerate direction: only reached at the coalescence point, where V is quartic
    return tr > 0.0 ? PointKind::minimum : PointKind::maximum;
}

Branch branch_of(double x, double y) {
    if (std::abs(x) < 1e-8 && std::abs(y) < 1e-8) return Branch::uniform;
    return x > 0.0 || (x == 0.0 && y > 0.0) ? Branch::plus : Branch::minus;
}

StationaryPoint make_point(const EffectiveParams& e, double x, double y) {
    StationaryPoint pt;
    pt.x = x;
    pt.y = y;
    pt.kind = classify_hessian(potential_hessian(e, x, y), residual_scale(e));
    pt.branch = branch_of(x, y);
    pt.V_value = potential(e, x, y);
    return pt;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double oscillator_factor(int n, int m, double lambda, double nu, double q, double p) {
    const double a = q / lambda;
    const double b = p / nu;
    const double norm = std::sqrt(std::numbers::pi * lambda * nu * std::ldexp(1.0, n + m) * factorial(n) * factorial(m));
    return std::exp(-0.5 * (a * a + b * b)) * hermite(n, a) * hermite(m, b) / norm;
}

}  // namespace

const char* to_string(PointKind k) noexcept {
    switch (k) {
        case PointKind::minimum: return "minimum";
        case PointKind::saddle: return "saddle";
        case PointKind::maximum: return "maximum";
    }
    return "?";
}

const char* to_string(Branch b) noexcept {
    switch (b) {
        case Branch::uniform: return "uniform";
        case Branch::plus: return "plus";
        case Branch::minus: return "minus";
    }
    return "?";
}

double potential(const EffectiveParams& e, double x, double y) {
    check_domain(x, y);
    return -e.gamma + 0.25 * e.u_a * (1.0 + x * x) + 0.25 * e.u_b * (1.0 + y * y) + 0.5 * e.w * (1.0 + x * y) -
           e.tau_a * std::sqrt(1.0 - x * x) - e.tau_b * std::sqrt(1.0 - y * y);
}

std::array<double, 2> population_residual(const EffectiveParams& e, double x, double y) {
    check_domain(x, y);
    return {e.w * y + e.u_a * x + 2.0 * e.tau_a * x / std::sqrt(1.0 - x * x),
            e.w * x + e.u_b * y + 2.0 * e.tau_b * y / std::sqrt(1.0 - y * y)};
}

Eigen::Matrix2d population_jacobian(const EffectiveParams& e, double x, double y) {
    return 2.0 * potential_hessian(e, x, y);
}

Eigen::Matrix2d potential_hessian(const EffectiveParams& e, double x, double y) {
    check_domain(x, y);
    const double sx = 1.0 - x * x;
    const double sy = 1.0 - y * y;
    Eigen::Matrix2d h;
    h(0, 0) = 0.5 * e.u_a + e.tau_a / (sx * std::sqrt(sx));
    h(1, 1) = 0.5 * e.u_b + e.tau_b / (sy * std::sqrt(sy));
    h(0, 1) = h(1, 0) = 0.5 * e.w;
    return h;
}

double residual_scale(const EffectiveParams& e) noexcept {
    return std::max(e.u_a + 2.0 * e.tau_a, e.u_b + 2.0 * e.tau_b) + std::abs(e.w);
}

std::vector<StationaryPoint> stationary_points_symmetric(const EffectiveParams& e) {
    require_symmetric(e, "stationary_points_symmetric");
    std::vector<StationaryPoint> out{make_point(e, 0.0, 0.0)};
    const Regime r = classify_regime(e);
    if (r.strength == Strength::strong) {
        const double d = std::abs(e.w) - e.u_a;
        const double x1 = std::sqrt(1.0 - 4.0 * e.tau_a * e.tau_a / (d * d));
        const double s = r.sign == InteractionSign::repulsive ? -1.0 : 1.0;
        out.push_back(make_point(e, x1, s * x1));
        out.push_back(make_point(e, -x1, -s * x1));
    }
    return out;
}

std::vector<std::pair<double, double>> default_seeds(const EffectiveParams& e) {
    std::vector<std::pair<double, double>> seeds{{0.0, 0.0}};
    EffectiveParams avg = e;
    avg.u_a = avg.u_b = 0.5 * (e.u_a + e.u_b);
    avg.tau_a = avg.tau_b = 0.5 * (e.tau_a + e.tau_b);
    for (const auto& pt : stationary_points_symmetric(avg))
        if (pt.branch != Branch::uniform) seeds.emplace_back(pt.x, pt.y);
    constexpr int kGrid = 11;
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j)
            seeds.emplace_back(-1.0 + 2.0 * (i + 0.5) / kGrid, -1.0 + 2.0 * (j + 0.5) / kGrid);
    return seeds;
}

std::vector<StationaryPoint> stationary_points_general(const EffectiveParams& e,
                                                       const std::vector<std::pair<double, double>>& seeds,
                                                       NewtonDiagnostics* diag) {
    constexpr int kMaxIter = 100;
    constexpr double kEdge = 1.0 - 1e-12;
    const double scale = residual_scale(e);
    auto rnorm = [&](double x, double y) {
        const auto r = population_residual(e, x, y);
        return std::max(std::abs(r[0]), std::abs(r[1]));
    };

    NewtonDiagnostics d;
    std::vector<StationaryPoint> found;
    for (const auto& [sx, sy] : seeds) {
        ++d.seeds;
        if (std::abs(sx) >= kEdge || std::abs(sy) >= kEdge) {
            ++d.dropped;
            continue;
        }
        double x = sx;
        double y = sy;
        double res = rnorm(x, y);
        bool ok = res <= 1e-12 * scale;
        for (int it = 0; it < kMaxIter && !ok; ++it) {
            const auto r = population_residual(e, x, y);
            const Eigen::Matrix2d J = population_jacobian(e, x, y);
            const Eigen::Vector2d step = J.fullPivLu().solve(-Eigen::Vector2d(r[0], r[1]));
            if (!step.allFinite()) break;
            double t = 1.0;
            bool moved = false;
            for (int h = 0; h < 60; ++h, t *= 0.5) {
                const double nx = x + t * step(0);
                const double ny = y + t * step(1);
                if (std::abs(nx) >= kEdge || std::abs(ny) >= kEdge) continue;
                const double nres = rnorm(nx, ny);
                if (nres < res || nres <= 1e-12 * scale) {
                    x = nx;
                    y = ny;
                    res = nres;
                    moved = true;
                    break;
                }
            }
            if (res <= 1e-12 * scale) ok = true;
            if (!moved) {
                // stalled at rounding level
                ok = res <= 1e-10 * scale;
                break;
            }
        }
        if (!ok || std::abs(x) >= kEdge || std::abs(y) >= kEdge) {
            ++d.dropped;
            continue;
        }
        ++d.converged;
        const bool dup = std::any_of(found.begin(), found.end(),
                                     [&](const auto& p) { return std::hypot(p.x - x, p.y - y) < 1e-8; });
        if (!dup) found.push_back(make_point(e, x, y));
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    if (diag) *diag = d;
    return found;
}

double QuadraticForm::omega_q() const { return 2.0 * std::sqrt(mass_coeff * std::max(0.0, stiffness_q)); }
double QuadraticForm::omega_p() const { return 2.0 * std::sqrt(mass_coeff * std::max(0.0, stiffness_p)); }

QuadraticForm quadratic_form(const EffectiveParams& e, const StationaryPoint& pt) {
    require_symmetric(e, "quadratic_form");
    if (pt.kind == PointKind::saddle || pt.kind == PointKind::maximum)
        throw std::invalid_argument("quadratic_form: expansion point is not a minimum");
    const double u = e.u_a;
    const double tau = e.tau_a;
    const double eps = e.eps_a;
    const double w = e.w;
    QuadraticForm f;
    f.regime = classify_regime(e);
    if (pt.branch == Branch::uniform) {
        if (f.regime.strength == Strength::strong)
            throw std::invalid_argument("quadratic_form: uniform point is a saddle in the strong regime");
        f.stiffness_q = 0.25 * (u + 2.0 * tau + w);
        f.stiffness_p = 0.25 * (u + 2.0 * tau - w);
        if (f.regime.strength == Strength::critical) {
            // the soft direction is exactly flat at criticality
            (w > 0.0 ? f.stiffness_p : f.stiffness_q) = 0.0;
        }
        f.mass_coeff = 2.0 * tau * eps * eps;
        f.constant = 0.5 * (w + u) - 2.0 * tau - e.gamma;
        return f;
    }
    if (f.regime.strength != Strength::strong)
        throw std::invalid_argument("quadratic_form: split minima exist only in the strong regime");
    const double a = std::abs(w);
    const double d = a - u;
    const double cubic = d * d * d / (16.0 * tau * tau);
    const double hard = 0.25 * (u + a) + cubic;
    const double soft = 0.25 * (u - a) + cubic;
    const bool repulsive = w > 0.0;
    f.stiffness_q = repulsive ? hard : soft;
    f.stiffness_p = repulsive ? soft : hard;
    f.mass_coeff = 4.0 * tau * tau * eps * eps / d;
    f.constant = u - e.gamma - 2.0 * tau * tau / d - (repulsive ? 0.0 : a);
    return f;
}

StationaryPoint ground_minimum(const EffectiveParams& e) {
    const auto pts = stationary_points_symmetric(e);
    if (pts.size() == 1) return pts.front();
    for (const auto& p : pts)
        if (p.branch == Branch::plus) return p;
    return pts.back();
}

std::vector<CVLevel> cv_levels(const EffectiveParams& e, int n_max, int m_max) {
    if (n_max < 0 || m_max < 0) throw std::invalid_argument("cv_levels: negative quantum-number cap");
    const Regime r = classify_regime(e);
    if (r.strength == Strength::critical)
        throw std::invalid_argument("cv_levels: critical coupling, use collapse_levels");
    const QuadraticForm f = quadratic_form(e, ground_minimum(e));
    const double oq = f.omega_q();
    const double op = f.omega_p();
    std::vector<CVLevel> out;
    out.reserve(static_cast<std::size_t>((n_max + 1) * (m_max + 1)));
    for (int n = 0; n <= n_max; ++n)
        for (int m = 0; m <= m_max; ++m) {
            CVLevel l;
            l.n = n;
            l.m = m;
            l.energy = f.constant + oq * (n + 0.5) + op * (m + 0.5);
            l.regime = r;
            l.degeneracy = r.strength == Strength::strong ? 2 : 1;
            out.push_back(l);
        }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
    return out;
}

std::vector<CVLevel> collapse_levels(const EffectiveParams& e, int n_max, const std::vector<double>& k_values) {
    const Regime r = classify_regime(e);
    if (r.strength != Strength::critical) throw std::invalid_argument("collapse_levels: parameters are not critical");
    const double u = e.u_a;
    const double tau = e.tau_a;
    const double eps = e.eps_a;
    const double base = 0.5 * (u + e.w) - 2.0 * tau - e.gamma;
    const double omega = 2.0 * std::sqrt(tau * eps * eps * (u + 2.0 * tau));
    const double kinetic = 2.0 * tau * eps * eps;
    std::vector<CVLevel> out;
    for (int n = 0; n <= n_max; ++n)
        for (double k : k_values) {
            CVLevel l;
            l.n = n;
            l.m = -1;
            l.k = k;
            l.energy = base + omega * (n + 0.5) + kinetic * k;
            l.regime = r;
            out.push_back(l);
        }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
    return out;
}

std::vector<double> expanded_relative_levels(const std::vector<CVLevel>& levels, std::size_t count) {
    std::vector<double> out;
    for (const auto& l : levels)
        for (int d = 0; d < l.degeneracy && out.size() < count; ++d) out.push_back(l.energy);
    if (out.size() < count) throw std::invalid_argument("expanded_relative_levels: not enough CV levels");
    const double e0 = out.front();
    for (double& v : out) v -= e0;
    return out;
}

double hermite(int n, double z) noexcept {
    if (n <= 0) return 1.0;
    double prev = 1.0;
    double cur = 2.0 * z;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * z * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

CVEigenstate cv_eigenstate(const EffectiveParams& e, int n, int m, int parity) {
    if (n < 0 || m < 0) throw std::invalid_argument("cv_eigenstate: negative quantum number");
    if (parity != 1 && parity != -1) throw std::invalid_argument("cv_eigenstate: parity must be +1 or -1");
    const Regime r = classify_regime(e);
    if (r.strength == Strength::critical)
        throw std::invalid_argument("cv_eigenstate: no normalizable oscillator state at criticality");
    const StationaryPoint pt = ground_minimum(e);
    const QuadraticForm f = quadratic_form(e, pt);
    CVEigenstate s;
    s.n = n;
    s.m = m;
    s.regime = r;
    s.parity = parity;
    s.lambda = std::pow(f.mass_coeff / f.stiffness_q, 0.25);
    s.nu = std::pow(f.mass_coeff / f.stiffness_p, 0.25);
    s.offset = std::abs(pt.x);
    return s;
}

double eigenfunction_value(const EffectiveParams& e, const CVEigenstate& s, double x, double y) {
    if (s.regime.strength != Strength::strong) {
        const double q = (x + y) / std::numbers::sqrt2;
        const double p = (x - y) / std::numbers::sqrt2;
        return oscillator_factor(s.n, s.m, s.lambda, s.nu, q, p);
    }
    (void)e;
    // minima at +-(x1, -x1) for w > 0 and +-(x1, x1) for w < 0
    const double cy = s.regime.sign == InteractionSign::repulsive ? -s.offset : s.offset;
    auto local = [&](double mx, double my) {
        const double q = ((x - mx) + (y - my)) / std::numbers::sqrt2;
        const double p = ((x - mx) - (y - my)) / std::numbers::sqrt2;
        return oscillator_factor(s.n, s.m, s.lambda, s.nu, q, p);
    };
    return (local(s.offset, cy) + s.parity * local(-s.offset, -cy)) / std::numbers::sqrt2;
}

AmplitudeGrid eigenfunction_density(const EffectiveParams& e, const CVEigenstate& s, const FockBasis& basis,
                                    double* raw_mass) {
    const int Na = basis.N_a();
    const int Nb = basis.N_b();
    if (Na < 1 || Nb < 1) throw std::invalid_argument("eigenfunction_density: empty lattice");
    const Regime r = classify_regime(e);
    if (!(r == s.regime)) throw std::invalid_argument("eigenfunction_density: state regime does not match parameters");
    AmplitudeGrid g;
    g.values.resize(Na + 1, Nb + 1);
    for (int i = 0; i <= Na; ++i)
        for (int j = 0; j <= Nb; ++j) {
            const double psi = eigenfunction_value(e, s, 2.0 * i / Na - 1.0, 2.0 * j / Nb - 1.0);
            g.values(i, j) = psi * psi;
        }
    const double spacing = 2.0 / std::min(Na, Nb);
    g.width_underflow = s.lambda < spacing || s.nu < spacing;
    if (raw_mass) *raw_mass = g.values.sum() * (2.0 / Na) * (2.0 / Nb);
    g.normalize();
    return g;
}

}  // namespace cvdimer
