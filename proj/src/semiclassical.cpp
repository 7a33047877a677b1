#include "cvdimer/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cvdimer/cv.hpp"
#include "cvdimer/format.hpp"

namespace cvdimer {

namespace {

void check_point(const PhasePoint& pt) {
    if (!(std::abs(pt.x) < 1.0) || !(std::abs(pt.y) < 1.0))
        throw std::domain_error("phase point imbalance must lie in (-1, 1)");
}

PhasePoint advance(const PhasePoint& p, const PhaseVelocity& v, double h) {
    return {p.x + h * v.x, p.y + h * v.y, p.theta_x + h * v.theta_x, p.theta_y + h * v.theta_y};
}

constexpr double kBoundary = 1.0 - 1e-9;

bool near_boundary(const PhasePoint& p) { return std::abs(p.x) >= kBoundary || std::abs(p.y) >= kBoundary; }

}  // namespace

double hs_energy(const EffectiveParams& e, const PhasePoint& pt) {
    check_point(pt);
    const double x = pt.x;
    const double y = pt.y;
    return 0.25 * e.u_a * (1.0 + x * x) + 0.25 * e.u_b * (1.0 + y * y) + 0.5 * e.w * (1.0 + x * y) -
           e.tau_a * std::sqrt(1.0 - x * x) * std::cos(2.0 * pt.theta_x) -
           e.tau_b * std::sqrt(1.0 - y * y) * std::cos(2.0 * pt.theta_y);
}

PhaseVelocity hamilton_rhs(const EffectiveParams& e, const PhasePoint& pt) {
    check_point(pt);
    const double sx = std::sqrt(1.0 - pt.x * pt.x);
    const double sy = std::sqrt(1.0 - pt.y * pt.y);
    PhaseVelocity v;
    v.theta_x = e.eps_a * (0.5 * e.w * pt.y + 0.5 * e.u_a * pt.x + pt.x * e.tau_a * std::cos(2.0 * pt.theta_x) / sx);
    v.theta_y = e.eps_b * (0.5 * e.w * pt.x + 0.5 * e.u_b * pt.y + pt.y * e.tau_b * std::cos(2.0 * pt.theta_y) / sy);
    v.x = -2.0 * e.tau_a * e.eps_a * sx * std::sin(2.0 * pt.theta_x);
    v.y = -2.0 * e.tau_b * e.eps_b * sy * std::sin(2.0 * pt.theta_y);
    return v;
}

Trajectory integrate(const EffectiveParams& e, const PhasePoint& start, double t_end, double dt, int stride) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("integrate: dt and t_end must be positive");
    if (stride < 1) throw std::invalid_argument("integrate: stride must be >= 1");
    check_point(start);
    Trajectory tr;
    tr.dt = dt;
    const double e0 = hs_energy(e, start);
    const double denom = std::max(1.0, std::abs(e0));
    tr.samples.push_back({0.0, start, e0});

    const auto steps = static_cast<long>(std::llround(t_end / dt));
    PhasePoint p = start;
    for (long s = 1; s <= steps; ++s) {
        const PhaseVelocity k1 = hamilton_rhs(e, p);
        const PhasePoint p2 = advance(p, k1, 0.5 * dt);
        if (near_boundary(p2)) { tr.hit_boundary = true; break; }
        const PhaseVelocity k2 = hamilton_rhs(e, p2);
        const PhasePoint p3 = advance(p, k2, 0.5 * dt);
        if (near_boundary(p3)) { tr.hit_boundary = true; break; }
        const PhaseVelocity k3 = hamilton_rhs(e, p3);
        const PhasePoint p4 = advance(p, k3, dt);
        if (near_boundary(p4)) { tr.hit_boundary = true; break; }
        const PhaseVelocity k4 = hamilton_rhs(e, p4);
        p.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        p.y += dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
        p.theta_x += dt / 6.0 * (k1.theta_x + 2.0 * k2.theta_x + 2.0 * k3.theta_x + k4.theta_x);
        p.theta_y += dt / 6.0 * (k1.theta_y + 2.0 * k2.theta_y + 2.0 * k3.theta_y + k4.theta_y);
        if (near_boundary(p)) { tr.hit_boundary = true; break; }
        const double en = hs_energy(e, p);
        tr.max_relative_drift = std::max(tr.max_relative_drift, std::abs(en - e0) / denom);
        if (s % stride == 0 || s == steps) tr.samples.push_back({static_cast<double>(s) * dt, p, en});
    }
    return tr;
}

std::vector<PhasePoint> fixed_points(const EffectiveParams& e) {
    const auto pts = is_symmetric_case(e) ? stationary_points_symmetric(e)
                                          : stationary_points_general(e, default_seeds(e));
    std::vector<PhasePoint> out;
    out.reserve(pts.size());
    for (const auto& s : pts) out.push_back({s.x, s.y, 0.0, 0.0});
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,x,y,theta_x,theta_y,energy\n";
    for (const auto& s : tr.samples)
        os << fmt15(s.t) << ',' << fmt15(s.point.x) << ',' << fmt15(s.point.y) << ',' << fmt15(s.point.theta_x) << ','
           << fmt15(s.point.theta_y) << ',' << fmt15(s.energy) << '\n';
}

}  // namespace cvdimer
