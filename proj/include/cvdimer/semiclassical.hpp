// semiclassical.hpp: mean-field dimer dynamics in imbalance/phase variables.
//
// Brackets {x, theta_x} = 1/N_a, {y, theta_y} = 1/N_b (hbar = 1). The flow is
//   N_a dtheta_x/dt =  dH_s/dx,   N_a dx/dt = -dH_s/dtheta_x
// and the same for (y, theta_y), which keeps H_s constant along orbits.

#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "cvdimer/model.hpp"

namespace cvdimer {

struct PhasePoint {
    double x{0.0};
    double y{0.0};
    double theta_x{0.0};
    double theta_y{0.0};
};

struct PhaseVelocity {
    double x{0.0};
    double y{0.0};
    double theta_x{0.0};
    double theta_y{0.0};
};

/// H_s = u_a(1+x^2)/4 + u_b(1+y^2)/4 + w(1+xy)/2 - tau_a sqrt(1-x^2) cos 2theta_x - tau_b sqrt(1-y^2) cos 2theta_y
double hs_energy(const EffectiveParams& e, const PhasePoint& pt);

PhaseVelocity hamilton_rhs(const EffectiveParams& e, const PhasePoint& pt);

struct TrajectorySample {
    double t{0.0};
    PhasePoint point;
    double energy{0.0};
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double dt{0.0};
    const char* scheme{"rk4"};
    double max_relative_drift{0.0};
    /// Set when the orbit reached |x| or |y| >= 1 - 1e-9 and stopped early.
    bool hit_boundary{false};
};

/// Fixed-step RK4 from t = 0 to t_end; one sample every `stride` steps (plus the last).
Trajectory integrate(const EffectiveParams& e, const PhasePoint& start, double t_end, double dt, int stride = 1);

/// theta = 0 points whose (x, y) solve the population equations.
std::vector<PhasePoint> fixed_points(const EffectiveParams& e);

/// CSV "t,x,y,theta_x,theta_y,energy".
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace cvdimer
