#pragma once

#include "boostctl/plant.hpp"
#include "boostctl/ussf.hpp"

#include <array>

namespace boostctl {

struct Measurement {
    double v0 = 0.0;  // V
    double iL = 0.0;  // A
};

// ---------------------------------------------------------------------------
// Adaptive state / load observer
//
//   d iL_hat/dt = -(1-u) v0_hat / L + Vi / L + K1 (iL - iL_hat)
//   d v0_hat/dt = (1-u) iL_hat / C - G_hat v0 / C + K2 (v0 - v0_hat)
//   d G_hat/dt  = -kappa v0 (v0 - v0_hat)
// ---------------------------------------------------------------------------

struct AdaptiveObserverGains {
    double K1 = 4165.0;     // 1/s
    double K2 = 4165.0;     // 1/s
    double kappa = 200.0;   // S/(V^2 s)
    double g_floor = 1e-3;  // S
    double g_ceiling = 10.0;  // S

    void validate() const;
};

struct AdaptiveObserverState {
    double iL_hat = 0.0;
    double v0_hat = 0.0;
    double G_hat = 0.1;
    bool projected = false;  // last step hit the conductance bounds

    double r_hat() const noexcept { return 1.0 / G_hat; }
};

/// Conductance adaptation rate at the current state; zero when the
/// projection is active and the rate would push further out of bounds.
double conductance_rate(const AdaptiveObserverState& obs, const AdaptiveObserverGains& gains, Measurement meas);

/// Observer right-hand side for state (iL_hat, v0_hat, G_hat), without projection.
std::array<double, 3> adaptive_observer_rhs(const std::array<double, 3>& state, const AdaptiveObserverGains& gains,
                                            Measurement meas, double u, const PlantParams& p);

/// RK4 step with measurement and duty held over the step, then projection of
/// G_hat onto [g_floor, g_ceiling].
AdaptiveObserverState adaptive_observer_step(const AdaptiveObserverState& obs, const AdaptiveObserverGains& gains,
                                             Measurement meas, double u, const PlantParams& p, double h);

// ---------------------------------------------------------------------------
// Fixed-time disturbance observer on the transformed system
// ---------------------------------------------------------------------------

struct DisturbanceObserverGains {
    // kappa[0..2] shape d1_hat, kappa[3..5] shape d2_hat.
    std::array<double, 6> kappa{1e3, 100.0, 1e4, 1e3, 100.0, 1e4};
    double theta = 3.0;
    Ussf r{UssfKind::AlgebraicSigmoid};
    Ussf h{UssfKind::AlgebraicSigmoid};

    void validate() const;
};

struct DisturbanceObserverState {
    double x1_hat = 0.0;  // J
    double x2_hat = 0.0;  // W
    double d1_hat = 0.0;  // W, at the start of the last step
    double d2_hat = 0.0;  // W/s, at the start of the last step
};

struct DisturbanceEstimate {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Disturbance estimates for the current observer state and measured (x1, x2).
DisturbanceEstimate disturbance_estimate(const DisturbanceObserverState& dob, const DisturbanceObserverGains& gains,
                                         double x1, double x2);

/// Records the estimates at the step start, then integrates (x1_hat, x2_hat)
/// with RK4 holding (x1, x2, nu). Throws ObserverFault on non-finite values.
DisturbanceObserverState disturbance_observer_step(const DisturbanceObserverState& dob,
                                                   const DisturbanceObserverGains& gains, double x1, double x2,
                                                   double nu, double h);

}  // namespace boostctl
