#pragma once

// Duty-ratio controllers for the boost converter:
//   * fixed-time backstepping on the energy coordinates with USSF shaping,
//   * the linear energy-coordinate backstepping baseline,
//   * a cascaded voltage/current PID.

#include "boostctl/estimators.hpp"
#include "boostctl/plant.hpp"
#include "boostctl/ussf.hpp"

#include <optional>
#include <span>
#include <vector>

namespace boostctl {

/// Which error multiplies k6 in the second-stage law. The literal law uses e1.
enum class CrossTerm { E1, E2 };

struct FtcGains {
    double k1 = 1e4;
    double k2 = 1e4;
    double k3 = 1.0;
    double k4 = 9e4;
    double k5 = 9e4;
    double k6 = 1.0;
    double iota = 3.0;
    Ussf f{UssfKind::AlgebraicSigmoid};
    Ussf g{UssfKind::AlgebraicSigmoid};
    CrossTerm cross_term = CrossTerm::E1;

    /// Rejects k3 <= 1/2, k6 <= 1/2, iota <= 2 and negative k1, k2, k4, k5.
    void validate() const;
};

/// Energy reference and its first two time derivatives.
struct ReferenceSignal {
    double xr = 0.0;      // J
    double xr_dot = 0.0;  // W
    double xr_ddot = 0.0;  // W/s
};

struct FtcState {
    double alpha_prev = 0.0;
    double alpha_dot_fd = 0.0;  // finite-difference alpha rate, diagnostic only
    bool has_prev = false;
};

struct FtcOutput {
    double nu = 0.0;     // W/s
    double alpha = 0.0;  // W
    double alpha_dot_hat = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
};

/// One evaluation of the fixed-time law. `d_hat`, when given, is subtracted
/// from alpha and nu; it does not enter the alpha-rate estimate.
/// Throws ControllerFault naming the first non-finite term.
FtcOutput ftc_step(const FtcGains& gains, FtcState& state, double x1, double x2, const ReferenceSignal& ref,
                   const std::optional<DisturbanceEstimate>& d_hat = std::nullopt, double h = 0.0);

/// Streaming reference generator. The first derivative comes from the chain
/// rule through the load estimate; the second is a backward difference of the
/// first passed through a first-order low-pass filter with time constant 10 h.
class ReferenceGenerator {
public:
    ReferenceGenerator(const PlantParams& p, double h);

    /// `r_hat_rate` is dR_hat/dt, e.g. -dG_hat/dt / G_hat^2.
    ReferenceSignal update(double r_hat, double r_hat_rate);

private:
    PlantParams params_;
    double h_;
    double prev_dot_ = 0.0;
    double ddot_ = 0.0;
    int samples_ = 0;
};

/// Batch form over a sampled load-estimate history; dR_hat/dt is taken as a
/// backward difference (zero on the first sample).
std::vector<ReferenceSignal> reference_derivatives(std::span<const double> r_hat, const PlantParams& p, double h);

/// d x_r_hat / d R_hat.
double reference_energy_sensitivity(double vr, double r_hat, const PlantParams& p);

struct BaselineOutput {
    double nu = 0.0;
    double alpha = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
};

/// alpha = -c1 e1 + xr_dot, nu = -c2 e2 + xr_ddot.
BaselineOutput baseline_step(double c1, double c2, double x1, double x2, const ReferenceSignal& ref);

struct PidGains {
    double kv_p = 5.0;
    double kv_i = 40.0;
    double kv_d = 0.0;
    double ki_p = 20.0;
    double ki_i = 1.0;
    double ki_d = 0.0;
    double voltage_integral_limit = 1e3;  // V s
    double current_integral_limit = 1e3;  // A s

    void validate() const;
};

struct PidState {
    double voltage_integral = 0.0;
    double current_integral = 0.0;
    double voltage_error_prev = 0.0;
    double current_error_prev = 0.0;
    double voltage_derivative = 0.0;  // filtered
    double current_derivative = 0.0;  // filtered
    bool has_prev = false;
    // Last loop errors, for tracing.
    double voltage_error = 0.0;
    double current_error = 0.0;
    double current_reference = 0.0;
};

/// Outer loop: (vr - v0) -> current reference. Inner loop: (i_ref - iL) -> duty.
/// Integrators use the rectangle rule and freeze while the duty is clamped in
/// the direction the error pushes (conditional integration).
double pid_step(const PidGains& gains, PidState& state, Measurement meas, double vr, double h);

/// V = (e1^2 + e2^2) / 2.
double lyapunov_value(double e1, double e2);

}  // namespace boostctl
