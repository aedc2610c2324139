#pragma once

// Averaged and PWM-switched boost converter models, the load schedule, and the
// energy-coordinate transform that puts the converter in strict-feedback form:
//
//   x1 = (C v0^2 + L iL^2) / 2          dx1/dt = x2 + d1
//   x2 = Vi iL - v0^2 / R_hat           dx2/dt = nu + d2

#include <stdexcept>
#include <string>
#include <vector>

namespace boostctl {

struct PlantParams {
    double inductance = 10e-6;         // H
    double capacitance = 100e-6;       // F
    double input_voltage = 6.0;        // V
    double v_ref = 12.0;               // V
    double switching_frequency = 100e3;  // Hz

    /// Throws ValidationError unless all fields are positive and the step
    /// resolves at least one integration step per switching period.
    void validate(double step) const;
};

struct LoadSegment {
    double t_start = 0.0;     // s
    double resistance = 10.0;  // ohm
};

class LoadSchedule {
public:
    /// Segments must start at 0, be strictly increasing in time, and carry R > 0.
    explicit LoadSchedule(std::vector<LoadSegment> segments);

    static LoadSchedule constant(double resistance);
    /// 10 ohm, 20 ohm from 0.2 s, 10 ohm from 0.6 s.
    static LoadSchedule standard_steps();

    double resistance_at(double t) const;
    const std::vector<LoadSegment>& segments() const noexcept { return segments_; }

private:
    std::vector<LoadSegment> segments_;
};

struct PlantState {
    double v0 = 0.0;  // V
    double iL = 0.0;  // A
    double t = 0.0;   // s
};

struct PlantDerivative {
    double dv0 = 0.0;  // V/s
    double diL = 0.0;  // A/s
};

struct TransformedState {
    double x1 = 0.0;  // J
    double x2 = 0.0;  // W
    double d1 = 0.0;  // W
    double d2 = 0.0;  // W/s
};

/// Raised when the integrated state turns non-finite.
class IntegrationFault : public std::runtime_error {
public:
    IntegrationFault(const PlantState& last_good, const std::string& what)
        : std::runtime_error(what), last_good_(last_good) {}

    const PlantState& last_good() const noexcept { return last_good_; }

private:
    PlantState last_good_;
};

/// Averaged converter dynamics for duty u in [0, 1].
PlantDerivative plant_deriv(const PlantState& state, double u, double resistance, const PlantParams& p);

/// Classical RK4 over one step with u held and R read from the schedule at
/// the step start.
PlantState step_rk4(const PlantState& state, double u, const LoadSchedule& schedule, const PlantParams& p, double h);

struct SwitchedStep {
    PlantState state;
    double carrier_phase = 0.0;  // in [0, 1)
};

/// Trailing-edge PWM: the switch conducts while the carrier phase is below u.
/// Switching instants inside the step are resolved exactly by splitting the
/// step into constant-switch segments, each integrated with RK4.
SwitchedStep step_switched(const PlantState& state, double u, const LoadSchedule& schedule, const PlantParams& p,
                           double h, double carrier_phase);

TransformedState to_transformed(const PlantState& state, double resistance, double r_hat, const PlantParams& p);

/// Transformed input produced by duty u (the forward map).
double duty_to_nu(double u, const PlantState& state, double r_hat, const PlantParams& p);

inline constexpr double kDutyMin = 0.01;
inline constexpr double kDutyMax = 0.99;
inline constexpr double kDenominatorGuard = 1e-6;

struct DutyCommand {
    double duty = 0.5;
    bool singular = false;  // denominator below guard; duty is the previous one
    bool clamped = false;
};

/// Inverts the forward map for u and clamps to [kDutyMin, kDutyMax].
DutyCommand nu_to_duty(double nu, const PlantState& state, double r_hat, const PlantParams& p,
                       double previous_duty = 0.5);

/// Implementable energy reference for output voltage vr under the load estimate.
double reference_energy(double vr, double r_hat, const PlantParams& p);

}  // namespace boostctl
