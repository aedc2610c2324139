#include "boostctl/estimators.hpp"

#include "boostctl/errors.hpp"
#include "boostctl/rk4.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace boostctl {

void AdaptiveObserverGains::validate() const {
    if (!(K1 > 0.0 && K2 > 0.0 && kappa > 0.0)) throw ValidationError("observer gains must be positive");
    if (!(g_floor > 0.0 && g_ceiling > g_floor)) throw ValidationError("observer conductance bounds are invalid");
}

double conductance_rate(const AdaptiveObserverState& obs, const AdaptiveObserverGains& gains, Measurement meas) {
    const double rate = -gains.kappa * meas.v0 * (meas.v0 - obs.v0_hat);
    if (obs.G_hat <= gains.g_floor && rate < 0.0) return 0.0;
    if (obs.G_hat >= gains.g_ceiling && rate > 0.0) return 0.0;
    return rate;
}

std::array<double, 3> adaptive_observer_rhs(const std::array<double, 3>& s, const AdaptiveObserverGains& gains,
                                            Measurement meas, double u, const PlantParams& p) {
    const double on = 1.0 - u;
    return {-on * s[1] / p.inductance + p.input_voltage / p.inductance + gains.K1 * (meas.iL - s[0]),
            on * s[0] / p.capacitance - s[2] * meas.v0 / p.capacitance + gains.K2 * (meas.v0 - s[1]),
            -gains.kappa * meas.v0 * (meas.v0 - s[1])};
}

AdaptiveObserverState adaptive_observer_step(const AdaptiveObserverState& obs, const AdaptiveObserverGains& gains,
                                             Measurement meas, double u, const PlantParams& p, double h) {
    const auto y = rk4_advance<3>({obs.iL_hat, obs.v0_hat, obs.G_hat}, h, [&](const std::array<double, 3>& s) {
        return adaptive_observer_rhs(s, gains, meas, u, p);
    });

    AdaptiveObserverState next;
    next.iL_hat = y[0];
    next.v0_hat = y[1];
    next.G_hat = std::clamp(y[2], gains.g_floor, gains.g_ceiling);
    next.projected = next.G_hat != y[2];
    return next;
}

void DisturbanceObserverGains::validate() const {
    for (const double k : kappa) {
        if (!(k > 0.0)) throw ValidationError("disturbance observer gains must be positive");
    }
    if (!(theta > 2.0)) throw ValidationError("disturbance observer exponent theta must exceed 2");
}

namespace {

// -k_a s(e) - k_b |e|^(theta-1) s(sgn(e)|e|^theta) - k_c e
double fixed_time_injection(const Ussf& s, double e, double theta, double ka, double kb, double kc) {
    const double high = signed_power(e, theta);
    return -ka * s.eval(e) - kb * std::pow(std::abs(e), theta - 1.0) * s.eval(high) - kc * e;
}

}  // namespace

DisturbanceEstimate disturbance_estimate(const DisturbanceObserverState& dob, const DisturbanceObserverGains& gains,
                                         double x1, double x2) {
    const auto& k = gains.kappa;
    return {fixed_time_injection(gains.r, dob.x1_hat - x1, gains.theta, k[0], k[1], k[2]),
            fixed_time_injection(gains.h, dob.x2_hat - x2, gains.theta, k[3], k[4], k[5])};
}

DisturbanceObserverState disturbance_observer_step(const DisturbanceObserverState& dob,
                                                   const DisturbanceObserverGains& gains, double x1, double x2,
                                                   double nu, double h) {
    const auto& k = gains.kappa;
    DisturbanceEstimate start;
    std::array<double, 2> y{};
    try {
        start = disturbance_estimate(dob, gains, x1, x2);
        y = rk4_advance<2>({dob.x1_hat, dob.x2_hat}, h, [&](const std::array<double, 2>& s) {
            return std::array<double, 2>{
                x2 + fixed_time_injection(gains.r, s[0] - x1, gains.theta, k[0], k[1], k[2]),
                nu + fixed_time_injection(gains.h, s[1] - x2, gains.theta, k[3], k[4], k[5])};
        });
    } catch (const DomainError& e) {
        throw ObserverFault(std::string("disturbance observer: ") + e.what());
    }
    if (!std::isfinite(start.d1) || !std::isfinite(start.d2) || !std::isfinite(y[0]) || !std::isfinite(y[1])) {
        throw ObserverFault("disturbance observer produced a non-finite value");
    }
    return {y[0], y[1], start.d1, start.d2};
}

}  // namespace boostctl
