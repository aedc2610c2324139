#include "boostctl/controllers.hpp"
#include "boostctl/errors.hpp"
#include "boostctl/rk4.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

using namespace boostctl;
using Catch::Approx;

namespace {

const PlantParams kP{};

ReferenceSignal stationary(double xr) { return {xr, 0.0, 0.0}; }

}  // namespace

TEST_CASE("fixed-time law at zero error", "[ftc]") {
    const FtcGains gains;
    FtcState st;
    const double xr = reference_energy(12.0, 10.0, kP);
    const auto out = ftc_step(gains, st, xr, 0.0, stationary(xr));
    CHECK(out.e1 == 0.0);
    CHECK(out.e2 == 0.0);
    CHECK(out.alpha == 0.0);
    CHECK(out.alpha_dot_hat == 0.0);
    CHECK(out.nu == 0.0);

    // With feedforward only: alpha = xr_dot, nu = alpha_dot_hat.
    FtcState st2;
    const ReferenceSignal moving{xr, 0.3, -2.0};
    const auto ff = ftc_step(gains, st2, xr, 0.3, moving);
    CHECK(ff.alpha == Approx(0.3));
    CHECK(ff.e2 == Approx(0.0).margin(1e-15));
    CHECK(ff.nu == Approx(ff.alpha_dot_hat));
    CHECK(ff.alpha_dot_hat == Approx(-2.0));
}

TEST_CASE("fixed-time law is odd in the errors", "[ftc][property]") {
    for (auto kind : {UssfKind::Tanh, UssfKind::ScaledArctan, UssfKind::AlgebraicSigmoid, UssfKind::ErrorFunction}) {
        FtcGains gains;
        gains.f = Ussf(kind);
        gains.g = Ussf(kind);
        for (double iota : {2.5, 3.0, 4.2}) {
            gains.iota = iota;
            for (double e1 : {1e-4, 0.02, 0.7, 3.0}) {
                for (double e2 : {-5.0, 1e-3, 0.4}) {
                    // Choose x2 so that x2 - alpha = e2 in both signs.
                    FtcState s;
                    const auto a = ftc_step(gains, s, e1, 0.0, stationary(0.0));
                    const auto pos = ftc_step(gains, s, e1, a.alpha + e2, stationary(0.0));
                    const auto b = ftc_step(gains, s, -e1, 0.0, stationary(0.0));
                    const auto neg = ftc_step(gains, s, -e1, b.alpha - e2, stationary(0.0));
                    REQUIRE(neg.alpha == Approx(-pos.alpha).epsilon(1e-12));
                    REQUIRE(neg.e2 == Approx(-pos.e2).epsilon(1e-9));
                    const double usf_pos = pos.nu - pos.alpha_dot_hat;
                    const double usf_neg = neg.nu - neg.alpha_dot_hat;
                    REQUIRE(usf_neg == Approx(-usf_pos).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("fixed-time law stays finite everywhere", "[ftc][property]") {
    const FtcGains gains;
    const std::vector<double> es{0.0, 1e-300, -1e-300, 1e-8, -1e-8, 1.0, -1.0, 1e3, -1e3, 1e6, -1e6};
    for (double e1 : es) {
        for (double x2 : es) {
            FtcState st;
            const auto out = ftc_step(gains, st, 7e-3 + e1, x2, {7e-3, 1e-4, -1e-3}, DisturbanceEstimate{0.5, -0.5});
            REQUIRE(std::isfinite(out.nu));
            REQUIRE(std::isfinite(out.alpha));
            REQUIRE(std::isfinite(out.alpha_dot_hat));
        }
    }
    // Fractional exponent around zero.
    FtcGains frac = gains;
    frac.iota = 2.3;
    FtcState st;
    const auto out = ftc_step(frac, st, 1e-12, 0.0, stationary(0.0));
    CHECK(std::isfinite(out.nu));
}

TEST_CASE("fixed-time law names the non-finite term", "[ftc]") {
    const FtcGains gains;
    FtcState st;
    try {
        ftc_step(gains, st, std::numeric_limits<double>::quiet_NaN(), 0.0, stationary(0.0));
        FAIL("expected ControllerFault");
    } catch (const ControllerFault& e) {
        CHECK(e.term() == "e1");
    }
    try {
        ftc_step(gains, st, 0.0, std::numeric_limits<double>::infinity(), stationary(0.0));
        FAIL("expected ControllerFault");
    } catch (const ControllerFault& e) {
        CHECK(e.term() == "alpha_dot_hat");
    }
}

TEST_CASE("disturbance compensation enters alpha and nu only", "[ftc]") {
    const FtcGains gains;
    FtcState a, b;
    const auto plain = ftc_step(gains, a, 0.01, 2.0, stationary(0.0));
    const auto comp = ftc_step(gains, b, 0.01, 2.0, stationary(0.0), DisturbanceEstimate{3.0, 5.0});
    CHECK(comp.alpha == Approx(plain.alpha - 3.0));
    CHECK(comp.alpha_dot_hat == Approx(plain.alpha_dot_hat));
    CHECK(comp.e2 == Approx(plain.e2 + 3.0));
}

TEST_CASE("cross-term switch", "[ftc]") {
    FtcGains g1;
    g1.k4 = g1.k5 = 0.0;
    FtcGains g2 = g1;
    g2.cross_term = CrossTerm::E2;
    FtcState s1, s2;
    const auto o1 = ftc_step(g1, s1, 0.2, 1.0, stationary(0.0));
    const auto o2 = ftc_step(g2, s2, 0.2, 1.0, stationary(0.0));
    CHECK(o1.nu - o1.alpha_dot_hat == Approx(-o1.e1));
    CHECK(o2.nu - o2.alpha_dot_hat == Approx(-o2.e2));
}

TEST_CASE("alpha rate estimate matches a finite difference along the flow", "[ftc][oracle]") {
    // With no disturbance, e1 moves as de1/dt = x2 - xr_dot, so alpha_dot_hat
    // must equal the time derivative of alpha along that motion.
    FtcGains gains;
    gains.iota = 3.4;
    const double h = 1e-9;
    for (double e1 : {-0.3, 0.01, 0.2}) {
        for (double x2 : {-1.0, 0.5}) {
            FtcState s;
            const ReferenceSignal ref{0.0, 0.0, 0.0};
            const auto now = ftc_step(gains, s, e1, x2, ref);
            const auto next = ftc_step(gains, s, e1 + h * x2, x2, ref);
            const auto prev = ftc_step(gains, s, e1 - h * x2, x2, ref);
            const double fd = (next.alpha - prev.alpha) / (2.0 * h);
            REQUIRE(now.alpha_dot_hat == Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("fixed-time gain conditions", "[ftc]") {
    FtcGains g;
    CHECK_NOTHROW(g.validate());
    g.k3 = 0.5;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = FtcGains{};
    g.k6 = 0.4;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = FtcGains{};
    g.iota = 2.0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = FtcGains{};
    g.k5 = -1.0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = FtcGains{};
    g.k1 = g.k2 = 0.0;
    CHECK_NOTHROW(g.validate());
}

TEST_CASE("Lyapunov inequality on the ideal transformed system", "[ftc][lyapunov][property]") {
    // dx1/dt = x2, dx2/dt = nu with a stationary reference. Outside V > 10 C,
    // dV/dt <= -kappa1 V^(1/2) - kappa2 V^(iota/2) + C with
    // kappa1 = 2 min(k1, k4), kappa2 = 2 min(k2, k5), C = (k1 + k2 + k4 + k5) eps.
    FtcGains gains;
    gains.k1 = 2.0;
    gains.k2 = 1.0;
    gains.k3 = 1.0;
    gains.k4 = 3.0;
    gains.k5 = 1.0;
    gains.k6 = 1.0;
    const double eps = 0.38490017945975050967;
    const double kappa1 = 2.0 * std::min(gains.k1, gains.k4);
    const double kappa2 = 2.0 * std::min(gains.k2, gains.k5);
    const double C = (gains.k1 + gains.k2 + gains.k4 + gains.k5) * eps;
    const double h = 1e-5;
    std::int64_t audited = 0;
    for (double e10 : {-40.0, -6.0, 8.0, 30.0}) {
        for (double e20 : {-25.0, 0.0, 12.0}) {
            FtcState st;
            const ReferenceSignal ref = stationary(0.0);
            std::array<double, 2> x{e10, 0.0};
            x[1] = ftc_step(gains, st, x[0], 0.0, ref).alpha + e20;
            for (int k = 0; k < 200'000; ++k) {
                const auto out = ftc_step(gains, st, x[0], x[1], ref);
                const double V = lyapunov_value(out.e1, out.e2);
                if (V <= 10.0 * C) break;
                x = rk4_advance<2>(x, h, [&](const std::array<double, 2>& y) {
                    return std::array<double, 2>{y[1], out.nu};
                });
                const auto after = ftc_step(gains, st, x[0], x[1], ref);
                const double dV = (lyapunov_value(after.e1, after.e2) - V) / h;
                REQUIRE(dV <= -kappa1 * std::sqrt(V) - kappa2 * std::pow(V, gains.iota / 2.0) + C + 1e-6);
                ++audited;
            }
        }
    }
    CHECK(audited > 1000);
}

TEST_CASE("reference derivatives for a constant load estimate", "[reference]") {
    const std::vector<double> r(50, 10.0);
    const auto out = reference_derivatives(r, kP, 1e-6);
    REQUIRE(out.size() == r.size());
    for (const auto& s : out) {
        CHECK(s.xr == Approx(7.2288e-3).epsilon(1e-12));
        CHECK(s.xr_dot == 0.0);
        CHECK(s.xr_ddot == 0.0);
    }
    CHECK_THROWS_AS(reference_derivatives(std::vector<double>{10.0, 10.0}, kP, 1e-6), ValidationError);
}

TEST_CASE("reference energy drop for a load estimate step", "[reference]") {
    std::vector<double> r(10, 10.0);
    r.insert(r.end(), 10, 20.0);
    const auto out = reference_derivatives(r, kP, 1e-6);
    CHECK(out.front().xr - out.back().xr == Approx(2.16e-5).epsilon(1e-9));
    CHECK(out[10].xr_dot < 0.0);
}

TEST_CASE("reference rate under a linear conductance ramp", "[reference][oracle]") {
    const double h = 1e-6;
    std::vector<double> r;
    for (int k = 0; k < 2000; ++k) r.push_back(1.0 / (0.1 - 20.0 * k * h));  // G: 0.1 -> 0.06 S
    const auto out = reference_derivatives(r, kP, h);
    for (std::size_t k = 1; k + 1 < out.size(); ++k) {
        const double fd = (out[k + 1].xr - out[k - 1].xr) / (2.0 * h);
        REQUIRE(out[k].xr_dot == Approx(fd).epsilon(0.01));
    }
    // Second derivative settles onto the finite difference of the first.
    const std::size_t k = out.size() - 2;
    const double fd2 = (out[k + 1].xr_dot - out[k - 1].xr_dot) / (2.0 * h);
    CHECK(out[k].xr_ddot == Approx(fd2).epsilon(0.01));
}

TEST_CASE("streaming reference generator uses the supplied rate", "[reference]") {
    ReferenceGenerator gen(kP, 1e-6);
    const double rate = 5.0;
    const auto s = gen.update(10.0, rate);
    CHECK(s.xr_dot == Approx(reference_energy_sensitivity(12.0, 10.0, kP) * rate));
    // d xr / d R = -L vr^4 / (Vi^2 R^3)
    CHECK(reference_energy_sensitivity(12.0, 10.0, kP) == Approx(-10e-6 * 20736.0 / (36.0 * 1000.0)));
    CHECK_THROWS_AS(ReferenceGenerator(kP, 0.0), ValidationError);
}

TEST_CASE("baseline law", "[baseline]") {
    const double xr = 7.2288e-3;
    auto z = baseline_step(1e5, 1e5, xr, 0.0, stationary(xr));
    CHECK(z.nu == 0.0);
    CHECK(z.alpha == 0.0);

    const ReferenceSignal ref{xr, 0.2, 0.0};
    const auto one = baseline_step(1e5, 1e5, xr + 1e-4, 0.0, ref);
    const auto two = baseline_step(1e5, 1e5, xr + 2e-4, 0.0, ref);
    CHECK(two.alpha - ref.xr_dot == Approx(2.0 * (one.alpha - ref.xr_dot)));
    CHECK(one.e2 == Approx(0.0 - one.alpha));
    CHECK(one.nu == Approx(-1e5 * one.e2));
}

TEST_CASE("PID at zero error", "[pid]") {
    const PidGains gains;
    PidState st;
    CHECK(pid_step(gains, st, {12.0, 0.0}, 12.0, 1e-6) == kDutyMin);
    CHECK(st.voltage_error == 0.0);
    CHECK(st.current_error == 0.0);
}

TEST_CASE("PID pure current integrator", "[pid]") {
    PidGains gains;
    gains.kv_p = gains.kv_i = gains.kv_d = 0.0;
    gains.ki_p = gains.ki_d = 0.0;
    gains.ki_i = 1.0;
    PidState st;
    const double E = 1.0, h = 1e-4;
    const int n = 5000;  // T = 0.5 s
    double u = 0.0;
    for (int k = 0; k < n; ++k) u = pid_step(gains, st, {12.0, -E}, 12.0, h);
    CHECK(u == Approx(gains.ki_i * E * n * h).epsilon(1e-9));
}

TEST_CASE("PID conditional integration", "[pid]") {
    const PidGains gains;
    PidState st;
    for (int k = 0; k < 1000; ++k) pid_step(gains, st, {0.0, 0.0}, 12.0, 1e-6);
    const double frozen_current = st.current_integral;
    for (int k = 0; k < 1000; ++k) CHECK(pid_step(gains, st, {0.0, 0.0}, 12.0, 1e-6) == kDutyMax);
    CHECK(st.current_integral == frozen_current);
}

TEST_CASE("PID gain validation", "[pid]") {
    PidGains g;
    CHECK_NOTHROW(g.validate());
    g.ki_p = -1.0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
    g = PidGains{};
    g.current_integral_limit = 0.0;
    CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("Lyapunov function values", "[lyapunov]") {
    CHECK(lyapunov_value(0.0, 0.0) == 0.0);
    CHECK(lyapunov_value(1.0, 1.0) == 1.0);
    CHECK(lyapunov_value(3.0, 4.0) == 12.5);
}
