#pragma once

#include <array>
#include <cstddef>

namespace boostctl {

/// One classical fourth-order Runge-Kutta step of y' = rhs(y) with the
/// right-hand side held autonomous over the step (inputs are zero-order held
/// by the caller).
template <std::size_t N, typename Rhs>
std::array<double, N> rk4_advance(const std::array<double, N>& y, double h, Rhs&& rhs) {
    auto axpy = [](const std::array<double, N>& base, const std::array<double, N>& k, double scale) {
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + scale * k[i];
        return out;
    };
    const std::array<double, N> k1 = rhs(y);
    const std::array<double, N> k2 = rhs(axpy(y, k1, 0.5 * h));
    const std::array<double, N> k3 = rhs(axpy(y, k2, 0.5 * h));
    const std::array<double, N> k4 = rhs(axpy(y, k3, h));
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

}  // namespace boostctl
