#pragma once
// Independent reference computations used only by the tests. None of these
// call into the library's numerics; they start again from the defining laws.

#include <cmath>
#include <functional>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;

inline big exciton_mass(big m_e, big m_h, big D_M, big B) {
    return 1 / (1 / (m_e + m_h) - D_M * B * B);
}

inline big radius_ratio(big a0_nm, big B) {
    const big e("1.602176634e-19");
    const big hbar("1.054571817e-34");
    const big a0 = a0_nm * big("1e-9");
    const big x = e * a0 * a0 * B / hbar;
    return sqrt(big(2)) / sqrt(1 + sqrt(1 + big("1.5") * x * x));
}

// Lower-polariton energy (meV from the zero-field exciton line) straight from
// the 2x2 coupled-oscillator eigenvalue, in extended precision.
struct Polariton {
    big floor_meV;     // hbar omega_0
    big line_meV;      // hbar omega_t
    big eps;
    big mass;          // M(B), m0
    big shift;         // D2 B^2, meV
    big rabi;          // meV

    big exciton(big k) const {
        const big hbar_c("197326.9804");
        const big m0c2("510998950");
        return shift + hbar_c * hbar_c * k * k / (2 * m0c2 * mass);
    }
    big photon(big k) const {
        const big hbar_c("197326.9804");
        return sqrt(floor_meV * floor_meV + hbar_c * hbar_c * k * k / eps) - line_meV;
    }
    big lower(big k) const {
        const big ex = exciton(k);
        const big ph = photon(k);
        return (ex + ph) / 2 - sqrt((ph - ex) * (ph - ex) + rabi * rabi) / 2;
    }
};

// Richardson-extrapolated central differences; returns first and second derivative.
inline std::pair<double, double> derivatives(const Polariton& p, double k) {
    auto d1 = [&](big h) { return (p.lower(big(k) + h) - p.lower(big(k) - h)) / (2 * h); };
    auto d2 = [&](big h) {
        return (p.lower(big(k) + h) - 2 * p.lower(big(k)) + p.lower(big(k) - h)) / (h * h);
    };
    const big h = std::max(1.0e-6, 1.0e-4 * k);
    const big r1 = (4 * d1(h / 2) - d1(h)) / 3;
    const big r2 = (4 * d2(h / 2) - d2(h)) / 3;
    return {static_cast<double>(r1), static_cast<double>(r2)};
}

// Composite midpoint rule.
inline double midpoint(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
    return s * h;
}

// Kinematic measure of two 2D pairs sharing a transfer q:
// integral over s = q^2 of 1 / sqrt((A - s)(s - B)(C - s)(s - D)), using the
// substitution s = mid + half cos(theta) so the edge singularities disappear.
inline double kinematic_measure(double k, double kp, double k1, double k2, int n) {
    const double A = (k + k1) * (k + k1), B = (k - k1) * (k - k1);
    const double C = (kp + k2) * (kp + k2), D = (kp - k2) * (kp - k2);
    const double lo = std::max(B, D), hi = std::min(A, C);
    if (!(hi > lo)) return 0.0;
    const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
    auto f = [&](double theta) {
        const double s = mid + half * std::cos(theta);
        // (hi - s)(s - lo) = half^2 sin^2 theta cancels the Jacobian half sin theta.
        const double other_hi = (hi == A ? C : A) - s;
        const double other_lo = s - (lo == B ? D : B);
        return 1.0 / std::sqrt(other_hi * other_lo);
    };
    return midpoint(f, 0.0, std::numbers::pi, n);
}

}  // namespace oracle
