#pragma once
// Reference evaluations that need a built grid. They share only the grid
// (nodes, energies, Hopfield weights) and the separately tested kinematic
// measure with the library.

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "polariton/grid.hpp"
#include "polariton/scattering.hpp"

namespace oracle {

// Transition probability per mode pair straight from the deformation-potential
// formula, averaged over the relative angle with a substitution that removes
// the 1/sqrt edge at the energy-conservation boundary.
inline double phonon_rate(const polariton::KGrid& g, std::size_t i, std::size_t j, int n) {
    constexpr double pi = std::numbers::pi;
    const polariton::MaterialSet& m = g.material();
    const double hbar = 0.6582119569;
    const double rho = m.mass_density * 6.241509074460763;
    const double u = m.sound_velocity * 1e-3;
    const double S = m.area_nm2();
    const double L = m.qw_thickness;
    const double ki = g.k()[i], kj = g.k()[j];
    const double xi = g.point(i).x2, xj = g.point(j).x2;
    const double Delta = std::abs(g.energy(i) - g.energy(j)) / (hbar * u);
    auto F = [&](double q) { return std::pow(1.0 + std::pow(q * m.bohr_radius / 2.0, 2), -1.5); };
    auto D = [&](double q) {
        const double M = m.electron_mass + m.hole_mass;
        return 1e3 * (m.deformation_potential_e * F(q * m.hole_mass / M) -
                      m.deformation_potential_h * F(q * m.electron_mass / M));
    };
    auto Bz = [&](double qz) {
        const double y = L * qz;
        if (y < 1e-6) return 1.0;
        return 8.0 * pi * pi * std::sin(y / 2.0) / (y * (4.0 * pi * pi - y * y));
    };
    auto w = [&](double q2) {
        const double qz = std::sqrt(Delta * Delta - q2);
        const double q = std::sqrt(q2);
        return xi * xj * Delta * Delta * Bz(qz) * Bz(qz) * D(q) * D(q) / (hbar * rho * S * u * u * qz);
    };
    const double a = ki * ki + kj * kj, b = 2.0 * ki * kj;
    if (b == 0.0) {
        return a < Delta * Delta ? w(a) : 0.0;
    }
    const double c0 = (a - Delta * Delta) / b;
    if (c0 >= 1.0) return 0.0;
    if (c0 <= -1.0) {
        return midpoint([&](double phi) { return w(a - b * std::cos(phi)); }, 0.0, pi, n) / pi;
    }
    const double phi_max = std::acos(c0);
    // phi = phi_max - t^2
    auto f = [&](double t) {
        const double phi = phi_max - t * t;
        return 2.0 * t * w(a - b * std::cos(phi));
    };
    return midpoint(f, 0.0, std::sqrt(phi_max), n) / pi;
}

// Lower-branch wavenumber for energy E by plain bisection.
inline double invert(const polariton::Dispersion& d, double E, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (d.lower_polariton_energy(mid) < E ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// dn/dt from p-p scattering by looping over every ordered quadruple of nodes.
inline std::vector<double> exhaustive_pp(const polariton::KGrid& g, const polariton::FieldState& f,
                                         const std::vector<double>& occ, std::size_t& processes) {
    const polariton::MaterialSet& m = g.material();
    const std::size_t n = g.size();
    const double hbar = 0.6582119569;
    const double S = m.area_nm2();
    const double MS = 6.0 * f.binding * std::pow(m.bohr_radius * f.radius_ratio, 2);
    const double pref = MS * MS / (2.0 * hbar * S * S * S);

    std::vector<double> dndt(n, 0.0);
    processes = 0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
                for (std::size_t d = 0; d < n; ++d) {
                    // a + b <-> c + d with the outer pair holding the extreme indices.
                    if (!(a < c && c <= d && d < b)) continue;
                    const double target = g.energy(a) + g.energy(b) - g.energy(c);
                    if (g.energy_bin(target) != d) continue;
                    // The exact final wavenumber lies between d's neighbours.
                    const double lo = d > 0 ? g.k()[d - 1] : 0.0;
                    const double hi = d + 1 < n ? g.k()[d + 1] : 2 * g.k()[d] - g.k()[d - 1];
                    const double kd = invert(g.dispersion(), target, lo, hi);
                    double R = polariton::kinematic_R(g.k()[a], g.k()[b], g.k()[c], kd);
                    if (c != d) R += polariton::kinematic_R(g.k()[a], g.k()[b], kd, g.k()[c]);
                    if (!(R > 0.0)) continue;
                    ++processes;
                    const double w = pref * g.point(a).x2 * g.point(b).x2 * g.point(c).x2 *
                                     g.point(d).x2 * g.weights()[a] * g.weights()[b] *
                                     g.weights()[c] * g.weights()[d] * R / g.energy_cell(d);
                    const double F = occ[a] * occ[b] * (1 + occ[c]) * (1 + occ[d]) -
                                     occ[c] * occ[d] * (1 + occ[a]) * (1 + occ[b]);
                    dndt[a] -= w * F / g.weights()[a];
                    dndt[b] -= w * F / g.weights()[b];
                    dndt[c] += w * F / g.weights()[c];
                    dndt[d] += w * F / g.weights()[d];
                }
            }
        }
    }
    return dndt;
}

}  // namespace oracle
