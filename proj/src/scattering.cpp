#include "polariton/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "polariton/constants.hpp"

namespace polariton {

using constants::pi;

double phonon_overlap(double qz, double well_width) {
    const double y = std::abs(qz) * well_width;
    const double two_pi = 2.0 * pi;
    if (std::abs(y - two_pi) < 1.0e-7) {
        // sin(y/2) and 4 pi^2 - y^2 vanish together; first-order expansion about 2 pi.
        return 0.5 - 3.0 * (y - two_pi) / (8.0 * pi);
    }
    const double half = 0.5 * y;
    const double sinc = half < 1.0e-4 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
    return sinc * (4.0 * pi * pi) / (4.0 * pi * pi - y * y);
}

double exciton_form_factor(double q, double bohr_radius) {
    const double t = 0.5 * q * bohr_radius;
    const double base = 1.0 + t * t;
    return 1.0 / (base * std::sqrt(base));
}

double deformation_coupling(double q, const MaterialSet& material) {
    const double M = material.exciton_mass();
    const double de = material.deformation_potential_e * 1.0e3;
    const double dh = material.deformation_potential_h * 1.0e3;
    return de * exciton_form_factor(q * material.hole_mass / M, material.bohr_radius) -
           dh * exciton_form_factor(q * material.electron_mass / M, material.bohr_radius);
}

double phonon_occupation(double energy, double temperature) {
    const double x = energy / (constants::k_boltzmann * temperature);
    return 1.0 / std::expm1(x);
}

double PhononIntegrand::numerator(double q) const {
    const double qz2 = delta * delta - q * q;
    const double qz = qz2 > 0.0 ? std::sqrt(qz2) : 0.0;
    const double overlap = phonon_overlap(qz, material->qw_thickness);
    const double coupling = deformation_coupling(q, *material);
    return prefactor * delta * delta * overlap * overlap * coupling * coupling;
}

PhononIntegrand phonon_integrand(std::size_t i, std::size_t j, const KGrid& grid,
                                 const MaterialSet& material) {
    const DispersionPoint& a = grid.point(i);
    const DispersionPoint& b = grid.point(j);
    const double rho = material.mass_density * constants::kg_per_m3;
    const double u = material.sound_velocity * constants::m_per_s;
    PhononIntegrand f;
    f.prefactor = a.x2 * b.x2 / (constants::hbar * rho * material.area_nm2() * u * u);
    f.delta = std::abs(a.E_lp - b.E_lp) / material.hbar_sound();
    f.material = &material;
    return f;
}

namespace {

template <class F>
double integrate_0_pi(F&& f) {
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, pi, 15, 1.0e-11,
                                                                        &error);
}

double ring_average(const PhononIntegrand& f, double k, double kp) {
    const double d2 = f.delta * f.delta;
    if (k == 0.0 || kp == 0.0) {
        const double q = k + kp;
        const double qz2 = d2 - q * q;
        if (!(qz2 > 0.0)) return 0.0;
        return f.numerator(q) / std::sqrt(qz2);
    }
    const double a = k * k + kp * kp;
    const double b = 2.0 * k * kp;
    const double c0 = (a - d2) / b;
    if (c0 >= 1.0) return 0.0;
    if (c0 > -1.0) {
        // Only part of the ring conserves energy. With cos(phi) = mid + half cos(theta)
        // the two inverse-square-root edges cancel against the Jacobian.
        const double mid = 0.5 * (1.0 + c0);
        const double half = 0.5 * (1.0 - c0);
        const double sqrt_b = std::sqrt(b);
        auto h = [&](double theta) {
            const double x = mid + half * std::cos(theta);
            const double q2 = std::max(a - b * x, 0.0);
            const double one_plus = std::max(1.0 + x, std::numeric_limits<double>::min());
            return f.numerator(std::sqrt(q2)) / (sqrt_b * std::sqrt(one_plus));
        };
        return integrate_0_pi(h) / pi;
    }
    auto g = [&](double phi) {
        const double q2 = std::max(a - b * std::cos(phi), 0.0);
        return f.numerator(std::sqrt(q2)) / std::sqrt(d2 - q2);
    };
    return integrate_0_pi(g) / pi;
}

}  // namespace

double phonon_pair_rate(std::size_t i, std::size_t j, const KGrid& grid,
                        const MaterialSet& material) {
    if (i == j) throw std::invalid_argument("phonon_pair_rate needs distinct nodes");
    return ring_average(phonon_integrand(i, j, grid, material), grid.k()[i], grid.k()[j]);
}

std::size_t PhononKernel::nonzero_count() const {
    return static_cast<std::size_t>(
        std::count_if(base.begin(), base.end(), [](double w) { return w > 0.0; }));
}

void dress_phonon_kernel(PhononKernel& kernel, const KGrid& grid, double temperature) {
    const std::size_t n = kernel.n;
    kernel.temperature = temperature;
    kernel.dressed.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = kernel.base[i * n + j];
            if (w == 0.0) continue;
            const double occupation =
                phonon_occupation(std::abs(grid.energy(i) - grid.energy(j)), temperature);
            // Downhill emits (N + 1), uphill absorbs (N).
            kernel.dressed[i * n + j] =
                w * (grid.energy(i) > grid.energy(j) ? occupation + 1.0 : occupation);
        }
    }
}

PhononKernel build_phonon_kernel(const KGrid& grid, const MaterialSet& material,
                                 const FieldState& field) {
    (void)field;  // the grid already carries the field-dressed dispersion
    const std::size_t n = grid.size();
    PhononKernel kernel;
    kernel.n = n;
    kernel.base.assign(n * n, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = phonon_pair_rate(i, j, grid, material);
            kernel.base[i * n + j] = w;
            kernel.base[j * n + i] = w;
        }
    }
    dress_phonon_kernel(kernel, grid, material.temperature);
    return kernel;
}

namespace {
constexpr std::array<char, 8> kKernelMagic = {'P', 'P', 'H', 'K', 'E', 'R', 'N', '1'};
}

void save_phonon_kernel(const std::filesystem::path& path, const PhononKernel& kernel,
                        std::uint64_t key) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write kernel cache " + tmp.string());
        const std::uint64_t n = kernel.n;
        out.write(kKernelMagic.data(), kKernelMagic.size());
        out.write(reinterpret_cast<const char*>(&key), sizeof key);
        out.write(reinterpret_cast<const char*>(&n), sizeof n);
        out.write(reinterpret_cast<const char*>(kernel.base.data()),
                  static_cast<std::streamsize>(kernel.base.size() * sizeof(double)));
        if (!out) throw std::runtime_error("failed writing kernel cache " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::optional<PhononKernel> load_phonon_kernel(const std::filesystem::path& path,
                                               std::uint64_t key, const KGrid& grid,
                                               double temperature) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::array<char, 8> magic{};
    std::uint64_t stored_key = 0;
    std::uint64_t n = 0;
    in.read(magic.data(), magic.size());
    in.read(reinterpret_cast<char*>(&stored_key), sizeof stored_key);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || magic != kKernelMagic || stored_key != key || n != grid.size()) return std::nullopt;
    PhononKernel kernel;
    kernel.n = n;
    kernel.base.resize(n * n);
    in.read(reinterpret_cast<char*>(kernel.base.data()),
            static_cast<std::streamsize>(kernel.base.size() * sizeof(double)));
    if (!in) return std::nullopt;
    dress_phonon_kernel(kernel, grid, temperature);
    return kernel;
}

// ---------------------------------------------------------------------------

namespace {

struct RValue {
    double value;
    bool clamped;
};

// Integral between the middle roots r2 < r3 of (s - r1)(s - r2)(r3 - s)(r4 - s)
// in closed form as a complete elliptic integral of the first kind.
RValue kinematic_R_impl(double k, double kp, double k1, double k2) {
    const bool first_pinned = k * k1 == 0.0;
    const bool second_pinned = kp * k2 == 0.0;
    if (first_pinned && second_pinned) return {0.0, false};
    if (first_pinned || second_pinned) {
        // One triangle collapses to a line: q is fixed and the q^2 integral over the
        // collapsed pair contributes pi.
        const double q = first_pinned ? k + k1 : kp + k2;
        const double a = first_pinned ? kp : k;
        const double b = first_pinned ? k2 : k1;
        const double hi = (a + b) * (a + b) - q * q;
        const double lo = q * q - (a - b) * (a - b);
        if (!(hi > 0.0 && lo > 0.0)) return {0.0, false};
        return {pi / std::sqrt(hi * lo), false};
    }
    const double A = (k + k1) * (k + k1);
    const double B = (k - k1) * (k - k1);
    const double C = (kp + k2) * (kp + k2);
    const double D = (kp - k2) * (kp - k2);
    const double r1 = std::min(B, D);
    const double r2 = std::max(B, D);
    const double r3 = std::min(A, C);
    const double r4 = std::max(A, C);
    if (!(r3 > r2)) return {0.0, false};
    const double denom = (r4 - r2) * (r3 - r1);
    double m = (r3 - r2) * (r4 - r1) / denom;
    bool clamped = false;
    constexpr double kEdge = 1.0e-15;
    if (!(1.0 - m > kEdge)) {
        m = 1.0 - kEdge;
        clamped = true;
    }
    return {2.0 / std::sqrt(denom) * std::comp_ellint_1(std::sqrt(m)), clamped};
}

}  // namespace

double kinematic_R(double k, double kp, double k1, double k2) {
    return kinematic_R_impl(k, kp, k1, k2).value;
}

double wavenumber_for_energy(const KGrid& grid, double E, std::size_t m) {
    const auto ks = grid.k();
    const std::size_t n = grid.size();
    double lo = m > 0 ? ks[m - 1] : 0.0;
    double hi = m + 1 < n ? ks[m + 1] : ks[m] + (ks[m] - ks[m - 1]);
    const Dispersion& disp = grid.dispersion();
    if (E <= disp.lower_polariton_energy(lo)) return lo;
    if (E >= disp.lower_polariton_energy(hi)) return hi;
    double k = ks[m];
    for (int iter = 0; iter < 100; ++iter) {
        const double f = disp.lower_polariton_energy(k) - E;
        if (f == 0.0) return k;
        if (f > 0.0) hi = k; else lo = k;
        const double slope = disp.derivatives(k).dE_dk;
        double next = slope > 0.0 ? k - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - k) <= 1.0e-15 * std::max(k, 1.0e-12)) return next;
        k = next;
    }
    return k;
}

double pp_prefactor(const MaterialSet& material, const FieldState& field) {
    const double S = material.area_nm2();
    const double ms = field.pp_matrix_element;
    return ms * ms / (2.0 * constants::hbar * S * S * S);
}

PairChannels build_pp_channels(const KGrid& grid, const MaterialSet& material,
                               const FieldState& field) {
    const std::size_t n = grid.size();
    const auto ks = grid.k();
    const auto g = grid.weights();
    const double prefactor = pp_prefactor(material, field);

    // Outer pairs (i, j) are independent; collect per-i then concatenate in order.
    std::vector<PairChannels> per_outer(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::uint32_t>(ii);
        PairChannels& local = per_outer[i];
        const double Ei = grid.energy(i);
        for (std::uint32_t j = i + 2; j < n; ++j) {
            const double Ej = grid.energy(j);
            for (std::uint32_t l = i + 1; l < j; ++l) {
                const double target = Ei + Ej - grid.energy(l);
                const std::size_t m = grid.energy_bin(target);
                if (m >= n || m >= j) continue;
                if (m < l) break;  // target only decreases with l
                const double km = wavenumber_for_energy(grid, target, m);
                const RValue r1 = kinematic_R_impl(ks[i], ks[j], ks[l], km);
                double r_sum = r1.value;
                std::size_t clamps = r1.clamped ? 1 : 0;
                if (m != l) {
                    const RValue r2 = kinematic_R_impl(ks[i], ks[j], km, ks[l]);
                    r_sum += r2.value;
                    clamps += r2.clamped ? 1 : 0;
                }
                local.degenerate_clamps += clamps;
                if (!(r_sum > 0.0)) continue;
                const double hopfield = grid.point(i).x2 * grid.point(j).x2 * grid.point(l).x2 *
                                        grid.point(m).x2;
                const double weight = prefactor * hopfield * g[i] * g[j] * g[l] * g[m] * r_sum /
                                      grid.energy_cell(m);
                local.channels.push_back({i, j, l, static_cast<std::uint32_t>(m), weight});
            }
        }
    }

    PairChannels all;
    std::size_t total = 0;
    for (const auto& p : per_outer) total += p.channels.size();
    all.channels.reserve(total);
    for (const auto& p : per_outer) {
        all.channels.insert(all.channels.end(), p.channels.begin(), p.channels.end());
        all.degenerate_clamps += p.degenerate_clamps;
    }
    return all;
}

}  // namespace polariton
