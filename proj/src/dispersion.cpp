#include "polariton/dispersion.hpp"

#include <cmath>
#include <string>

#include "polariton/constants.hpp"

namespace polariton {

namespace {

void require_k(double k) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
        throw DomainError("wavenumber must be finite and non-negative, got " + std::to_string(k));
    }
}

}  // namespace

Dispersion::Dispersion(const MaterialSet& material, const FieldState& field)
    : material_(material),
      field_(field),
      floor_meV_(material.photon_floor * 1.0e3),
      detuning_meV_((material.photon_floor - material.exciton_line) * 1.0e3),
      photon_coeff_(constants::hbar_c * constants::hbar_c / material.dielectric_const),
      exciton_coeff_(constants::hbar2_over_2m0 / field.exciton_mass) {}

double Dispersion::exciton_energy(double k) const {
    require_k(k);
    return field_.delta_E + exciton_coeff_ * k * k;
}

double Dispersion::photon_energy(double k) const {
    require_k(k);
    // sqrt(E0^2 + X^2) - E0 written without cancellation.
    const double x2 = photon_coeff_ * k * k;
    return detuning_meV_ + x2 / (std::sqrt(floor_meV_ * floor_meV_ + x2) + floor_meV_);
}

Dispersion::Mixing Dispersion::mixing(double e_x, double e_c) const {
    Mixing m;
    m.delta = e_c - e_x;
    const double rabi2 = field_.rabi * field_.rabi;
    m.s = std::sqrt(m.delta * m.delta + rabi2);
    // The minority fraction is evaluated directly; the majority is its complement.
    if (m.delta >= 0.0) {
        m.c2 = rabi2 / (2.0 * m.s * (m.s + m.delta));
        m.x2 = 1.0 - m.c2;
    } else {
        m.x2 = rabi2 / (2.0 * m.s * (m.s - m.delta));
        m.c2 = 1.0 - m.x2;
    }
    return m;
}

double Dispersion::lower_polariton_energy(double k) const {
    const double e_x = exciton_energy(k);
    const double e_c = photon_energy(k);
    const Mixing m = mixing(e_x, e_c);
    const double rabi2 = field_.rabi * field_.rabi;
    if (m.delta >= 0.0) return e_x - rabi2 / (2.0 * (m.s + m.delta));
    return e_c - rabi2 / (2.0 * (m.s - m.delta));
}

HopfieldFractions Dispersion::hopfield_fractions(double k) const {
    const Mixing m = mixing(exciton_energy(k), photon_energy(k));
    return {m.x2, m.c2};
}

DispersionDerivatives Dispersion::derivatives(double k) const {
    const double e_x = exciton_energy(k);
    const double e_c = photon_energy(k);
    const Mixing m = mixing(e_x, e_c);

    const double ex_1 = 2.0 * exciton_coeff_ * k;
    const double ex_2 = 2.0 * exciton_coeff_;
    const double photon_abs = floor_meV_ + (e_c - detuning_meV_);
    const double ec_1 = photon_coeff_ * k / photon_abs;
    const double ec_2 = photon_coeff_ * floor_meV_ * floor_meV_ /
                        (photon_abs * photon_abs * photon_abs);

    const double delta_1 = ec_1 - ex_1;
    const double rabi2 = field_.rabi * field_.rabi;
    DispersionDerivatives d;
    d.dE_dk = m.x2 * ex_1 + m.c2 * ec_1;
    d.d2E_dk2 = m.x2 * ex_2 + m.c2 * ec_2 - 0.5 * delta_1 * delta_1 * rabi2 / (m.s * m.s * m.s);
    return d;
}

double Dispersion::lifetime(double k) const {
    const HopfieldFractions h = hopfield_fractions(k);
    return 1.0 / (h.c2 / material_.photon_lifetime + h.x2 / material_.exciton_lifetime);
}

DispersionPoint Dispersion::point(double k) const {
    DispersionPoint p;
    p.k = k;
    p.E_x = exciton_energy(k);
    p.E_c = photon_energy(k);
    p.E_lp = lower_polariton_energy(k);
    const HopfieldFractions h = hopfield_fractions(k);
    p.x2 = h.x2;
    p.c2 = h.c2;
    const DispersionDerivatives d = derivatives(k);
    p.dE_dk = d.dE_dk;
    p.d2E_dk2 = d.d2E_dk2;
    p.tau = 1.0 / (h.c2 / material_.photon_lifetime + h.x2 / material_.exciton_lifetime);
    return p;
}

double Dispersion::absolute_eV(double relative_meV) const {
    return material_.exciton_line + relative_meV * 1.0e-3;
}

}  // namespace polariton
