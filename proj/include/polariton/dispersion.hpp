#pragma once

#include "polariton/material.hpp"

namespace polariton {

/// Lower-polariton quantities at one wavenumber.
///
/// Energies are in meV measured from the zero-field exciton line
/// (material.exciton_line); use Dispersion::absolute_eV to convert.
struct DispersionPoint {
    double k = 0.0;        // nm^-1
    double E_x = 0.0;
    double E_c = 0.0;
    double E_lp = 0.0;
    double x2 = 0.5;       // exciton fraction
    double c2 = 0.5;       // photon fraction
    double dE_dk = 0.0;    // meV nm
    double d2E_dk2 = 0.0;  // meV nm^2
    double tau = 0.0;      // ps
};

struct HopfieldFractions {
    double x2;
    double c2;
};

struct DispersionDerivatives {
    double dE_dk;
    double d2E_dk2;
};

/// Coupled exciton / cavity-photon dispersion for one (material, field) pair.
///
/// Every method requires k >= 0 and throws DomainError otherwise.
class Dispersion {
public:
    Dispersion(const MaterialSet& material, const FieldState& field);

    double exciton_energy(double k) const;
    double photon_energy(double k) const;
    double lower_polariton_energy(double k) const;
    HopfieldFractions hopfield_fractions(double k) const;
    DispersionDerivatives derivatives(double k) const;
    /// Hopfield-weighted inverse-lifetime blend of tau_c and tau_x.
    double lifetime(double k) const;

    DispersionPoint point(double k) const;

    /// Converts an internal energy (meV from the exciton line) to absolute eV.
    double absolute_eV(double relative_meV) const;

    const MaterialSet& material() const { return material_; }
    const FieldState& field() const { return field_; }

private:
    struct Mixing {
        double delta;  // E_c - E_x
        double s;      // sqrt(delta^2 + rabi^2)
        double x2;
        double c2;
    };
    Mixing mixing(double e_x, double e_c) const;

    MaterialSet material_;
    FieldState field_;
    double floor_meV_;        // hbar omega_0
    double detuning_meV_;     // hbar omega_0 - hbar omega_t
    double photon_coeff_;     // (hbar c)^2 / eps_b
    double exciton_coeff_;    // hbar^2 / (2 M(B))
};

}  // namespace polariton
