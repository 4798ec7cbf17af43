#pragma once

#include <stdexcept>
#include <string>

namespace polariton {

/// Thrown when a physical input lies outside the domain of a closed-form law.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// How the exciton binding energy follows the shrinking Bohr radius.
enum class BindingLaw {
    inverse_radius,  ///< E0(B) = E0 * a0 / a(B)
    constant,        ///< E0(B) = E0
};

/// Static GaAs quantum-well and cavity constants.
///
/// Masses in m0, lengths in nm (area in um^2), energies in meV unless noted,
/// lifetimes in ps. The exciton mass is always m_e + m_h.
struct MaterialSet {
    double electron_mass = 0.067;
    double hole_mass = 0.45;
    double dielectric_const = 11.9;
    double qw_thickness = 5.0;          // nm
    double qw_area = 100.0;             // um^2
    double mass_density = 5318.0;       // kg/m^3
    double sound_velocity = 4720.0;     // m/s
    double deformation_potential_e = 7.0;  // eV
    double deformation_potential_h = 2.7;  // eV
    double bohr_radius = 10.0;          // nm
    double binding_energy = 10.0;       // meV
    double exciton_line = 1.515;        // eV, hbar omega_t
    double photon_floor = 1.515;        // eV, hbar omega_0
    double rabi_splitting = 5.0;        // meV
    double photon_lifetime = 4.0;       // ps
    double exciton_lifetime = 20.0;     // ps
    double temperature = 4.0;           // K
    double shift_coeff = 0.085;         // meV / T^2
    double mass_coeff = 0.048;          // 1 / (m0 T^2)
    BindingLaw binding_law = BindingLaw::inverse_radius;

    double exciton_mass() const { return electron_mass + hole_mass; }
    double area_nm2() const;
    /// hbar * u_s in meV nm.
    double hbar_sound() const;
    /// Largest field for which the mass law stays finite and positive.
    double mass_pole_field() const;

    /// Throws DomainError naming the first offending field.
    void validate() const;

    bool operator==(const MaterialSet&) const = default;
};

/// Magnetic-field-dressed exciton quantities for one value of B.
struct FieldState {
    double B = 0.0;              // T
    double delta_E = 0.0;        // meV
    double exciton_mass = 0.0;   // m0
    double radius_ratio = 1.0;   // a(B) / a0
    double rabi = 0.0;           // meV
    double binding = 0.0;        // meV
    double pp_matrix_element = 0.0;  // M * S, meV nm^2

    bool operator==(const FieldState&) const = default;
};

double exciton_shift(const MaterialSet& material, double B);
double exciton_mass(const MaterialSet& material, double B);
double radius_ratio(const MaterialSet& material, double B);
double rabi_splitting(const MaterialSet& material, double B);
double binding_energy(const MaterialSet& material, double B);
double pp_matrix_element(const MaterialSet& material, double B);

/// Evaluates every field-dependent quantity; throws DomainError past the mass pole.
FieldState make_field_state(const MaterialSet& material, double B);

}  // namespace polariton
