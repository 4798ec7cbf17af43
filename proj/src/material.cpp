#include "polariton/material.hpp"

#include <cmath>
#include <string>

#include "polariton/constants.hpp"

namespace polariton {

namespace {

void require_field(double B) {
    if (!(B >= 0.0) || !std::isfinite(B)) {
        throw DomainError("magnetic field must be finite and non-negative, got " +
                          std::to_string(B) + " T");
    }
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string("material.") + name + " must be positive, got " +
                          std::to_string(value));
    }
}

}  // namespace

double MaterialSet::area_nm2() const { return qw_area * constants::um2; }

double MaterialSet::hbar_sound() const {
    return constants::hbar * sound_velocity * constants::m_per_s;
}

double MaterialSet::mass_pole_field() const {
    if (mass_coeff <= 0.0) return INFINITY;
    return std::sqrt(1.0 / (exciton_mass() * mass_coeff));
}

void MaterialSet::validate() const {
    require_positive(electron_mass, "m_e");
    require_positive(hole_mass, "m_h");
    require_positive(qw_thickness, "L_z");
    require_positive(qw_area, "S");
    require_positive(mass_density, "rho");
    require_positive(sound_velocity, "u_s");
    require_positive(bohr_radius, "a0");
    require_positive(binding_energy, "E0");
    require_positive(exciton_line, "hbar_omega_t");
    require_positive(photon_floor, "hbar_omega_0");
    require_positive(rabi_splitting, "Omega_X");
    require_positive(photon_lifetime, "tau_c");
    require_positive(exciton_lifetime, "tau_x");
    require_positive(temperature, "T");
    if (!(dielectric_const > 1.0)) {
        throw DomainError("material.eps_b must exceed 1, got " + std::to_string(dielectric_const));
    }
    if (!(shift_coeff >= 0.0)) throw DomainError("material.D2 must be non-negative");
    if (!(mass_coeff >= 0.0)) throw DomainError("material.D_M must be non-negative");
    if (!std::isfinite(deformation_potential_e) || !std::isfinite(deformation_potential_h)) {
        throw DomainError("deformation potentials must be finite");
    }
}

double exciton_shift(const MaterialSet& material, double B) {
    require_field(B);
    return material.shift_coeff * B * B;
}

double exciton_mass(const MaterialSet& material, double B) {
    require_field(B);
    const double correction = material.mass_coeff * B * B;
    if (correction == 0.0) return material.exciton_mass();
    const double inverse = 1.0 / material.exciton_mass() - correction;
    if (!(inverse > 0.0)) {
        throw DomainError("exciton mass law has no positive solution at B = " + std::to_string(B) +
                          " T (pole at " + std::to_string(material.mass_pole_field()) + " T)");
    }
    return 1.0 / inverse;
}

double radius_ratio(const MaterialSet& material, double B) {
    require_field(B);
    const double a0 = material.bohr_radius * 1.0e-9;
    const double x = constants::si_elementary_charge * a0 * a0 * B / constants::si_hbar;
    return std::sqrt(2.0) / std::sqrt(1.0 + std::sqrt(1.0 + 1.5 * x * x));
}

double rabi_splitting(const MaterialSet& material, double B) {
    return material.rabi_splitting / radius_ratio(material, B);
}

double binding_energy(const MaterialSet& material, double B) {
    switch (material.binding_law) {
        case BindingLaw::constant:
            require_field(B);
            return material.binding_energy;
        case BindingLaw::inverse_radius:
        default:
            return material.binding_energy / radius_ratio(material, B);
    }
}

double pp_matrix_element(const MaterialSet& material, double B) {
    const double radius = material.bohr_radius * radius_ratio(material, B);
    return 6.0 * binding_energy(material, B) * radius * radius;
}

FieldState make_field_state(const MaterialSet& material, double B) {
    material.validate();
    FieldState f;
    f.B = B;
    f.delta_E = exciton_shift(material, B);
    f.exciton_mass = exciton_mass(material, B);
    f.radius_ratio = radius_ratio(material, B);
    f.rabi = material.rabi_splitting / f.radius_ratio;
    f.binding = binding_energy(material, B);
    f.pp_matrix_element = pp_matrix_element(material, B);
    return f;
}

}  // namespace polariton
