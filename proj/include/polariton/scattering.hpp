#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polariton/grid.hpp"
#include "polariton/material.hpp"

namespace polariton {

// ---------------------------------------------------------------------------
// Polariton-phonon
// ---------------------------------------------------------------------------

/// Confinement overlap of the phonon along the growth axis; 1 at q_z = 0.
double phonon_overlap(double qz, double well_width);

/// Form factor [1 + (q a0 / 2)^2]^(-3/2).
double exciton_form_factor(double q, double bohr_radius);

/// Electron/hole deformation-potential coupling D(q) in meV; D(0) = d_e - d_h.
double deformation_coupling(double q, const MaterialSet& material);

/// Bose occupation of a phonon of energy `energy` (meV) at temperature T (K).
double phonon_occupation(double energy, double temperature);

/// Ring-averaged base rate (ps^-1) for one mode of node i to scatter into one
/// mode of node j by emitting or absorbing an acoustic phonon, before Bose
/// factors. Symmetric in (i, j); zero when energy and momentum conservation
/// cannot be met simultaneously.
double phonon_pair_rate(std::size_t i, std::size_t j, const KGrid& grid,
                        const MaterialSet& material);

/// The integrand of phonon_pair_rate as a function of the in-plane momentum
/// transfer q, for a fixed energy transfer. Exposed for quadrature checks.
struct PhononIntegrand {
    double prefactor;    // x_i^2 x_j^2 / (hbar rho S u^2)
    double delta;        // |E_i - E_j| / (hbar u), nm^-1
    const MaterialSet* material;

    /// Rate density at in-plane transfer q (q < delta), times q_z.
    double numerator(double q) const;
};
PhononIntegrand phonon_integrand(std::size_t i, std::size_t j, const KGrid& grid,
                                 const MaterialSet& material);

/// Symmetric base-rate matrix plus the temperature needed to dress it.
struct PhononKernel {
    std::size_t n = 0;
    double temperature = 0.0;
    std::vector<double> base;     // W[i][j], row-major
    std::vector<double> dressed;  // W[i][j] * N_sigma(i -> j), row-major

    double W(std::size_t i, std::size_t j) const { return base[i * n + j]; }
    /// State-to-state rate i -> j including the phonon Bose factor.
    double rate(std::size_t i, std::size_t j) const { return dressed[i * n + j]; }
    std::size_t nonzero_count() const;
};

PhononKernel build_phonon_kernel(const KGrid& grid, const MaterialSet& material,
                                 const FieldState& field);

/// Recomputes the dressed rates for another lattice temperature.
void dress_phonon_kernel(PhononKernel& kernel, const KGrid& grid, double temperature);

// Kernel cache: magic, version, content hash, dimension, then row-major base rates.
void save_phonon_kernel(const std::filesystem::path& path, const PhononKernel& kernel,
                        std::uint64_t key);
std::optional<PhononKernel> load_phonon_kernel(const std::filesystem::path& path,
                                               std::uint64_t key, const KGrid& grid,
                                               double temperature);

// ---------------------------------------------------------------------------
// Polariton-polariton
// ---------------------------------------------------------------------------

/// Momentum-conservation measure of two 2D pairs (k, k1) and (kp, k2) that
/// exchange a common transfer q: the integral over q^2 of the inverse square
/// root of the four triangle factors. Zero when no q closes both triangles.
/// When one pair contains a zero wavenumber q is pinned and the limit value
/// is returned.
double kinematic_R(double k, double kp, double k1, double k2);

/// One energy-conserving channel i + j <-> l + m.
///
/// Stored once with i < l <= m < j. `weight` is the event rate coefficient:
/// node x changes by -/+ weight * F / g_x with
/// F = n_i n_j (1 + n_l)(1 + n_m) - n_l n_m (1 + n_i)(1 + n_j).
struct PairChannel {
    std::uint32_t i, j, l, m;
    double weight;
};

struct PairChannels {
    std::vector<PairChannel> channels;
    /// R evaluations that sat on the collinear (log-divergent) edge and were regularized.
    std::size_t degenerate_clamps = 0;
};

/// Wavenumber on the lower branch with energy E, searched within node m's neighbours.
double wavenumber_for_energy(const KGrid& grid, double E, std::size_t m);

/// Prefactor (M S)^2 / (2 hbar S^3) shared by every channel, ps^-1 meV.
double pp_prefactor(const MaterialSet& material, const FieldState& field);

PairChannels build_pp_channels(const KGrid& grid, const MaterialSet& material,
                               const FieldState& field);

}  // namespace polariton
