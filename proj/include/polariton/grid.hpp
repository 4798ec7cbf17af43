#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "polariton/dispersion.hpp"
#include "polariton/material.hpp"

namespace polariton {

enum class Spacing { uniform_k, uniform_sqrt_k, custom };

std::string_view to_string(Spacing spacing);
Spacing spacing_from_string(std::string_view name);

/// Radial wavenumber grid over an isotropic distribution.
///
/// Node 0 sits at k = 0 and is a single mode (the condensate). Every other
/// node stands for a ring of g_i = S k_i dk_i / (2 pi) modes, dk_i being the
/// trapezoidal cell width. Immutable once built.
class KGrid {
public:
    std::size_t size() const { return k_.size(); }
    double k_max() const { return k_.back(); }
    Spacing spacing() const { return spacing_; }

    std::span<const double> k() const { return k_; }
    std::span<const double> weights() const { return weights_; }
    std::span<const DispersionPoint> points() const { return points_; }
    const DispersionPoint& point(std::size_t i) const { return points_[i]; }
    double energy(std::size_t i) const { return points_[i].E_lp; }

    /// Width of node i's energy cell (between neighbouring midpoints), meV.
    double energy_cell(std::size_t i) const { return cells_[i]; }

    /// Index minimizing |E_lp(k_i) - E|; ties go to the lower index.
    /// Throws DomainError outside [E_0, E_{N-1}].
    std::size_t nearest_energy_node(double E) const;

    /// Like nearest_energy_node but accepts any E inside the union of
    /// energy cells and returns size() when E falls outside it.
    std::size_t energy_bin(double E) const;

    /// sum_i g_i n_i
    double total_number(std::span<const double> occupations) const;

    const Dispersion& dispersion() const { return dispersion_; }
    const MaterialSet& material() const { return dispersion_.material(); }
    const FieldState& field() const { return dispersion_.field(); }

    /// Content hash of every tabulated value (hex).
    std::string content_hash() const;

private:
    friend KGrid build_grid(const MaterialSet&, const FieldState&, std::size_t, double, Spacing);
    friend KGrid build_grid_from_nodes(const MaterialSet&, const FieldState&, std::vector<double>);
    explicit KGrid(Dispersion dispersion) : dispersion_(std::move(dispersion)) {}

    Dispersion dispersion_;
    Spacing spacing_ = Spacing::uniform_k;
    std::vector<double> k_;
    std::vector<double> weights_;
    std::vector<double> cells_;
    std::vector<DispersionPoint> points_;
};

/// Grid on explicit wavenumbers: ks[0] == 0, strictly increasing, at least two nodes.
KGrid build_grid_from_nodes(const MaterialSet& material, const FieldState& field,
                            std::vector<double> ks);

/// Requires N >= 16 and k_max > 0.
KGrid build_grid(const MaterialSet& material, const FieldState& field, std::size_t N,
                 double k_max, Spacing spacing = Spacing::uniform_k);

}  // namespace polariton
