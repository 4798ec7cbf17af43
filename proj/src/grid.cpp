#include "polariton/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "polariton/constants.hpp"
#include "polariton/hash.hpp"

namespace polariton {

std::string_view to_string(Spacing spacing) {
    switch (spacing) {
        case Spacing::uniform_k: return "uniform-k";
        case Spacing::uniform_sqrt_k: return "uniform-sqrt-k";
        default: return "custom";
    }
}

Spacing spacing_from_string(std::string_view name) {
    if (name == "uniform-k") return Spacing::uniform_k;
    if (name == "uniform-sqrt-k") return Spacing::uniform_sqrt_k;
    throw DomainError("unknown grid spacing '" + std::string(name) +
                      "' (expected uniform-k or uniform-sqrt-k)");
}

KGrid build_grid_from_nodes(const MaterialSet& material, const FieldState& field,
                            std::vector<double> ks) {
    const std::size_t N = ks.size();
    if (N < 2) throw DomainError("grid needs at least two nodes");
    if (ks[0] != 0.0) throw DomainError("the first grid node must sit at k = 0");
    for (std::size_t i = 1; i < N; ++i) {
        if (!(ks[i] > ks[i - 1]) || !std::isfinite(ks[i])) {
            throw DomainError("grid wavenumbers must be finite and strictly increasing");
        }
    }

    KGrid grid{Dispersion(material, field)};
    grid.spacing_ = Spacing::custom;
    grid.k_ = std::move(ks);

    const double area = material.area_nm2();
    grid.weights_.resize(N);
    grid.weights_[0] = 1.0;
    for (std::size_t i = 1; i < N; ++i) {
        const double dk = i + 1 < N ? 0.5 * (grid.k_[i + 1] - grid.k_[i - 1])
                                    : 0.5 * (grid.k_[i] - grid.k_[i - 1]);
        grid.weights_[i] = area * grid.k_[i] * dk / (2.0 * constants::pi);
    }

    grid.points_.resize(N);
    for (std::size_t i = 0; i < N; ++i) grid.points_[i] = grid.dispersion_.point(grid.k_[i]);

    for (std::size_t i = 1; i < N; ++i) {
        if (!(grid.points_[i].E_lp > grid.points_[i - 1].E_lp)) {
            throw std::logic_error("tabulated lower-polariton energy is not increasing at node " +
                                   std::to_string(i));
        }
    }

    grid.cells_.resize(N);
    grid.cells_[0] = grid.energy(1) - grid.energy(0);
    for (std::size_t i = 1; i + 1 < N; ++i) {
        grid.cells_[i] = 0.5 * (grid.energy(i + 1) - grid.energy(i - 1));
    }
    grid.cells_[N - 1] = grid.energy(N - 1) - grid.energy(N - 2);
    return grid;
}

KGrid build_grid(const MaterialSet& material, const FieldState& field, std::size_t N,
                 double k_max, Spacing spacing) {
    if (N < 16) throw DomainError("grid needs at least 16 nodes, got " + std::to_string(N));
    if (!(k_max > 0.0) || !std::isfinite(k_max)) {
        throw DomainError("grid k_max must be positive, got " + std::to_string(k_max));
    }
    if (spacing == Spacing::custom) throw DomainError("custom spacing needs explicit nodes");
    std::vector<double> ks(N);
    const double last = static_cast<double>(N - 1);
    for (std::size_t i = 0; i < N; ++i) {
        const double t = static_cast<double>(i) / last;
        ks[i] = spacing == Spacing::uniform_k ? k_max * t : k_max * t * t;
    }
    ks[N - 1] = k_max;
    KGrid grid = build_grid_from_nodes(material, field, std::move(ks));
    grid.spacing_ = spacing;
    return grid;
}

std::size_t KGrid::nearest_energy_node(double E) const {
    if (!(E >= energy(0) && E <= energy(size() - 1))) {
        throw DomainError("energy " + std::to_string(E) + " meV outside tabulated range [" +
                          std::to_string(energy(0)) + ", " + std::to_string(energy(size() - 1)) +
                          "]");
    }
    return energy_bin(E);
}

std::size_t KGrid::energy_bin(double E) const {
    const std::size_t n = size();
    const double lo = energy(0) - 0.5 * cells_[0];
    const double hi = energy(n - 1) + 0.5 * cells_[n - 1];
    if (!(E >= lo && E <= hi)) return n;
    auto upper = std::lower_bound(points_.begin(), points_.end(), E,
                                  [](const DispersionPoint& p, double e) { return p.E_lp < e; });
    if (upper == points_.begin()) return 0;
    if (upper == points_.end()) return n - 1;
    const std::size_t hi_idx = static_cast<std::size_t>(upper - points_.begin());
    const std::size_t lo_idx = hi_idx - 1;
    return (E - energy(lo_idx)) <= (energy(hi_idx) - E) ? lo_idx : hi_idx;
}

double KGrid::total_number(std::span<const double> occupations) const {
    double total = 0.0;
    for (std::size_t i = 0; i < occupations.size(); ++i) total += weights_[i] * occupations[i];
    return total;
}

std::string KGrid::content_hash() const {
    ContentHash h;
    h.add(to_string(spacing_));
    h.add(std::span<const double>(k_));
    h.add(std::span<const double>(weights_));
    for (const auto& p : points_) {
        h.add(p.E_lp).add(p.x2).add(p.c2).add(p.dE_dk).add(p.d2E_dk2).add(p.tau);
    }
    return h.hex();
}

}  // namespace polariton
