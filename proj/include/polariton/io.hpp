#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polariton/dispersion.hpp"
#include "polariton/grid.hpp"
#include "polariton/kinetics.hpp"

namespace polariton {

/// Version tag written into every CSV header comment and manifest.
inline constexpr std::string_view kCsvSchema = "polariton-csv/1";
inline constexpr std::string_view kLibraryVersion = "1.0.0";

class IoError : public std::runtime_error {
public:
    IoError(const std::filesystem::path& path, const std::string& what);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Shortest decimal text that parses back to exactly `v`; locale independent.
std::string format_double(double v);

/// Writes through a sibling temp file and renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// FNV-1a 64 digest of `content` as 16 hex digits.
std::string content_digest(std::string_view content);

/// Columns: k_nm_inv, E_x_eV, E_c_eV, E_lp_eV, x2, c2, tau_ps (absolute energies).
std::string dispersion_csv(const Dispersion& dispersion, std::span<const double> ks);

/// Columns: t_ps, n0, N_tot, then n_0..n_{N-1} (filled on snapshot rows only).
std::string trajectory_csv(std::span<const Observables> samples, std::size_t nodes,
                           bool with_occupations);

/// Columns: k_nm_inv, E_lp_meV, n_k, f_k with f_k = n_k S (S in um^2).
std::string distribution_csv(const KGrid& grid, std::span<const double> n);

}  // namespace polariton
