#include "polariton/io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "polariton/hash.hpp"

namespace polariton {

IoError::IoError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what), path_(path) {}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError(path.parent_path(), "cannot create directory: " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(tmp, "cannot open for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw IoError(tmp, "write failed");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError(path, "cannot move temporary file into place");
    }
}

std::string content_digest(std::string_view content) {
    return ContentHash().add(content).hex();
}

namespace {

void row(std::string& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        out += format_double(v);
        first = false;
    }
    out += '\n';
}

std::string header(std::string_view columns) {
    return "# " + std::string(kCsvSchema) + "\n" + std::string(columns) + "\n";
}

}  // namespace

std::string dispersion_csv(const Dispersion& dispersion, std::span<const double> ks) {
    std::string out = header("k_nm_inv,E_x_eV,E_c_eV,E_lp_eV,x2,c2,tau_ps");
    for (double k : ks) {
        const DispersionPoint p = dispersion.point(k);
        row(out, {k, dispersion.absolute_eV(p.E_x), dispersion.absolute_eV(p.E_c),
                  dispersion.absolute_eV(p.E_lp), p.x2, p.c2, p.tau});
    }
    return out;
}

std::string trajectory_csv(std::span<const Observables> samples, std::size_t nodes,
                           bool with_occupations) {
    std::string cols = "t_ps,n0,N_tot";
    if (with_occupations) {
        for (std::size_t i = 0; i < nodes; ++i) cols += ",n_" + std::to_string(i);
    }
    std::string out = header(cols);
    for (const Observables& o : samples) {
        out += format_double(o.t);
        out += ',';
        out += format_double(o.n0);
        out += ',';
        out += format_double(o.N_tot);
        if (with_occupations) {
            for (std::size_t i = 0; i < nodes; ++i) {
                out += ',';
                if (i < o.occupations.size()) out += format_double(o.occupations[i]);
            }
        }
        out += '\n';
    }
    return out;
}

std::string distribution_csv(const KGrid& grid, std::span<const double> n) {
    std::string out = header("k_nm_inv,E_lp_meV,n_k,f_k");
    const double S = grid.material().qw_area;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        row(out, {grid.k()[i], grid.energy(i), n[i], n[i] * S});
    }
    return out;
}

}  // namespace polariton
