#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "polariton/config.hpp"
#include "polariton/io.hpp"

using namespace polariton;

TEST_CASE("empty text yields the defaults") {
    const RunConfig c = parse_config_text("");
    CHECK(c == RunConfig{});
    CHECK(c.material.exciton_mass() == doctest::Approx(0.517));
    CHECK(c.grid.N == 150);
}

TEST_CASE("serialization round-trips exactly") {
    RunConfig c;
    c.material.rabi_splitting = 0.1 + 0.2;  // not representable in short decimal
    c.B = 1.0 / 3.0;
    c.pump.p0 = 6.7317e-2;
    c.sweep.B = {0.0, 2.5, 6.0};
    c.sweep.rereference = true;
    c.grid.spacing = Spacing::uniform_sqrt_k;
    c.integrator.method = Method::dopri5;
    c.terms.pp = false;
    c.kernel_cache_dir = "/tmp/kc";
    c.material.binding_law = BindingLaw::constant;
    const RunConfig back = parse_config_text(serialize_config(c));
    CHECK(back == c);
    const std::string text = serialize_config(c);
    CHECK(serialize_config(back) == text);
    CHECK(config_keys().size() ==
          static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')));
}

TEST_CASE("errors carry the offending line") {
    try {
        parse_config_text("grid.N = 100\n# comment\nmaterial.nonsense = 1\n", "cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("cfg:3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("grid.N = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);

    std::map<std::string, KeyOrigin> origins;
    const RunConfig c = parse_config_text("\n\nfield.B = 7.0\n", "cfg", &origins);
    try {
        validate_config(c, origins);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("pole") != std::string::npos);
    }

    std::map<std::string, KeyOrigin> o2;
    const RunConfig neg = parse_config_text("material.tau_c = -1\n", "cfg", &o2);
    CHECK_THROWS_AS(validate_config(neg, o2), ConfigError);
    CHECK_THROWS_AS(neg.validate(), ConfigError);
    CHECK_NOTHROW(RunConfig{}.validate());
}

TEST_CASE("files are written atomically with exact numbers") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "polariton_io_test";
    fs::remove_all(dir);
    write_file_atomic(dir / "a.txt", "hello\n");
    std::ifstream in(dir / "a.txt");
    std::string line;
    std::getline(in, line);
    CHECK(line == "hello");
    CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
    CHECK_THROWS_AS(write_file_atomic("/proc/polariton/forbidden.txt", "x"), IoError);
    fs::remove_all(dir);

    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(content_digest("abc") == content_digest("abc"));
    CHECK(content_digest("abc") != content_digest("abd"));
}

TEST_CASE("csv schemas") {
    MaterialSet m;
    const auto f = make_field_state(m, 2.0);
    const Dispersion d(m, f);
    const std::vector<double> ks = {0.0, 0.02};
    const std::string csv = dispersion_csv(d, ks);
    CHECK(csv.find("k_nm_inv,E_x_eV,E_c_eV,E_lp_eV,x2,c2,tau_ps\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const KGrid g = build_grid(m, f, 16, 0.5);
    std::vector<double> n(16, 1.0);
    const std::string dist = distribution_csv(g, n);
    CHECK(dist.find("k_nm_inv,E_lp_meV,n_k,f_k\n") != std::string::npos);

    std::vector<Observables> obs = {{0.0, 0.0, 0.0, {}}, {10.0, 1.0, 2.0, n}};
    const std::string traj = trajectory_csv(obs, 16, true);
    CHECK(traj.find("t_ps,n0,N_tot,n_0,") != std::string::npos);
    CHECK(traj.find("\n0,0,0,,,") != std::string::npos);
}
