#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "model_oracles.hpp"
#include "oracles.hpp"
#include "polariton/kinetics.hpp"
#include "polariton/scattering.hpp"

using namespace polariton;
constexpr double pi = std::numbers::pi;


TEST_CASE("confinement overlap, form factor and coupling") {
    CHECK(phonon_overlap(0.0, 5.0) == 1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> yd(0.01, 20.0);
    for (int n = 0; n < 200; ++n) {
        const double y = yd(rng);
        const double ref = 8 * pi * pi * std::sin(y / 2) / (y * (4 * pi * pi - y * y));
        CHECK(phonon_overlap(y / 5.0, 5.0) == doctest::Approx(ref).epsilon(1e-10));
    }
    // Removable singularity at q_z L = 2 pi.
    const double at = phonon_overlap(2 * pi / 5.0, 5.0);
    CHECK(at == doctest::Approx(0.5));
    CHECK(phonon_overlap((2 * pi + 1e-4) / 5.0, 5.0) == doctest::Approx(at).epsilon(1e-4));
    CHECK(phonon_overlap((2 * pi - 1e-4) / 5.0, 5.0) == doctest::Approx(at).epsilon(1e-4));

    CHECK(exciton_form_factor(0.0, 10.0) == 1.0);
    CHECK(exciton_form_factor(0.2, 10.0) == doctest::Approx(std::pow(2.0, -1.5)));
    MaterialSet m;
    CHECK(deformation_coupling(0.0, m) == doctest::Approx(4300.0));
}

TEST_CASE("phonon occupation") {
    const double kT = 0.08617333262 * 4.0;
    CHECK(phonon_occupation(kT, 4.0) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)));
    CHECK(phonon_occupation(1e-9, 4.0) == doctest::Approx(kT / 1e-9).epsilon(1e-6));
}

TEST_CASE("p-ph pair rates match angular quadrature on random pairs") {
    MaterialSet m;
    for (double B : {0.0, 4.0}) {
        const KGrid g = build_grid(m, make_field_state(m, B), 150, 0.5);
        std::mt19937_64 rng(11 + static_cast<int>(B));
        std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
        int checked = 0;
        while (checked < 25) {
            const std::size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            const double w = phonon_pair_rate(i, j, g, m);
            const double ref = oracle::phonon_rate(g, i, j, 200000);
            CHECK(w == doctest::Approx(ref).epsilon(1e-6));
            CHECK(w == phonon_pair_rate(j, i, g, m));
            ++checked;
        }
    }
}

TEST_CASE("p-ph rate vanishes where energy and momentum cannot both be conserved") {
    MaterialSet m;
    const KGrid g4 = build_grid(m, make_field_state(m, 4.0), 150, 0.5);
    const KGrid g0 = build_grid(m, make_field_state(m, 0.0), 150, 0.5);
    std::size_t blocked = 0;
    for (std::size_t i = 1; i + 1 < g4.size(); ++i) {
        const double slope = (g4.energy(i + 1) - g4.energy(i)) / (g4.k()[i + 1] - g4.k()[i]);
        if (slope < m.hbar_sound()) {
            CHECK(phonon_pair_rate(i, i + 1, g4, m) == 0.0);
            ++blocked;
        }
    }
    CHECK(blocked > 0);
    const auto K0 = build_phonon_kernel(g0, m, make_field_state(m, 0.0));
    const auto K4 = build_phonon_kernel(g4, m, make_field_state(m, 4.0));
    CHECK(K4.nonzero_count() < K0.nonzero_count());
}

TEST_CASE("dressed p-ph rates obey detailed balance") {
    MaterialSet m;
    const KGrid g = build_grid(m, make_field_state(m, 2.0), 80, 0.5);
    const auto K = build_phonon_kernel(g, m, make_field_state(m, 2.0));
    const double kT = 0.08617333262 * m.temperature;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = i + 1; j < g.size(); ++j) {
            if (K.W(i, j) == 0.0) continue;
            const double dE = g.energy(j) - g.energy(i);
            if (dE / kT > 600) continue;
            const double ratio = K.rate(i, j) / K.rate(j, i);
            CHECK(ratio == doctest::Approx(std::exp(-dE / kT)).epsilon(1e-10));
            ++checked;
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("phonon kernel cache round trip") {
    MaterialSet m;
    const auto f = make_field_state(m, 1.0);
    const KGrid g = build_grid(m, f, 24, 0.5);
    const auto K = build_phonon_kernel(g, m, f);
    const auto path = std::filesystem::temp_directory_path() / "polariton_kernel_test.pphk";
    save_phonon_kernel(path, K, 42);
    const auto back = load_phonon_kernel(path, 42, g, m.temperature);
    REQUIRE(back.has_value());
    CHECK(back->base == K.base);
    CHECK(back->dressed == K.dressed);
    CHECK_FALSE(load_phonon_kernel(path, 43, g, m.temperature).has_value());
    std::filesystem::remove(path);
    CHECK_FALSE(load_phonon_kernel(path, 42, g, m.temperature).has_value());
}

TEST_CASE("kinematic measure matches quadrature on admissible quadruples") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> kd(0.005, 0.5);
    int checked = 0;
    while (checked < 50) {
        const double k = kd(rng), kp = kd(rng), k1 = kd(rng), k2 = kd(rng);
        const double ref = oracle::kinematic_measure(k, kp, k1, k2, 400000);
        if (ref == 0.0) {
            CHECK(kinematic_R(k, kp, k1, k2) == 0.0);
            continue;
        }
        CHECK(kinematic_R(k, kp, k1, k2) == doctest::Approx(ref).epsilon(1e-4));
        ++checked;
    }
}

TEST_CASE("kinematic measure symmetries and limits") {
    const double k = 0.1, kp = 0.07, k1 = 0.05, k2 = 0.12;
    const double r = kinematic_R(k, kp, k1, k2);
    CHECK(r > 0.0);
    for (double lambda : {0.5, 2.0, 10.0}) {
        CHECK(kinematic_R(lambda * k, lambda * kp, lambda * k1, lambda * k2) ==
              doctest::Approx(r / (lambda * lambda)).epsilon(1e-12));
    }
    CHECK(kinematic_R(kp, k, k2, k1) == doctest::Approx(r).epsilon(1e-13));
    CHECK(kinematic_R(k1, k2, k, kp) == doctest::Approx(r).epsilon(1e-13));
    CHECK(kinematic_R(0.1, 0.1, 0.01, 0.4) == 0.0);
    // A vanishing member pins q = k; compare with a shrinking member.
    const double pinned = kinematic_R(0.0, kp, k, k2);
    CHECK(pinned > 0.0);
    CHECK(kinematic_R(1e-7, kp, k, k2) == doctest::Approx(pinned).epsilon(1e-4));
}

TEST_CASE("pair channels are canonical and conserve energy within the binning resolution") {
    MaterialSet m;
    const auto f = make_field_state(m, 0.0);
    const KGrid g = build_grid(m, f, 60, 0.5);
    const PairChannels pc = build_pp_channels(g, m, f);
    REQUIRE(!pc.channels.empty());
    for (const auto& c : pc.channels) {
        CHECK(c.i < c.l);
        CHECK(c.l <= c.m);
        CHECK(c.m < c.j);
        CHECK(c.weight > 0.0);
        const double mismatch = g.energy(c.i) + g.energy(c.j) - g.energy(c.l) - g.energy(c.m);
        // Nearest-node binning: off by at most half the wider adjacent gap.
        const double gap = std::max(g.energy(c.m) - g.energy(c.m - 1),
                                    c.m + 1 < g.size() ? g.energy(c.m + 1) - g.energy(c.m) : 0.0);
        CHECK(std::abs(mismatch) <= 0.5 * gap * (1 + 1e-12));
    }
}

TEST_CASE("pair channels reproduce an exhaustive loop on an 8-node grid") {
    MaterialSet m;
    const auto f = make_field_state(m, 0.0);
    const KGrid g = build_grid_from_nodes(m, f, {0.0, 0.004, 0.01, 0.03, 0.06, 0.1, 0.15, 0.2});
    const PairChannels pc = build_pp_channels(g, m, f);
    REQUIRE(!pc.channels.empty());
    const std::size_t n = g.size();

    std::vector<double> occ(n);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> od(0.0, 3.0);
    for (auto& v : occ) v = od(rng);

    std::size_t processes = 0;
    const auto dndt = oracle::exhaustive_pp(g, f, occ, processes);
    CHECK(processes == pc.channels.size());
    const auto got = collision_pp(KineticState{0.0, occ}, pc, g);
    for (std::size_t x = 0; x < n; ++x) {
        CHECK(got[x] == doctest::Approx(dndt[x]).epsilon(1e-9).scale(1e-300));
    }
}
