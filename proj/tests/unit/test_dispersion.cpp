#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "polariton/dispersion.hpp"
#include "polariton/grid.hpp"

using namespace polariton;

namespace {

oracle::Polariton reference(const MaterialSet& m, double B) {
    oracle::Polariton p;
    p.floor_meV = oracle::big(m.photon_floor) * 1000;
    p.line_meV = oracle::big(m.exciton_line) * 1000;
    p.eps = m.dielectric_const;
    p.mass = oracle::exciton_mass(m.electron_mass, m.hole_mass, m.mass_coeff, B);
    p.shift = oracle::big(m.shift_coeff) * B * B;
    p.rabi = oracle::big(m.rabi_splitting) / oracle::radius_ratio(m.bohr_radius, B);
    return p;
}

}  // namespace

TEST_CASE("Hopfield fractions are normalized on every grid node") {
    MaterialSet m;
    for (int B = 0; B <= 6; ++B) {
        const KGrid g = build_grid(m, make_field_state(m, B), 150, 0.5);
        for (const auto& p : g.points()) {
            CHECK(std::abs(p.x2 + p.c2 - 1.0) < 1e-12);
            CHECK(p.x2 >= 0.0);
            CHECK(p.c2 >= 0.0);
        }
    }
}

TEST_CASE("photon and polariton energies against the eigenvalue oracle") {
    MaterialSet m;
    const Dispersion d(m, make_field_state(m, 0.0));
    CHECK(d.absolute_eV(d.photon_energy(0.02)) == doctest::Approx(1.898).epsilon(5e-4));
    CHECK(d.photon_energy(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d.lower_polariton_energy(0.0) == doctest::Approx(-2.5).epsilon(1e-12));
    for (double B : {0.0, 3.0, 6.0}) {
        const Dispersion db(m, make_field_state(m, B));
        const auto ref = reference(m, B);
        for (double k : {0.0, 1e-4, 3e-3, 0.01, 0.05, 0.2, 0.5}) {
            CHECK(db.lower_polariton_energy(k) ==
                  doctest::Approx(static_cast<double>(ref.lower(k))).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("analytic derivatives match Richardson differences at random points") {
    MaterialSet m;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> kd(1e-3, 0.5), bd(0.0, 6.0);
    for (int n = 0; n < 60; ++n) {
        const double B = bd(rng);
        const double k = kd(rng);
        const Dispersion d(m, make_field_state(m, B));
        const auto [d1, d2] = oracle::derivatives(reference(m, B), k);
        const auto a = d.derivatives(k);
        CHECK(a.dE_dk == doctest::Approx(d1).epsilon(1e-6));
        CHECK(a.d2E_dk2 == doctest::Approx(d2).epsilon(1e-6).scale(1e-3 * std::abs(d1) / k));
    }
}

TEST_CASE("branch ordering, blue shift and steepening") {
    MaterialSet m;
    const Dispersion d0(m, make_field_state(m, 0.0));
    for (int B = 0; B <= 6; ++B) {
        const Dispersion d(m, make_field_state(m, B));
        CHECK(d.exciton_energy(0.0) - d0.exciton_energy(0.0) == m.shift_coeff * B * B);
        for (double k : {0.0, 0.005, 0.02, 0.1, 0.4}) {
            CHECK(d.lower_polariton_energy(k) < d.exciton_energy(k));
            CHECK(d.lower_polariton_energy(k) < d.photon_energy(k));
        }
    }
    // Heavier excitons flatten the exciton-like part of the branch, while the
    // polariton region below it gains height (and so average steepness).
    for (double k = 0.02; k <= 0.1 + 1e-12; k += 0.01) {
        double prev = INFINITY;
        for (double B = 0.0; B <= 6.0 + 1e-12; B += 0.5) {
            const Dispersion d(m, make_field_state(m, B));
            const double s = d.derivatives(k).dE_dk;
            CHECK(s <= prev);
            prev = s;
        }
    }
    double prev_rise = 0.0;
    for (double B = 0.0; B <= 6.0 + 1e-12; B += 0.5) {
        const Dispersion d(m, make_field_state(m, B));
        const double rise = d.lower_polariton_energy(0.01) - d.lower_polariton_energy(0.0);
        CHECK(rise >= prev_rise);
        prev_rise = rise;
    }
}

TEST_CASE("lifetime blends the two inverse lifetimes") {
    MaterialSet m;
    const Dispersion d(m, make_field_state(m, 0.0));
    CHECK(d.lifetime(0.0) == doctest::Approx(1.0 / (0.5 / 4.0 + 0.5 / 20.0)));
    CHECK(d.lifetime(0.5) == doctest::Approx(20.0).epsilon(1e-3));
    CHECK_THROWS_AS(d.lower_polariton_energy(-1e-3), DomainError);
}
