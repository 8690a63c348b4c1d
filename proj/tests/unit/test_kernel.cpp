#include <doctest.h>

#include <cmath>

#include "nelson/kernel.hpp"

using namespace nelson;
using namespace nelson::kernel;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("dispersion") {
    CHECK(dispersion(3.0, 4.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(dispersion(2.5, 0.0) == 2.5);
    CHECK(dispersion(Vec3{1.0, 2.0, 2.0}, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("taper profile is C1 and matches the sharp cutoff inside") {
    CHECK(chi_profile(0.5, ChiKind::taper) == 1.0);
    CHECK(chi_profile(1.5, ChiKind::taper) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(chi_profile(2.5, ChiKind::taper) == 0.0);
    CHECK(chi_profile(1.5, ChiKind::sharp) == 0.0);
    for (double s : {1.0, 2.0}) {
        const double h = 1e-6;
        const double left = (chi_profile(s, ChiKind::taper) - chi_profile(s - h, ChiKind::taper)) / h;
        const double right = (chi_profile(s + h, ChiKind::taper) - chi_profile(s, ChiKind::taper)) / h;
        CHECK(std::abs(left - right) < 1e-4);
    }
}

TEST_CASE("renormalization energy matches the closed form") {
    ModelParams p;
    p.eps = 0.7;
    for (double k : {1.0, 4.0, 32.0}) {
        p.kappa = k;
        CHECK(renorm_energy(p) == doctest::Approx(renorm_energy_closed(0.7, k)).epsilon(1e-9));
        CHECK(renorm_energy_closed(0.7, k) == doctest::Approx(8 * kPi * 0.49 * std::log1p(k / 2)).epsilon(1e-14));
    }
    p.kappa = 8.0;
    CHECK(renorm_energy(p, {1.0, kInf}) == doctest::Approx(renorm_energy_closed(0.7, 8.0, {1.0, kInf})).epsilon(1e-9));
}

TEST_CASE("renormalization energy grows logarithmically in kappa") {
    const double a = renorm_energy_closed(1.0, 1e6), b = renorm_energy_closed(1.0, 2e6);
    CHECK(b - a == doctest::Approx(8 * kPi * std::log(2.0)).epsilon(1e-5));
}

TEST_CASE("pair potential at the origin") {
    ModelParams p;
    p.kappa = 6.0;
    p.lambda_split = 0.5;
    CHECK(pair_potential(0.0, p) == doctest::Approx(pair_potential_zero_closed(1.0, 0.5, 6.0)).epsilon(1e-9));
    CHECK(std::abs(pair_potential(3.0, p)) < pair_potential(0.0, p));
    p.eps = 0.0;
    CHECK(pair_potential(1.0, p) == 0.0);
}

TEST_CASE("spherical Bessel functions agree with the standard library") {
    for (double z : {1e-9, 1e-4, 0.01, 0.3, 1.0, 7.5, 40.0}) {
        CHECK(sph_j0(z) == doctest::Approx(std::sph_bessel(0, z)).epsilon(1e-12));
        CHECK(sph_j1(z) == doctest::Approx(std::sph_bessel(1, z)).epsilon(1e-10));
        CHECK(sph_j2(z) == doctest::Approx(std::sph_bessel(2, z)).epsilon(1e-8));
    }
    CHECK(sph_j0(0.0) == 1.0);
    CHECK(sph_j1(0.0) == 0.0);
}

TEST_CASE("integrate_radial") {
    CHECK(integrate_radial([](double r) { return std::exp(-r); }, 0.0, kInf) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate_radial([](double r) { return r * r; }, 0.0, 3.0) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK_THROWS_AS(integrate_radial([](double r) { return 1.0 / (1.0 + r); }, 0.0, kInf), DivergentIntegral);
}

TEST_CASE("mho domain") {
    CHECK_THROWS_AS(mho(1.0, 0.1), DomainError);
    CHECK_THROWS_AS(mho(-1.0, -0.25), DomainError);
    CHECK(std::isfinite(mho(2.0, -0.25)));
}

TEST_CASE("kernel catalog is consistent") {
    for (const auto& k : kernel_catalog()) {
        CHECK(&kernel_info(k.id) != nullptr);
        CHECK((k.rank == 0 || k.rank == 1));
    }
    ModelParams p;
    p.kappa = 4.0;
    CHECK(kernel_radial(KernelId::f, 2.0, p) == doctest::Approx(coupling_f(2.0, p)));
    CHECK(kernel_radial(KernelId::beta, 2.0, p) == doctest::Approx(coupling_beta(2.0, p)));
    CHECK(coupling_f(5.0, p) == 0.0);
    // beta = f / (omega + rho^2 / 2)
    CHECK(coupling_beta(2.0, p) == doctest::Approx(coupling_f(2.0, p) / 4.0));
}

TEST_CASE("parameter validation") {
    ModelParams p;
    p.n_particles = 0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p.n_particles = 1;
    p.mu = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}
