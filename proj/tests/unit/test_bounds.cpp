#include <doctest.h>

#include <cmath>

#include "nelson/bounds.hpp"

using namespace nelson;
using namespace nelson::bounds;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("Gaussian Pekar trial") {
    const auto r = pekar_energy({});
    // Closed form for the normalized Gaussian at the optimal width.
    CHECK(r.energy == doctest::Approx(-1.0 / (3.0 * kPi)).epsilon(1e-9));
    CHECK(r.energy > kPekarEnergy);
    CHECK(r.energy <= -0.095);
}

TEST_CASE("hydrogenic Pekar trial") {
    PekarTrial h;
    h.kind = PekarTrial::Kind::hydrogenic;
    CHECK(pekar_energy(h).energy == doctest::Approx(-25.0 / 256.0).epsilon(1e-9));
}

TEST_CASE("Coulomb term agrees between Fourier and real space") {
    for (auto kind : {PekarTrial::Kind::gaussian, PekarTrial::Kind::hydrogenic}) {
        PekarTrial t;
        t.kind = kind;
        CHECK(pekar_terms(t).attraction == doctest::Approx(pekar_attraction_direct(t)).epsilon(1e-7));
        CHECK(pekar_terms(t).norm == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("Pekar terms scale under dilation") {
    PekarTrial t;
    const auto a = pekar_terms(t, 1.0), b = pekar_terms(t, 2.0);
    CHECK(b.kinetic == doctest::Approx(4.0 * a.kinetic).epsilon(1e-9));
    CHECK(b.attraction == doctest::Approx(2.0 * a.attraction).epsilon(1e-9));
}

TEST_CASE("tabulated trial must be normalized") {
    PekarTrial t;
    t.kind = PekarTrial::Kind::tabulated;
    for (int i = 0; i <= 200; ++i) {
        t.r.push_back(0.05 * i);
        t.g.push_back(std::exp(-0.05 * i));
    }
    CHECK_THROWS_AS(pekar_energy(t), NormalizationError);
}

TEST_CASE("tabulated Gaussian reproduces the analytic trial") {
    PekarTrial t;
    t.kind = PekarTrial::Kind::tabulated;
    const double c = std::pow(kPi, -0.75);
    for (int i = 0; i <= 6000; ++i) {
        const double r = 0.002 * i;
        t.r.push_back(r);
        t.g.push_back(c * std::exp(-0.5 * r * r));
    }
    CHECK(pekar_energy(t).energy == doctest::Approx(-1.0 / (3.0 * kPi)).epsilon(1e-4));
}

TEST_CASE("pair lemma holds for lognormal weights") {
    for (int n : {2, 3, 4}) {
        const auto r = pair_lemma_check(n, {}, 20000, 3);
        CHECK_FALSE(r.violated);
        CHECK(r.rhs == doctest::Approx(r.rhs_exact).epsilon(0.05));
    }
    CHECK_THROWS_AS(pair_lemma_check(1, {}, 100, 1), DomainError);
    PairDistribution heavy;
    heavy.sigma = 6.0;
    CHECK_THROWS_AS(pair_lemma_check(2, heavy, 2000, 1), MomentError);
}

TEST_CASE("spectral bounds regimes") {
    CHECK_THROWS_AS(spectral_bounds(0.5, 1, 0.0), RegimeError);
    const auto s = spectral_bounds(1.2, 2, 0.0);
    CHECK(s.lower <= 0.0);
    CHECK_FALSE(s.upper.has_value());
    const auto big = spectral_bounds(2.0, 2, 0.0);
    REQUIRE(big.upper.has_value());
    CHECK(big.lower <= *big.upper);
    CHECK(lower_bound_formula(0.5, 1) == doctest::Approx(-256 * kPi * kPi * 0.0625 - 0.25).epsilon(1e-6));
}

TEST_CASE("moment bound helpers") {
    CHECK(parse_moment_bound(moment_bound_name(MomentBound::bdWp)) == MomentBound::bdWp);
    CHECK_THROWS(parse_moment_bound("nope"));
    CHECK(std::isfinite(scheutzow_constant(2.0, 2.0)));
    CHECK(exp_moment_rhs(MomentBound::expbdu, 2.0, 1.0, 2, 1.0) >
          exp_moment_rhs(MomentBound::expbdu, 1.0, 1.0, 2, 1.0));
    CHECK(bound_table(1.0, 2, 0.0, 1.0, 2.0).size() > 5);
}
