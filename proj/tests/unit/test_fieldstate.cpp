#include <doctest.h>

#include <cmath>

#include "nelson/fieldstate.hpp"

using namespace nelson;
using namespace nelson::field;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("angular rules integrate low-order polynomials") {
    for (int n : {6, 14, 26, 50}) {
        const auto r = angular_rule(n);
        double w = 0.0, x2 = 0.0, x2y2 = 0.0, x = 0.0;
        for (size_t i = 0; i < r.dirs.size(); ++i) {
            const auto& d = r.dirs[i];
            w += r.weights[i];
            x += r.weights[i] * d[0];
            x2 += r.weights[i] * d[0] * d[0];
            x2y2 += r.weights[i] * d[0] * d[0] * d[1] * d[1];
        }
        CHECK(w == doctest::Approx(4 * kPi).epsilon(1e-13));
        CHECK(std::abs(x) < 1e-13);
        CHECK(x2 == doctest::Approx(4 * kPi / 3).epsilon(1e-13));
        if (r.degree >= 5) CHECK(x2y2 == doctest::Approx(4 * kPi / 15).epsilon(1e-12));
    }
    CHECK_THROWS_AS(angular_rule(7), DomainError);
}

TEST_CASE("radial rule carries the rho^2 Jacobian") {
    const auto r = radial_rule(96, 1e-3, 60.0, {2.0});
    double s = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::exp(-r.nodes[i]);
    CHECK(s == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("grid directions close under the antipode") {
    ModelParams p;
    p.kappa = 4.0;
    p.grid.radial_nodes = 16;
    p.grid.angular_nodes = 14;
    const auto g = MomentumGrid::build(p);
    for (int n = 0; n < g.size(); ++n) {
        const Vec3 a = g.k(n), b = g.k(g.antipode(n));
        for (int c = 0; c < 3; ++c) CHECK(a[c] == doctest::Approx(-b[c]).epsilon(1e-14));
    }
}

TEST_CASE("grid inner products of atoms match the radial reduction") {
    ModelParams p;
    p.kappa = 6.0;
    p.grid.radial_nodes = 64;
    p.grid.angular_nodes = 2 * 12 * 12;
    const auto g = MomentumGrid::build(p);
    kernel::Atom a{0.3, {0.0, 0.0, 0.0}, kernel::KernelId::f, 0.0};
    kernel::Atom b{0.2, {0.4, -0.1, 0.2}, kernel::KernelId::beta, 0.0};
    const auto sa = atom_state(g, a, p), sb = atom_state(g, b, p);
    for (double w : {0.0, 1.0}) {
        const cplx grid = weighted_inner(sa, sb, w);
        const cplx ref = kernel::atom_pair_integral(a, b, w, p).scalar;
        CHECK(std::abs(grid - ref) < 1e-7 * std::abs(ref));
    }
}

TEST_CASE("engine terms vanish at time zero and scale with eps squared") {
    ModelParams p;
    p.kappa = 4.0;
    p.grid.radial_nodes = 16;
    p.grid.angular_nodes = 14;
    const auto g = MomentumGrid::build(p);
    const auto path = paths::sample_path(4, 0, 50, 1e-2, 1);
    FieldEngine e1(g, p);
    e1.start(path, {0.0, 0.0, 0.0});
    const auto t0 = e1.terms();
    for (double v : t0.b) CHECK(v == 0.0);
    e1.advance_to(50);
    ModelParams q = p;
    q.eps = 2.0;
    FieldEngine e2(g, q);
    e2.start(path, {0.0, 0.0, 0.0});
    e2.advance_to(50);
    const auto a = e1.terms(), b = e2.terms();
    for (size_t i = 0; i < a.b.size(); ++i) CHECK(b.b[i] == doctest::Approx(4.0 * a.b[i]).epsilon(1e-12));
}
