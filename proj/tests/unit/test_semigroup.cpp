#include <doctest.h>

#include <cmath>

#include "nelson/semigroup.hpp"
#include "nelson/verify.hpp"

using namespace nelson;
using namespace nelson::semigroup;

namespace {
kernel::ModelParams small() {
    kernel::ModelParams p;
    p.kappa = 4.0;
    p.grid.radial_nodes = 16;
    p.grid.angular_nodes = 14;
    return p;
}
}  // namespace

TEST_CASE("potential catalog") {
    PotentialSpec V;
    const double x[6] = {1.0, 0.0, 0.0, 0.0, 2.0, 0.0};
    CHECK(V(x, 2) == 0.0);
    V.kind = PotentialSpec::Kind::harmonic;
    V.omega0 = 2.0;
    CHECK(V(x, 2) == doctest::Approx(2.0 * 1.0 + 2.0 * 4.0));
    V.radius = 1.5;
    CHECK(V(x, 2) == doctest::Approx(2.0 + 2.0 * 2.25));
    V.kind = PotentialSpec::Kind::soft_coulomb;
    V.a = 1.0;
    CHECK(V(x, 1) == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("time indices") {
    CHECK(time_indices({0.5, 1.0}, 0.01) == std::vector<int>{50, 100});
    CHECK_THROWS(time_indices({0.505}, 0.01));
}

TEST_CASE("energy fit recovers a synthetic exponential") {
    SampleTable tab;
    tab.t = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    const int n = 64;
    tab.l.assign(n, {});
    tab.c.assign(n, {});
    for (int s = 0; s < n; ++s)
        for (double t : tab.t) {
            const double noise = 0.01 * std::sin(13.0 * s + 7.0 * t);
            tab.l[s].push_back(-1.7 * t + 0.3 + noise);
            tab.c[s].push_back(1.0);
        }
    const auto f = fit_energy(tab, {});
    CHECK(f.energy == doctest::Approx(1.7).epsilon(2e-3));
    CHECK(f.convexity_ok);
}

TEST_CASE("log term fit") {
    SampleTable tab;
    for (int i = 1; i <= 10; ++i) tab.t.push_back(0.5 * i);
    const int n = 32;
    tab.l.assign(n, {});
    tab.c.assign(n, {});
    for (int s = 0; s < n; ++s)
        for (double t : tab.t) {
            tab.l[s].push_back(0.2 - 0.8 * t - 1.5 * std::log(t) + 0.01 * std::cos(5.0 * s + t));
            tab.c[s].push_back(1.0);
        }
    FitOptions fo;
    fo.log_term = true;
    const auto f = fit_energy(tab, fo);
    CHECK(f.energy == doctest::Approx(0.8).epsilon(0.02));
    CHECK(f.log_coef == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("free vacuum has zero energy") {
    auto p = small();
    p.eps = 0.0;
    McControls mc;
    mc.n_paths = 64;
    mc.dt = 1e-2;
    const auto f = ground_energy(p, {}, {0.5, 1.0, 1.5, 2.0}, mc);
    CHECK(f.energy == 0.0);
}

TEST_CASE("T estimates do not depend on the worker count") {
    const auto p = small();
    const PathEvaluator ev(p);
    const auto g = verify::random_probe(ev.grid(), 1, 0), h = verify::random_probe(ev.grid(), 1, 1);
    PsiTerm psi{Bump{1.0, {0, 0, 0}, 0.7}, fock::coherent(ev.grid(), h)};
    McControls mc;
    mc.n_paths = 24;
    mc.dt = 1e-2;
    mc.threads = 1;
    const auto a = T_estimate(ev, {0.1, 0, 0}, 0.3, {psi}, g, {}, mc);
    mc.threads = 3;
    const auto b = T_estimate(ev, {0.1, 0, 0}, 0.3, {psi}, g, {}, mc);
    CHECK(a.mean == b.mean);
    CHECK(a.partials == b.partials);
}

TEST_CASE("W and its adjoint are adjoint on coherent vectors") {
    const auto p = small();
    const PathEvaluator ev(p);
    const auto& G = ev.grid();
    const auto path = paths::sample_path(3, 0, 40, 1e-2, 1);
    const auto s = ev.at(path, {0, 0, 0}, 40);
    const auto g = fock::coherent(G, verify::random_probe(G, 5, 0));
    const auto h = fock::coherent(G, verify::random_probe(G, 5, 1));
    const cplx a = fock::inner_coherent(G, g, apply_w(G, s, h));
    const cplx b = std::conj(fock::inner_coherent(G, h, apply_w_adjoint(G, s, g)));
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
}

TEST_CASE("Markov residual shrinks under refinement") {
    const auto r = verify::markov_refinement(small(), 0.5, {1e-2, 2.5e-3}, 8, 3);
    CHECK(r.value[1] < r.value[0]);
    CHECK(r.order > 0.2);
}
