#include <doctest.h>

#include <cmath>

#include "nelson/fiber.hpp"
#include "nelson/nonfock.hpp"
#include "nelson/verify.hpp"

using namespace nelson;

namespace {
kernel::ModelParams small() {
    kernel::ModelParams p;
    p.kappa = 4.0;
    p.grid.radial_nodes = 24;
    p.grid.angular_nodes = 14;
    return p;
}
}  // namespace

TEST_CASE("Gross identity holds per path") {
    nonfock::GrossParams gp;
    gp.lambda = 1.0;
    gp.base = small();
    const auto ev = nonfock::make_evaluator(gp);
    for (int k = 0; k < 4; ++k) {
        const auto path = paths::sample_path(8, k, 50, 1e-2, 1);
        const auto g = verify::random_probe(ev.grid(), 8, 2 * k), h = verify::random_probe(ev.grid(), 8, 2 * k + 1);
        CHECK(nonfock::idgross_residual(ev, path, {0.2, 0, -0.1}, 50, g, h, gp, {}).rel < 1e-10);
    }
}

TEST_CASE("tilde action reduces to u when Lambda is zero") {
    nonfock::GrossParams gp;
    gp.lambda = 0.0;
    gp.base = small();
    const auto ev = nonfock::make_evaluator(gp);
    const auto path = paths::sample_path(1, 0, 50, 1e-2, 1);
    const auto t = nonfock::tilde_action(ev, path, {0, 0, 0}, 50, 0.0);
    CHECK(std::isfinite(t.u_tilde));
    CHECK(t.u_tilde == doctest::Approx(t.u - t.b_lambda + t.c_minus_lambda + t.c_plus_lambda));
}

TEST_CASE("Gross identity preconditions") {
    nonfock::GrossParams gp;
    gp.lambda = 1.0;
    gp.base = small();
    gp.base.kappa = kernel::kInf;
    const auto ev = nonfock::make_evaluator(gp);
    const auto path = paths::sample_path(1, 0, 10, 1e-2, 1);
    const auto g = verify::random_probe(ev.grid(), 1, 0);
    CHECK_THROWS_AS(nonfock::idgross_residual(ev, path, {0, 0, 0}, 10, g, g, gp, {}), CutoffRequired);
}

TEST_CASE("fiber element reproduces the full element at any offset") {
    const auto p = small();
    const semigroup::PathEvaluator ev(p);
    for (int k = 0; k < 3; ++k) {
        const auto path = paths::sample_path(2, k, 60, 1e-2, 1);
        const auto g = verify::random_probe(ev.grid(), 2, 2 * k), h = verify::random_probe(ev.grid(), 2, 2 * k + 1);
        CHECK(fiber::fiber_offset_residual(ev, path, {0.7, -0.3, 1.1}, 60, g, h).rel < 1e-12);
    }
}

TEST_CASE("free fiber dispersion") {
    auto p = small();
    p.eps = 0.0;
    McControls mc;
    mc.n_paths = 2048;
    mc.dt = 1e-2;
    const auto f = fiber::fiber_energy({0.5, 0.0, 0.0}, p, {0.5, 1.0, 1.5, 2.0}, mc);
    CHECK(std::abs(f.energy - 0.125) < 4.0 * f.energy_err + 1e-3);
}
