#include <doctest.h>

#include <cmath>

#include "nelson/action.hpp"
#include "nelson/verify.hpp"

using namespace nelson;

namespace {
kernel::ModelParams small(double kappa = 4.0) {
    kernel::ModelParams p;
    p.kappa = kappa;
    p.grid.radial_nodes = 24;
    p.grid.angular_nodes = 14;
    return p;
}
}  // namespace

TEST_CASE("decomposition and direct form agree as dt shrinks") {
    auto p = small();
    p.n_particles = 2;
    const auto r = verify::decomposition_refinement(p, {0, 0, 0, 0.5, 0, 0}, 0.5, {4e-3, 2e-3, 1e-3}, 12, 3);
    CHECK(r.value[2] < r.value[0]);
    CHECK(r.order > 0.2);
}

TEST_CASE("vanishing coupling gives zero action") {
    auto p = small();
    p.eps = 0.0;
    const auto path = paths::sample_path(1, 0, 100, 1e-2, 1);
    const auto a = action::action_decomposed(path, {0, 0, 0}, 100, p);
    CHECK(a.u_total == 0.0);
    CHECK(action::action_direct(path, {0, 0, 0}, 100, p) == 0.0);
}

TEST_CASE("action is quadratic in eps") {
    auto p = small();
    const auto path = paths::sample_path(1, 2, 100, 1e-2, 1);
    const double u1 = action::action_decomposed(path, {0, 0, 0}, 100, p).u_total;
    p.eps = 0.5;
    const double u2 = action::action_decomposed(path, {0, 0, 0}, 100, p).u_total;
    CHECK(u2 == doctest::Approx(0.25 * u1).epsilon(1e-12));
}

TEST_CASE("action is translation invariant for one particle") {
    auto p = small();
    const auto path = paths::sample_path(1, 3, 80, 1e-2, 1);
    const double a = action::action_decomposed(path, {0, 0, 0}, 80, p).u_total;
    const double b = action::action_decomposed(path, {1.3, -0.4, 2.0}, 80, p).u_total;
    CHECK(b == doctest::Approx(a).epsilon(1e-10));
}

TEST_CASE("IR split reassembles the full action") {
    auto p = small();
    const auto path = paths::sample_path(5, 0, 60, 1e-2, 1);
    const auto s = action::ir_split(path, {0, 0, 0}, 60, 1.0, p);
    const double u = action::action_decomposed(path, {0, 0, 0}, 60, p).u_total;
    CHECK(std::isfinite(s.u_lt));
    CHECK(std::isfinite(s.u_gt));
    CHECK(std::abs(s.u_lt + s.u_gt - u) <= 1e-8 * std::abs(u) + std::abs(s.u_lt) + std::abs(s.u_gt));
}

TEST_CASE("convergence table shrinks with the cutoff") {
    auto p = small(kernel::kInf);
    p.grid.radial_nodes = 48;
    McControls mc;
    mc.n_paths = 32;
    mc.dt = 4e-3;
    mc.seed = 2;
    const auto T = action::action_convergence_stat({0, 0, 0}, 0.4, {2, 4, 8}, p, mc);
    REQUIRE(T.rows.size() == 3);
    CHECK(T.rows[2].value < T.rows[0].value);
    CHECK(T.slope < 0.0);
}
