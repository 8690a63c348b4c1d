#include <doctest.h>

#include <cmath>

#include "nelson/fock.hpp"
#include "nelson/verify.hpp"

using namespace nelson;

namespace {
field::MomentumGrid grid() {
    kernel::ModelParams p;
    p.kappa = 4.0;
    p.grid.radial_nodes = 16;
    p.grid.angular_nodes = 14;
    return field::MomentumGrid::build(p);
}
}  // namespace

TEST_CASE("coherent algebra checks pass on random probes") {
    const auto g = grid();
    for (const auto& c : verify::fock_algebra_checks(g, 20, 17)) {
        INFO(c.name << " residual " << c.residual);
        CHECK(c.passed);
    }
}

TEST_CASE("Weyl operators compose with the projective phase") {
    const auto G = grid();
    const auto f = verify::random_probe(G, 1, 0), g = verify::random_probe(G, 1, 1);
    const auto h = verify::random_probe(G, 1, 2), a = verify::random_probe(G, 1, 3);
    const auto z = fock::coherent(G, h);
    const auto lhs = fock::apply_weyl(G, f, std::nullopt, fock::apply_weyl(G, g, std::nullopt, z));
    fock::Vector fg(f.size());
    for (size_t n = 0; n < f.size(); ++n) fg[n] = f[n] + g[n];
    auto rhs = fock::apply_weyl(G, fg, std::nullopt, z);
    rhs.log_prefactor += cplx(0.0, -fock::inner(G, f, g).imag());
    const auto za = fock::coherent(G, a);
    const cplx x = fock::inner_coherent(G, za, lhs), y = fock::inner_coherent(G, za, rhs);
    CHECK(std::abs(x - y) < 1e-12 * std::abs(y));
}

TEST_CASE("Weyl operators are unitary") {
    const auto G = grid();
    const auto f = verify::random_probe(G, 2, 0), h = verify::random_probe(G, 2, 1);
    const auto z = fock::coherent(G, h);
    const auto w = fock::apply_weyl(G, f, Vec3{0.3, -1.0, 0.2}, z);
    CHECK(fock::norm_coherent(G, w) == doctest::Approx(fock::norm_coherent(G, z)).epsilon(1e-12));
}

TEST_CASE("coherent vectors have the generating inner product") {
    const auto G = grid();
    const auto g = verify::random_probe(G, 3, 0), h = verify::random_probe(G, 3, 1);
    const cplx ip = fock::inner_coherent(G, fock::coherent(G, g), fock::coherent(G, h));
    const cplx ref = std::exp(fock::inner(G, g, h));
    CHECK(std::abs(ip - ref) < 1e-14 * std::abs(ref));
    CHECK(fock::norm_coherent(G, fock::coherent(G)) == 1.0);
}

TEST_CASE("error paths") {
    const auto G = grid();
    const auto g = verify::random_probe(G, 4, 0);
    CHECK_THROWS_AS(fock::apply_F(G, g, 0.0, false, fock::coherent(G)), DomainError);
    CHECK_THROWS_AS(fock::creation_matrix_element(G, g, {g, g, g}, g, 1.0, g), UnsupportedOrder);
    CHECK_THROWS_AS(fock::coherent(G, fock::Vector(3)), DomainError);
    kernel::ModelParams p;
    fock::HamContext ctx;
    ctx.x = {0, 0, 0};
    CHECK_THROWS_AS(fock::ham_form_element(G, g, g, ctx, p), CutoffRequired);
}
