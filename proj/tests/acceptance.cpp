// Acceptance runner: one PASS/FAIL line per criterion. Optional arguments select criteria by number.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nelson/action.hpp"
#include "nelson/bounds.hpp"
#include "nelson/cli.hpp"
#include "nelson/fiber.hpp"
#include "nelson/nonfock.hpp"
#include "nelson/semigroup.hpp"
#include "nelson/verify.hpp"

using namespace nelson;
using std::numbers::pi;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(a + (b - a) * i / (n - 1));
    return t;
}

kernel::ModelParams params(double kappa, double eps, int N, int radial, int angular) {
    kernel::ModelParams p;
    p.kappa = kappa;
    p.eps = eps;
    p.mu = 0.0;
    p.n_particles = N;
    p.grid.radial_nodes = radial;
    p.grid.angular_nodes = angular;
    return p;
}

Outcome crit1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto grid = field::MomentumGrid::build(params(4.0, 1.0, 1, 64, 26));
    const auto checks = verify::fock_algebra_checks(grid, 100, 2024);
    const double secs = elapsed(t0);
    double worst = 0.0;
    bool ok = secs < 10.0;
    std::string name;
    for (const auto& c : checks) {
        ok = ok && c.residual < 1e-10;
        if (c.residual >= worst) {
            worst = c.residual;
            name = c.name;
        }
    }
    return {ok, format("%zu identities, 100 probes, max rel residual %.3g (%s) < 1e-10, %.2f s < 10 s", checks.size(),
                       worst, name.c_str(), secs)};
}

Outcome crit2() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = params(4.0, 1.0, 2, 32, 14);
    const auto r = verify::decomposition_refinement(p, {0.0, 0.0, 0.0, 0.5, 0.0, 0.0}, 1.0, {4e-3, 2e-3, 1e-3, 5e-4},
                                                    200, 11);
    const double secs = elapsed(t0);
    const bool ok = std::abs(r.order - 0.5) <= 0.15 && secs < 300.0;
    return {ok, format("E|u_dir - u_dec| = %.3g, %.3g, %.3g, %.3g; order %.3f in 0.5 +- 0.15; %.0f s < 300 s",
                       r.value[0], r.value[1], r.value[2], r.value[3], r.order, secs)};
}

Outcome crit3() {
    const auto p = params(4.0, 1.0, 1, 32, 14);
    const auto checks = verify::identity_checks(p, 1.0, 20, 1e-3, 13);
    double rev = 0.0, shift = 0.0;
    for (const auto& c : checks) {
        if (c.name.rfind("reversal", 0) == 0) rev = std::max(rev, c.residual);
        if (c.name.rfind("shift", 0) == 0) shift = std::max(shift, c.residual);
    }
    const auto mk = verify::markov_refinement(p, 1.0, {4e-3, 2e-3, 1e-3, 5e-4}, 40, 13);
    const bool ok = rev < 1e-12 && shift < 1e-12 && std::abs(mk.order - 0.5) <= 0.15;
    return {ok, format("reversal %.2g < 1e-12; shift/flow %.2g (grid-exact); Markov rel residual %.3g -> %.3g, "
                       "order %.3f in 0.5 +- 0.15",
                       rev, shift, mk.value.front(), mk.value.back(), mk.order)};
}

Outcome crit4() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = params(kernel::kInf, 1.0, 1, 64, 26);
    McControls mc;
    mc.n_paths = 10000;
    mc.dt = 2e-3;
    mc.seed = 4;
    const auto T = action::action_convergence_stat({0.0, 0.0, 0.0}, 1.0, {2, 4, 8, 16, 32}, p, mc);
    bool mono = true;
    std::string vals;
    for (size_t i = 0; i < T.rows.size(); ++i) {
        if (i > 0) mono = mono && T.rows[i].value < T.rows[i - 1].value;
        vals += format("%s%.4g", i ? ", " : "", T.rows[i].value);
    }
    const bool ok = mono && T.slope <= -0.25 + 0.15;
    return {ok, format("E|u_k - u_inf| = %s; monotone %s; slope %.3f +- %.3f <= -0.10; tail %.3g; %.0f s",
                       vals.c_str(), mono ? "yes" : "no", T.slope, T.slope_stderr, T.tail_max, elapsed(t0))};
}

Outcome crit5() {
    auto t0 = std::chrono::steady_clock::now();
    auto p = params(4.0, 0.0, 1, 8, 6);
    semigroup::PotentialSpec V;
    V.kind = semigroup::PotentialSpec::Kind::harmonic;
    V.omega0 = 1.0;
    V.radius = 1e6;
    McControls mc;
    mc.n_paths = 16384;
    mc.dt = 1e-3;
    mc.seed = 5;
    const auto e = semigroup::ground_energy(p, V, linspace(0.5, 4.0, 8), mc);
    const double tol = std::max(0.05, 3.0 * e.energy_err);
    const double secs_a = elapsed(t0);
    bool ok = std::abs(e.energy - 1.5) <= tol && secs_a < 120.0;
    std::string d = format("(a) E = %.4f +- %.4f vs 1.5, tol %.3f, %.0f s; (b)", e.energy, e.energy_err, tol, secs_a);
    t0 = std::chrono::steady_clock::now();
    mc.n_paths = 8192;
    for (double xi : {0.0, 0.5, 1.0}) {
        const auto f = fiber::fiber_energy({xi, 0.0, 0.0}, p, linspace(0.25, 2.0, 8), mc);
        const bool hit = std::abs(f.energy - 0.5 * xi * xi) <= 3.0 * f.energy_err;
        ok = ok && hit;
        d += format(" E(%.1f) = %.4f +- %.4f vs %.3f%s", xi, f.energy, f.energy_err, 0.5 * xi * xi, hit ? "" : " (miss)");
    }
    const double secs_b = elapsed(t0);
    ok = ok && secs_b < 120.0;
    return {ok, d + format(", %.0f s", secs_b)};
}

Outcome crit6() {
    const auto p = params(4.0, 1.0, 1, 32, 14);
    const semigroup::PathEvaluator ev(p);
    const auto& G = ev.grid();
    const double e_ren = kernel::renorm_energy(p);
    const std::vector<double> x{0.0, 0.0, 0.0};
    const std::vector<double> deltas{1e-2, 5e-3};
    McControls mc;
    mc.n_paths = 8000;
    mc.dt = 1e-4;
    mc.seed = 6;
    bool ok = true;
    std::string d;
    for (int probe = 0; probe < 3; ++probe) {
        const auto g = verify::random_probe(G, 66, 2 * probe), h = verify::random_probe(G, 66, 2 * probe + 1);
        const cplx gh = fock::inner(G, g, h);
        fock::HamContext ctx;
        ctx.x = x;
        const cplx target = fock::ham_form_element(G, g, h, ctx, p) / std::exp(gh) + double(p.n_particles) * e_ren;
        const semigroup::PsiTerm psi{semigroup::Bump{}, fock::coherent(G, h)};
        std::vector<cplx> D;
        std::vector<double> se;
        for (double delta : deltas) {
            const auto est = semigroup::T_estimate(ev, x, delta, {psi}, g, {}, mc);
            D.push_back(-(std::log(est.mean) - gh) / delta);
            se.push_back(est.std_err / std::abs(est.mean) / delta);
        }
        // The O(delta) term cancels in the two-point extrapolation.
        const cplx extrap = 2.0 * D[1] - D[0];
        const double se_extrap = std::hypot(2.0 * se[1], se[0]);
        const double dev = std::abs(extrap - target);
        const bool hit = dev <= 3.0 * se_extrap;
        ok = ok && hit;
        d += format("%sprobe %d: D(1e-2) = %.3f%+.3fi, D(5e-3) = %.3f%+.3fi, extrapolated %.3f%+.3fi vs %.3f%+.3fi, "
                    "|diff| %.3f <= 3 x %.3f",
                    probe ? "; " : "", probe, D[0].real(), D[0].imag(), D[1].real(), D[1].imag(), extrap.real(),
                    extrap.imag(), target.real(), target.imag(), dev, se_extrap);
    }
    return {ok, d};
}

Outcome crit7() {
    const auto p = params(4.0, 0.5, 1, 32, 14);
    nonfock::GrossParams gp;
    gp.lambda = 1.0;
    gp.base = p;
    const auto ev = nonfock::make_evaluator(gp);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const auto path = paths::sample_path(77, std::uint64_t(k), 1000, 1e-3, 1);
        const auto g = verify::random_probe(ev.grid(), 77, 2 * k), h = verify::random_probe(ev.grid(), 77, 2 * k + 1);
        worst = std::max(worst, nonfock::idgross_residual(ev, path, {0.0, 0.0, 0.0}, 1000, g, h, gp, {}).rel);
    }
    semigroup::PotentialSpec V;
    V.kind = semigroup::PotentialSpec::Kind::harmonic;
    McControls mc;
    mc.n_paths = 4096;
    mc.dt = 2e-3;
    mc.seed = 7;
    const auto tg = linspace(0.5, 4.0, 8);
    const auto a = semigroup::ground_energy(p, V, tg, mc);
    const auto b = nonfock::tilde_ground_energy(gp, V, tg, mc);
    const double comb = std::hypot(a.energy_err, b.energy_err);
    const bool ok = worst < 1e-6 && std::abs(a.energy - b.energy) <= 3.0 * comb;
    return {ok, format("idGross max rel residual %.3g < 1e-6 (50 paths); E_fock = %.4f +- %.4f, E_tilde = %.4f +- "
                       "%.4f, |diff| %.4f <= 3 x %.4f",
                       worst, a.energy, a.energy_err, b.energy, b.energy_err, std::abs(a.energy - b.energy), comb)};
}

Outcome crit8() {
    bool ok = true;
    std::string d;
    for (double eps : {0.5, 1.0}) {
        const auto p = params(4.0, eps, 1, 32, 14);
        McControls mc;
        mc.n_paths = 4096;
        mc.dt = 2e-3;
        mc.seed = 8;
        const auto tg = eps < 0.75 ? linspace(1.0, 8.0, 8) : linspace(0.4, 3.2, 8);
        const auto f = semigroup::ground_energy(p, {}, tg, mc);
        double c_fit = 0.0;
        for (size_t k = 0; k < tg.size(); ++k) c_fit = std::max(c_fit, f.lnZ[k] / (eps * eps * tg[k]));
        const double lo = -256.0 * pi * pi * std::pow(eps, 4) - eps * eps * c_fit;
        const bool hit = f.energy >= lo && f.energy <= 0.0;
        ok = ok && hit;
        d += format("eps %.1f: E = %.4f +- %.4f in [%.1f, 0]; ", eps, f.energy, f.energy_err, lo);
    }
    const double ep = bounds::pekar_energy({}).energy;
    const bool pek = ep > -0.10851 && ep <= -0.095;
    bool pair = true;
    for (int n : {2, 3, 4}) pair = pair && !bounds::pair_lemma_check(n, {}, 100000, 8).violated;
    ok = ok && pek && pair;
    return {ok, d + format("Pekar (Gaussian) %.6f in (-0.10851, -0.095]; pair lemma N=2,3,4 %s", ep,
                           pair ? "holds" : "violated")};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome crit9() {
    const auto root = std::filesystem::temp_directory_path() / "nelson_acceptance_determinism";
    std::filesystem::remove_all(root);
    const std::vector<std::vector<std::string>> runs{
        {"energy", "--eps", "0.5", "--kappa", "4", "--potential", "harmonic", "--t", "0.5:2:4", "--paths", "256",
         "--dt", "5e-3", "--grid-radial", "16", "--grid-angular", "14", "--seed", "9"},
        {"action", "--eps", "1", "--kappa", "4", "--t", "0.5,1", "--paths", "64", "--dt", "5e-3", "--grid-radial",
         "16", "--grid-angular", "14", "--seed", "9", "--kappas", "2,4"},
        {"fiber", "--eps", "0.5", "--kappa", "4", "--xi", "0.5,0,0", "--t", "0.5:2:4", "--paths", "256", "--dt",
         "5e-3", "--grid-radial", "16", "--grid-angular", "14", "--seed", "9"},
    };
    bool ok = true;
    int compared = 0;
    for (size_t r = 0; r < runs.size(); ++r) {
        std::vector<std::map<std::string, std::string>> bodies;
        for (int threads : {1, 4, 16}) {
            const auto dir = root / (runs[r][0] + "_" + std::to_string(threads));
            auto args = runs[r];
            args.insert(args.begin(), "nelson-fk");
            for (const auto& a : {std::string("--quiet"), std::string("--threads"), std::to_string(threads), std::string("--out"),
                                  dir.string()})
                args.push_back(a);
            std::vector<char*> argv;
            for (auto& a : args) argv.push_back(a.data());
            if (cli::run(int(argv.size()), argv.data()) != 0) return {false, "run failed: " + runs[r][0]};
            std::map<std::string, std::string> files;
            for (const auto& e : std::filesystem::directory_iterator(dir))
                if (e.path().extension() == ".csv") files[e.path().filename().string()] = slurp(e.path());
            bodies.push_back(files);
        }
        for (size_t i = 1; i < bodies.size(); ++i) {
            ok = ok && bodies[i] == bodies[0] && !bodies[0].empty();
            compared += int(bodies[i].size());
        }
    }
    std::filesystem::remove_all(root);
    return {ok, format("energy, action and fiber runs under 1, 4, 16 workers; %d CSV comparisons %s", compared,
                       ok ? "byte-identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> crits{
        {"Fock algebra suite", crit1},
        {"decomposition oracle", crit2},
        {"exact identities", crit3},
        {"UV convergence", crit4},
        {"exactly solvable limits", crit5},
        {"small-time Feynman-Kac", crit6},
        {"non-Fock identity", crit7},
        {"bounds consistency", crit8},
        {"determinism", crit9},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
    int failed = 0;
    for (size_t i = 0; i < crits.size(); ++i) {
        const int n = int(i) + 1;
        if (!pick.empty() && !pick.count(n)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = crits[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.passed) ++failed;
        std::printf("CRITERION %d %s  %s: %s [%.1f s]\n", n, o.passed ? "PASS" : "FAIL", crits[i].first,
                    o.detail.c_str(), elapsed(t0));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
