#include "nelson/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <json.hpp>
#include <numbers>

#include "nelson/action.hpp"
#include "nelson/bounds.hpp"
#include "nelson/fiber.hpp"
#include "nelson/nonfock.hpp"
#include "nelson/rng.hpp"
#include "nelson/semigroup.hpp"

namespace nelson::verify {

using field::MomentumGrid;
using fock::Vector;
using semigroup::PathEvaluator;
using semigroup::Snapshot;

bool Report::passed() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

SuiteConfig::SuiteConfig() {
    p.kappa = 4.0;
    p.grid.radial_nodes = 32;
    p.grid.angular_nodes = 14;
    mc.n_paths = 20;
    mc.dt = 1e-3;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"fock-algebra", "identities", "moments", "convergence", "bounds"};
    return names;
}

Vector random_probe(const MomentumGrid& grid, std::uint64_t seed, std::uint64_t index) {
    Vector v(grid.size());
    for (int n = 0; n < grid.size(); n += 2) {
        const auto z = rng::normals4(seed, index, std::uint32_t(n / 2), 1);
        for (int q = 0; q < 2 && n + q < grid.size(); ++q) {
            const double rho = grid.rho()[grid.radial_index(n + q)];
            v[n + q] = cplx(z[2 * q], z[2 * q + 1]) * std::exp(-0.5 * rho) / (1.0 + rho);
        }
    }
    const double target = 0.2 + 0.6 * rng::uniforms4(seed, index, 0xFFFFFFFFu, 2)[0];
    const double nrm = std::sqrt(std::real(fock::inner(grid, v, v)));
    for (auto& c : v) c *= target / nrm;
    return v;
}

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
// Relative to the Cauchy-Schwarz size of the element when the element itself is nearly zero.
double rel_cs(cplx a, cplx b, double scale) { return std::abs(a - b) / std::max({std::abs(b), scale, 1e-300}); }

Check make(const std::string& name, double residual, double tol, std::uint64_t seed, std::string detail = {}) {
    return {name, residual, tol, residual <= tol, seed, std::move(detail)};
}

Vector add(const Vector& a, const Vector& b, cplx s = 1.0) {
    Vector r(a.size());
    for (size_t n = 0; n < a.size(); ++n) r[n] = a[n] + s * b[n];
    return r;
}

Vector phase(const MomentumGrid& grid, const Vector& v, const Vec3& x) {
    Vector r(v.size());
    for (int n = 0; n < grid.size(); ++n) r[n] = std::polar(1.0, dot(grid.k(n), x)) * v[n];
    return r;
}

double max_rel_diff(const Vector& a, const Vector& b) {
    double d = 0.0, m = 1e-300;
    for (size_t n = 0; n < a.size(); ++n) {
        d = std::max(d, std::abs(a[n] - b[n]));
        m = std::max(m, std::abs(b[n]));
    }
    return d / m;
}

double fit_order(const std::vector<double>& dt, const std::vector<double>& v) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(dt.size());
    for (size_t i = 0; i < dt.size(); ++i) {
        const double x = std::log(dt[i]), y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::vector<Check> fock_algebra_checks(const MomentumGrid& grid, int probes, std::uint64_t seed) {
    double sp = 0, weyl = 0, unit = 0, fadj = 0, ad1 = 0, ad2 = 0, ann = 0, dg = 0;
    std::vector<double> omega(grid.size());
    for (int n = 0; n < grid.size(); ++n) omega[n] = grid.omega()[grid.radial_index(n)];
    for (int i = 0; i < probes; ++i) {
        const std::uint64_t b = 8 * std::uint64_t(i);
        const Vector a = random_probe(grid, seed, b), h = random_probe(grid, seed, b + 1);
        const Vector f = random_probe(grid, seed, b + 2), g = random_probe(grid, seed, b + 3);
        const Vector f2 = random_probe(grid, seed, b + 4);
        const auto u = rng::uniforms4(seed, b + 5, 0, 3);
        const Vec3 x1{u[0] - 0.5, u[1] - 0.5, u[2] - 0.5}, x2{u[3] - 0.5, 0.3 * u[0], -0.2 * u[1]};
        const double t = 0.1 + u[2];

        // <zeta(a), zeta(h)> against its power series.
        const cplx z = fock::inner(grid, a, h);
        cplx series = 0.0, term = 1.0;
        for (int k = 0; k < 80; ++k) {
            series += term;
            term *= z / double(k + 1);
        }
        sp = std::max(sp, rel(fock::inner_coherent(grid, fock::coherent(grid, a), fock::coherent(grid, h)), series));

        // Projective product law W(f,Q1) W(g,Q2) = e^{-i Im<f, Q1 g>} W(f + Q1 g, Q1 Q2).
        const auto za = fock::coherent(grid, a);
        const auto zh = fock::coherent(grid, h);
        const auto lhs_v = fock::apply_weyl(grid, f, x1, fock::apply_weyl(grid, g, x2, zh));
        const Vector qg = phase(grid, g, x1);
        const Vec3 x12{x1[0] + x2[0], x1[1] + x2[1], x1[2] + x2[2]};
        const auto rhs_v = fock::apply_weyl(grid, add(f, qg), x12, zh);
        const cplx ph = std::exp(cplx(0.0, -std::imag(fock::inner(grid, f, qg))));
        weyl = std::max(weyl, rel(fock::inner_coherent(grid, za, lhs_v), ph * fock::inner_coherent(grid, za, rhs_v)));
        unit = std::max(unit, std::abs(fock::norm_coherent(grid, lhs_v) / fock::norm_coherent(grid, zh) - 1.0));

        // <zeta(a), F zeta(h)> = conj <zeta(h), F* zeta(a)>.
        const cplx fa = fock::inner_coherent(grid, za, fock::apply_F(grid, g, t, false, zh));
        const cplx fb = fock::inner_coherent(grid, zh, fock::apply_F(grid, g, t, true, za));
        fadj = std::max(fadj, rel(fa, std::conj(fb)));

        // Creation operators as derivatives of exponential vectors.
        const Vector base = add(g, fock::damp(grid, h, t));
        auto gen = [&](double s1, double s2) { return std::exp(fock::inner(grid, a, add(add(base, f, s1), f2, s2))); };
        auto nrm = [&](const Vector& v) { return std::sqrt(std::real(fock::inner(grid, v, v))); };
        const double e0 = std::abs(gen(0.0, 0.0));
        const cplx d1 = richardson_derivative([&](double s) { return gen(s, 0.0); }, 0.1);
        ad1 = std::max(ad1, rel_cs(fock::creation_matrix_element(grid, a, {f}, g, t, h), d1, nrm(a) * nrm(f) * e0));
        const cplx d2 = richardson_derivative(
            [&](double s1) { return richardson_derivative([&](double s2) { return gen(s1, s2); }, 0.2); }, 0.2);
        ad2 = std::max(ad2, rel_cs(fock::creation_matrix_element(grid, a, {f, f2}, g, t, h), d2,
                                   nrm(a) * nrm(a) * nrm(f) * nrm(f2) * e0));

        // <zeta(a), a(f) zeta(h)> = conj <zeta(h), a*(f) zeta(a)>.
        const cplx dn = richardson_derivative([&](double s) { return std::exp(fock::inner(grid, h, add(a, f, s))); }, 0.1);
        const double eah = std::abs(std::exp(fock::inner(grid, a, h)));
        ann = std::max(ann, rel_cs(fock::annihilation_matrix_element(grid, a, f, h), std::conj(dn), nrm(f) * nrm(h) * eah));

        // dGamma(omega) = -d/dt Gamma(e^{-t omega}) at t = 0.
        const cplx dd = -richardson_derivative(
            [&](double s) { return std::exp(fock::inner(grid, a, fock::damp(grid, h, s))); }, 0.02);
        Vector wh(h.size());
        for (size_t n = 0; n < h.size(); ++n) wh[n] = omega[n] * h[n];
        dg = std::max(dg, rel_cs(fock::dgamma_matrix_element(grid, a, omega, h), dd, nrm(a) * nrm(wh) * eah));
    }
    const double tol = 1e-10;
    return {make("exp-vector-inner", sp, tol, seed), make("weyl-product-law", weyl, tol, seed),
            make("weyl-unitarity", unit, tol, seed), make("F-adjoint", fadj, tol, seed),
            make("creation-m1", ad1, tol, seed), make("creation-m2", ad2, tol, seed),
            make("annihilation", ann, tol, seed), make("dgamma", dg, tol, seed)};
}

std::vector<Check> identity_checks(const kernel::ModelParams& p0, double t, int n_paths, double dt,
                                   std::uint64_t seed) {
    kernel::ModelParams p = p0;
    if (!p.finite_cutoff()) throw CutoffRequired("identity checks need a finite cutoff");
    const int N = p.n_particles;
    nonfock::GrossParams gp;
    gp.base = p;
    gp.lambda = 1.0;
    const PathEvaluator ev = nonfock::make_evaluator(gp);
    const auto& grid = ev.grid();
    const int n_steps = int(std::lround(t / dt));
    const int half = n_steps / 2;
    double revu = 0, revU = 0, sh1 = 0, sh2 = 0, sh3 = 0, adj = 0, gross = 0, fib = 0;
    const semigroup::PotentialSpec V0;
    for (int s = 0; s < n_paths; ++s) {
        const auto path = paths::sample_path(seed, std::uint64_t(s), n_steps, dt, N);
        std::vector<double> x(3 * N), xt(3 * N), xh(3 * N);
        const auto u = rng::uniforms4(seed, std::uint64_t(s), 0xFFFFFFF0u, 4);
        for (int c = 0; c < 3 * N; ++c) x[c] = 0.5 * (u[c % 4] - 0.5) + 0.3 * (c / 3);
        for (int c = 0; c < 3 * N; ++c) {
            xt[c] = x[c] + path.row(n_steps)[c];
            xh[c] = x[c] + path.row(half)[c];
        }
        const Snapshot full = ev.at(path, x, n_steps);
        const Snapshot rev = ev.at(paths::reverse_path(path, n_steps), xt, n_steps);
        revu = std::max(revu, std::abs(*rev.action.u_direct - *full.action.u_direct) /
                                  std::max(1.0, std::abs(*full.action.u_direct)));
        revU = std::max(revU, std::max(max_rel_diff(rev.u_plus, full.u_minus), max_rel_diff(rev.u_minus, full.u_plus)));

        const Snapshot st = ev.at(path, x, half);
        const Snapshot ss = ev.at(paths::shift_path(path, half), xh, n_steps - half);
        Vector s1 = fock::damp(grid, ss.u_minus, st.t), s2 = fock::damp(grid, st.u_plus, ss.t);
        for (size_t n = 0; n < s1.size(); ++n) {
            s1[n] += st.u_minus[n];
            s2[n] += ss.u_plus[n];
        }
        sh1 = std::max(sh1, max_rel_diff(s1, full.u_minus));
        sh2 = std::max(sh2, max_rel_diff(s2, full.u_plus));
        const cplx cross = fock::inner(grid, ss.u_minus, st.u_plus);
        const double comp = *ss.action.u_direct + *st.action.u_direct + std::real(cross);
        sh3 = std::max(sh3, std::abs(comp - *full.action.u_direct) / std::max(1.0, std::abs(*full.action.u_direct)));

        const Vector g = random_probe(grid, seed, 1000 + 2 * s), h = random_probe(grid, seed, 1001 + 2 * s);
        const cplx e1 = semigroup::w_element(grid, full, g, h);
        const cplx e2 = std::conj(fock::inner_coherent(grid, fock::coherent(grid, h),
                                                       semigroup::apply_w(grid, full, fock::coherent(grid, g))));
        adj = std::max(adj, rel(e1, e2));
        gross = std::max(gross, nonfock::idgross_residual(ev, path, x, n_steps, g, h, gp, V0).rel);
        if (N == 1) fib = std::max(fib, fiber::fiber_offset_residual(ev, path, x, n_steps, g, h).rel);
    }
    std::vector<Check> out{make("reversal-u", revu, 1e-12, seed, "direct form"),
                           make("reversal-U", revU, 1e-12, seed),
                           make("shift-U-minus", sh1, 1e-12, seed),
                           make("shift-U-plus", sh2, 1e-12, seed),
                           make("shift-u", sh3, 1e-12, seed, "direct form"),
                           make("W-adjoint", adj, 1e-10, seed),
                           make("gross-conjugation", gross, 1e-9, seed, "Lambda = 1")};
    if (N == 1) out.push_back(make("fiber-offset", fib, 1e-10, seed));
    return out;
}

RefinementResult decomposition_refinement(const kernel::ModelParams& p, const std::vector<double>& x, double t,
                                          const std::vector<double>& dts, int n_paths, std::uint64_t seed) {
    const PathEvaluator ev(p);
    const double fine = *std::min_element(dts.begin(), dts.end());
    const int n_fine = int(std::lround(t / fine));
    RefinementResult r;
    r.dt = dts;
    r.value.assign(dts.size(), 0.0);
    std::vector<std::vector<double>> per(n_paths, std::vector<double>(dts.size()));
    parallel_for_index(n_paths, 0, [&](int s) {
        const auto path = paths::sample_path(seed, std::uint64_t(s), n_fine, fine, p.n_particles);
        for (size_t j = 0; j < dts.size(); ++j) {
            const int f = int(std::lround(dts[j] / fine));
            const auto cp = paths::coarsen_path(path, f);
            semigroup::SnapshotOptions o;
            o.fields = false;
            const Snapshot sn = ev.at(cp, x, cp.n_steps, o);
            per[s][j] = std::abs(*sn.action.u_direct - sn.action.u_total);
        }
    });
    for (int s = 0; s < n_paths; ++s)
        for (size_t j = 0; j < dts.size(); ++j) r.value[j] += per[s][j] / n_paths;
    r.order = fit_order(r.dt, r.value);
    return r;
}

RefinementResult markov_refinement(const kernel::ModelParams& p, double t, const std::vector<double>& dts,
                                   int n_paths, std::uint64_t seed) {
    const PathEvaluator ev(p);
    const auto& grid = ev.grid();
    const double fine = *std::min_element(dts.begin(), dts.end());
    const int n_fine = int(std::lround(t / fine));
    const semigroup::PotentialSpec V0;
    const std::vector<double> x(3 * p.n_particles, 0.0);
    RefinementResult r;
    r.dt = dts;
    r.value.assign(dts.size(), 0.0);
    std::vector<std::vector<double>> per(n_paths, std::vector<double>(dts.size()));
    const Vector zero(grid.size());
    parallel_for_index(n_paths, 0, [&](int s) {
        const auto path = paths::sample_path(seed, std::uint64_t(s), n_fine, fine, p.n_particles);
        const Vector g = random_probe(grid, seed, 5000 + 2 * s), h = random_probe(grid, seed, 5001 + 2 * s);
        for (size_t j = 0; j < dts.size(); ++j) {
            const auto cp = paths::coarsen_path(path, int(std::lround(dts[j] / fine)));
            const int a = cp.n_steps / 2;
            const double r0 = semigroup::markov_residual(ev, cp, x, cp.n_steps - a, a, zero, zero, V0).rel;
            const double r1 = semigroup::markov_residual(ev, cp, x, cp.n_steps - a, a, g, h, V0).rel;
            per[s][j] = 0.5 * (r0 + r1);
        }
    });
    for (int s = 0; s < n_paths; ++s)
        for (size_t j = 0; j < dts.size(); ++j) r.value[j] += per[s][j] / n_paths;
    r.order = fit_order(r.dt, r.value);
    return r;
}

namespace {

std::vector<Check> identities_suite(const SuiteConfig& cfg) {
    auto out = identity_checks(cfg.p, cfg.t, cfg.mc.n_paths, cfg.mc.dt, cfg.mc.seed);
    const std::vector<double> dts{4.0 * cfg.mc.dt, cfg.mc.dt};
    const std::vector<double> x(3 * cfg.p.n_particles, 0.0);
    const auto dec = decomposition_refinement(cfg.p, x, cfg.t, dts, cfg.mc.n_paths, cfg.mc.seed);
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean |u_dir - u_dec| = %.4g at dt = %.3g, order %.3f", dec.value.back(),
                  dts.back(), dec.order);
    out.push_back({"decomposition-order", std::abs(dec.order - 0.5), 0.25, std::abs(dec.order - 0.5) <= 0.25,
                   cfg.mc.seed, buf});
    const auto mk = markov_refinement(cfg.p, cfg.t, dts, cfg.mc.n_paths, cfg.mc.seed);
    std::snprintf(buf, sizeof buf, "mean relative residual = %.4g at dt = %.3g, order %.3f", mk.value.back(),
                  dts.back(), mk.order);
    out.push_back({"markov-order", std::abs(mk.order - 0.5), 0.25, std::abs(mk.order - 0.5) <= 0.25, cfg.mc.seed, buf});
    return out;
}

std::vector<Check> moments_suite(const SuiteConfig& cfg) {
    std::vector<Check> out;
    const PathEvaluator ev(cfg.p);
    const std::vector<double> tg{0.25 * cfg.t, 0.5 * cfg.t, cfg.t};
    const auto idx = semigroup::time_indices(tg, cfg.mc.dt);
    const int n = std::max(cfg.mc.n_paths, 64);
    std::vector<std::vector<double>> u(n, std::vector<double>(3)), m(n, std::vector<double>(3));
    const std::vector<double> x(3 * cfg.p.n_particles, 0.0);
    parallel_for_index(n, cfg.mc.threads, [&](int s) {
        const auto path = paths::sample_path(cfg.mc.seed, std::uint64_t(s), idx.back(), cfg.mc.dt, cfg.p.n_particles);
        semigroup::SnapshotOptions o;
        o.fields = false;
        size_t k = 0;
        ev.run(path, x, idx, o, nullptr, [&](const Snapshot& sn) {
            u[s][k] = sn.u;
            m[s][k] = sn.action.m;
            ++k;
        });
    });
    double worst = 0.0;
    double c_fit = -std::numeric_limits<double>::infinity();
    const double e2 = cfg.p.eps * cfg.p.eps, N = cfg.p.n_particles;
    for (size_t k = 0; k < tg.size(); ++k) {
        double mean = 0, sq = 0, lmax = -1e300;
        for (int s = 0; s < n; ++s) {
            mean += m[s][k] / n;
            sq += m[s][k] * m[s][k] / n;
            lmax = std::max(lmax, u[s][k]);
        }
        const double se = std::sqrt(std::max(0.0, sq - mean * mean) / (n - 1));
        worst = std::max(worst, std::abs(mean) / std::max(se, 1e-300));
        double z = 0;
        for (int s = 0; s < n; ++s) z += std::exp(u[s][k] - lmax) / n;
        const double lnE = lmax + std::log(z);
        if (e2 > 0) c_fit = std::max(c_fit, lnE / (e2 * e2 * N * N * N * tg[k]));
    }
    out.push_back(make("martingale-mean", worst, 3.0, cfg.mc.seed, "max |mean m_t| in units of its stderr"));
    char buf[96];
    std::snprintf(buf, sizeof buf, "fitted c in ln E[e^u] <= c eps^4 N^3 t: %.4g", c_fit);
    out.push_back({"exp-moment-shape", std::isfinite(c_fit) ? 0.0 : 1.0, 0.0, std::isfinite(c_fit) || e2 == 0,
                   cfg.mc.seed, buf});
    for (int NN : {2, 3, 4}) {
        const auto r = bounds::pair_lemma_check(NN, {}, 100000, cfg.mc.seed);
        const double excess = (r.lhs - r.rhs) / std::max(std::hypot(r.lhs_err, r.rhs_err), 1e-300);
        out.push_back({"pair-lemma-N" + std::to_string(NN), excess, 3.0, !r.violated, cfg.mc.seed,
                       "(lhs - rhs) in units of the combined stderr"});
    }
    return out;
}

std::vector<Check> convergence_suite(const SuiteConfig& cfg) {
    kernel::ModelParams p = cfg.p;
    p.kappa = kernel::kInf;
    p.n_particles = 1;
    p.grid.radial_nodes = std::max(p.grid.radial_nodes, 64);
    p.grid.angular_nodes = std::max(p.grid.angular_nodes, 26);
    McControls mc = cfg.mc;
    mc.n_paths = std::max(mc.n_paths, 100);
    const auto T = action::action_convergence_stat({0, 0, 0}, cfg.t, {2, 4, 8, 16, 32}, p, mc);
    bool mono = true;
    for (size_t i = 1; i < T.rows.size(); ++i) mono = mono && T.rows[i].value < T.rows[i - 1].value;
    char buf[96];
    std::snprintf(buf, sizeof buf, "slope %.4f +- %.4f", T.slope, T.slope_stderr);
    return {{"monotone-in-kappa", mono ? 0.0 : 1.0, 0.0, mono, mc.seed, ""},
            {"kappa-slope", T.slope, -0.10, T.slope <= -0.10, mc.seed, buf}};
}

std::vector<Check> bounds_suite(const SuiteConfig&) {
    using namespace bounds;
    using std::numbers::pi;
    std::vector<Check> out;
    out.push_back(make("A(1,1,1)", std::abs(a_term(1, 1, 1) - (2.0 + std::log(2.0))), 1e-12, 0));
    out.push_back(make("martingale-constant", std::abs(scheutzow_constant(2, 2) - std::sqrt(1 + pi)), 1e-12, 0));
    BoundConstants k;
    k.b = 1.3;
    out.push_back(make("eps-zero", std::abs(exp_moment_rhs(MomentBound::expbdu, 2, 0, 3, 5, k) - std::pow(1.3, 3)),
                       1e-12, 0));
    double worst = 0.0;
    for (auto w : {MomentBound::expbdu, MomentBound::expbdUpmN, MomentBound::bdWp}) {
        double prev_t = -1, prev_e = -1;
        for (double t = 0.0; t <= 8.0; t += 0.25) {
            const double v = exp_moment_rhs(w, 1.5, 0.7, 2, t);
            if (prev_t > v) worst = std::max(worst, prev_t - v);
            prev_t = v;
        }
        for (double e = 0.0; e <= 2.0; e += 0.1) {
            const double v = exp_moment_rhs(w, 1.5, e, 2, 1.5);
            if (prev_e > v) worst = std::max(worst, prev_e - v);
            prev_e = v;
        }
    }
    out.push_back(make("monotone-t-eps", worst, 0.0, 0));
    const auto sb = spectral_bounds(2.0, 2, 0.0);
    out.push_back(make("lower-leading", std::abs(sb.lower_leading + 256 * pi * pi), 1e-9, 0));
    out.push_back(make("upper-leading", std::abs(sb.upper_leading - 8 * std::pow(pi, 4) * kPekarEnergy), 1e-9, 0));
    out.push_back(make("leading-ratio", sb.lower_leading / sb.upper_leading, 30.0, 0, "below 30"));
    bool regime = false;
    try {
        spectral_bounds(0.5, 1, 0.0);
    } catch (const RegimeError&) {
        regime = true;
    }
    out.push_back({"regime-error", regime ? 0.0 : 1.0, 0.0, regime, 0, "eps^2 N < 1"});
    const PekarTrial gauss;
    const auto pe = pekar_energy(gauss);
    out.push_back({"pekar-gaussian", pe.energy, -0.095, pe.energy > kPekarEnergy && pe.energy <= -0.095, 0,
                   "value in (E_P, -0.095]"});
    double sc = 0.0;
    for (double s : {0.5, 1.0, 2.0}) {
        const auto t = pekar_terms(gauss, s);
        sc = std::max(sc, std::abs(t.kinetic - t.attraction - (pe.alpha * s * s - pe.beta * s)));
    }
    out.push_back(make("pekar-scaling", sc, 1e-10, 0));
    PekarTrial hyd;
    hyd.kind = PekarTrial::Kind::hydrogenic;
    const double eh = pekar_energy(hyd).energy;
    out.push_back({"pekar-floor", kPekarEnergy - 1e-4 - eh, 0.0, eh >= kPekarEnergy - 1e-4, 0, "hydrogenic family"});
    out.push_back(make("pekar-no-attraction", std::abs(pekar_energy(gauss, 0.0).energy), 0.0, 0));
    return out;
}

}  // namespace

Report run_suite(const std::string& name, const SuiteConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    Report r;
    r.suite = name;
    if (name == "fock-algebra") {
        const auto grid = MomentumGrid::build(cfg.p);
        r.checks = fock_algebra_checks(grid, cfg.probes, cfg.mc.seed);
    } else if (name == "identities") {
        r.checks = identities_suite(cfg);
    } else if (name == "moments") {
        r.checks = moments_suite(cfg);
    } else if (name == "convergence") {
        r.checks = convergence_suite(cfg);
    } else if (name == "bounds") {
        r.checks = bounds_suite(cfg);
    } else {
        throw ConfigError("unknown suite '" + name + "'");
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string to_json(const Report& r) {
    nlohmann::json j;
    j["suite"] = r.suite;
    j["passed"] = r.passed();
    j["seconds"] = r.seconds;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back({{"name", c.name},
                               {"residual", c.residual},
                               {"tolerance", c.tolerance},
                               {"passed", c.passed},
                               {"seed", c.seed},
                               {"detail", c.detail}});
    return j.dump(2);
}

}  // namespace nelson::verify
