#include "nelson/action.hpp"

#include <algorithm>
#include <cmath>

namespace nelson::action {

std::vector<double> radial_scale(const MomentumGrid& grid, const ModelParams& p, Band band) {
    std::vector<double> s(grid.n_radial());
    for (int i = 0; i < grid.n_radial(); ++i) {
        const double rho = grid.rho()[i];
        s[i] = (rho >= band.lo && rho < band.hi) ? kernel::cutoff(rho, p) : 0.0;
    }
    return s;
}

std::vector<double> radial_weight(const MomentumGrid& grid, const ModelParams& p, Band band) {
    auto s = radial_scale(grid, p, band);
    for (double& v : s) v *= v;
    return s;
}

double direct_value(const RadialTerms& t, const std::vector<double>& w) {
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i) s += w[i] * (t.direct[i] - t.t * t.n_particles * t.e_ren[i]);
    return s;
}

double decomposed_value(const RadialTerms& t, const std::vector<double>& w) {
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i)
        s += w[i] * (-t.b[i] + t.c_minus[i] - t.c_plus[i] + t.v[i] + t.m[i]);
    return s;
}

ActionBreakdown combine(const RadialTerms& t, const std::vector<double>& w, const MomentumGrid& grid,
                        const ModelParams& p) {
    ActionBreakdown a;
    a.t = t.t;
    a.params = p;
    const double half = 0.5 * grid.rho_max();
    for (size_t i = 0; i < w.size(); ++i) {
        a.b += w[i] * t.b[i];
        a.c_minus += w[i] * t.c_minus[i];
        a.c_plus += w[i] * t.c_plus[i];
        a.v += w[i] * t.v[i];
        a.m += w[i] * t.m[i];
        if (grid.rho()[i] > half)
            a.tail += w[i] * (-t.b[i] + t.c_minus[i] - t.c_plus[i] + t.v[i] + t.m[i]);
    }
    a.tail = std::abs(a.tail);
    a.u_total = -a.b + a.c_minus - a.c_plus + a.v + a.m;
    if (p.finite_cutoff()) a.u_direct = direct_value(t, w);
    return a;
}

ActionBreakdown action_decomposed(const paths::BrownianPath& path, const std::vector<double>& x,
                                  int t_index, const ModelParams& p, ActionOptions opt) {
    p.validate();
    if (t_index < 0 || t_index > path.n_steps) throw IndexError("time index out of range");
    const MomentumGrid grid = MomentumGrid::build(p);
    field::FieldEngine eng(grid, p);
    eng.start(path, x);
    eng.advance_to(t_index);
    ActionBreakdown a = combine(eng.terms(), radial_weight(grid, p), grid, p);
    if (!p.finite_cutoff() && a.tail > opt.tail_tol)
        throw GridTailError("outer radial shell contributes " + std::to_string(a.tail));
    return a;
}

double action_direct(const paths::BrownianPath& path, const std::vector<double>& x, int t_index,
                     const ModelParams& p) {
    if (!p.finite_cutoff()) throw CutoffRequired("direct action needs a finite cutoff");
    return *action_decomposed(path, x, t_index, p).u_direct;
}

IrSplit ir_split(const RadialTerms& t, const MomentumGrid& grid, double lambda, const ModelParams& p) {
    if (!(lambda > 0.0)) throw DomainError("IR split needs lambda > 0");
    IrSplit s;
    s.u_lt = direct_value(t, radial_weight(grid, p, {0.0, lambda}));
    s.u_gt = decomposed_value(t, radial_weight(grid, p, {lambda, kernel::kInf}));
    return s;
}

IrSplit ir_split(const paths::BrownianPath& path, const std::vector<double>& x, int t_index,
                 double lambda, const ModelParams& p) {
    p.validate();
    if (!(lambda > 0.0)) throw DomainError("IR split needs lambda > 0");
    const MomentumGrid grid = MomentumGrid::build(p, {lambda});
    field::FieldEngine eng(grid, p);
    eng.start(path, x);
    eng.advance_to(t_index);
    return ir_split(eng.terms(), grid, lambda, p);
}

ConvergenceTable action_convergence_stat(const std::vector<double>& x, double t,
                                         const std::vector<double>& kappas, const ModelParams& p,
                                         const McControls& mc, double p_exp, int checkpoints) {
    if (kappas.empty()) throw DomainError("empty kappa list");
    if (!(p_exp > 0.0)) throw DomainError("moment order must be positive");
    if (checkpoints < 1) throw DomainError("need at least one checkpoint");
    for (double k : kappas)
        if (!(k > 0.0) || std::isinf(k)) throw DomainError("kappa list must be finite");
    ModelParams base = p;
    base.kappa = kernel::kInf;
    base.validate();
    const int n_steps = int(std::lround(t / mc.dt));
    if (n_steps < checkpoints) throw DomainError("t/dt smaller than the checkpoint count");
    std::vector<double> breaks;
    for (double k : kappas) {
        breaks.push_back(k);
        if (p.chi == kernel::ChiKind::taper) breaks.push_back(2.0 * k);
    }
    const MomentumGrid grid = MomentumGrid::build(base, breaks);
    std::vector<std::vector<double>> weights;
    for (double k : kappas) {
        ModelParams pk = p;
        pk.kappa = k;
        weights.push_back(radial_weight(grid, pk));
    }
    const std::vector<double> w_inf = radial_weight(grid, base);
    const size_t nk = kappas.size();
    std::vector<std::vector<double>> sup(mc.n_paths, std::vector<double>(nk, 0.0));
    std::vector<double> tails(mc.n_paths, 0.0);
    parallel_for_index(mc.n_paths, mc.threads, [&](int s) {
        const auto path = paths::sample_path(mc.seed, std::uint64_t(s), n_steps, mc.dt, p.n_particles);
        field::FieldEngine eng(grid, base);
        eng.start(path, x);
        for (int c = 1; c <= checkpoints; ++c) {
            eng.advance_to(int(std::lround(double(n_steps) * c / checkpoints)));
            const RadialTerms terms = eng.terms();
            const ActionBreakdown inf = combine(terms, w_inf, grid, base);
            tails[s] = std::max(tails[s], inf.tail);
            for (size_t k = 0; k < nk; ++k) {
                const double d = std::abs(decomposed_value(terms, weights[k]) - inf.u_total);
                sup[s][k] = std::max(sup[s][k], std::pow(d, p_exp));
            }
        }
    });
    ConvergenceTable tab;
    tab.p = p_exp;
    tab.n_paths = mc.n_paths;
    for (double tl : tails) tab.tail_max = std::max(tab.tail_max, tl);
    std::vector<double> lx, ly, lw;
    for (size_t k = 0; k < nk; ++k) {
        double mean = 0.0, sq = 0.0;
        for (int s = 0; s < mc.n_paths; ++s) mean += sup[s][k];
        mean /= mc.n_paths;
        for (int s = 0; s < mc.n_paths; ++s) sq += (sup[s][k] - mean) * (sup[s][k] - mean);
        const double se = mc.n_paths > 1 ? std::sqrt(sq / (mc.n_paths - 1) / mc.n_paths) : 0.0;
        ConvergenceRow row;
        row.kappa = kappas[k];
        row.value = std::pow(mean, 1.0 / p_exp);
        row.std_err = mean > 0.0 ? row.value * se / (p_exp * mean) : 0.0;
        tab.rows.push_back(row);
        if (row.value > 0.0) {
            lx.push_back(std::log(row.kappa));
            ly.push_back(std::log(row.value));
            const double rel = row.std_err / row.value;
            lw.push_back(rel > 0.0 ? 1.0 / (rel * rel) : 1.0);
        }
    }
    if (lx.size() >= 2) {
        // Unweighted least squares on log-log data; the std_err uses the relative errors.
        const double n = double(lx.size());
        double mx = 0.0, my = 0.0;
        for (size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i] / n;
            my += ly[i] / n;
        }
        double sxx = 0.0, sxy = 0.0, var = 0.0;
        for (size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        tab.slope = sxy / sxx;
        for (size_t i = 0; i < lx.size(); ++i) var += (lx[i] - mx) * (lx[i] - mx) / lw[i];
        tab.slope_stderr = std::sqrt(var) / sxx;
    }
    return tab;
}

}  // namespace nelson::action
