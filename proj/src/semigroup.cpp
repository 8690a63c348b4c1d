#include "nelson/semigroup.hpp"

#include <gsl/gsl_multifit.h>

#include <algorithm>
#include <boost/random/sobol.hpp>
#include <cmath>

#include "nelson/rng.hpp"

namespace nelson::semigroup {

using field::MomentumGrid;

double PotentialSpec::operator()(const double* x, int n_particles) const {
    if (kind == Kind::zero) return 0.0;
    double v = 0.0;
    for (int l = 0; l < n_particles; ++l) {
        const double r2 = x[3 * l] * x[3 * l] + x[3 * l + 1] * x[3 * l + 1] + x[3 * l + 2] * x[3 * l + 2];
        switch (kind) {
            case Kind::harmonic: {
                const double r = std::min(std::sqrt(r2), radius);
                v += 0.5 * omega0 * omega0 * r * r;
                break;
            }
            case Kind::soft_coulomb: v -= strength / std::sqrt(r2 + a * a); break;
            case Kind::tabulated: {
                if (table_r.empty()) break;
                const double r = std::sqrt(r2);
                auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
                if (it == table_r.begin()) {
                    v += table_v.front();
                } else if (it == table_r.end()) {
                    v += table_v.back();
                } else {
                    const size_t j = size_t(it - table_r.begin());
                    const double s = (r - table_r[j - 1]) / (table_r[j] - table_r[j - 1]);
                    v += (1.0 - s) * table_v[j - 1] + s * table_v[j];
                }
                break;
            }
            case Kind::zero: break;
        }
    }
    return v;
}

double Bump::operator()(const double* y, int dim) const {
    if (width <= 0.0) return amp;
    double r2 = 0.0;
    for (int c = 0; c < dim; ++c) {
        const double d = y[c] - (center.empty() ? 0.0 : center[c]);
        r2 += d * d;
    }
    return amp * std::exp(-0.5 * r2 / (width * width));
}

PathEvaluator::PathEvaluator(const ModelParams& p, std::vector<double> extra_breaks)
    : p_(p), grid_(MomentumGrid::build(p, std::move(extra_breaks))) {
    p_.validate();
    scale_ = action::radial_scale(grid_, p_);
    weight_ = action::radial_weight(grid_, p_);
}

void PathEvaluator::run(const paths::BrownianPath& path, const std::vector<double>& x,
                        const std::vector<int>& indices, const SnapshotOptions& opt, const PotentialSpec* V,
                        const std::function<void(const Snapshot&)>& fn) const {
    field::FieldEngine eng(grid_, p_);
    eng.start(path, x);
    const std::vector<double>& off = eng.offset();
    const int np = p_.n_particles;
    std::vector<double> pos(3 * np);
    double vint = 0.0;
    int n = 0;
    const bool use_v = V && !V->is_zero();
    for (int idx : indices) {
        if (idx < n || idx > path.n_steps) throw IndexError("snapshot indices must be sorted and in range");
        while (n < idx) {
            if (use_v) {
                const double* row = path.row(n);
                for (int c = 0; c < 3 * np; ++c) pos[c] = off[c] + row[c];
                vint += (*V)(pos.data(), np) * path.dt;
            }
            eng.advance();
            ++n;
        }
        Snapshot s;
        s.t_index = idx;
        s.t = idx * path.dt;
        const field::RadialTerms terms = eng.terms();
        s.action = action::combine(terms, weight_, grid_, p_);
        if (opt.form == ActionForm::direct) {
            if (!s.action.u_direct) throw CutoffRequired("direct action needs a finite cutoff");
            s.u = *s.action.u_direct;
        } else {
            s.u = s.action.u_total;
        }
        s.v_integral = vint;
        if (opt.fields || opt.tilde) {
            s.u_minus = eng.state(field::Role::Uminus, scale_).values;
            s.u_plus = eng.state(field::Role::Uplus, scale_).values;
            s.p0 = eng.phase_sum(true);
            s.pt = eng.phase_sum(false);
        }
        if (opt.tilde) {
            const kernel::Band band{opt.lambda, kernel::kInf};
            const auto a = action::combine(terms, action::radial_weight(grid_, p_, band), grid_, p_);
            s.b_lambda = a.b;
            s.c_minus_lambda = a.c_minus;
            s.c_plus_lambda = a.c_plus;
            s.u_tilde = s.u - a.b + a.c_minus + a.c_plus;
            const auto sl = action::radial_scale(grid_, p_, band);
            const int nn = grid_.size();
            s.beta_x.resize(nn);
            s.beta_xt.resize(nn);
            s.ut_minus.resize(nn);
            s.ut_plus.resize(nn);
            for (int q = 0; q < nn; ++q) {
                const int i = grid_.radial_index(q);
                const double b = eng.base_beta()[i] * sl[i];
                const double e = std::exp(-s.t * grid_.omega()[i]);
                s.beta_x[q] = b * s.p0[q];
                s.beta_xt[q] = b * s.pt[q];
                s.ut_minus[q] = b * (s.p0[q] - e * s.pt[q]) - s.u_minus[q];
                s.ut_plus[q] = b * (s.pt[q] - e * s.p0[q]) - s.u_plus[q];
            }
        }
        fn(s);
    }
}

Snapshot PathEvaluator::at(const paths::BrownianPath& path, const std::vector<double>& x, int t_index,
                           const SnapshotOptions& opt, const PotentialSpec* V) const {
    Snapshot out;
    run(path, x, {t_index}, opt, V, [&](const Snapshot& s) { out = s; });
    return out;
}

CoherentVec apply_w(const MomentumGrid& grid, const Snapshot& s, const CoherentVec& a) {
    CoherentVec out;
    out.param = fock::damp(grid, a.param, s.t);
    for (size_t n = 0; n < out.param.size(); ++n) out.param[n] -= s.u_plus[n];
    out.log_prefactor = a.log_prefactor + s.u - s.v_integral - fock::inner(grid, s.u_minus, a.param);
    return out;
}

CoherentVec apply_w_adjoint(const MomentumGrid& grid, const Snapshot& s, const CoherentVec& a) {
    CoherentVec out;
    out.param = fock::damp(grid, a.param, s.t);
    for (size_t n = 0; n < out.param.size(); ++n) out.param[n] -= s.u_minus[n];
    out.log_prefactor = a.log_prefactor + s.u - s.v_integral - fock::inner(grid, s.u_plus, a.param);
    return out;
}

cplx w_element(const MomentumGrid& grid, const Snapshot& s, const Vector& g, const Vector& h) {
    const CoherentVec w = apply_w_adjoint(grid, s, fock::coherent(grid, h));
    return fock::inner_coherent(grid, fock::coherent(grid, g), w);
}

cplx W_matrix_element(const PathEvaluator& ev, const paths::BrownianPath& path, const std::vector<double>& x,
                      int t_index, const Vector& g, const Vector& h, const PotentialSpec& V) {
    const Snapshot s = ev.at(path, x, t_index, {}, &V);
    return w_element(ev.grid(), s, g, h);
}

MCEstimate T_estimate(const PathEvaluator& ev, const std::vector<double>& x, double t,
                      const std::vector<PsiTerm>& psi, const Vector& g, const PotentialSpec& V,
                      const McControls& mc, ActionForm form) {
    if (mc.n_paths < 2) throw DomainError("T_estimate needs at least two paths");
    const int n_steps = int(std::lround(t / mc.dt));
    const int np = ev.params().n_particles;
    const auto& grid = ev.grid();
    MCEstimate est;
    est.seed = mc.seed;
    est.n_samples = mc.n_paths;
    est.partials.assign(mc.n_paths, 0.0);
    SnapshotOptions opt;
    opt.form = form;
    parallel_for_index(mc.n_paths, mc.threads, [&](int s) {
        const auto path = paths::sample_path(mc.seed, std::uint64_t(s), n_steps, mc.dt, np);
        const Snapshot snap = ev.at(path, x, n_steps, opt, &V);
        std::vector<double> y(3 * np);
        const double* row = path.row(n_steps);
        for (int c = 0; c < 3 * np; ++c) y[c] = (x.empty() ? 0.0 : x[c]) + row[c];
        cplx acc(0.0, 0.0);
        for (const auto& term : psi) {
            const double wgt = term.weight(y.data(), 3 * np);
            if (wgt == 0.0) continue;
            acc += wgt * std::exp(term.vec.log_prefactor) * w_element(grid, snap, g, term.vec.param);
        }
        est.partials[s] = acc;
    });
    for (const cplx& v : est.partials) est.mean += v;
    est.mean /= double(mc.n_paths);
    double var = 0.0;
    for (const cplx& v : est.partials) var += std::norm(v - est.mean);
    est.std_err = std::sqrt(var / (mc.n_paths - 1) / mc.n_paths);
    return est;
}

Residual markov_residual(const PathEvaluator& ev, const paths::BrownianPath& path, const std::vector<double>& x,
                       int s_index, int t_index, const Vector& g, const Vector& h, const PotentialSpec& V) {
    if (!ev.params().finite_cutoff()) throw CutoffRequired("Markov identity check needs a finite cutoff");
    if (s_index < 0 || t_index < 0 || s_index + t_index > path.n_steps) throw IndexError("s + t beyond the path");
    const auto& grid = ev.grid();
    const int np = ev.params().n_particles;
    std::vector<double> xt(3 * np);
    const double* row = path.row(t_index);
    for (int c = 0; c < 3 * np; ++c) xt[c] = (x.empty() ? 0.0 : x[c]) + row[c];
    const paths::BrownianPath shifted = paths::shift_path(path, t_index);
    const Snapshot st = ev.at(path, x, t_index, {}, &V);
    const Snapshot ss = ev.at(shifted, xt, s_index, {}, &V);
    const Snapshot sst = ev.at(path, x, s_index + t_index, {}, &V);
    const CoherentVec zg = fock::coherent(grid, g);
    const CoherentVec zh = fock::coherent(grid, h);
    const cplx lhs = fock::inner_coherent(grid, zg, apply_w(grid, ss, apply_w(grid, st, zh)));
    const cplx rhs = fock::inner_coherent(grid, zg, apply_w(grid, sst, zh));
    const double d = std::abs(lhs - rhs);
    return {d, d / std::abs(rhs)};
}

std::vector<int> time_indices(const std::vector<double>& t_grid, double dt) {
    std::vector<int> idx;
    for (double t : t_grid) {
        const double r = t / dt;
        const long n = std::lround(r);
        if (std::abs(r - double(n)) > 1e-6 * std::max(1.0, r)) throw DomainError("time grid not aligned with dt");
        if (!idx.empty() && n <= idx.back()) throw DomainError("time grid must be increasing");
        idx.push_back(int(n));
    }
    return idx;
}

namespace {

struct WlsResult {
    std::vector<double> coef;
    bool ok = false;
};

// Weighted least squares for y = X c with the given weights.
WlsResult wls(const std::vector<std::vector<double>>& X, const std::vector<double>& y, const std::vector<double>& w) {
    const size_t n = y.size(), p = X.front().size();
    WlsResult r;
    if (n < p) return r;
    gsl_matrix* A = gsl_matrix_alloc(n, p);
    gsl_vector* Y = gsl_vector_alloc(n);
    gsl_vector* W = gsl_vector_alloc(n);
    gsl_vector* C = gsl_vector_alloc(p);
    gsl_matrix* cov = gsl_matrix_alloc(p, p);
    gsl_multifit_linear_workspace* ws = gsl_multifit_linear_alloc(n, p);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < p; ++j) gsl_matrix_set(A, i, j, X[i][j]);
        gsl_vector_set(Y, i, y[i]);
        gsl_vector_set(W, i, w[i]);
    }
    double chisq = 0.0;
    r.ok = gsl_multifit_wlinear(A, W, Y, C, cov, &chisq, ws) == 0;
    for (size_t j = 0; j < p; ++j) r.coef.push_back(gsl_vector_get(C, j));
    gsl_multifit_linear_free(ws);
    gsl_matrix_free(cov);
    gsl_vector_free(C);
    gsl_vector_free(W);
    gsl_vector_free(Y);
    gsl_matrix_free(A);
    return r;
}

}  // namespace

EnergyFit fit_energy(const SampleTable& tab, const FitOptions& fo) {
    const size_t K = tab.t.size();
    const size_t n = tab.l.size();
    if (K < 2) throw DomainError("energy fit needs at least two times");
    if (n < 2) throw DomainError("energy fit needs at least two paths");
    EnergyFit fit;
    fit.t = tab.t;
    fit.n_paths = int(n);
    const int B = std::max(2, std::min<int>(fo.jackknife_blocks, int(n)));
    const bool has_im = !tab.s.empty();
    std::vector<double> lmax(K, -kernel::kInf);
    for (size_t p = 0; p < n; ++p)
        for (size_t k = 0; k < K; ++k)
            if (tab.c[p][k] != 0.0) lmax[k] = std::max(lmax[k], tab.l[p][k]);
    std::vector<std::vector<double>> block_sum(B, std::vector<double>(K, 0.0));
    std::vector<int> block_n(B, 0);
    std::vector<double> total(K, 0.0), total_im(K, 0.0), sq(K, 0.0);
    for (size_t p = 0; p < n; ++p) {
        const int b = int(p * B / n);
        ++block_n[b];
        for (size_t k = 0; k < K; ++k) {
            if (!std::isfinite(lmax[k])) continue;
            const double e = std::exp(tab.l[p][k] - lmax[k]);
            const double y = tab.c[p][k] * e;
            block_sum[b][k] += y;
            total[k] += y;
            sq[k] += y * y;
            if (has_im) total_im[k] += tab.s[p][k] * e;
        }
    }
    fit.lnZ.assign(K, -kernel::kInf);
    fit.lnZ_im.assign(K, 0.0);
    fit.std_err.assign(K, kernel::kInf);
    for (size_t k = 0; k < K; ++k) {
        const double mean = total[k] / n;
        if (!(mean > 0.0)) continue;
        fit.lnZ[k] = tab.log_prefactor + lmax[k] + std::log(mean);
        const double var = std::max(0.0, sq[k] / n - mean * mean) * n / (n - 1.0);
        fit.std_err[k] = std::sqrt(var / n) / mean;
        if (has_im) fit.lnZ_im[k] = std::atan2(total_im[k] / n, mean);
    }
    // Window: top half of the grid, trimmed from the end while the error is too large.
    size_t lo = K / 2, hi = K;
    if (K - lo < 2) lo = K - 2;
    const size_t need = fo.log_term ? 3 : 2;
    if (fo.log_term && K - lo < 3) lo = K >= 3 ? K - 3 : 0;
    while (hi > lo && !(fit.std_err[hi - 1] <= fo.max_rel_stderr)) --hi;
    if (hi - lo < need) throw VarianceBlowup("relative error of Z(t) exceeds the threshold in the fit window");
    fit.t_lo = tab.t[lo];
    fit.t_hi = tab.t[hi - 1];
    auto do_fit = [&](const std::vector<double>& lz) {
        std::vector<std::vector<double>> X;
        std::vector<double> y, w;
        bool any_zero = false;
        for (size_t k = lo; k < hi; ++k) any_zero = any_zero || fit.std_err[k] == 0.0;
        for (size_t k = lo; k < hi; ++k) {
            std::vector<double> row{1.0, -tab.t[k]};
            if (fo.log_term) row.push_back(-std::log(tab.t[k]));
            X.push_back(row);
            y.push_back(lz[k]);
            w.push_back(any_zero ? 1.0 : 1.0 / (fit.std_err[k] * fit.std_err[k]));
        }
        return wls(X, y, w);
    };
    const WlsResult full = do_fit(fit.lnZ);
    if (!full.ok) throw VarianceBlowup("energy fit failed");
    fit.energy = full.coef[1];
    if (fo.log_term) fit.log_coef = full.coef[2];
    for (size_t k = lo; k < hi; ++k) {
        double model = full.coef[0] - full.coef[1] * tab.t[k];
        if (fo.log_term) model -= full.coef[2] * std::log(tab.t[k]);
        fit.residuals.push_back(fit.lnZ[k] - model);
    }
    // Delete-one-block jackknife over paths.
    std::vector<double> eb, gb;
    for (int b = 0; b < B; ++b) {
        std::vector<double> lz(K, -kernel::kInf);
        bool ok = true;
        for (size_t k = lo; k < hi; ++k) {
            const double mean = (total[k] - block_sum[b][k]) / double(n - block_n[b]);
            if (!(mean > 0.0)) {
                ok = false;
                break;
            }
            lz[k] = tab.log_prefactor + lmax[k] + std::log(mean);
        }
        if (!ok) throw VarianceBlowup("jackknife replicate lost positivity");
        const WlsResult r = do_fit(lz);
        eb.push_back(r.coef[1]);
        if (fo.log_term) gb.push_back(r.coef[2]);
    }
    auto jk = [&](const std::vector<double>& v) {
        double m = 0.0, s = 0.0;
        for (double x : v) m += x / v.size();
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s * (v.size() - 1.0) / v.size());
    };
    fit.energy_err = jk(eb);
    if (fo.log_term) fit.log_coef_err = jk(gb);
    // Midpoint log-convexity on interior points.
    for (size_t k = 1; k + 1 < K; ++k) {
        if (!std::isfinite(fit.lnZ[k - 1]) || !std::isfinite(fit.lnZ[k]) || !std::isfinite(fit.lnZ[k + 1])) continue;
        const double lam = (tab.t[k + 1] - tab.t[k]) / (tab.t[k + 1] - tab.t[k - 1]);
        const double chord = lam * fit.lnZ[k - 1] + (1.0 - lam) * fit.lnZ[k + 1];
        const double err = std::sqrt(fit.std_err[k] * fit.std_err[k] + lam * lam * fit.std_err[k - 1] * fit.std_err[k - 1] +
                                     (1 - lam) * (1 - lam) * fit.std_err[k + 1] * fit.std_err[k + 1]);
        const double excess = fit.lnZ[k] - chord;
        if (excess > 0.0) {
            const double units = err > 0.0 ? excess / err : (excess > 1e-12 ? kernel::kInf : 0.0);
            fit.convexity_excess = std::max(fit.convexity_excess, units);
        }
    }
    fit.convexity_ok = fit.convexity_excess <= 3.0;
    return fit;
}

EnergyFit ground_energy(const ModelParams& p, const PotentialSpec& V, const std::vector<double>& t_grid,
                        const McControls& mc, const EnergyOptions& opt) {
    ModelParams pe = p;
    if (opt.tilde) pe.lambda_split = opt.lambda;
    const bool vac_ok = V.is_zero() && p.n_particles == 1;
    if (opt.vacuum && !vac_ok) throw DomainError("the vacuum formula needs V = 0 and N = 1");
    const bool vacuum = opt.vacuum || (opt.auto_vacuum && vac_ok);
    std::vector<double> br;
    if (opt.tilde && opt.lambda > 0.0) br.push_back(opt.lambda);
    const PathEvaluator ev(pe, br);
    const auto idx = time_indices(t_grid, mc.dt);
    const int np = p.n_particles, dim = 3 * np;
    const double L = opt.box_half_width;
    std::vector<std::vector<double>> xs(mc.n_paths, std::vector<double>(dim, 0.0));
    if (!vacuum) {
        boost::random::sobol qrng(dim);
        std::vector<double> shift(dim);
        for (int d = 0; d < dim; ++d)
            shift[d] = rng::uniforms4(mc.seed, ~std::uint64_t(0), std::uint32_t(d / 4), 0)[d % 4];
        const double span = double(qrng.max() - qrng.min()) + 1.0;
        for (int s = 0; s < mc.n_paths; ++s)
            for (int d = 0; d < dim; ++d) {
                double u = double(qrng() - qrng.min()) / span + shift[d];
                u -= std::floor(u);
                xs[s][d] = L * (2.0 * u - 1.0);
            }
    }
    SampleTable tab;
    tab.t = t_grid;
    tab.l.assign(mc.n_paths, std::vector<double>(t_grid.size(), 0.0));
    tab.c.assign(mc.n_paths, std::vector<double>(t_grid.size(), 0.0));
    tab.log_prefactor = vacuum ? 0.0 : dim * std::log(2.0 * L);
    SnapshotOptions so;
    so.fields = false;
    so.tilde = opt.tilde;
    so.lambda = opt.lambda;
    so.form = opt.form;
    parallel_for_index(mc.n_paths, mc.threads, [&](int s) {
        const auto path = paths::sample_path(mc.seed, std::uint64_t(s), idx.back(), mc.dt, np);
        size_t k = 0;
        ev.run(path, xs[s], idx, so, &V, [&](const Snapshot& snap) {
            const double u = opt.tilde ? snap.u_tilde : snap.u;
            tab.l[s][k] = u - snap.v_integral;
            double in = 1.0;
            if (!vacuum) {
                const double* row = path.row(snap.t_index);
                for (int d = 0; d < dim; ++d)
                    if (std::abs(xs[s][d] + row[d]) > L) in = 0.0;
            }
            tab.c[s][k] = in;
            ++k;
        });
    });
    EnergyFit fit = fit_energy(tab, opt.fit);
    fit.n_x_points = vacuum ? 0 : mc.n_paths;
    return fit;
}

}  // namespace nelson::semigroup
