#include "nelson/nonfock.hpp"

#include <cmath>

namespace nelson::nonfock {

using semigroup::SnapshotOptions;

PathEvaluator make_evaluator(const GrossParams& gp) {
    std::vector<double> br;
    if (gp.lambda > 0.0) br.push_back(gp.lambda);
    return PathEvaluator(gp.base, br);
}

TildeAction tilde_action(const PathEvaluator& ev, const paths::BrownianPath& path, const std::vector<double>& x,
                         int t_index, double lambda) {
    SnapshotOptions opt;
    opt.tilde = true;
    opt.lambda = lambda;
    const Snapshot s = ev.at(path, x, t_index, opt);
    return {s.t, s.u, s.b_lambda, s.c_minus_lambda, s.c_plus_lambda, s.u_tilde};
}

TildeAction tilde_action(const paths::BrownianPath& path, const std::vector<double>& x, int t_index,
                         const GrossParams& gp) {
    return tilde_action(make_evaluator(gp), path, x, t_index, gp.lambda);
}

CoherentVec apply_tilde_w(const field::MomentumGrid& grid, const Snapshot& s, const CoherentVec& a) {
    CoherentVec out;
    out.param = fock::damp(grid, a.param, s.t);
    for (size_t n = 0; n < out.param.size(); ++n) out.param[n] += s.ut_plus[n];
    out.log_prefactor = a.log_prefactor + s.u_tilde - s.v_integral + fock::inner(grid, s.ut_minus, a.param);
    return out;
}

CoherentVec apply_tilde_w_adjoint(const field::MomentumGrid& grid, const Snapshot& s, const CoherentVec& a) {
    CoherentVec out;
    out.param = fock::damp(grid, a.param, s.t);
    for (size_t n = 0; n < out.param.size(); ++n) out.param[n] += s.ut_minus[n];
    out.log_prefactor = a.log_prefactor + s.u_tilde - s.v_integral + fock::inner(grid, s.ut_plus, a.param);
    return out;
}

cplx tilde_W_matrix_element(const PathEvaluator& ev, const paths::BrownianPath& path, const std::vector<double>& x,
                            int t_index, const Vector& g, const Vector& h, double lambda, const PotentialSpec& V) {
    SnapshotOptions opt;
    opt.tilde = true;
    opt.lambda = lambda;
    const Snapshot s = ev.at(path, x, t_index, opt, &V);
    const auto& grid = ev.grid();
    return fock::inner_coherent(grid, fock::coherent(grid, g), apply_tilde_w_adjoint(grid, s, fock::coherent(grid, h)));
}

semigroup::Residual idgross_residual(const PathEvaluator& ev, const paths::BrownianPath& path,
                                     const std::vector<double>& x, int t_index, const Vector& g, const Vector& h,
                                     const GrossParams& gp, const PotentialSpec& V) {
    if (!gp.representable()) throw DomainError("W(beta) is not defined for Lambda = 0 and mu = 0");
    if (!gp.base.finite_cutoff()) throw CutoffRequired("the Gross identity check needs a finite cutoff");
    SnapshotOptions opt;
    opt.tilde = true;
    opt.lambda = gp.lambda;
    const Snapshot s = ev.at(path, x, t_index, opt, &V);
    const auto& grid = ev.grid();
    const CoherentVec zg = fock::coherent(grid, g);
    const CoherentVec zh = fock::coherent(grid, h);
    const cplx lhs = fock::inner_coherent(grid, zg, apply_tilde_w(grid, s, zh));
    Vector minus_b0(s.beta_x.size());
    for (size_t n = 0; n < minus_b0.size(); ++n) minus_b0[n] = -s.beta_x[n];
    CoherentVec v = fock::apply_weyl(grid, minus_b0, std::nullopt, zh);
    v = semigroup::apply_w(grid, s, v);
    v = fock::apply_weyl(grid, s.beta_xt, std::nullopt, v);
    const cplx rhs = fock::inner_coherent(grid, zg, v);
    const double d = std::abs(lhs - rhs);
    return {d, d / std::abs(rhs)};
}

semigroup::EnergyFit tilde_ground_energy(const GrossParams& gp, const PotentialSpec& V,
                                         const std::vector<double>& t_grid, const McControls& mc,
                                         semigroup::EnergyOptions opt) {
    opt.tilde = true;
    opt.lambda = gp.lambda;
    return semigroup::ground_energy(gp.base, V, t_grid, mc, opt);
}

}  // namespace nelson::nonfock
