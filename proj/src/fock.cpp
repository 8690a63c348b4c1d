#include "nelson/fock.hpp"

#include <cmath>

namespace nelson::fock {

CoherentVec coherent(const MomentumGrid& grid, Vector param, cplx log_prefactor) {
    if (param.empty()) param.assign(grid.size(), cplx(0.0, 0.0));
    if (int(param.size()) != grid.size()) throw DomainError("parameter size does not match the grid");
    return {log_prefactor, std::move(param)};
}

cplx inner(const MomentumGrid& grid, const Vector& a, const Vector& b) { return field::grid_inner(grid, a, b); }

cplx log_inner_coherent(const MomentumGrid& grid, const CoherentVec& a, const CoherentVec& b) {
    return std::conj(a.log_prefactor) + b.log_prefactor + inner(grid, a.param, b.param);
}

cplx inner_coherent(const MomentumGrid& grid, const CoherentVec& a, const CoherentVec& b) {
    return std::exp(log_inner_coherent(grid, a, b));
}

double norm_coherent(const MomentumGrid& grid, const CoherentVec& a) {
    return std::exp(a.log_prefactor.real() + 0.5 * inner(grid, a.param, a.param).real());
}

Vector damp(const MomentumGrid& grid, const Vector& h, double t) {
    Vector out(h.size());
    for (int n = 0; n < grid.size(); ++n) out[n] = std::exp(-t * grid.omega()[grid.radial_index(n)]) * h[n];
    return out;
}

CoherentVec apply_weyl(const MomentumGrid& grid, const Vector& f, const std::optional<Vec3>& phase_point,
                       const CoherentVec& a) {
    Vector qh = a.param;
    if (phase_point)
        for (int n = 0; n < grid.size(); ++n) qh[n] *= std::polar(1.0, dot(grid.k(n), *phase_point));
    CoherentVec out;
    out.log_prefactor = a.log_prefactor - 0.5 * inner(grid, f, f) - inner(grid, f, qh);
    out.param.resize(qh.size());
    for (size_t n = 0; n < qh.size(); ++n) out.param[n] = f[n] + qh[n];
    return out;
}

CoherentVec apply_F(const MomentumGrid& grid, const Vector& g, double t, bool adjoint, const CoherentVec& a) {
    if (!(t > 0.0)) throw DomainError("F_{0,t} needs t > 0");
    CoherentVec out;
    out.param = damp(grid, a.param, t);
    if (adjoint) {
        out.log_prefactor = a.log_prefactor + inner(grid, g, a.param);
    } else {
        out.log_prefactor = a.log_prefactor;
        for (size_t n = 0; n < g.size(); ++n) out.param[n] += g[n];
    }
    return out;
}

cplx creation_matrix_element(const MomentumGrid& grid, const Vector& a, const std::vector<Vector>& f_list,
                             const Vector& g, double t, const Vector& h) {
    if (f_list.size() > 2) throw UnsupportedOrder("only m <= 2 creation operators are supported");
    Vector arg = damp(grid, h, t);
    for (size_t n = 0; n < arg.size(); ++n) arg[n] += g[n];
    cplx pre(1.0, 0.0);
    for (const auto& f : f_list) pre *= inner(grid, a, f);
    return pre * std::exp(inner(grid, a, arg));
}

cplx annihilation_matrix_element(const MomentumGrid& grid, const Vector& a, const Vector& f, const Vector& h) {
    return inner(grid, f, h) * std::exp(inner(grid, a, h));
}

cplx dgamma_matrix_element(const MomentumGrid& grid, const Vector& a, const std::vector<double>& w,
                           const Vector& h) {
    Vector wh(h.size());
    for (size_t n = 0; n < h.size(); ++n) wh[n] = w[n] * h[n];
    return inner(grid, a, wh) * std::exp(inner(grid, a, h));
}

Vector coupling_vector(const MomentumGrid& grid, const std::vector<double>& x, const kernel::ModelParams& p) {
    Vector out(grid.size(), cplx(0.0, 0.0));
    const int np = int(x.size() / 3);
    for (int n = 0; n < grid.size(); ++n) {
        const double f = kernel::coupling_f(grid.rho()[grid.radial_index(n)], p);
        if (f == 0.0) continue;
        const Vec3 k = grid.k(n);
        for (int l = 0; l < np; ++l)
            out[n] += std::polar(f, -(k[0] * x[3 * l] + k[1] * x[3 * l + 1] + k[2] * x[3 * l + 2]));
    }
    return out;
}

cplx ham_form_element(const MomentumGrid& grid, const Vector& a, const Vector& h, const HamContext& ctx,
                      const kernel::ModelParams& p) {
    if (!p.finite_cutoff()) throw CutoffRequired("Hamiltonian form needs a finite cutoff");
    const int nn = grid.size();
    Vector wh(nn);
    for (int n = 0; n < nn; ++n) wh[n] = grid.omega()[grid.radial_index(n)] * h[n];
    cplx val = inner(grid, a, wh);
    if (ctx.xi) {
        if (p.n_particles != 1) throw DomainError("fiber form needs N = 1");
        const Vector f = coupling_vector(grid, {0.0, 0.0, 0.0}, p);
        val += inner(grid, a, f) + inner(grid, f, h);
        const Vec3& xi = *ctx.xi;
        cplx kin = norm2(xi);
        for (int c = 0; c < 3; ++c) {
            Vector k1(nn), k2(nn);
            for (int n = 0; n < nn; ++n) {
                const double kc = grid.k(n)[c];
                k1[n] = kc * h[n];
                k2[n] = kc * kc * h[n];
            }
            const cplx m1 = inner(grid, a, k1);
            kin += -2.0 * xi[c] * m1 + m1 * m1 + inner(grid, a, k2);
        }
        val += 0.5 * kin;
    } else {
        if (int(ctx.x.size()) != 3 * p.n_particles) throw DomainError("position form needs 3N coordinates");
        const Vector f = coupling_vector(grid, ctx.x, p);
        val += inner(grid, a, f) + inner(grid, f, h);
    }
    return val * std::exp(inner(grid, a, h));
}

}  // namespace nelson::fock
