#include "nelson/fiber.hpp"

#include <cmath>

namespace nelson::fiber {

fock::CoherentVec apply_fiber_w_adjoint(const field::MomentumGrid& grid, const Snapshot& s,
                                        const fock::CoherentVec& a) {
    const size_t n = a.param.size();
    Vector rot(n), shifted(n);
    for (size_t q = 0; q < n; ++q) {
        rot[q] = std::conj(s.pt[q]) * s.u_plus[q];
        shifted[q] = s.pt[q] * a.param[q];
    }
    fock::CoherentVec out;
    out.param = fock::damp(grid, shifted, s.t);
    for (size_t q = 0; q < n; ++q) out.param[q] -= s.u_minus[q];
    out.log_prefactor = a.log_prefactor + s.u - fock::inner(grid, rot, a.param);
    return out;
}

cplx fiber_W_matrix_element(const PathEvaluator& ev, const paths::BrownianPath& path, int t_index, const Vector& g,
                            const Vector& h) {
    if (ev.params().n_particles != 1 || path.n_particles != 1) throw DomainError("the fiber model needs N = 1");
    const Snapshot s = ev.at(path, {0.0, 0.0, 0.0}, t_index);
    const auto& grid = ev.grid();
    return fock::inner_coherent(grid, fock::coherent(grid, g), apply_fiber_w_adjoint(grid, s, fock::coherent(grid, h)));
}

semigroup::Residual fiber_offset_residual(const PathEvaluator& ev, const paths::BrownianPath& path,
                                          const std::vector<double>& x, int t_index, const Vector& g,
                                          const Vector& h) {
    if (ev.params().n_particles != 1 || path.n_particles != 1) throw DomainError("the fiber model needs N = 1");
    const auto& grid = ev.grid();
    const Snapshot full = ev.at(path, x, t_index);
    const cplx ref = semigroup::w_element(grid, full, g, h);
    const Vec3 xv{x[0], x[1], x[2]};
    const Vec3 xb{x[0] + path.row(t_index)[0], x[1] + path.row(t_index)[1], x[2] + path.row(t_index)[2]};
    Vector g2(g.size()), h2(h.size());
    for (int n = 0; n < grid.size(); ++n) {
        g2[n] = std::polar(1.0, dot(grid.k(n), xv)) * g[n];
        h2[n] = std::polar(1.0, dot(grid.k(n), xb)) * h[n];
    }
    const cplx fib = fiber_W_matrix_element(ev, path, t_index, g2, h2);
    const double d = std::abs(ref - fib);
    return {d, d / std::abs(ref)};
}

semigroup::EnergyFit fiber_energy(const Vec3& xi, const kernel::ModelParams& p, const std::vector<double>& t_grid,
                                  const McControls& mc, const FiberOptions& opt) {
    if (p.n_particles != 1) throw DomainError("the fiber model needs N = 1");
    std::vector<double> br;
    if (opt.tilde && opt.lambda > 0.0) br.push_back(opt.lambda);
    const PathEvaluator ev(p, br);
    const auto idx = semigroup::time_indices(t_grid, mc.dt);
    const size_t K = t_grid.size();
    semigroup::SampleTable tab;
    tab.t = t_grid;
    tab.l.assign(mc.n_paths, std::vector<double>(K, 0.0));
    tab.c.assign(mc.n_paths, std::vector<double>(K, 0.0));
    tab.s.assign(mc.n_paths, std::vector<double>(K, 0.0));
    semigroup::SnapshotOptions so;
    so.fields = false;
    so.tilde = opt.tilde;
    so.lambda = opt.lambda;
    so.form = opt.form;
    parallel_for_index(mc.n_paths, mc.threads, [&](int s) {
        const auto path = paths::sample_path(mc.seed, std::uint64_t(s), idx.back(), mc.dt, 1);
        size_t k = 0;
        ev.run(path, {0.0, 0.0, 0.0}, idx, so, nullptr, [&](const Snapshot& snap) {
            const double* b = path.row(snap.t_index);
            const double ph = xi[0] * b[0] + xi[1] * b[1] + xi[2] * b[2];
            tab.l[s][k] = opt.tilde ? snap.u_tilde : snap.u;
            tab.c[s][k] = std::cos(ph);
            tab.s[s][k] = std::sin(ph);
            ++k;
        });
    });
    return semigroup::fit_energy(tab, opt.fit);
}

}  // namespace nelson::fiber
