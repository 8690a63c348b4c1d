#pragma once

#include <optional>
#include <vector>

#include "nelson/fieldstate.hpp"

namespace nelson::fock {

using field::MomentumGrid;
using Vector = std::vector<cplx>;  // one-boson vector sampled on the grid nodes

// exp(log_prefactor) * zeta(param).
struct CoherentVec {
    cplx log_prefactor{0.0, 0.0};
    Vector param;
};

CoherentVec coherent(const MomentumGrid& grid, Vector param = {}, cplx log_prefactor = 0.0);

cplx inner(const MomentumGrid& grid, const Vector& a, const Vector& b);
// Log of <A, B>; finite even when the value itself would overflow.
cplx log_inner_coherent(const MomentumGrid& grid, const CoherentVec& a, const CoherentVec& b);
cplx inner_coherent(const MomentumGrid& grid, const CoherentVec& a, const CoherentVec& b);
double norm_coherent(const MomentumGrid& grid, const CoherentVec& a);

// W(f, Q) with Q the multiplication by exp(i k.x) (or the identity).
CoherentVec apply_weyl(const MomentumGrid& grid, const Vector& f, const std::optional<Vec3>& phase_point,
                       const CoherentVec& a);
// F_{0,t}(g) or its adjoint.
CoherentVec apply_F(const MomentumGrid& grid, const Vector& g, double t, bool adjoint,
                    const CoherentVec& a);

// <zeta(a), F_{m,t}(f_1..f_m, g) zeta(h)> for m <= 2.
cplx creation_matrix_element(const MomentumGrid& grid, const Vector& a, const std::vector<Vector>& f_list,
                             const Vector& g, double t, const Vector& h);
// <zeta(a), a(f) zeta(h)>.
cplx annihilation_matrix_element(const MomentumGrid& grid, const Vector& a, const Vector& f,
                                 const Vector& h);
// <zeta(a), dGamma(w) zeta(h)> for a multiplication operator given by its node values.
cplx dgamma_matrix_element(const MomentumGrid& grid, const Vector& a, const std::vector<double>& w,
                           const Vector& h);

struct HamContext {
    std::vector<double> x;     // 3N particle positions (position form)
    std::optional<Vec3> xi;    // total momentum (fiber form, N = 1)
};

// <zeta(a), H zeta(h)> with H = dGamma(omega) + phi(f^N(x)) or the fiber operator
// (xi - dGamma(k))^2 / 2 + dGamma(omega) + phi(f).
cplx ham_form_element(const MomentumGrid& grid, const Vector& a, const Vector& h, const HamContext& ctx,
                      const kernel::ModelParams& p);

// f^N(x)(k) = sum_l exp(-i k.x_l) f_kappa(k) on the grid.
Vector coupling_vector(const MomentumGrid& grid, const std::vector<double>& x, const kernel::ModelParams& p);
// e^{-t omega} h node-wise.
Vector damp(const MomentumGrid& grid, const Vector& h, double t);

}  // namespace nelson::fock
