#pragma once

#include "nelson/semigroup.hpp"

namespace nelson::fiber {

using fock::Vector;
using semigroup::PathEvaluator;
using semigroup::Snapshot;

// W^* zeta(h) = e^{u - <e^{ik.B_t} U+, h>} zeta(e^{-t omega - ik.B_t} h - U-) for a snapshot taken at x = 0.
fock::CoherentVec apply_fiber_w_adjoint(const field::MomentumGrid& grid, const Snapshot& s,
                                        const fock::CoherentVec& a);

// <zeta(g), W^* zeta(h)> along the path started at 0; N = 1.
cplx fiber_W_matrix_element(const PathEvaluator& ev, const paths::BrownianPath& path, int t_index, const Vector& g,
                            const Vector& h);

// Compares the full element <zeta(g), W_t(x)* zeta(h)> with the fiber element at
// (e^{ik.x} g, e^{ik.(x + B_t)} h).
semigroup::Residual fiber_offset_residual(const PathEvaluator& ev, const paths::BrownianPath& path,
                                          const std::vector<double>& x, int t_index, const Vector& g,
                                          const Vector& h);

struct FiberOptions {
    semigroup::ActionForm form = semigroup::ActionForm::decomposed;
    bool tilde = false;
    double lambda = 0.0;
    semigroup::FitOptions fit;
};

// E(xi) from -d/dt ln Re E[e^{u + i xi.B_t}]; lnZ_im carries the phase diagnostic.
semigroup::EnergyFit fiber_energy(const Vec3& xi, const kernel::ModelParams& p, const std::vector<double>& t_grid,
                                  const McControls& mc, const FiberOptions& opt = {});

}  // namespace nelson::fiber
