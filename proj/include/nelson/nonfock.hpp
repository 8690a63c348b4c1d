#pragma once

#include "nelson/semigroup.hpp"

namespace nelson::nonfock {

using semigroup::PathEvaluator;
using semigroup::PotentialSpec;
using semigroup::Snapshot;
using fock::CoherentVec;
using fock::Vector;

struct GrossParams {
    double lambda = 0.0;  // IR split of the transformation
    kernel::ModelParams base;

    // The Weyl operator W(beta_{Lambda,kappa}) exists only if Lambda > 0 or mu > 0.
    bool representable() const { return lambda > 0.0 || base.mu > 0.0; }
};

struct TildeAction {
    double t = 0.0;
    double u = 0.0;
    double b_lambda = 0.0, c_minus_lambda = 0.0, c_plus_lambda = 0.0;
    double u_tilde = 0.0;  // u - b + c_minus + c_plus
};

// Evaluator with the radial grid broken at Lambda.
PathEvaluator make_evaluator(const GrossParams& gp);

TildeAction tilde_action(const PathEvaluator& ev, const paths::BrownianPath& path, const std::vector<double>& x,
                         int t_index, double lambda);
TildeAction tilde_action(const paths::BrownianPath& path, const std::vector<double>& x, int t_index,
                         const GrossParams& gp);

// W~ zeta(h) = e^{u~ - int V + <U~-, h>} zeta(e^{-t omega} h + U~+) and its adjoint.
CoherentVec apply_tilde_w(const field::MomentumGrid& grid, const Snapshot& s, const CoherentVec& a);
CoherentVec apply_tilde_w_adjoint(const field::MomentumGrid& grid, const Snapshot& s, const CoherentVec& a);

// <zeta(g), W~* zeta(h)>.
cplx tilde_W_matrix_element(const PathEvaluator& ev, const paths::BrownianPath& path, const std::vector<double>& x,
                            int t_index, const Vector& g, const Vector& h, double lambda, const PotentialSpec& V);

// |<zeta(g), (W~ - W(beta(x + b_t)) W W(-beta(x))) zeta(h)>| and its ratio to the right side.
semigroup::Residual idgross_residual(const PathEvaluator& ev, const paths::BrownianPath& path,
                                     const std::vector<double>& x, int t_index, const Vector& g, const Vector& h,
                                     const GrossParams& gp, const PotentialSpec& V);

semigroup::EnergyFit tilde_ground_energy(const GrossParams& gp, const PotentialSpec& V,
                                         const std::vector<double>& t_grid, const McControls& mc,
                                         semigroup::EnergyOptions opt = {});

}  // namespace nelson::nonfock
