#pragma once

#include <vector>

#include "nelson/common.hpp"
#include "nelson/kernel.hpp"
#include "nelson/paths.hpp"

namespace nelson::field {

using kernel::ModelParams;

struct AngularRule {
    std::vector<Vec3> dirs;
    std::vector<double> weights;  // sum to 4 pi
    int degree = 0;               // exact for spherical harmonics up to this order
};

// n = 6, 14, 26 (Lebedev) or n = 2 M^2 (Gauss-Legendre x uniform azimuth product rule).
AngularRule angular_rule(int n_nodes);

struct RadialRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // include the rho^2 Jacobian
};

// Gauss-Legendre on [0, rho_min] in the variable s = sqrt(rho / rho_min), then on
// log-mapped panels up to rho_max split at every break point.
RadialRule radial_rule(int n_nodes, double rho_min, double rho_max, std::vector<double> breaks);

class MomentumGrid {
public:
    MomentumGrid(RadialRule radial, AngularRule angular, double mu);
    // Grid for the given parameters; cutoff, IR split and IR cut radii become panel edges.
    static MomentumGrid build(const ModelParams& p, std::vector<double> extra_breaks = {});

    int n_radial() const { return int(rho_.size()); }
    int n_angular() const { return int(dirs_.size()); }
    int size() const { return n_radial() * n_angular(); }
    // Node index is direction-major: n = j * n_radial + i.
    int node(int i, int j) const { return j * n_radial() + i; }
    int radial_index(int n) const { return n % n_radial(); }
    int dir_index(int n) const { return n / n_radial(); }

    const std::vector<double>& rho() const { return rho_; }
    const std::vector<double>& radial_weights() const { return wr_; }
    const std::vector<double>& omega() const { return omega_; }
    const std::vector<Vec3>& dirs() const { return dirs_; }
    const std::vector<double>& angular_weights() const { return wa_; }
    double weight(int n) const { return wr_[radial_index(n)] * wa_[dir_index(n)]; }
    Vec3 k(int n) const;
    int antipode(int n) const { return node(radial_index(n), anti_[dir_index(n)]); }
    int antipode_dir(int j) const { return anti_[j]; }
    // One representative direction per antipodal pair.
    const std::vector<int>& half_dirs() const { return half_; }
    double mu() const { return mu_; }
    double rho_max() const { return rho_.empty() ? 0.0 : rho_max_; }
    int angular_degree() const { return degree_; }

private:
    std::vector<double> rho_, wr_, omega_;
    std::vector<Vec3> dirs_;
    std::vector<double> wa_;
    std::vector<int> anti_, half_;
    double mu_ = 0.0;
    double rho_max_ = 0.0;
    int degree_ = 0;
};

enum class Role { Uminus, Uplus, Maccum, Mminus, Iaccum, S, custom };

// Rank-0 complex function on the grid nodes.
struct FieldState {
    const MomentumGrid* grid = nullptr;
    Role role = Role::custom;
    bool cutoff_finite = true;
    std::vector<cplx> values;
};

FieldState zero_state(const MomentumGrid& grid, Role role = Role::custom);
// exp(-s omega(k) - i k.x) r(|k|) for a rank-0 atom, restricted to |k| >= band_lo.
FieldState atom_state(const MomentumGrid& grid, const kernel::Atom& atom, const ModelParams& p);

// sum_n w_n conj(a_n) omega_n^weight b_n. Throws WeightNotAllowed for (role, weight)
// pairs whose norm is not finite without a cutoff.
cplx weighted_inner(const FieldState& a, const FieldState& b, double weight_exponent = 0.0);
cplx grid_inner(const MomentumGrid& grid, const std::vector<cplx>& a, const std::vector<cplx>& b);

// Per-radial-node contributions, already summed over all directions. Any cutoff or
// band restriction is applied afterwards as a radial weight (chi^2 times a mask).
struct RadialTerms {
    double t = 0.0;
    int n_particles = 1;
    std::vector<double> b, c_minus, c_plus, v, m, direct, e_ren;
};

// Evolves the N-summed one-boson processes along a path on the conjugation-symmetric
// half grid. States carry eps * eta * omega^{-1/2} without the cutoff profile.
class FieldEngine {
public:
    FieldEngine(const MomentumGrid& grid, const ModelParams& p);

    void start(const paths::BrownianPath& path, const std::vector<double>& x);
    void advance();
    void advance_to(int step);
    int step() const { return step_; }
    double time() const { return step_ * (path_ ? path_->dt : 0.0); }
    const MomentumGrid& grid() const { return *grid_; }
    const std::vector<double>& offset() const { return x_; }

    RadialTerms terms() const;
    // Full-grid state with per-radial factor scale_i (cutoff profile times band mask).
    FieldState state(Role role, const std::vector<double>& scale) const;
    // sum_l exp(-i k.(x_l + b_l)) at the start or at the current step.
    std::vector<cplx> phase_sum(bool initial) const;
    // <omega^{1/4} S, e^{-ik.q_l} omega^{-1/4} i k beta> with per-radial weight (chi^2 mask).
    Vec3 d_vector(int particle, const std::vector<double>& weight) const;

    // Base radial kernels (no cutoff profile) at each radial node.
    const std::vector<double>& base_f() const { return f_; }
    const std::vector<double>& base_beta() const { return beta_; }

private:
    void phases_at(int step, std::vector<std::vector<cplx>>& out) const;

    const MomentumGrid* grid_;
    ModelParams p_;
    const paths::BrownianPath* path_ = nullptr;
    std::vector<double> x_;
    int step_ = 0;
    bool active_ = true;

    // per radial node
    std::vector<double> f_, beta_, ratio_, edt_, phi_, dfac_, emt_;
    // per half node
    std::vector<double> kx_, ky_, kz_, w_;
    std::vector<int> rad_;
    std::vector<cplx> um_, up_, mm_, mminus_, p0_, pn_;
    std::vector<std::vector<cplx>> pl_, pl_next_;
    std::vector<double> acc_v_, acc_m_, acc_dir_;
};

}  // namespace nelson::field
