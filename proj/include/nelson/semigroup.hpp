#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nelson/action.hpp"
#include "nelson/fock.hpp"
#include "nelson/parallel.hpp"

namespace nelson::semigroup {

using fock::CoherentVec;
using fock::Vector;
using kernel::ModelParams;

// Bounded potentials on R^{3N}; every entry acts on each particle and is summed.
struct PotentialSpec {
    enum class Kind { zero, harmonic, soft_coulomb, tabulated };
    Kind kind = Kind::zero;
    double omega0 = 1.0;    // harmonic: omega0^2 min(|x|, radius)^2 / 2
    double radius = 10.0;
    double a = 1.0;         // soft Coulomb: -strength / sqrt(|x|^2 + a^2)
    double strength = 1.0;
    std::vector<double> table_r, table_v;  // tabulated radial profile, linear, clamped

    double operator()(const double* x, int n_particles) const;
    bool is_zero() const { return kind == Kind::zero; }
};

enum class ActionForm { decomposed, direct };

struct SnapshotOptions {
    bool fields = true;  // build U-, U+ and the phase sums
    bool tilde = false;  // Gross-transformed quantities with IR split lambda
    double lambda = 0.0;
    ActionForm form = ActionForm::decomposed;
};

// Everything the closed-form matrix elements need at one grid time.
struct Snapshot {
    int t_index = 0;
    double t = 0.0;
    action::ActionBreakdown action;
    double u = 0.0;           // action value used in W (decomposed unless direct requested)
    double v_integral = 0.0;  // left Riemann sum of V along x + b
    Vector u_minus, u_plus, p0, pt;
    double b_lambda = 0.0, c_minus_lambda = 0.0, c_plus_lambda = 0.0, u_tilde = 0.0;
    Vector ut_minus, ut_plus;
    Vector beta_x, beta_xt;  // beta_{Lambda,kappa}^N at x and at x + b_t
};

// Owns the momentum grid for one parameter set; run() is thread-safe.
class PathEvaluator {
public:
    explicit PathEvaluator(const ModelParams& p, std::vector<double> extra_breaks = {});
    const field::MomentumGrid& grid() const { return grid_; }
    const ModelParams& params() const { return p_; }

    void run(const paths::BrownianPath& path, const std::vector<double>& x, const std::vector<int>& indices,
             const SnapshotOptions& opt, const PotentialSpec* V,
             const std::function<void(const Snapshot&)>& fn) const;
    Snapshot at(const paths::BrownianPath& path, const std::vector<double>& x, int t_index,
                const SnapshotOptions& opt = {}, const PotentialSpec* V = nullptr) const;

private:
    ModelParams p_;
    field::MomentumGrid grid_;
    std::vector<double> scale_, weight_;
};

// W zeta(h) = e^{u - int V - <U-, h>} zeta(e^{-t omega} h - U+) and its adjoint.
CoherentVec apply_w(const field::MomentumGrid& grid, const Snapshot& s, const CoherentVec& a);
CoherentVec apply_w_adjoint(const field::MomentumGrid& grid, const Snapshot& s, const CoherentVec& a);
// <zeta(g), W* zeta(h)>.
cplx w_element(const field::MomentumGrid& grid, const Snapshot& s, const Vector& g, const Vector& h);

cplx W_matrix_element(const PathEvaluator& ev, const paths::BrownianPath& path, const std::vector<double>& x,
                      int t_index, const Vector& g, const Vector& h, const PotentialSpec& V);

struct MCEstimate {
    cplx mean{0.0, 0.0};
    double std_err = 0.0;
    int n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<cplx> partials;  // per-stream values in stream order
};

// Gaussian bump amp * exp(-|y - c|^2 / (2 width^2)) on R^{3N}; width <= 0 gives the constant amp.
struct Bump {
    double amp = 1.0;
    std::vector<double> center;
    double width = 0.0;
    double operator()(const double* y, int dim) const;
};

struct PsiTerm {
    Bump weight;
    CoherentVec vec;
};

// Probe-g matrix element of (T_t Psi)(x) = E[W_t(x)* Psi(x + b_t)].
MCEstimate T_estimate(const PathEvaluator& ev, const std::vector<double>& x, double t,
                      const std::vector<PsiTerm>& psi, const Vector& g, const PotentialSpec& V,
                      const McControls& mc, ActionForm form = ActionForm::decomposed);

struct Residual {
    double abs = 0.0;
    double rel = 0.0;  // abs / |reference|
};

// <zeta(g), (W_s[x + b_t, shifted] W_t[x, b] - W_{s+t}[x, b]) zeta(h)>, relative to the W_{s+t} element.
Residual markov_residual(const PathEvaluator& ev, const paths::BrownianPath& path, const std::vector<double>& x,
                       int s_index, int t_index, const Vector& g, const Vector& h, const PotentialSpec& V);

struct EnergyFit {
    std::vector<double> t, lnZ, lnZ_im, std_err;
    int n_paths = 0;
    int n_x_points = 0;
    double t_lo = 0.0, t_hi = 0.0;
    double energy = 0.0, energy_err = 0.0;
    double log_coef = 0.0, log_coef_err = 0.0;
    bool convexity_ok = true;
    double convexity_excess = 0.0;  // largest violation in units of its std_err
    std::vector<double> residuals;  // fit residuals over the window
};

struct FitOptions {
    bool log_term = false;       // fit ln Z = a - E t - gamma ln t
    int jackknife_blocks = 16;
    double max_rel_stderr = 0.5; // VarianceBlowup threshold on the relative error of Z(t)
};

// Samples: per path and time, a log-weight and a real factor; Z(t) = e^{log_prefactor} mean(c e^l).
struct SampleTable {
    std::vector<double> t;
    std::vector<std::vector<double>> l, c, s;  // s: imaginary factor (may be empty)
    double log_prefactor = 0.0;
};

EnergyFit fit_energy(const SampleTable& tab, const FitOptions& fo);

struct EnergyOptions {
    double box_half_width = 3.0;  // rho is the indicator of [-L, L]^{3N}
    ActionForm form = ActionForm::decomposed;
    bool tilde = false;           // use the Gross-transformed action
    double lambda = 0.0;
    bool vacuum = false;          // V = 0, N = 1: E[e^u] at x = 0 without the x-integral
    bool auto_vacuum = true;      // select the vacuum formula whenever it applies
    FitOptions fit;
};

EnergyFit ground_energy(const ModelParams& p, const PotentialSpec& V, const std::vector<double>& t_grid,
                        const McControls& mc, const EnergyOptions& opt = {});

// Grid indices for a list of times; throws if a time is not a multiple of dt.
std::vector<int> time_indices(const std::vector<double>& t_grid, double dt);

}  // namespace nelson::semigroup
