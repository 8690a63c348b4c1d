#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nelson/common.hpp"

namespace nelson::kernel {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ChiKind { sharp, taper };
enum class EtaKind { one, ir_cut };

// Momentum quadrature description shared by the grid builder and the CLI.
struct GridSpec {
    int radial_nodes = 128;
    int angular_nodes = 26;
    double rho_max = 0.0;      // 0 selects the default from the cutoff scale
    double rho_min = 1e-3;     // first log-mapped panel starts here
    std::vector<double> breaks;  // extra radial panel edges (cutoffs, bands)
};

struct ModelParams {
    double mu = 0.0;
    double eps = 1.0;
    int n_particles = 1;
    EtaKind eta = EtaKind::one;
    double eta_cut = 0.0;
    ChiKind chi = ChiKind::sharp;
    double kappa = kInf;
    double lambda_split = 0.0;
    GridSpec grid;

    bool finite_cutoff() const { return kappa < kInf; }
    // Radius beyond which the cutoff profile vanishes identically.
    double support_radius() const;
    void validate() const;
};

double dispersion(double rho, double mu);
double dispersion(const Vec3& k, double mu);

// Cutoff profile chi evaluated at s = |k| / kappa. The taper is 1 on [0,1],
// cos^2(pi (s-1)/2) on [1,2] and 0 beyond, which is C^1 everywhere.
double chi_profile(double s, ChiKind kind);
double cutoff(double rho, const ModelParams& p);
double eta(double rho, const ModelParams& p);

// f_kappa and beta_kappa as radial functions.
double coupling_f(double rho, const ModelParams& p);
double coupling_beta(double rho, const ModelParams& p);
inline double band_indicator(double rho, double lambda) { return rho >= lambda ? 1.0 : 0.0; }

struct Band {
    double lo = 0.0;
    double hi = kInf;
};

double renorm_energy(const ModelParams& p, Band band = {});
// Closed form 8 pi eps^2 [ln(1+hi/2) - ln(1+lo/2)] for mu = 0, eta = 1, sharp chi.
double renorm_energy_closed(double eps, double kappa, Band band = {});

double pair_potential(double d, const ModelParams& p);
// Closed form at d = 0 for mu = 0, eta = 1, sharp chi.
double pair_potential_zero_closed(double eps, double lambda, double kappa);

double mho(double lambda, double a);

// Catalog of radial kernels r(|k|); rank-1 kernels stand for k * r(|k|).
enum class KernelId { f, beta, omega_beta, f_beta, beta_sq, m_beta, two_omega_beta };

struct KernelInfo {
    KernelId id;
    const char* name;
    int rank;
    const char* formula;
    const char* decay;
};

const std::vector<KernelInfo>& kernel_catalog();
const KernelInfo& kernel_info(KernelId id);
// Radial factor r(rho) of the kernel (for rank 1 the vector factor k is implied).
double kernel_radial(KernelId id, double rho, const ModelParams& p);

// A(k) = exp(-s omega(k) - i k.x) * kernel(k), optionally restricted to |k| >= band_lo.
struct Atom {
    double damping = 0.0;
    Vec3 x{0.0, 0.0, 0.0};
    KernelId kernel = KernelId::f;
    double band_lo = 0.0;
};

struct AtomPairResult {
    int rank_a = 0;
    int rank_b = 0;
    cplx scalar{0.0, 0.0};
    std::array<cplx, 3> vec{};
    std::array<cplx, 9> mat{};
};

// int omega^w exp(-(sA+sB) omega) conj(A) B exp(ik.(xA - xB)) dk, reduced to a radial integral.
AtomPairResult atom_pair_integral(const Atom& a, const Atom& b, double weight_exponent,
                                  const ModelParams& p);

// Spherical Bessel functions with stable small-argument branches.
double sph_j0(double z);
double sph_j1(double z);
double sph_j2(double z);

// Adaptive integral of g over [lo, hi] (hi may be infinite) with relative
// tolerance rel_tol (or absolute abs_tol). Throws DivergentIntegral if the tail fails the decay test.
double integrate_radial(const std::function<double(double)>& g, double lo, double hi,
                        double rel_tol = 1e-10, double abs_tol = 0.0);

}  // namespace nelson::kernel
