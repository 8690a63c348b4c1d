#include "nelson/kernel.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>

namespace nelson::kernel {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct GslWorkspace {
    explicit GslWorkspace(size_t n) : w(gsl_integration_workspace_alloc(n)) {}
    ~GslWorkspace() { gsl_integration_workspace_free(w); }
    gsl_integration_workspace* w;
};

double trampoline(double x, void* ctx) {
    return (*static_cast<const std::function<double(double)>*>(ctx))(x);
}

void silence_gsl() {
    static const bool once = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)once;
}

// Power-law exponent of |g| between x and 10x; used as a decay test.
double local_exponent(const std::function<double(double)>& g, double x) {
    const double a = std::abs(g(x));
    const double b = std::abs(g(10.0 * x));
    if (a == 0.0 || b == 0.0) return -kInf;
    return std::log10(b / a);
}

}  // namespace

double ModelParams::support_radius() const {
    if (!finite_cutoff()) return kInf;
    return chi == ChiKind::sharp ? kappa : 2.0 * kappa;
}

void ModelParams::validate() const {
    if (!(mu >= 0.0)) throw DomainError("mu must be >= 0");
    if (n_particles < 1) throw DomainError("n_particles must be >= 1");
    if (!(lambda_split >= 0.0)) throw DomainError("lambda_split must be >= 0");
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
    if (eta == EtaKind::ir_cut && !(eta_cut >= 0.0)) throw DomainError("eta cut must be >= 0");
    if (grid.rho_max < 0.0) throw DomainError("rho_max must be > 0");
    if (grid.radial_nodes < 2) throw DomainError("radial_nodes must be >= 2");
}

double dispersion(double rho, double mu) { return mu == 0.0 ? rho : std::hypot(rho, mu); }

double dispersion(const Vec3& k, double mu) { return dispersion(std::sqrt(norm2(k)), mu); }

double chi_profile(double s, ChiKind kind) {
    s = std::abs(s);
    if (kind == ChiKind::sharp) return s < 1.0 ? 1.0 : 0.0;
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double c = std::cos(0.5 * kPi * (s - 1.0));
    return c * c;
}

double cutoff(double rho, const ModelParams& p) {
    if (!p.finite_cutoff()) return 1.0;
    return chi_profile(rho / p.kappa, p.chi);
}

double eta(double rho, const ModelParams& p) {
    if (p.eta == EtaKind::one) return 1.0;
    return rho >= p.eta_cut ? 1.0 : 0.0;
}

double coupling_f(double rho, const ModelParams& p) {
    const double w = dispersion(rho, p.mu);
    if (w == 0.0) return 0.0;
    return p.eps * eta(rho, p) * cutoff(rho, p) / std::sqrt(w);
}

double coupling_beta(double rho, const ModelParams& p) {
    const double w = dispersion(rho, p.mu);
    const double den = w + 0.5 * rho * rho;
    if (den == 0.0) return 0.0;
    return coupling_f(rho, p) / den;
}

double integrate_radial(const std::function<double(double)>& g, double lo, double hi,
                        double rel_tol, double abs_tol) {
    silence_gsl();
    if (!(hi > lo)) return 0.0;
    if (std::isinf(hi)) {
        const double e = local_exponent(g, 1e6 * std::max(1.0, lo));
        if (e > -1.02) throw DivergentIntegral("radial integrand decays too slowly at infinity");
    }
    if (lo == 0.0) {
        const double e = local_exponent(g, 1e-10);
        if (e < -0.98) throw DivergentIntegral("radial integrand too singular at the origin");
    }
    GslWorkspace ws(4000);
    gsl_function F;
    F.function = &trampoline;
    F.params = const_cast<std::function<double(double)>*>(&g);
    double result = 0.0, abserr = 0.0;
    int status;
    if (std::isinf(hi)) {
        status = gsl_integration_qagiu(&F, lo, abs_tol, rel_tol, 4000, ws.w, &result, &abserr);
    } else {
        status = gsl_integration_qags(&F, lo, hi, abs_tol, rel_tol, 4000, ws.w, &result, &abserr);
    }
    if (status != GSL_SUCCESS && status != GSL_EROUND && abserr > 1e-6 * std::abs(result) + 1e-14 + abs_tol)
        throw DivergentIntegral(std::string("radial quadrature failed: ") + gsl_strerror(status));
    return result;
}

namespace {

// Upper radial limit for kernels built from f (support of the cutoff), clipped to hi.
double upper_limit(const ModelParams& p, double hi) { return std::min(hi, p.support_radius()); }

// Lower limit from the band and the IR profile.
double lower_limit(const ModelParams& p, double lo) {
    double l = lo;
    if (p.eta == EtaKind::ir_cut) l = std::max(l, p.eta_cut);
    return l;
}

// Sum of integrals over [lo, hi] split at the cutoff kink and taper edges so the
// adaptive rule never straddles a discontinuity.
double integrate_split(const std::function<double(double)>& g, double lo, double hi,
                       const ModelParams& p, double rel_tol = 1e-10) {
    std::vector<double> edges{lo};
    if (p.finite_cutoff() && p.chi == ChiKind::taper) {
        if (p.kappa > lo && p.kappa < hi) edges.push_back(p.kappa);
    }
    if (lo < 1.0 && hi > 1.0) edges.push_back(1.0);
    edges.push_back(hi);
    std::sort(edges.begin(), edges.end());
    double s = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) s += integrate_radial(g, edges[i], edges[i + 1], rel_tol);
    return s;
}

}  // namespace

double renorm_energy(const ModelParams& p, Band band) {
    if (p.eps == 0.0) return 0.0;
    const double lo = lower_limit(p, band.lo);
    const double hi = upper_limit(p, band.hi);
    if (std::isinf(hi) && !p.finite_cutoff())
        throw DivergentIntegral("renormalization energy diverges without cutoff and bounded band");
    auto g = [&](double r) { return r * r * coupling_f(r, p) * coupling_beta(r, p); };
    return 4.0 * kPi * integrate_split(g, lo, hi, p);
}

double renorm_energy_closed(double eps, double kappa, Band band) {
    const double hi = std::min(kappa, band.hi);
    const double lo = std::min(band.lo, hi);
    return 8.0 * kPi * eps * eps * (std::log1p(hi / 2.0) - std::log1p(lo / 2.0));
}

double sph_j0(double z) {
    if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0 + z * z * z * z / 120.0;
    return std::sin(z) / z;
}

double sph_j1(double z) {
    if (std::abs(z) < 1e-3) return z / 3.0 - z * z * z / 30.0 + std::pow(z, 5) / 840.0;
    return (std::sin(z) / z - std::cos(z)) / z;
}

double sph_j2(double z) {
    if (std::abs(z) < 1e-2) return z * z / 15.0 - std::pow(z, 4) / 210.0 + std::pow(z, 6) / 7560.0;
    return (3.0 / (z * z) - 1.0) * std::sin(z) / z - 3.0 * std::cos(z) / (z * z);
}

double pair_potential(double d, const ModelParams& p) {
    if (p.eps == 0.0) return 0.0;
    d = std::abs(d);
    const double lo = lower_limit(p, p.lambda_split);
    const double hi = upper_limit(p, kInf);
    auto weight = [&](double r) {
        const double b = coupling_beta(r, p);
        return dispersion(r, p.mu) * b * b;
    };
    const double span = std::isinf(hi) ? kInf : hi;
    if (d == 0.0 || d * std::min(span, 1e3) <= 50.0) {
        auto g = [&](double r) { return r * r * sph_j0(r * d) * weight(r); };
        return 4.0 * kPi * integrate_split(g, lo, hi, p);
    }
    // Oscillatory regime: smooth head by adaptive quadrature, then Filon-type
    // sine-weighted rules (QAWO / QAWF) on the remainder.
    silence_gsl();
    const double a = std::max(lo, std::min(50.0 / d, hi));
    double head = 0.0;
    if (a > lo) {
        auto g = [&](double r) { return r * r * sph_j0(r * d) * weight(r); };
        head = integrate_split(g, lo, a, p);
    }
    std::function<double(double)> h = [&](double r) { return r * weight(r) / d; };
    gsl_function F;
    F.function = &trampoline;
    F.params = &h;
    GslWorkspace ws(2000), cyc(2000);
    double tail = 0.0, err = 0.0;
    if (std::isinf(hi)) {
        gsl_integration_qawo_table* t = gsl_integration_qawo_table_alloc(d, 1.0, GSL_INTEG_SINE, 50);
        gsl_integration_qawf(&F, a, 1e-13, 2000, ws.w, cyc.w, t, &tail, &err);
        gsl_integration_qawo_table_free(t);
    } else if (hi > a) {
        gsl_integration_qawo_table* t =
            gsl_integration_qawo_table_alloc(d, hi - a, GSL_INTEG_SINE, 50);
        gsl_integration_qawo(&F, a, 0.0, 1e-11, 2000, ws.w, t, &tail, &err);
        gsl_integration_qawo_table_free(t);
    }
    return 4.0 * kPi * (head + tail);
}

double pair_potential_zero_closed(double eps, double lambda, double kappa) {
    const double a = 1.0 / (1.0 + lambda / 2.0);
    const double b = std::isinf(kappa) ? 0.0 : 1.0 / (1.0 + kappa / 2.0);
    return 8.0 * kPi * eps * eps * (a - b);
}

double mho(double lambda, double a) {
    if (!(a > -0.5 && a < 0.0)) throw DomainError("mho requires a in (-1/2, 0)");
    if (!(lambda >= 0.0)) throw DomainError("mho requires lambda >= 0");
    const double x = std::abs(a);
    const double delta = 1.0 - 2.0 * x;
    const double lo = std::min(1.0, lambda);
    const double hi = std::max(1.0, lambda);
    double first;
    if (lo == 1.0) {
        first = 0.0;
    } else if (lo == 0.0) {
        first = 6.0 / delta;
    } else {
        first = -6.0 * std::expm1(delta * std::log(lo)) / delta;
    }
    const double second = 8.0 / ((1.0 + 2.0 * x) * std::pow(hi, 1.0 + 2.0 * x));
    const double third = 1.0 / (x * std::pow(hi, 2.0 * x));
    return 4.0 * kPi * (first + second + third);
}

const std::vector<KernelInfo>& kernel_catalog() {
    static const std::vector<KernelInfo> cat = {
        {KernelId::f, "f", 0, "eps eta omega^-1/2 chi_kappa", "rho^-1/2"},
        {KernelId::beta, "beta", 0, "(omega + k^2/2)^-1 f", "rho^-5/2"},
        {KernelId::omega_beta, "omega_beta", 0, "omega beta", "rho^-3/2"},
        {KernelId::f_beta, "f_beta", 0, "f beta", "rho^-3"},
        {KernelId::beta_sq, "beta_sq", 0, "beta^2", "rho^-5"},
        {KernelId::m_beta, "m_beta", 1, "k beta", "rho^-3/2"},
        {KernelId::two_omega_beta, "two_omega_beta", 0, "2 omega beta", "rho^-3/2"},
    };
    return cat;
}

const KernelInfo& kernel_info(KernelId id) {
    for (const auto& k : kernel_catalog())
        if (k.id == id) return k;
    throw DomainError("unknown kernel id");
}

double kernel_radial(KernelId id, double rho, const ModelParams& p) {
    switch (id) {
        case KernelId::f: return coupling_f(rho, p);
        case KernelId::beta: return coupling_beta(rho, p);
        case KernelId::omega_beta: return dispersion(rho, p.mu) * coupling_beta(rho, p);
        case KernelId::f_beta: return coupling_f(rho, p) * coupling_beta(rho, p);
        case KernelId::beta_sq: {
            const double b = coupling_beta(rho, p);
            return b * b;
        }
        case KernelId::m_beta: return coupling_beta(rho, p);
        case KernelId::two_omega_beta: return 2.0 * dispersion(rho, p.mu) * coupling_beta(rho, p);
    }
    return 0.0;
}

AtomPairResult atom_pair_integral(const Atom& a, const Atom& b, double weight_exponent,
                                  const ModelParams& p) {
    AtomPairResult res;
    res.rank_a = kernel_info(a.kernel).rank;
    res.rank_b = kernel_info(b.kernel).rank;
    const Vec3 r{a.x[0] - b.x[0], a.x[1] - b.x[1], a.x[2] - b.x[2]};
    const double rn = std::sqrt(norm2(r));
    const Vec3 rhat = rn > 0.0 ? Vec3{r[0] / rn, r[1] / rn, r[2] / rn} : Vec3{0.0, 0.0, 0.0};
    const double s = a.damping + b.damping;
    const double lo = lower_limit(p, std::max(a.band_lo, b.band_lo));
    const double hi = upper_limit(p, kInf);
    auto G = [&](double rho) {
        const double w = dispersion(rho, p.mu);
        double g = kernel_radial(a.kernel, rho, p) * kernel_radial(b.kernel, rho, p);
        if (g == 0.0) return 0.0;
        if (s != 0.0) g *= std::exp(-s * w);
        if (weight_exponent != 0.0) g *= std::pow(w, weight_exponent);
        return g;
    };
    const int ranks = res.rank_a + res.rank_b;
    if (ranks == 0) {
        auto g = [&](double rho) { return rho * rho * G(rho) * sph_j0(rho * rn); };
        res.scalar = 4.0 * kPi * integrate_split(g, lo, hi, p);
        return res;
    }
    if (ranks == 1) {
        // int k G e^{ik.r} dk = i rhat 4 pi int rho^3 G j1(rho r) drho
        double val = 0.0;
        if (rn > 0.0) {
            auto g = [&](double rho) { return rho * rho * rho * G(rho) * sph_j1(rho * rn); };
            val = 4.0 * kPi * integrate_split(g, lo, hi, p);
        }
        for (int c = 0; c < 3; ++c) res.vec[c] = cplx(0.0, val * rhat[c]);
        return res;
    }
    // Rank 1 x rank 1: int k_a k_b G e^{ik.r} = 4 pi int rho^4 G [j1/z delta - j2 rhat rhat].
    auto gd = [&](double rho) {
        const double z = rho * rn;
        const double j1z = z < 1e-3 ? 1.0 / 3.0 - z * z / 30.0 : sph_j1(z) / z;
        return std::pow(rho, 4) * G(rho) * j1z;
    };
    const double diag = 4.0 * kPi * integrate_split(gd, lo, hi, p);
    double off = 0.0;
    if (rn > 0.0) {
        auto go = [&](double rho) { return std::pow(rho, 4) * G(rho) * sph_j2(rho * rn); };
        off = 4.0 * kPi * integrate_split(go, lo, hi, p);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            res.mat[3 * i + j] = cplx((i == j ? diag : 0.0) - off * rhat[i] * rhat[j], 0.0);
    return res;
}

}  // namespace nelson::kernel
