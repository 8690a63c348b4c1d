#include "nelson/bounds.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nelson/kernel.hpp"
#include "nelson/parallel.hpp"
#include "nelson/rng.hpp"

namespace nelson::bounds {

using std::numbers::pi;

MomentBound parse_moment_bound(const std::string& name) {
    if (name == "expbdu") return MomentBound::expbdu;
    if (name == "expbdUpmN") return MomentBound::expbdUpmN;
    if (name == "bdWp") return MomentBound::bdWp;
    if (name == "scheutzow") return MomentBound::scheutzow;
    throw DomainError("unknown moment bound: " + name);
}

const char* moment_bound_name(MomentBound which) {
    switch (which) {
        case MomentBound::expbdu: return "expbdu";
        case MomentBound::expbdUpmN: return "expbdUpmN";
        case MomentBound::bdWp: return "bdWp";
        case MomentBound::scheutzow: return "scheutzow";
    }
    return "?";
}

double a_term(double q, int N, double t, double c) {
    if (q < 0.0 || N < 1 || t < 0.0) throw DomainError("A(q, N, t) needs q >= 0, N >= 1, t >= 0");
    const double t1 = std::max(1.0, t);
    return c * N * (1.0 + std::log1p(q * N * t1)) + c * q * N * N * (1.0 + std::log(t1));
}

double scheutzow_constant(double p, double q) {
    if (!(p > 1.0) || !(q > 1.0)) throw DomainError("martingale constant needs p, q > 1");
    const double p_conj = p / (p - 1.0);
    return std::pow(1.0 + std::min(4.0, q) * (pi / q) / std::sin(pi / q), 1.0 / p_conj);
}

double exp_moment_rhs(MomentBound which, double p, double eps, int N, double t, const BoundConstants& k) {
    if (!(p > 0.0)) throw DomainError("moment order p must be positive");
    if (N < 1) throw DomainError("N must be at least 1");
    if (t < 0.0) throw DomainError("t must be non-negative");
    const double e2 = eps * eps, e4 = e2 * e2, n = N;
    const double t1 = std::max(1.0, t);
    switch (which) {
        case MomentBound::expbdu: return std::pow(k.b, n) * std::exp(k.c * p * p * e4 * n * n * n * t);
        case MomentBound::expbdUpmN:
            return std::pow(k.b, n) * std::pow(1.0 + p * e2 * n * t1, n) *
                   std::exp(k.c * p * e2 * n * n * (1.0 + std::log(t1)) + k.c * p * p * e4 * n * n * n);
        case MomentBound::bdWp:
            return std::exp(k.c * p * p * e4 * n * n * n * t1 + a_term(p * e2, N, t, k.c) + k.c_v * t);
        case MomentBound::scheutzow: return scheutzow_constant(p, k.q);
    }
    return 0.0;
}

double lower_bound_formula(double eps, int N, double q, double c) {
    const double e2 = eps * eps, n = N;
    return -256.0 * pi * pi * q * e2 * e2 * n * n * n - c * e2 * n * n;
}

double upper_bound_formula(double eps, int N, double mu, double c) {
    const double e2 = eps * eps, n = N;
    return 8.0 * std::pow(pi, 4) * e2 * e2 * n * n * n * kPekarEnergy + c * (1.0 + mu + std::log(e2 * n)) * e2 * n * n;
}

SpectralBounds spectral_bounds(double eps, int N, double mu, const SpectralConstants& k) {
    if (N < 1) throw DomainError("N must be at least 1");
    const double x = eps * eps * N;
    if (x < 1.0) throw RegimeError("the lower bound needs eps^2 N >= 1");
    SpectralBounds b;
    b.lower_leading = -256.0 * pi * pi * k.q;
    b.upper_leading = 8.0 * std::pow(pi, 4) * kPekarEnergy;
    b.lower = lower_bound_formula(eps, N, k.q, k.c_lower);
    if (x > 4.0) b.upper = upper_bound_formula(eps, N, mu, k.c_upper);
    return b;
}

namespace {

struct Profile {
    const PekarTrial* trial;
    double sigma;

    double base(double r) const {
        switch (trial->kind) {
            case PekarTrial::Kind::gaussian: return std::pow(pi, -0.75) * std::exp(-0.5 * r * r);
            case PekarTrial::Kind::hydrogenic: return std::exp(-r) / std::sqrt(pi);
            case PekarTrial::Kind::tabulated: {
                const auto& R = trial->r;
                const auto& G = trial->g;
                if (r >= R.back()) return 0.0;
                if (r <= R.front()) return G.front();
                const size_t j = size_t(std::upper_bound(R.begin(), R.end(), r) - R.begin());
                const double s = (r - R[j - 1]) / (R[j] - R[j - 1]);
                return (1.0 - s) * G[j - 1] + s * G[j];
            }
        }
        return 0.0;
    }
    double base_deriv(double r) const {
        switch (trial->kind) {
            case PekarTrial::Kind::gaussian: return -r * base(r);
            case PekarTrial::Kind::hydrogenic: return -base(r);
            case PekarTrial::Kind::tabulated: {
                const auto& R = trial->r;
                const auto& G = trial->g;
                if (r >= R.back() || r < R.front()) return 0.0;
                const size_t j = size_t(std::upper_bound(R.begin(), R.end(), r) - R.begin());
                return (G[j] - G[j - 1]) / (R[j] - R[j - 1]);
            }
        }
        return 0.0;
    }
    double value(double r) const { return std::pow(sigma, 1.5) * base(sigma * r); }
    double deriv(double r) const { return std::pow(sigma, 2.5) * base_deriv(sigma * r); }
    double rho(double r) const {
        const double g = value(r);
        return g * g;
    }
    // Radial integration pieces: tabulated profiles are split at their nodes.
    std::vector<double> edges() const {
        if (trial->kind == PekarTrial::Kind::gaussian) return {0.0, 2.0 / sigma, 5.0 / sigma, 14.0 / sigma};
        if (trial->kind == PekarTrial::Kind::hydrogenic) return {0.0, 2.0 / sigma, 10.0 / sigma, 45.0 / sigma};
        std::vector<double> e{0.0};
        for (double r : trial->r)
            if (r > 0.0) e.push_back(r / sigma);
        return e;
    }
};

double integrate_pieces(const std::function<double(double)>& f, const std::vector<double>& e, double tol,
                        double abs_tol = 0.0) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < e.size(); ++i) s += kernel::integrate_radial(f, e[i], e[i + 1], tol, abs_tol);
    return s;
}

// Fixed-order Gauss-Legendre on panels no wider than h; used for the oscillatory Hankel integrand.
double gl_pieces(const std::function<double(double)>& f, const std::vector<double>& e, double h) {
    static gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(32);
    double s = 0.0;
    for (size_t i = 0; i + 1 < e.size(); ++i) {
        const int m = std::max(1, int(std::ceil((e[i + 1] - e[i]) / h)));
        const double w = (e[i + 1] - e[i]) / m;
        for (int j = 0; j < m; ++j) {
            const double a = e[i] + j * w;
            for (size_t q = 0; q < 32; ++q) {
                double x, wt;
                gsl_integration_glfixed_point(a, a + w, q, &x, &wt, tab);
                s += wt * f(x);
            }
        }
    }
    return s;
}

void check_trial(const PekarTrial& t) {
    if (t.kind != PekarTrial::Kind::tabulated) return;
    if (t.r.size() < 2 || t.r.size() != t.g.size()) throw DomainError("tabulated trial needs matching r and g tables");
    for (size_t i = 1; i < t.r.size(); ++i)
        if (!(t.r[i] > t.r[i - 1])) throw DomainError("tabulated trial radii must increase");
}

}  // namespace

PekarTerms pekar_terms(const PekarTrial& trial, double sigma, double rel_tol) {
    check_trial(trial);
    if (!(sigma > 0.0)) throw DomainError("dilation must be positive");
    const Profile pr{&trial, sigma};
    const auto e = pr.edges();
    PekarTerms out;
    out.norm = 4.0 * pi * integrate_pieces([&](double r) { return pr.rho(r) * r * r; }, e, rel_tol);
    out.kinetic = 2.0 * pi * integrate_pieces([&](double r) {
        const double d = pr.deriv(r);
        return d * d * r * r;
    }, e, rel_tol);
    // rho^(k) = sqrt(2/pi) int rho(r) r^2 j0(kr) dr, then int |rho^|^2 / k^2 d^3k = 4 pi int |rho^|^2 dk.
    // rho^(k) = (2 pi)^{-3/2} int e^{-ik.x} rho = sqrt(2/pi) int rho(r) r^2 j0(kr) dr; closed forms for the
    // analytic families, panel quadrature for tables.
    auto rho_hat = [&](double k) {
        const double c = std::pow(2.0 * pi, -1.5);
        switch (trial.kind) {
            case PekarTrial::Kind::gaussian: return c * std::exp(-k * k / (4.0 * sigma * sigma));
            case PekarTrial::Kind::hydrogenic: {
                const double s2 = 4.0 * sigma * sigma;
                return c * s2 * s2 / ((s2 + k * k) * (s2 + k * k));
            }
            case PekarTrial::Kind::tabulated: break;
        }
        return std::sqrt(2.0 / pi) *
               gl_pieces([&](double r) { return pr.rho(r) * r * r * kernel::sph_j0(k * r); }, e,
                         std::min(0.25 / sigma, 1.0 / std::max(k, 1e-300)));
    };
    // int |rho^|^2 / k^2 d^3k = 4 pi int |rho^|^2 dk.
    std::vector<double> ke{0.0, 2.0 * sigma, 8.0 * sigma, 40.0 * sigma, kernel::kInf};
    double I = 0.0;
    if (trial.kind == PekarTrial::Kind::tabulated) {
        // TODO: add an asymptotic tail beyond k = 60 sigma for tables with coarse spacing.
        ke = {0.0, 2.0 * sigma, 8.0 * sigma, 20.0 * sigma, 60.0 * sigma};
        I = 4.0 * pi * gl_pieces([&](double k) {
            const double v = rho_hat(k);
            return v * v;
        }, ke, sigma);
    } else {
        I = 4.0 * pi * integrate_pieces([&](double k) {
            const double v = rho_hat(k);
            return v * v;
        }, ke, rel_tol, 1e-300);
    }
    out.attraction = 4.0 * pi / std::sqrt(2.0) * I;
    return out;
}

double pekar_attraction_direct(const PekarTrial& trial) {
    check_trial(trial);
    const Profile pr{&trial, 1.0};
    // D = int int rho(x) rho(y) / |x - y| = 32 pi^2 int rho(r) r M(r) dr with M(r) = int_0^r rho s^2 ds.
    std::vector<double> e = pr.edges();
    if (std::isinf(e.back())) e.pop_back();
    static gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(32);
    auto gl = [&](double a, double b, const std::function<double(double)>& f) {
        double s = 0.0;
        for (size_t q = 0; q < 32; ++q) {
            double x, w;
            gsl_integration_glfixed_point(a, b, q, &x, &w, tab);
            s += w * f(x);
        }
        return s;
    };
    auto mass = [&](double r) { return pr.rho(r) * r * r; };
    double M = 0.0, D = 0.0;
    for (size_t i = 0; i + 1 < e.size(); ++i) {
        const int m = std::max(1, int(std::ceil((e[i + 1] - e[i]) / 0.1)));
        const double w = (e[i + 1] - e[i]) / m;
        for (int j = 0; j < m; ++j) {
            const double a = e[i] + j * w;
            D += gl(a, a + w, [&](double r) { return pr.rho(r) * r * (M + gl(a, r, mass)); });
            M += gl(a, a + w, mass);
        }
    }
    return 32.0 * pi * pi * D / std::sqrt(2.0);
}

PekarResult pekar_energy(const PekarTrial& trial, double attraction_coef, double rel_tol) {
    const PekarTerms t = pekar_terms(trial, 1.0, rel_tol);
    if (std::abs(t.norm - 1.0) > 1e-6) throw NormalizationError("trial profile is not normalized");
    PekarResult r;
    r.alpha = t.kinetic;
    r.beta = attraction_coef * t.attraction;
    r.scale = r.beta / (2.0 * r.alpha);
    r.energy = -r.beta * r.beta / (4.0 * r.alpha);
    return r;
}

PairLemmaReport pair_lemma_check(int N, const PairDistribution& dist, std::int64_t trials, std::uint64_t seed) {
    if (N < 2 || N > 6) throw DomainError("pair lemma check supports N in 2..6");
    if (trials < 2) throw DomainError("need at least two trials");
    if (dist.mix < 0.0 || dist.mix > 1.0) throw DomainError("mix must lie in [0, 1]");
    const int n_pairs = N * (N - 1) / 2;
    const double s = (N % 2 == 0) ? N - 1.0 : double(N);
    const double ex = (N % 2 == 0) ? N / 2.0 : (N - 1) / 2.0;
    const int chunks = 64;
    struct Acc {
        double lsum = 0, lsq = 0, lmax = 0, ysum = 0, ysq = 0;
        bool finite = true;
    };
    std::vector<Acc> acc(chunks);
    const double a = std::sqrt(dist.mix / 2.0), b = std::sqrt(1.0 - dist.mix);
    parallel_for_index(chunks, 0, [&](int c) {
        const std::int64_t lo = trials * c / chunks, hi = trials * (c + 1) / chunks;
        Acc& A = acc[c];
        std::vector<double> z(N + n_pairs + 4);
        for (std::int64_t m = lo; m < hi; ++m) {
            for (int j = 0; j < int(z.size()); j += 4) {
                const auto v = rng::normals4(seed, std::uint64_t(m), std::uint32_t(j / 4), 0);
                for (int q = 0; q < 4 && j + q < int(z.size()); ++q) z[j + q] = v[q];
            }
            double logp = 0.0, ys = 0.0;
            int pidx = 0;
            for (int i = 0; i < N; ++i)
                for (int j = i + 1; j < N; ++j, ++pidx) {
                    const double lx = dist.mu + dist.sigma * (a * (z[i] + z[j]) + b * z[N + pidx]);
                    logp += lx;
                    ys += std::exp(s * lx);
                }
            const double prod = std::exp(logp);
            const double y = ys / n_pairs;
            if (!std::isfinite(prod) || !std::isfinite(y)) A.finite = false;
            A.lsum += prod;
            A.lsq += prod * prod;
            A.lmax = std::max(A.lmax, prod);
            A.ysum += y;
            A.ysq += y * y;
        }
    });
    Acc T;
    for (const Acc& A : acc) {
        T.lsum += A.lsum;
        T.lsq += A.lsq;
        T.lmax = std::max(T.lmax, A.lmax);
        T.ysum += A.ysum;
        T.ysq += A.ysq;
        T.finite = T.finite && A.finite;
    }
    if (!T.finite) throw MomentError("non-finite pair moments");
    if (T.lmax > 0.5 * T.lsum) throw MomentError("product moment dominated by a single sample");
    const double n = double(trials);
    PairLemmaReport r;
    r.N = N;
    r.trials = trials;
    r.lhs = T.lsum / n;
    r.lhs_err = std::sqrt(std::max(0.0, T.lsq / n - r.lhs * r.lhs) / (n - 1.0));
    const double Y = T.ysum / n;
    const double Y_err = std::sqrt(std::max(0.0, T.ysq / n - Y * Y) / (n - 1.0));
    r.rhs = std::pow(Y, ex);
    r.rhs_err = ex * std::pow(Y, ex - 1.0) * Y_err;
    r.rhs_exact = std::exp(ex * (s * dist.mu + 0.5 * s * s * dist.sigma * dist.sigma));
    r.violated = r.lhs > r.rhs + 3.0 * std::hypot(r.lhs_err, r.rhs_err);
    return r;
}

std::vector<BoundRow> bound_table(double eps, int N, double mu, double t, double p, const BoundConstants& k) {
    std::vector<BoundRow> rows;
    rows.push_back({"E sup exp(p u)", "b^N exp(c p^2 eps^4 N^3 t)", exp_moment_rhs(MomentBound::expbdu, p, eps, N, t, k),
                    "all p,t >= 0", "exponential moment of the complex action"});
    rows.push_back({"E sup exp(p |U+-|^2)",
                    "b^N (1 + p eps^2 N (1 v t))^N exp(c p eps^2 N^2 (1 + ln(1 v t)) + c p^2 eps^4 N^3)",
                    exp_moment_rhs(MomentBound::expbdUpmN, p, eps, N, t, k), "all p,t >= 0",
                    "exponential moment of the U processes"});
    rows.push_back({"E sup |W|^p", "exp(c p^2 eps^4 N^3 (1 v t) + A(p eps^2, N, t) + c_V t)",
                    exp_moment_rhs(MomentBound::bdWp, p, eps, N, t, k), "all p,t > 0", "L^p norm of the integrand"});
    rows.push_back({"A(p eps^2, N, t)", "c N (1 + ln[1 + q N (1 v t)]) + c q N^2 (1 + ln[1 v t])",
                    a_term(p * eps * eps, N, t, k.c), "all", "lower-order term of the integrand bound"});
    if (p > 1.0 && k.q > 1.0)
        rows.push_back({"c_{p,q}", "[1 + (4 ^ q)(pi/q)/sin(pi/q)]^{1/p'}", scheutzow_constant(p, k.q), "p,q > 1",
                        "martingale supremum constant"});
    rows.push_back({"lower leading", "-256 pi^2", -256.0 * pi * pi, "eps^2 N >= 1", "spectral lower bound"});
    rows.push_back({"upper leading", "8 pi^4 E_P", 8.0 * std::pow(pi, 4) * kPekarEnergy, "eps^2 N > 4",
                    "spectral upper bound"});
    const double x = eps * eps * N;
    rows.push_back({"lower bound", "-256 pi^2 eps^4 N^3 - c eps^2 N^2", lower_bound_formula(eps, N),
                    x >= 1.0 ? "valid" : "outside eps^2 N >= 1", "spectral lower bound"});
    if (x > 4.0)
        rows.push_back({"upper bound", "8 pi^4 eps^4 N^3 E_P + c (1 + mu + ln(eps^2 N)) eps^2 N^2",
                        upper_bound_formula(eps, N, mu), "valid", "spectral upper bound"});
    rows.push_back({"E_P", "inf of the Pekar functional", kPekarEnergy, "constant", "Pekar energy"});
    return rows;
}

}  // namespace nelson::bounds
