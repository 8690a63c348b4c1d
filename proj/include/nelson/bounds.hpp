#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nelson/common.hpp"

namespace nelson::bounds {

inline constexpr double kPekarEnergy = -0.10851;

enum class MomentBound { expbdu, expbdUpmN, bdWp, scheutzow };

// Universal constants left symbolic in the estimates; all default to 1.
struct BoundConstants {
    double b = 1.0;
    double c = 1.0;
    double c_v = 0.0;  // Kato constant of the negative part of V in the W bound
    double q = 2.0;    // second Hoelder index of the martingale constant
};

MomentBound parse_moment_bound(const std::string& name);
const char* moment_bound_name(MomentBound which);

// A(q, N, t) = cN(1 + ln[1 + qN(1 v t)]) + cqN^2(1 + ln[1 v t]).
double a_term(double q, int N, double t, double c = 1.0);
// [1 + (4 ^ q)(pi/q)/sin(pi/q)]^{1/p'} for p, q > 1.
double scheutzow_constant(double p, double q);

// Right-hand side of the selected exponential moment estimate.
double exp_moment_rhs(MomentBound which, double p, double eps, int N, double t, const BoundConstants& k = {});

struct SpectralConstants {
    double c_lower = 1.0;
    double c_upper = 1.0;
    double q = 1.0;
};

struct SpectralBounds {
    double lower = 0.0;
    std::optional<double> upper;  // only when eps^2 N > 4
    double lower_leading = 0.0;   // coefficient of eps^4 N^3
    double upper_leading = 0.0;
};

// -256 pi^2 q eps^4 N^3 - c eps^2 N^2, evaluated without a regime check.
double lower_bound_formula(double eps, int N, double q = 1.0, double c = 1.0);
// 8 pi^4 eps^4 N^3 E_P + c (1 + mu + ln(eps^2 N)) eps^2 N^2.
double upper_bound_formula(double eps, int N, double mu, double c = 1.0);
// Throws RegimeError for eps^2 N < 1.
SpectralBounds spectral_bounds(double eps, int N, double mu, const SpectralConstants& k = {});

// Radial trial profiles for the Pekar functional.
struct PekarTrial {
    enum class Kind { gaussian, hydrogenic, tabulated };
    Kind kind = Kind::gaussian;
    std::vector<double> r, g;  // tabulated profile, linearly interpolated, zero beyond the last node
};

struct PekarTerms {
    double norm = 0.0;        // ||g||^2
    double kinetic = 0.0;     // ||grad g||^2 / 2
    double attraction = 0.0;  // (4 pi / sqrt 2) int |rho^|^2 / m^2
};

struct PekarResult {
    double energy = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double scale = 0.0;  // optimal dilation sigma (g_sigma(x) = sigma^{3/2} g(sigma x))
};

// Both terms of the functional for the dilated trial g_sigma.
PekarTerms pekar_terms(const PekarTrial& trial, double sigma = 1.0, double rel_tol = 1e-11);
// Coulomb term from the real-space radial potential; an independent route to `attraction`.
double pekar_attraction_direct(const PekarTrial& trial);
// min over sigma of alpha sigma^2 - beta sigma with beta scaled by attraction_coef.
PekarResult pekar_energy(const PekarTrial& trial, double attraction_coef = 1.0, double rel_tol = 1e-11);

struct PairDistribution {
    double mu = 0.0;
    double sigma = 0.25;  // X = exp(mu + sigma Z) marginally
    double mix = 1.0;     // share of the variance carried by the site seeds
};

struct PairLemmaReport {
    int N = 0;
    std::int64_t trials = 0;
    double lhs = 0.0, lhs_err = 0.0;
    double rhs = 0.0, rhs_err = 0.0;
    double rhs_exact = 0.0;  // lognormal closed form of the same right side
    bool violated = false;
};

// E[prod X_p] against Y_N(N-1)^{N/2} (even N) or Y_N(N)^{(N-1)/2} (odd N).
PairLemmaReport pair_lemma_check(int N, const PairDistribution& dist, std::int64_t trials, std::uint64_t seed);

struct BoundRow {
    std::string quantity, formula;
    double value = 0.0;
    std::string regime, anchor;
};

std::vector<BoundRow> bound_table(double eps, int N, double mu, double t, double p, const BoundConstants& k = {});

}  // namespace nelson::bounds
