#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nelson/fock.hpp"
#include "nelson/parallel.hpp"

namespace nelson::verify {

struct Check {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::uint64_t seed = 0;
    std::string detail;
};

struct Report {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0.0;
    bool passed() const;
};

struct SuiteConfig {
    kernel::ModelParams p;  // kappa defaults to 4 for the suites that need a finite cutoff
    McControls mc;
    int probes = 100;
    double t = 1.0;
    SuiteConfig();
};

const std::vector<std::string>& suite_names();
// Throws ConfigError for an unknown suite.
Report run_suite(const std::string& name, const SuiteConfig& cfg);
std::string to_json(const Report& r);

// Random one-boson vector with a decaying envelope and norm drawn from [0.2, 0.8].
fock::Vector random_probe(const field::MomentumGrid& grid, std::uint64_t seed, std::uint64_t index);

// Central-difference derivative of a complex function at 0, Richardson-extrapolated twice.
template <class F>
cplx richardson_derivative(F&& fn, double h) {
    auto d = [&](double s) { return (fn(s) - fn(-s)) / (2.0 * s); };
    const cplx d1 = d(h), d2 = d(h / 2), d3 = d(h / 4);
    const cplx r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d3 - d2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

// Individual checks, shared with the acceptance runner.
std::vector<Check> fock_algebra_checks(const field::MomentumGrid& grid, int probes, std::uint64_t seed);
std::vector<Check> identity_checks(const kernel::ModelParams& p, double t, int n_paths, double dt,
                                   std::uint64_t seed);

struct RefinementResult {
    std::vector<double> dt, value;
    double order = 0.0;
};
// Mean per-path |u_direct - u_decomposed| under step refinement (common fine paths).
RefinementResult decomposition_refinement(const kernel::ModelParams& p, const std::vector<double>& x, double t,
                                          const std::vector<double>& dts, int n_paths, std::uint64_t seed);
// Mean relative Markov residual under refinement, W_s W_t against W_{s+t} at s = t = T/2.
RefinementResult markov_refinement(const kernel::ModelParams& p, double t, const std::vector<double>& dts,
                                   int n_paths, std::uint64_t seed);

}  // namespace nelson::verify
