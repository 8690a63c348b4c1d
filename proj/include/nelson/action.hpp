#pragma once

#include <optional>
#include <vector>

#include "nelson/fieldstate.hpp"
#include "nelson/parallel.hpp"

namespace nelson::action {

using field::MomentumGrid;
using field::RadialTerms;
using kernel::Band;
using kernel::ModelParams;

struct ActionBreakdown {
    double t = 0.0;
    double b = 0.0;
    double c_minus = 0.0;
    double c_plus = 0.0;
    double v = 0.0;
    double m = 0.0;
    double u_total = 0.0;  // -b + c_minus - c_plus + v + m
    std::optional<double> u_direct;
    double tail = 0.0;  // contribution of the outer radial half of the grid
    ModelParams params;
};

// chi_kappa(rho_i) times the band indicator at every radial node.
std::vector<double> radial_scale(const MomentumGrid& grid, const ModelParams& p, Band band = {});
// Squares of radial_scale; the weight of every bilinear radial accumulator.
std::vector<double> radial_weight(const MomentumGrid& grid, const ModelParams& p, Band band = {});

ActionBreakdown combine(const RadialTerms& terms, const std::vector<double>& weight,
                        const MomentumGrid& grid, const ModelParams& p);
double direct_value(const RadialTerms& terms, const std::vector<double>& weight);
double decomposed_value(const RadialTerms& terms, const std::vector<double>& weight);

struct ActionOptions {
    double tail_tol = 0.25;  // GridTailError threshold for cutoff-free runs
};

// Builds the grid, evolves the states along the path up to t_index and combines.
ActionBreakdown action_decomposed(const paths::BrownianPath& path, const std::vector<double>& x,
                                  int t_index, const ModelParams& p, ActionOptions opt = {});
double action_direct(const paths::BrownianPath& path, const std::vector<double>& x, int t_index,
                     const ModelParams& p);

struct IrSplit {
    double u_lt = 0.0;
    double u_gt = 0.0;
};
IrSplit ir_split(const paths::BrownianPath& path, const std::vector<double>& x, int t_index,
                 double lambda, const ModelParams& p);
IrSplit ir_split(const RadialTerms& terms, const MomentumGrid& grid, double lambda,
                 const ModelParams& p);

struct ConvergenceRow {
    double kappa = 0.0;
    double value = 0.0;  // E[sup |u_kappa - u_inf|^p]^{1/p}
    double std_err = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double p = 1.0;
    int n_paths = 0;
    double tail_max = 0.0;
};

// Common random numbers across kappa: one path, one field evolution, all cutoffs at once.
// The supremum runs over `checkpoints` equally spaced times in (0, t].
ConvergenceTable action_convergence_stat(const std::vector<double>& x, double t,
                                         const std::vector<double>& kappas, const ModelParams& p,
                                         const McControls& mc, double p_exp = 1.0,
                                         int checkpoints = 1);

}  // namespace nelson::action
