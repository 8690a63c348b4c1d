#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nelson/common.hpp"

namespace nelson::paths {

// Grid-sampled Brownian motion in R^{3N}; values[0] is the origin.
struct BrownianPath {
    double dt = 0.0;
    int n_steps = 0;
    int n_particles = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> values;  // (n_steps + 1) rows of 3N coordinates

    int dim() const { return 3 * n_particles; }
    const double* row(int step) const { return values.data() + std::size_t(step) * dim(); }
    Vec3 position(int step, int particle) const;
    double time(int step) const { return step * dt; }
};

BrownianPath sample_path(std::uint64_t seed, std::uint64_t stream, int n_steps, double dt,
                         int n_particles);

// s -> alpha_{t-s} - alpha_t on [0, t]; an involution on the grid.
BrownianPath reverse_path(const BrownianPath& path, int t_index);
// s -> alpha_{t+s} - alpha_t on [0, T - t].
BrownianPath shift_path(const BrownianPath& path, int t_index);
// Restriction to [0, t].
BrownianPath truncate_path(const BrownianPath& path, int t_index);
// Every factor-th grid point; used for step-refinement studies on a common fine path.
BrownianPath coarsen_path(const BrownianPath& path, int factor);

// Little-endian binary layout: f64 dt, i64 n_steps, i64 N, u64 seed, u64 stream, then
// (n_steps + 1) * 3N f64 values.
void dump_path(const BrownianPath& path, std::ostream& os);
BrownianPath load_path(std::istream& is);

}  // namespace nelson::paths
