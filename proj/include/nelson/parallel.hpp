#pragma once

#include <cstdint>
#include <functional>

namespace nelson {

// Monte Carlo controls shared by all estimators.
struct McControls {
    int n_paths = 1024;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: NELSON_FK_THREADS, else hardware concurrency
};

// Worker count from the argument, the NELSON_FK_THREADS variable, or the hardware.
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n) on a pool of the given size. Callers write results into
// per-index slots and reduce them in index order, so output never depends on scheduling.
void parallel_for_index(int n, int threads, const std::function<void(int)>& fn);

}  // namespace nelson
