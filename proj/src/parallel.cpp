#include "nelson/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <cstdlib>
#include <string>
#include <thread>

namespace nelson {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NELSON_FK_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

void parallel_for_index(int n, int threads, const std::function<void(int)>& fn) {
    const int t = resolve_threads(threads);
    if (t == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    tbb::global_control limit(tbb::global_control::max_allowed_parallelism, std::size_t(t));
    tbb::task_arena arena(t);
    arena.execute([&] {
        tbb::parallel_for(tbb::blocked_range<int>(0, n), [&](const tbb::blocked_range<int>& r) {
            for (int i = r.begin(); i != r.end(); ++i) fn(i);
        });
    });
}

}  // namespace nelson
