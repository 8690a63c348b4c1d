#include "nelson/paths.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

#include "nelson/rng.hpp"

namespace nelson::paths {

Vec3 BrownianPath::position(int step, int particle) const {
    const double* r = row(step) + 3 * particle;
    return {r[0], r[1], r[2]};
}

BrownianPath sample_path(std::uint64_t seed, std::uint64_t stream, int n_steps, double dt,
                         int n_particles) {
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (n_steps < 0) throw DomainError("n_steps must be >= 0");
    if (n_particles < 1) throw DomainError("n_particles must be >= 1");
    BrownianPath p;
    p.dt = dt;
    p.n_steps = n_steps;
    p.n_particles = n_particles;
    p.seed = seed;
    p.stream = stream;
    const int d = p.dim();
    p.values.assign(std::size_t(n_steps + 1) * d, 0.0);
    const double sd = std::sqrt(dt);
    const int blocks = (d + 3) / 4;
    for (int n = 0; n < n_steps; ++n) {
        const double* prev = p.values.data() + std::size_t(n) * d;
        double* next = p.values.data() + std::size_t(n + 1) * d;
        for (int b = 0; b < blocks; ++b) {
            const auto z = rng::normals4(seed, stream, std::uint32_t(n), std::uint32_t(b));
            for (int c = 4 * b; c < std::min(d, 4 * b + 4); ++c) next[c] = prev[c] + sd * z[c - 4 * b];
        }
    }
    return p;
}

namespace {

BrownianPath with_rows(const BrownianPath& src, int n_steps) {
    BrownianPath p;
    p.dt = src.dt;
    p.n_steps = n_steps;
    p.n_particles = src.n_particles;
    p.seed = src.seed;
    p.stream = src.stream;
    p.values.assign(std::size_t(n_steps + 1) * src.dim(), 0.0);
    return p;
}

void check_index(const BrownianPath& path, int t_index) {
    if (t_index < 0 || t_index > path.n_steps) throw IndexError("time index out of range");
}

}  // namespace

BrownianPath reverse_path(const BrownianPath& path, int t_index) {
    check_index(path, t_index);
    BrownianPath p = with_rows(path, t_index);
    const int d = path.dim();
    const double* end = path.row(t_index);
    for (int s = 0; s <= t_index; ++s) {
        const double* src = path.row(t_index - s);
        double* dst = p.values.data() + std::size_t(s) * d;
        for (int c = 0; c < d; ++c) dst[c] = src[c] - end[c];
    }
    return p;
}

BrownianPath shift_path(const BrownianPath& path, int t_index) {
    check_index(path, t_index);
    BrownianPath p = with_rows(path, path.n_steps - t_index);
    const int d = path.dim();
    const double* start = path.row(t_index);
    for (int s = 0; s <= p.n_steps; ++s) {
        const double* src = path.row(t_index + s);
        double* dst = p.values.data() + std::size_t(s) * d;
        for (int c = 0; c < d; ++c) dst[c] = src[c] - start[c];
    }
    return p;
}

BrownianPath truncate_path(const BrownianPath& path, int t_index) {
    check_index(path, t_index);
    BrownianPath p = with_rows(path, t_index);
    std::copy(path.values.begin(), path.values.begin() + p.values.size(), p.values.begin());
    return p;
}

BrownianPath coarsen_path(const BrownianPath& path, int factor) {
    if (factor < 1) throw DomainError("coarsening factor must be >= 1");
    if (path.n_steps % factor != 0) throw DomainError("n_steps not divisible by coarsening factor");
    BrownianPath p = with_rows(path, path.n_steps / factor);
    p.dt = path.dt * factor;
    const int d = path.dim();
    for (int s = 0; s <= p.n_steps; ++s) {
        const double* src = path.row(s * factor);
        std::copy(src, src + d, p.values.begin() + std::size_t(s) * d);
    }
    return p;
}

namespace {

template <class T>
void put(std::ostream& os, T v) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw DomainError("truncated path dump");
    return v;
}

}  // namespace

void dump_path(const BrownianPath& path, std::ostream& os) {
    put<double>(os, path.dt);
    put<std::int64_t>(os, path.n_steps);
    put<std::int64_t>(os, path.n_particles);
    put<std::uint64_t>(os, path.seed);
    put<std::uint64_t>(os, path.stream);
    os.write(reinterpret_cast<const char*>(path.values.data()),
             std::streamsize(path.values.size() * sizeof(double)));
}

BrownianPath load_path(std::istream& is) {
    BrownianPath p;
    p.dt = get<double>(is);
    p.n_steps = int(get<std::int64_t>(is));
    p.n_particles = int(get<std::int64_t>(is));
    p.seed = get<std::uint64_t>(is);
    p.stream = get<std::uint64_t>(is);
    if (p.n_steps < 0 || p.n_particles < 1) throw DomainError("corrupt path header");
    p.values.resize(std::size_t(p.n_steps + 1) * p.dim());
    is.read(reinterpret_cast<char*>(p.values.data()), std::streamsize(p.values.size() * sizeof(double)));
    if (!is) throw DomainError("truncated path dump");
    return p;
}

}  // namespace nelson::paths
