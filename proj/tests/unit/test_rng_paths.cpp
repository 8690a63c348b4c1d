#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nelson/paths.hpp"
#include "nelson/rng.hpp"

using namespace nelson;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using rng::Counter;
    CHECK(rng::philox4x32({0, 0, 0, 0}, {0, 0}) == Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("normal draws have unit variance") {
    double s = 0.0, s2 = 0.0, s4 = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i)
        for (double z : rng::normals4(3, 7, std::uint32_t(i), 0)) {
            s += z;
            s2 += z * z;
            s4 += z * z * z * z;
        }
    const double m = 4.0 * n;
    CHECK(std::abs(s / m) < 4.0 / std::sqrt(m));
    CHECK(std::abs(s2 / m - 1.0) < 4.0 * std::sqrt(2.0 / m));
    CHECK(std::abs(s4 / m - 3.0) < 0.1);
}

TEST_CASE("paths are reproducible per stream and independent across streams") {
    const auto a = paths::sample_path(9, 4, 100, 1e-2, 2);
    const auto b = paths::sample_path(9, 4, 100, 1e-2, 2);
    const auto c = paths::sample_path(9, 5, 100, 1e-2, 2);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.values.size() == 101 * 6);
    for (int d = 0; d < 6; ++d) CHECK(a.row(0)[d] == 0.0);
}

TEST_CASE("increments have variance dt") {
    const double dt = 0.01;
    double s2 = 0.0;
    int n = 0;
    for (int k = 0; k < 200; ++k) {
        const auto p = paths::sample_path(1, k, 50, dt, 1);
        for (int i = 0; i < 50; ++i)
            for (int d = 0; d < 3; ++d) {
                const double inc = p.row(i + 1)[d] - p.row(i)[d];
                s2 += inc * inc;
                ++n;
            }
    }
    CHECK(s2 / n / dt == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("path transforms") {
    const auto p = paths::sample_path(2, 0, 40, 0.05, 1);
    const auto r = paths::reverse_path(paths::reverse_path(p, 40), 40);
    for (size_t i = 0; i < p.values.size(); ++i) CHECK(r.values[i] == doctest::Approx(p.values[i]).epsilon(1e-14));
    const auto s = paths::shift_path(p, 10);
    CHECK(s.n_steps == 30);
    CHECK(s.row(5)[1] == doctest::Approx(p.row(15)[1] - p.row(10)[1]));
    const auto c = paths::coarsen_path(p, 4);
    CHECK(c.n_steps == 10);
    CHECK(c.dt == doctest::Approx(0.2));
    CHECK(c.row(3)[2] == p.row(12)[2]);
    const auto t = paths::truncate_path(p, 7);
    CHECK(t.n_steps == 7);
}

TEST_CASE("binary dump layout") {
    const auto p = paths::sample_path(2, 0, 5, 0.1, 2);
    std::ostringstream os;
    paths::dump_path(p, os);
    CHECK(os.str().size() == 5 * 8 + 6 * 6 * 8);
}
