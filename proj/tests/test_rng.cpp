#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "reprocs/rng.hpp"

using reprocs::Rng;

TEST_CASE("same seed reproduces the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("different seeds and different split labels diverge") {
    Rng a(1), b(2);
    CHECK(a.next_u64() != b.next_u64());

    Rng root(7);
    Rng c1 = root.split(1), c2 = root.split(2);
    CHECK(c1.next_u64() != c2.next_u64());

    // Splitting is independent of draws made on the parent.
    Rng root2(7);
    root2.next_u64();
    Rng c1_again = root2.split(1);
    CHECK(c1_again.next_u64() == root.split(1).next_u64());
}

TEST_CASE("string split labels are stable") {
    Rng root(99);
    CHECK(root.split("coefficients").next_u64() ==
          root.split("coefficients").next_u64());
    CHECK(root.split("coefficients").next_u64() !=
          root.split("sparse-values").next_u64());
}

TEST_CASE("uniform01 lies in [0,1) and has a sane mean") {
    Rng rng(5);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        acc += u;
    }
    CHECK(std::abs(acc / n - 0.5) < 0.01);
}

TEST_CASE("uniform_int covers its range inclusively") {
    Rng rng(11);
    std::set<long> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.uniform_int(3, 7);
        REQUIRE(v >= 3);
        REQUIRE(v <= 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("normal moments") {
    Rng rng(13);
    const int n = 200000;
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        mean += z;
        m2 += z * z;
    }
    mean /= n;
    m2 /= n;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(m2 - 1.0) < 0.02);
}

TEST_CASE("bernoulli frequency tracks p") {
    Rng rng(17);
    int hits = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3);
    CHECK(std::abs(hits / static_cast<double>(n) - 0.3) < 0.01);
}
