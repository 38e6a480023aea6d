#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "eivuq/math.hpp"

using namespace eivuq;
using Catch::Approx;

TEST_CASE("logistic matches frozen scalar values") {
    CHECK(logistic(0.0) == 0.5);
    CHECK(logistic(2.0) == Approx(0.8807970779778823).margin(1e-15));
    CHECK(logistic(-2.0) == Approx(1.0 - 0.8807970779778823).margin(1e-15));
    CHECK(logistic(1.0) == Approx(0.7310585786300049).margin(1e-15));
    CHECK(logistic(3.0) == Approx(0.9525741268224334).margin(1e-15));
}

TEST_CASE("logistic saturates without NaN") {
    CHECK(logistic(-2000.0) == 0.0);
    CHECK(logistic(2000.0) == 1.0);
    CHECK(std::isfinite(logistic(700.0)));
    CHECK(std::isfinite(logistic(-700.0)));
}

TEST_CASE("softplus is stable at both extremes") {
    CHECK(softplus(0.0) == Approx(std::log(2.0)));
    CHECK(softplus(1000.0) == Approx(1000.0));
    CHECK(softplus(-1000.0) == 0.0);
    // softplus(t) - softplus(-t) == t
    for (double t : {-5.0, -0.5, 0.3, 2.0, 30.0})
        CHECK(softplus(t) - softplus(-t) == Approx(t).margin(1e-12));
}

TEST_CASE("bernoulli entropy endpoints and frozen value") {
    CHECK(bernoulli_entropy(0.0) == 0.0);
    CHECK(bernoulli_entropy(1.0) == 0.0);
    CHECK(bernoulli_entropy(0.5) == Approx(0.6931471805599453).margin(1e-15));
    CHECK(bernoulli_entropy(0.8) == Approx(0.5004024235381879).margin(1e-12));
}

TEST_CASE("seed derivation is deterministic and spread out") {
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(derive_seed(42, t));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(42, 1) != derive_seed(43, 1));
}

TEST_CASE("uniform_unit stays in [0, 1)") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = uniform_unit(rng);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("bounded_uint is in range and deterministic") {
    Rng a(11), b(11);
    for (int i = 0; i < 1000; ++i) {
        const auto va = bounded_uint(a, 17);
        REQUIRE(va < 17);
        CHECK(va == bounded_uint(b, 17));
    }
}

TEST_CASE("shuffle is a seeded permutation") {
    std::vector<int> v1{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> v2 = v1;
    const std::vector<int> original = v1;
    Rng a(3), b(3);
    shuffle_inplace(v1, a);
    shuffle_inplace(v2, b);
    CHECK(v1 == v2);
    std::vector<int> sorted = v1;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == original);
}

TEST_CASE("hash_doubles distinguishes vectors and is stable") {
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{1.0, 2.0, 3.0000000001};
    CHECK(hash_doubles(a) == hash_doubles(a));
    CHECK(hash_doubles(a) != hash_doubles(b));
    CHECK(hash_doubles({0.0}) != hash_doubles({-0.0}));  // distinct bit patterns
}

TEST_CASE("standard_normal has roughly standard moments") {
    Rng rng(123);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = standard_normal(rng);
        sum += z;
        sq += z * z;
    }
    CHECK(sum / n == Approx(0.0).margin(0.03));
    CHECK(sq / n == Approx(1.0).margin(0.05));
}
