#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hyprec/errors.hpp"
#include "hyprec/geometry.hpp"
#include "test_support.hpp"

using namespace hyprec;
using testsup::Rng;
using testsup::random_ball_point;

namespace {

PoincareVector pv(std::initializer_list<double> c) { return PoincareVector{std::vector<double>(c)}; }
KleinVector kv(std::initializer_list<double> c) { return KleinVector{std::vector<double>(c)}; }

constexpr double kLn3 = 1.0986122886681098;

}  // namespace

TEST_CASE("poincare_distance worked examples") {
    CHECK(poincare_distance(pv({0.3, 0.4}), pv({0.3, 0.4})) == 0.0);
    CHECK(poincare_distance(pv({0.0, 0.0}), pv({0.5, 0.0})) == doctest::Approx(kLn3).epsilon(1e-12));
    CHECK(poincare_distance(pv({0.5, 0.0}), pv({-0.5, 0.0})) ==
          doctest::Approx(2 * kLn3).epsilon(1e-12));
}

TEST_CASE("poincare_distance rejects bad input") {
    CHECK_THROWS_AS(poincare_distance(pv({0.1}), pv({0.1, 0.2})), Error);
    try {
        poincare_distance(pv({0.1}), pv({0.1, 0.2}));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionError);
    }
    try {
        poincare_distance(pv({1.0, 0.0}), pv({0.0, 0.0}));
        FAIL("expected DomainError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DomainError);
    }
}

TEST_CASE("model translations") {
    CHECK(poincare_to_klein(pv({0.0, 0.0})).c == std::vector<double>{0.0, 0.0});
    CHECK(poincare_to_klein(pv({0.5, 0.0})).c[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(poincare_to_klein(pv({0.0, 0.5})).c[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(klein_to_poincare(kv({0.8, 0.0})).c[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(klein_to_poincare(kv({0.0, 0.0})).c == std::vector<double>{0.0, 0.0});

    const auto x = pv({0.3, -0.2});
    const auto back = klein_to_poincare(poincare_to_klein(x));
    CHECK(std::abs(back.c[0] - 0.3) < 1e-12);
    CHECK(std::abs(back.c[1] + 0.2) < 1e-12);
}

TEST_CASE("roundtrip on 1000 random points") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const auto x = random_ball_point(rng, 2 + rng.index(4), 0.999);
        const auto back = klein_to_poincare(poincare_to_klein(x));
        double err = 0.0;
        for (std::size_t k = 0; k < x.dim(); ++k) err += (back.c[k] - x.c[k]) * (back.c[k] - x.c[k]);
        CHECK(std::sqrt(err) < 1e-12);
    }
}

TEST_CASE("lorentz_factor") {
    CHECK(lorentz_factor(kv({0.0, 0.0})) == 1.0);
    CHECK(lorentz_factor(kv({0.8, 0.0})) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(lorentz_factor(kv({0.6, 0.0})) == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(lorentz_factor(kv({0.3, 0.1})) > lorentz_factor(kv({0.2, 0.1})));
}

TEST_CASE("einstein_midpoint worked examples") {
    const auto single = einstein_midpoint(std::vector<KleinVector>{kv({0.3, -0.4})});
    CHECK(single.c[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(single.c[1] == doctest::Approx(-0.4).epsilon(1e-15));

    const auto sym = einstein_midpoint(std::vector<KleinVector>{kv({0.8, 0.0}), kv({-0.8, 0.0})});
    CHECK(sym.c[0] == doctest::Approx(0.0));
    const auto mid = einstein_midpoint(std::vector<KleinVector>{kv({0.8, 0.0}), kv({0.0, 0.0})});
    CHECK(mid.c[0] == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(einstein_midpoint(std::vector<KleinVector>{}), Error);
    CHECK_THROWS_AS(einstein_midpoint(std::vector<KleinVector>{kv({0.1}), kv({0.1, 0.2})}), Error);
}

TEST_CASE("einstein_midpoint is exactly permutation invariant and stays in the ball") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<KleinVector> pts;
        const std::size_t m = 2 + rng.index(6);
        for (std::size_t i = 0; i < m; ++i) {
            const auto p = random_ball_point(rng, 3, 0.99);
            pts.push_back(KleinVector{p.c});
        }
        const auto base = einstein_midpoint(pts);
        CHECK(base.norm() < 1.0);
        std::vector<KleinVector> shuffled = pts;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.index(i)]);
        const auto again = einstein_midpoint(shuffled);
        CHECK(again.c == base.c);  // bit-identical
    }
}

TEST_CASE("hyperbolic_average worked examples") {
    const auto p = pv({0.4, 0.1});
    const auto single = hyperbolic_average(std::vector<PoincareVector>{p});
    CHECK(std::abs(single.c[0] - 0.4) < 1e-15);
    CHECK(std::abs(single.c[1] - 0.1) < 1e-15);

    const auto sym = hyperbolic_average(std::vector<PoincareVector>{pv({0.5, 0.0}), pv({-0.5, 0.0})});
    CHECK(sym.c[0] == doctest::Approx(0.0));

    const auto mid = hyperbolic_average(std::vector<PoincareVector>{pv({0.5, 0.0}), pv({0.0, 0.0})});
    CHECK(mid.c[0] == doctest::Approx(0.2679491924311227).epsilon(1e-12));
    CHECK(mid.c[1] == doctest::Approx(0.0));
}

TEST_CASE("metric axioms on random triples") {
    Rng rng(13);
    for (int rep = 0; rep < 300; ++rep) {
        const auto x = random_ball_point(rng, 2, 0.99);
        const auto y = random_ball_point(rng, 2, 0.99);
        const auto z = random_ball_point(rng, 2, 0.99);
        CHECK(poincare_distance(x, x) == 0.0);
        CHECK(poincare_distance(x, y) == poincare_distance(y, x));
        CHECK(poincare_distance(x, z) <=
              poincare_distance(x, y) + poincare_distance(y, z) + 1e-9);
    }
}

TEST_CASE("radial closed form d(O,x) = 2 artanh |x|") {
    Rng rng(17);
    const PoincareVector origin = pv({0.0, 0.0, 0.0});
    for (int rep = 0; rep < 200; ++rep) {
        const auto x = random_ball_point(rng, 3, 0.999);
        CHECK(std::abs(poincare_distance(origin, x) - 2.0 * std::atanh(x.norm())) < 1e-9);
    }
}

TEST_CASE("distance ratio approaches the tree ratio, Euclidean control stays flat") {
    const double ts[] = {0.5, 0.9, 0.99, 0.999};
    double prev = 0.0;
    for (double t : ts) {
        const auto x = pv({t, 0.0});
        const auto y = pv({0.0, t});
        const PoincareVector origin = pv({0.0, 0.0});
        const double r = poincare_distance(x, y) /
                         (poincare_distance(x, origin) + poincare_distance(origin, y));
        CHECK(r > prev);
        prev = r;

        const double euclid = (t * std::sqrt(2.0)) / (2.0 * t);
        CHECK(std::abs(euclid - std::sqrt(2.0) / 2.0) < 1e-12);
    }
    CHECK(prev >= 0.95);  // r(0.999) ~ 0.9544
}

TEST_CASE("clamp_to_ball") {
    std::vector<double> far = {3.0, 4.0};
    CHECK(clamp_to_ball(far));
    CHECK(std::abs(std::hypot(far[0], far[1]) - (1.0 - kClampEps)) < 1e-15);

    std::vector<double> inside = {0.1, 0.2};
    CHECK_FALSE(clamp_to_ball(inside));
    CHECK(inside == std::vector<double>{0.1, 0.2});
}

TEST_CASE("similarity_from_distances worked examples") {
    DistanceMatrix d;
    d.labels = {"a", "b"};
    d.values = DenseMatrix(2, 2, 0.0);
    d.values.at(0, 1) = d.values.at(1, 0) = 1.0;
    auto s = similarity_from_distances(d);
    CHECK(s.values.at(0, 0) == 1.0);
    CHECK(s.values.at(0, 1) == 0.0);
    CHECK(s.values.at(1, 1) == 1.0);

    DistanceMatrix d3;
    d3.labels = {"a", "b", "c"};
    d3.values = DenseMatrix(3, 3, 0.0);
    d3.values.at(0, 1) = d3.values.at(1, 0) = 2.0;
    d3.values.at(1, 2) = d3.values.at(2, 1) = 2.0;
    d3.values.at(0, 2) = d3.values.at(2, 0) = 4.0;
    auto s3 = similarity_from_distances(d3);
    CHECK(s3.values.at(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s3.values.at(0, 2) == doctest::Approx(0.0));
    CHECK(s3.values.at(1, 2) == doctest::Approx(0.5).epsilon(1e-15));
    for (int i = 0; i < 3; ++i) CHECK(s3.values.at(i, i) == 1.0);

    DistanceMatrix zeros;
    zeros.labels = {"a", "b"};
    zeros.values = DenseMatrix(2, 2, 0.0);
    auto ones = similarity_from_distances(zeros);
    CHECK(ones.values.at(0, 1) == 1.0);
    CHECK(ones.values.at(1, 0) == 1.0);
}

TEST_CASE("similarity reverses the distance order and keeps ties") {
    Rng rng(23);
    const std::size_t n = 12;
    std::vector<std::string> labels;
    std::vector<PoincareVector> pts;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("e" + std::to_string(i));
        pts.push_back(random_ball_point(rng, 2, 0.95));
    }
    const auto d = pairwise_poincare_distances(labels, pts, 1);
    const auto s = similarity_from_distances(d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                if (d.values.at(i, j) < d.values.at(i, k)) CHECK(s.values.at(i, j) > s.values.at(i, k));
                if (d.values.at(i, j) == d.values.at(i, k))
                    CHECK(s.values.at(i, j) == s.values.at(i, k));
            }
}

TEST_CASE("pairwise distances match the scalar kernel and ignore threading") {
    Rng rng(29);
    const std::size_t n = 80;
    std::vector<std::string> labels;
    std::vector<PoincareVector> pts;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back("e" + std::to_string(i));
        pts.push_back(random_ball_point(rng, 4, 0.99));
    }
    const auto serial = pairwise_poincare_distances(labels, pts, 1);
    const auto parallel = pairwise_poincare_distances(labels, pts, 8);
    CHECK(serial.values == parallel.values);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(serial.values.at(i, i) == 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(serial.values.at(i, j) == serial.values.at(j, i));
            CHECK(serial.values.at(i, j) == poincare_distance(pts[i], pts[j]));
        }
    }
}
