#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kakeya/grid.hpp"
#include "kakeya/testsets.hpp"

using namespace kakeya;
using grid::GridShape;

TEST_CASE("rng streams are deterministic") {
    testsets::Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform(), y = b.uniform(), z = c.uniform();
        all_equal = all_equal && x == y;
        any_diff = any_diff || x != z;
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(all_equal);
    CHECK(any_diff);
    // gaussian moments sanity
    testsets::Rng g(7);
    double mean = 0.0, var = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = g.gaussian();
        mean += x;
        var += x * x;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("ball indicator") {
    const auto g = GridShape::make(2, 256, 1.0);
    SUBCASE("mass matches the analytic area") {
        const auto ball = testsets::ball_indicator(0.25, Vec{0.0, 0.0, 0.0}, g);
        const double area = std::numbers::pi / 16.0;
        CHECK(std::abs(grid::lp_norm(ball, 1.0) - area) / area < 0.05);
    }
    SUBCASE("values in [0,1]") {
        const auto ball = testsets::ball_indicator(0.2, Vec{0.3, 0.4, 0.0}, g);
        for (double v : ball.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("centered ball is even, bitwise") {
        const auto ball = testsets::ball_indicator(0.2, Vec{0.0, 0.0, 0.0}, g);
        const int n = g.n_per_axis;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                CHECK(ball[grid::flat_index(g, a, b)] ==
                      ball[grid::flat_index(g, a == 0 ? 0 : n - a, b == 0 ? 0 : n - b)]);
    }
    SUBCASE("unresolvable radius rejected") {
        CHECK_THROWS(testsets::ball_indicator(1.0 / 256, Vec{0.0, 0.0, 0.0}, g));
    }
}

TEST_CASE("rotated tube unions") {
    const auto g = GridShape::make(2, 256, 1.0);
    SUBCASE("single tube") {
        const auto f = testsets::rotated_tube_union(1, 0.125, g, 3);
        for (double v : f.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(grid::integral(f) > 0.1);
    }
    SUBCASE("union bound with feathering slack") {
        const int count = 5;
        const double delta = 1.0 / 16;
        const auto f = testsets::rotated_tube_union(count, delta, g, 1);
        CHECK(grid::integral(f) <= count * (delta + 2.0 * g.spacing()));
    }
    SUBCASE("dense unions overlap: measure well below the union bound") {
        const double delta = 1.0 / 32;
        const int count = static_cast<int>(std::ceil(std::numbers::pi / delta));
        const auto f = testsets::rotated_tube_union(count, delta, g, 0);
        CHECK(grid::integral(f) < 0.7 * count * delta);
    }
}

TEST_CASE("perron trees") {
    const auto g = GridShape::make(2, 256, 1.0);
    SUBCASE("one level is the plain triangle") {
        const auto tree = testsets::perron_tree(1, 1.0 / 16, g);
        const double expected = 0.5 * 0.5 * 1.0;  // half base times height
        CHECK(std::abs(tree.measure - expected) / expected < 0.05);
        CHECK(testsets::perron_direction_coverage(tree, 64) >= 0.95);
    }
    SUBCASE("measure decreases with depth") {
        const auto m2 = testsets::perron_tree(2, 1.0 / 32, g).measure;
        const auto m4 = testsets::perron_tree(4, 1.0 / 32, g).measure;
        CHECK(m4 < m2);
    }
    SUBCASE("measure is non-increasing over levels 1..5") {
        double prev = std::numeric_limits<double>::infinity();
        for (int lv = 1; lv <= 5; ++lv) {
            const double m = testsets::perron_tree(lv, 1.0 / 32, g).measure;
            CHECK(m <= prev * (1.0 + 1e-9));
            prev = m;
        }
    }
    SUBCASE("direction coverage survives translation at depth") {
        const auto big = GridShape::make(2, 1024, 1.0);
        const auto tree = testsets::perron_tree(4, 1.0 / 64, big);
        CHECK(testsets::perron_direction_coverage(tree, 256) >= 0.90);
    }
    SUBCASE("values in [0,1] and resolution guard") {
        const auto tree = testsets::perron_tree(3, 1.0 / 16, g);
        for (double v : tree.field.values()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK_THROWS(testsets::perron_tree(9, 1.0 / 16, g));  // finest base under two cells
        CHECK_THROWS(testsets::perron_tree(2, 0.1, GridShape::make(3, 32, 1.0)));
    }
}

TEST_CASE("band-limited random fields") {
    const auto g = GridShape::make(2, 128, 8.0);
    SUBCASE("spectral support is exact") {
        const auto f = testsets::bandlimited_random(9, 1.0, g);
        const auto F = grid::forward_transform(f);
        for (std::size_t i = 0; i < F.size(); ++i) {
            if (norm(F.frequency(i)) > 1.0 * (1.0 + 1e-12)) CHECK(std::abs(F[i]) < 1e-12);
        }
    }
    SUBCASE("unit norm") {
        CHECK(std::abs(grid::lp_norm(testsets::bandlimited_random(3, 1.0, g), 2.0) - 1.0) < 1e-10);
    }
    SUBCASE("deterministic in the seed") {
        const auto a = testsets::bandlimited_random(7, 1.0, g);
        const auto b = testsets::bandlimited_random(7, 1.0, g);
        const auto c = testsets::bandlimited_random(8, 1.0, g);
        CHECK(grid::sup_diff(a, b) == 0.0);
        CHECK(grid::sup_diff(a, c) > 1e-3);
    }
    SUBCASE("grid refinement reproduces the same function") {
        const auto coarse = testsets::bandlimited_random(5, 1.0, g);
        const auto fine = testsets::bandlimited_random(5, 1.0, GridShape::make(2, 256, 8.0));
        double worst = 0.0;
        for (int a = 0; a < 128; ++a)
            for (int b = 0; b < 128; ++b)
                worst = std::max(worst, std::abs(coarse[grid::flat_index(g, a, b)] -
                                                 fine[grid::flat_index(fine.shape(), 2 * a, 2 * b)]));
        CHECK(worst < 1e-12);
    }
    SUBCASE("cutoff beyond Nyquist rejected") {
        CHECK_THROWS(testsets::bandlimited_random(0, 9.0, g));
    }
}

TEST_CASE("bump sums") {
    const auto g = GridShape::make(2, 128, 4.0);
    SUBCASE("zero count gives the zero field") {
        CHECK(grid::max_abs(testsets::bump_sum(1, 0, g)) == 0.0);
    }
    SUBCASE("nonnegative") {
        const auto f = testsets::bump_sum(11, 6, g);
        CHECK(*std::min_element(f.values().begin(), f.values().end()) >= 0.0);
    }
    SUBCASE("mass adds up") {
        double amplitude_sum = 0.0;
        const auto f = testsets::bump_sum(4, 5, g, &amplitude_sum);
        CHECK(amplitude_sum > 0.0);
        CHECK(std::abs(grid::integral(f) - amplitude_sum) < 1e-6);
    }
}

TEST_CASE("spec-driven generation is reproducible") {
    const auto g = GridShape::make(2, 128, 1.0);
    for (auto kind : {testsets::Kind::ball, testsets::Kind::tube_union, testsets::Kind::perron,
                      testsets::Kind::bandlimited, testsets::Kind::bump_sum}) {
        testsets::TestSpec spec;
        spec.kind = kind;
        spec.seed = 12;
        spec.delta = 1.0 / 16;
        spec.count = 4;
        spec.levels = 2;
        spec.cutoff = 16.0;
        spec.radius = 0.2;
        const auto a = testsets::generate(spec, g);
        const auto b = testsets::generate(spec, g);
        CHECK(grid::sup_diff(a.field, b.field) == 0.0);
        CHECK(a.measure == b.measure);
        CHECK(a.l2 == b.l2);
    }
    CHECK(testsets::kind_from_name("perron_tree") == testsets::Kind::perron);
    CHECK(testsets::kind_name(testsets::Kind::bandlimited) == "bandlimited_random");
    CHECK_THROWS(testsets::kind_from_name("nope"));
}
