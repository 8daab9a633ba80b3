#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kakeya/verify.hpp"

using namespace kakeya;
using grid::Field;
using grid::GridShape;

namespace {

const GridShape kKernelGrid = GridShape::make(2, 512, 4.0);

const filters::FilterBank& kernel_bank() {
    static const auto bank = filters::FilterBank::create(1.0 / 16, 0.25, 2, kKernelGrid);
    return bank;
}

Field index_permuted(const Field& f, int which) {
    const auto& g = f.shape();
    const int n = g.n_per_axis;
    Field out(g);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            std::size_t src = 0;
            switch (which) {
                case 0: src = grid::flat_index(g, b, a); break;                      // transpose
                case 1: src = grid::flat_index(g, a == 0 ? 0 : n - a, b); break;     // reflect axis 0
                case 2: src = grid::flat_index(g, b, (n - a) % n); break;            // quarter turn
                default: src = grid::flat_index(g, a, b);
            }
            out[grid::flat_index(g, a, b)] = f[src];
        }
    return out;
}

}  // namespace

TEST_CASE("weighted kernel integrals") {
    const auto g = GridShape::make(2, 64, 2.0);
    SUBCASE("mass-one spike at the origin sees unit weight") {
        Field delta(g);
        delta[0] = 1.0 / g.cell_volume();
        for (double scale : {0.1, 1.0})
            for (double N : {0.0, 2.0, 3.5})
                CHECK(verify::weighted_kernel_integral(delta, scale, N) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("zero exponent reduces to the L1 mass") {
        const Field f = testsets::bump_sum(3, 4, g);
        CHECK(verify::weighted_kernel_integral(f, 0.5, 0.0) ==
              doctest::Approx(grid::lp_norm(f, 1.0)).epsilon(1e-12));
    }
    SUBCASE("grid refinement oracle for the weighted band integrals") {
        // phi's high bands vanish identically, so its row is zero on both
        // grids; the gaussian row must be stable under doubling.
        const auto& dict = filters::dictionary(2);
        const auto fine_grid = GridShape::make(2, 1024, 4.0);
        const auto fine_bank = filters::FilterBank::create(1.0 / 16, 0.25, 2, fine_grid);
        const double scale = std::pow(1.0 / 16, 1.0 + 5 * 0.25);
        {
            const auto coarse = filters::eta1_kernel(kernel_bank(), dict[0], 2, kKernelGrid);
            const auto fine = filters::eta1_kernel(fine_bank, dict[0], 2, fine_grid);
            CHECK(verify::weighted_kernel_integral(coarse.spatial, scale, 2.0) == 0.0);
            CHECK(verify::weighted_kernel_integral(fine.spatial, scale, 2.0) == 0.0);
        }
        {
            const auto coarse = filters::eta1_kernel(kernel_bank(), dict[1], 2, kKernelGrid);
            const auto fine = filters::eta1_kernel(fine_bank, dict[1], 2, fine_grid);
            const double ic = verify::weighted_kernel_integral(coarse.spatial, scale, 2.0);
            const double iff = verify::weighted_kernel_integral(fine.spatial, scale, 2.0);
            CHECK(ic > 0.0);
            CHECK(std::abs(ic - iff) / iff < 0.02);
        }
    }
    SUBCASE("rotation invariance under grid-exact orthogonal maps") {
        const auto eta = filters::eta1_kernel(kernel_bank(), filters::dictionary(2)[1], 2, kKernelGrid);
        const double scale = 0.01;
        const double base = verify::weighted_kernel_integral(eta.spatial, scale, 2.0);
        for (int which : {0, 1, 2}) {
            const double rotated =
                verify::weighted_kernel_integral(index_permuted(eta.spatial, which), scale, 2.0);
            CHECK(std::abs(rotated - base) <= 1e-10 * std::max(1.0, base));
        }
    }
    SUBCASE("rejects nonpositive scales") {
        CHECK_THROWS(verify::weighted_kernel_integral(Field(g), 0.0, 2.0));
    }
}

TEST_CASE("high-band decay table") {
    const auto& dict = filters::dictionary(2);
    SUBCASE("ratios finite across the band range") {
        const auto rows = verify::lemma31_table(kernel_bank(), dict[1], 2.0, 2, 8, kKernelGrid);
        CHECK(rows.size() >= 3);
        for (const auto& r : rows) {
            CHECK(std::isfinite(r.ratio));
            CHECK(r.bound == doctest::Approx(std::pow(1.0 / 16, r.k * 0.25)));
        }
    }
    SUBCASE("bands beyond the grid are flagged truncated") {
        const auto small = GridShape::make(2, 64, 4.0);
        const auto sbank = filters::FilterBank::create(1.0 / 16, 0.25, 2, small);
        const auto rows = verify::lemma31_table(sbank, dict[1], 2.0, 2, sbank.k_max, small);
        CHECK(rows.back().integral == 0.0);
        CHECK(rows.back().truncated);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS(verify::lemma31_table(kernel_bank(), dict[1], 2.0, 1, 5, kKernelGrid));
        CHECK_THROWS(verify::lemma31_table(kernel_bank(), dict[1], 0.5, 2, 5, kKernelGrid));
    }
}

TEST_CASE("low-band decay table") {
    const auto& dict = filters::dictionary(2);
    const auto rows = verify::lemma32_table(kernel_bank(), dict[1], 2.0, kKernelGrid);
    SUBCASE("row for every k up to s, with the s bracketing invariant") {
        CHECK(static_cast<int>(rows.size()) == kernel_bank().s + 1);
        const double target = std::pow(1.0 / 16, -2.0 * 0.25);
        CHECK(std::exp2(kernel_bank().s) < target * (1.0 + 1e-12));
        CHECK(target <= std::exp2(kernel_bank().s + 1) * (1.0 + 1e-12));
    }
    SUBCASE("wide-scale integral never exceeds the tight-scale integral") {
        for (const auto& r : rows) {
            CHECK(r.integral_wide <= r.integral_tight * (1.0 + 1e-15));
            CHECK(std::isfinite(r.ratio_tight));
            CHECK(std::isfinite(r.ratio_wide));
        }
    }
    SUBCASE("unweighted mass below the recorded product bound") {
        for (const auto& r : rows) CHECK(r.l1_mass <= r.integral_wide * (1.0 + 1e-12));
    }
}

TEST_CASE("band-limited shift bounds") {
    const auto g = GridShape::make(2, 128, 8.0);
    const auto pts = maximal::quasi_random_points(g, 100);
    SUBCASE("constant input saturates at ratio one") {
        Field c(g);
        for (auto& v : c.values()) v = 2.5;
        const auto rep = verify::bernstein_check(c, 1.0, 2.0, 1.0, pts);
        CHECK(rep.max_ratio_value == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(rep.max_ratio_gradient == doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("low-frequency cosine is stable under refinement") {
        auto cosine = [](const GridShape& shape) {
            grid::SpectralField F(shape);
            const int n = shape.n_per_axis;
            F[grid::flat_index(shape, 1, 0)] = 0.5;
            F[grid::flat_index(shape, n - 1, 0)] = 0.5;
            return grid::inverse_transform(F);
        };
        const auto rep = verify::bernstein_check(cosine(g), 1.0, 2.0, 1.0, pts);
        const auto fine_grid = GridShape::make(2, 256, 8.0);
        const auto rep2 =
            verify::bernstein_check(cosine(fine_grid), 1.0, 2.0, 1.0, maximal::quasi_random_points(fine_grid, 100));
        CHECK(rep.max_ratio_value > 0.0);
        CHECK(std::isfinite(rep.max_ratio_value));
        CHECK(std::abs(rep.max_ratio_value - rep2.max_ratio_value) / rep2.max_ratio_value < 0.10);
        CHECK(std::abs(rep.max_ratio_gradient - rep2.max_ratio_gradient) /
                  std::max(rep2.max_ratio_gradient, 1e-300) <
              0.10);
    }
    SUBCASE("band-limit violations are rejected") {
        const Field noisy = testsets::bandlimited_random(3, 4.0, g);
        CHECK_THROWS(verify::bernstein_check(noisy, 1.0, 2.0, 1.0, pts));
    }
}

TEST_CASE("pointwise domination") {
    const auto g = GridShape::make(2, 128, 8.0);
    const double delta = 1.0 / 16, eps = 0.25;
    const auto bank = filters::FilterBank::create(delta, eps, 2, g);
    const auto& dict = filters::dictionary(2);
    const auto dirs = maximal::DirectionSet::uniform_2d(10);
    const auto rots = maximal::RotationSet::from_directions(dirs);
    const auto t_grid = verify::default_t_grid(delta, eps, g);
    const auto factors = verify::domination_factors(bank, dict, rots, t_grid, 2.0, g);

    SUBCASE("factors are positive and the dilation scale set covers the bands") {
        CHECK(factors.sum_direct > 0.0);
        CHECK(factors.sum_wide >= factors.sum_direct);
        CHECK(!factors.mstar_scales.empty());
    }
    SUBCASE("constant input: no violations and unit-scale slack") {
        Field c(g);
        for (auto& v : c.values()) v = 1.0;
        const auto rep = verify::domination_check(c, bank, dict, rots, t_grid, 2.0, 120, &factors);
        CHECK(rep.violations == 0);
        CHECK(rep.violations_wide == 0);
        CHECK(rep.min_slack > 0.0);
    }
    SUBCASE("band-limited input, seed 3: zero violations") {
        const Field f = testsets::bandlimited_random(3, 1.0, g);
        const auto rep = verify::domination_check(f, bank, dict, rots, t_grid, 2.0, 120, &factors);
        CHECK(rep.violations == 0);
        CHECK(rep.violations_wide == 0);
    }
    SUBCASE("single kernel, identity-only rotation") {
        filters::TestDictionary phi_only{dict[0]};
        const auto id = maximal::RotationSet::identity_only(2);
        const auto f = testsets::bump_sum(5, 4, g);
        const auto rep = verify::domination_check(f, bank, phi_only, id, t_grid, 2.0, 120);
        CHECK(rep.violations == 0);
    }
    SUBCASE("frozen-dilation domination") {
        const Field f = testsets::bandlimited_random(6, 1.0, g);
        const auto rep = verify::frozen_domination_check(f, bank, dict, rots, 1.0, 1.0, 120);
        CHECK(rep.violations == 0);
        CHECK(rep.min_slack > 0.0);
    }
}

TEST_CASE("exponent fitting") {
    SUBCASE("exact power law") {
        std::vector<double> deltas{0.1, 0.05, 0.025, 0.0125}, ratios;
        for (double d : deltas) ratios.push_back(1.0 / d);
        const auto fit = verify::fit_exponent(deltas, ratios);
        CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.residual < 1e-12);
    }
    SUBCASE("constant ratios fit slope zero") {
        const auto fit = verify::fit_exponent({0.1, 0.05, 0.025}, {3.0, 3.0, 3.0});
        CHECK(fit.slope == doctest::Approx(0.0));
    }
    SUBCASE("small multiplicative noise perturbs the slope mildly") {
        std::vector<double> deltas{0.2, 0.1, 0.05, 0.025, 0.0125}, ratios;
        testsets::Rng rng(0);
        for (double d : deltas) ratios.push_back((1.0 / d) * (1.0 + 1e-3 * (rng.uniform() - 0.5)));
        const auto fit = verify::fit_exponent(deltas, ratios);
        CHECK(std::abs(fit.slope - 1.0) < 1e-2);
    }
    SUBCASE("rejects degenerate inputs") {
        CHECK_THROWS_WITH(verify::fit_exponent({0.1, 0.05}, {1.0, 2.0}), "need >= 3 points");
        CHECK_THROWS(verify::fit_exponent({0.1, 0.1, 0.1}, {1.0, 2.0, 3.0}));
        CHECK_THROWS(verify::fit_exponent({0.1, 0.05, 0.025}, {1.0, -2.0, 3.0}));
    }
}

TEST_CASE("norm-ratio sweeps") {
    SUBCASE("constant input: kakeya ratio independent of delta") {
        const auto g = GridShape::make(2, 128, 1.0);
        Field c(g);
        for (auto& v : c.values()) v = 1.0;
        std::vector<double> deltas{0.125, 0.0625, 0.03125}, ratios;
        for (double d : deltas) {
            const auto dirs = maximal::DirectionSet::for_width(d, 2);
            const auto values = maximal::kakeya_maximal(c, d, dirs);
            ratios.push_back(maximal::direction_lq_norm(values, dirs.weights, 2.0) /
                             grid::lp_norm(c, 2.0));
        }
        const auto fit = verify::fit_exponent(deltas, ratios);
        CHECK(std::abs(fit.slope) < 1e-6);
    }
    SUBCASE("fitted kakeya and nikodym exponents stay within the trivial range") {
        for (auto op : {verify::SweepOp::kakeya, verify::SweepOp::nikodym}) {
            verify::SweepConfig c;
            c.op = op;
            c.family.kind = testsets::Kind::tube_union;
            c.deltas = {0.125, 0.0625, 0.03125};
            c.dim = 2;
            c.grid_n = 128;
            c.grid_l = 1.0;
            const auto rep = verify::norm_ratio_sweep(c);
            CHECK(rep.fit.slope >= -0.05);
            CHECK(rep.fit.slope <= 2.0);
            CHECK(rep.rows.size() == 3);
            for (const auto& row : rep.rows) CHECK(row.ratio == doctest::Approx(row.out_norm / row.in_norm));
        }
    }
    SUBCASE("needs at least three dilations") {
        verify::SweepConfig c;
        c.deltas = {0.125, 0.0625};
        c.grid_n = 128;
        CHECK_THROWS_WITH(verify::norm_ratio_sweep(c), "need >= 3 points");
    }
    SUBCASE("default dilation grid spans resolution to the regime cap") {
        const auto g = GridShape::make(2, 256, 1.0);
        const auto tg = verify::default_t_grid(0.125, 0.25, g);
        CHECK(tg.front() == doctest::Approx(std::max(2.0 * g.spacing(), 0.125)));
        CHECK(tg.back() == doctest::Approx(std::pow(0.125, -0.25)));
        for (std::size_t i = 1; i < tg.size(); ++i) CHECK(tg[i] > tg[i - 1]);
    }
    SUBCASE("perron depth adapts to delta") {
        CHECK(verify::perron_levels_for(0.125) == 2);
        CHECK(verify::perron_levels_for(0.0078125) == 6);
    }
}

TEST_CASE("shift-penalized norm ratios stay bounded") {
    // The contract behind the first operator bound: the shift-penalized
    // maximal is controlled by the cone maximal, which is controlled by the
    // input norm. Checked as finite empirical ratios, not proved.
    const auto g = GridShape::make(2, 64, 1.0);
    const filters::BumpProfile psi{};
    auto base = [&psi](const Vec& xi) { return psi(norm(xi)); };
    const std::vector<double> t_grid{0.1, 0.2, 0.4, 0.8};
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Field f = testsets::bandlimited_random(seed, 16.0, g);
        const Field tang = maximal::tangential_maximal(f, base, 2.0, t_grid);
        const Field cone = maximal::nontangential_maximal(f, base, t_grid);
        const double r1 = grid::lp_norm(tang, 2.0) / grid::lp_norm(cone, 2.0);
        const double r2 = grid::lp_norm(cone, 2.0) / grid::lp_norm(f, 2.0);
        CHECK(std::isfinite(r1));
        CHECK(std::isfinite(r2));
        CHECK(r1 < 100.0);
        CHECK(r2 < 100.0);
        CHECK(r1 >= std::exp2(-2.0) - 1e-12);  // the weight bound at zero shift
    }
}
