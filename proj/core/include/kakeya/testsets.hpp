#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kakeya/geometry.hpp"
#include "kakeya/grid.hpp"

namespace kakeya::testsets {

/// Deterministic random stream: mt19937_64 with explicit scalar recipes
/// (uniforms are (x >> 11) * 2^-53; gaussians use Box-Muller on two
/// uniforms), so identical seeds reproduce bitwise across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform();   // [0, 1)
    double gaussian();  // standard normal
    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// splitmix64 combine, for deriving per-object seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Feathered ball indicator; measure within a few percent of the analytic
/// volume at resolved radii. Rejects radius < 2h.
grid::Field ball_indicator(double radius, const Vec& center, const grid::GridShape& shape);

/// Pointwise max of `count` unit tubes through the center at equispaced
/// angles (2D) or Fibonacci directions (3D); seed jitters the angular
/// offset deterministically.
grid::Field rotated_tube_union(int count, double delta, const grid::GridShape& shape, std::uint64_t seed);

struct Triangle {
    Vec base_left, base_right, apex;
    double theta_lo = 0.0, theta_hi = 0.0;  // covered direction interval (radians from vertical)
};

struct PerronTree {
    grid::Field field;
    std::vector<Triangle> triangles;  // final translated positions
    int levels = 1;
    double measure = 0.0;
};

/// Bisect-and-translate union of triangles: a height-one triangle split
/// into 2^levels slivers, translated pairwise by greedy overlap
/// maximization. 2D only.
PerronTree perron_tree(int levels, double delta, const grid::GridShape& shape);

/// Fraction of sampled directions in the tree's sector that still contain a
/// full unit segment inside the union (ray-cast audit).
double perron_direction_coverage(const PerronTree& tree, int sample_count);

/// Real field with spectral coefficients drawn per frequency inside
/// |xi| <= cutoff (zero outside, exactly), unit L2 norm. Coefficient draws
/// are seeded per lattice point, so refining the grid reproduces the same
/// band-limited function.
grid::Field bandlimited_random(std::uint64_t seed, double cutoff, const grid::GridShape& shape);

/// Sum of `count` randomly placed and scaled mass-one Gaussian bumps;
/// nonnegative when all amplitudes are (they are drawn positive). The drawn
/// amplitude total, which the discrete integral reproduces, is reported
/// through amplitude_sum when non-null.
grid::Field bump_sum(std::uint64_t seed, int count, const grid::GridShape& shape,
                     double* amplitude_sum = nullptr);

enum class Kind { ball, tube, tube_union, perron, bandlimited, bump_sum };

struct TestSpec {
    Kind kind = Kind::ball;
    std::uint64_t seed = 0;
    double radius = 0.25;
    double delta = 0.125;
    int count = 1;
    int levels = 3;
    double cutoff = 1.0;
};

struct GeneratedField {
    grid::Field field;
    double measure = 0.0;  // discrete integral
    double l1 = 0.0;
    double l2 = 0.0;
};

GeneratedField generate(const TestSpec& spec, const grid::GridShape& shape);

Kind kind_from_name(const std::string& name);
std::string kind_name(Kind kind);

}  // namespace kakeya::testsets
