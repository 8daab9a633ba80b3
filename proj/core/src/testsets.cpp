#include "kakeya/testsets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "kakeya/maximal.hpp"

namespace kakeya::testsets {

namespace {

double clampd(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

double feather(double v, double half_width, double h) {
    return clampd((half_width + 0.5 * h - std::abs(v)) / h, 0.0, 1.0);
}

}  // namespace

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + b * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

grid::Field ball_indicator(double radius, const Vec& center, const grid::GridShape& g) {
    const double h = g.spacing();
    if (radius < 2.0 * h * (1.0 - 1e-12)) throw std::invalid_argument("ball radius below two cells is unresolvable");
    const int n = g.n_per_axis;
    const int n2 = g.dim == 3 ? n : 1;
    grid::Field out(g);
    const double L = g.side_length;
    auto min_dist = [&](double a, double b) {
        double d = std::fmod(a - b, L);
        if (d < -0.5 * L) d += L;
        if (d >= 0.5 * L) d -= L;
        return d;
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n2; ++c) {
                Vec d{min_dist(a * h, center[0]), min_dist(b * h, center[1]),
                      g.dim == 3 ? min_dist(c * h, center[2]) : 0.0};
                out[g.dim == 2 ? grid::flat_index(g, a, b) : grid::flat_index(g, a, b, c)] =
                    feather(norm(d), radius, h);
            }
    return out;
}

grid::Field rotated_tube_union(int count, double delta, const grid::GridShape& g, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("tube union requires count >= 1");
    grid::Field out(g);
    Rng rng(mix_seed(seed, 0x7b5eu));
    if (g.dim == 2) {
        const double step = std::numbers::pi / count;
        const double offset = rng.uniform() * step;
        for (int j = 0; j < count; ++j) {
            const double theta = offset + j * step;
            const grid::Field tube =
                maximal::tube_shape(maximal::TubeSpec{Vec{std::sin(theta), std::cos(theta)}, delta}, g);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], tube[i]);
        }
    } else {
        const double phase = rng.uniform() * 2.0 * std::numbers::pi;
        const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < count; ++j) {
            const double z = 1.0 - (2.0 * j + 1.0) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = ga * j + phase;
            const Vec omega{r * std::cos(phi), r * std::sin(phi), z};
            const grid::Field tube = maximal::tube_shape(maximal::TubeSpec{omega, delta}, g);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], tube[i]);
        }
    }
    return out;
}

namespace {

/// Inner signed distance to a CCW triangle, positive inside.
double triangle_signed_distance(const Vec& p, const Vec& a, const Vec& b, const Vec& c) {
    const Vec vs[3] = {a, b, c};
    double sd = std::numeric_limits<double>::infinity();
    for (int e = 0; e < 3; ++e) {
        const Vec& v0 = vs[e];
        const Vec& v1 = vs[(e + 1) % 3];
        const double ex = v1[0] - v0[0], ey = v1[1] - v0[1];
        const double len = std::hypot(ex, ey);
        const double d = (ex * (p[1] - v0[1]) - ey * (p[0] - v0[0])) / len;
        sd = std::min(sd, d);
    }
    return sd;
}

grid::Field rasterize_triangles(const std::vector<Triangle>& tris, const grid::GridShape& g) {
    const int n = g.n_per_axis;
    const double h = g.spacing();
    const double L = g.side_length;
    grid::Field out(g);
    for (const auto& t : tris) {
        // Bounding box in x (mod L); y spans [0, 1] by construction.
        const double xmin = std::min({t.base_left[0], t.base_right[0], t.apex[0]}) - h;
        const double xmax = std::max({t.base_left[0], t.base_right[0], t.apex[0]}) + h;
        const int ix0 = static_cast<int>(std::floor(xmin / h));
        const int ix1 = static_cast<int>(std::ceil(xmax / h));
        for (int ix = ix0; ix <= ix1; ++ix) {
            const int a = ((ix % n) + n) % n;
            const double x = ix * h;
            for (int b = 0; b < n; ++b) {
                const double y = b * h;
                if (y > 1.0 + h) continue;
                const double sd = triangle_signed_distance(Vec{x, y}, t.base_left, t.base_right, t.apex);
                const double v = clampd(sd / h + 0.5, 0.0, 1.0);
                if (v > 0.0) {
                    auto& cell = out[grid::flat_index(g, a, b)];
                    cell = std::max(cell, v);
                }
            }
        }
    }
    (void)L;
    return out;
}

struct Cluster {
    std::vector<Triangle> tris;
    grid::Field raster;
};

void shift_cluster(Cluster& c, double dx, const grid::GridShape& g) {
    for (auto& t : c.tris) {
        t.base_left[0] += dx;
        t.base_right[0] += dx;
        t.apex[0] += dx;
    }
    const int cells = static_cast<int>(std::llround(dx / g.spacing()));
    const int off[3] = {cells, 0, 0};
    c.raster = grid::cyclic_shift(c.raster, std::span<const int>(off, 3));
}

}  // namespace

PerronTree perron_tree(int levels, double delta, const grid::GridShape& g) {
    if (g.dim != 2) throw std::invalid_argument("perron tree construction is 2D only");
    if (levels < 1) throw std::invalid_argument("perron tree requires levels >= 1");
    if (g.side_length < 1.0) throw std::invalid_argument("perron tree needs side length >= 1");
    const double h = g.spacing();
    const double base_total = 0.5;
    const int pieces = 1 << (levels - 1);  // levels = 1 is the unsplit triangle
    const double base_piece = base_total / pieces;
    if (base_piece < 2.0 * h * (1.0 - 1e-12))
        throw std::invalid_argument("finest perron triangle base is unresolvable on this grid");

    // Elementary slivers of the height-one triangle, base on y = 0.
    const double x0 = 0.5 * (g.side_length - base_total);
    const Vec apex{x0 + 0.5 * base_total, 1.0};
    std::vector<Cluster> clusters;
    for (int i = 0; i < pieces; ++i) {
        Triangle t;
        t.base_left = Vec{x0 + i * base_piece, 0.0};
        t.base_right = Vec{x0 + (i + 1) * base_piece, 0.0};
        t.apex = apex;
        t.theta_lo = std::atan2(apex[0] - t.base_right[0], 1.0);
        t.theta_hi = std::atan2(apex[0] - t.base_left[0], 1.0);
        Cluster c;
        c.tris = {t};
        c.raster = rasterize_triangles(c.tris, g);
        clusters.push_back(std::move(c));
    }

    // Greedy pairwise merging: slide the right cluster left by whole cells,
    // maximizing overlap (minimizing the union's measure).
    while (clusters.size() > 1) {
        std::vector<Cluster> next;
        for (std::size_t i = 0; i + 1 < clusters.size(); i += 2) {
            Cluster& a = clusters[i];
            Cluster& b = clusters[i + 1];
            double span = 0.0;
            for (const auto& t : a.tris) span = std::max(span, t.base_right[0] - t.base_left[0]);
            const int max_cells = std::max(1, static_cast<int>(std::floor(0.9 * span / h)));
            double best_measure = std::numeric_limits<double>::infinity();
            int best_shift = 0;
            for (int s = 0; s <= max_cells; ++s) {
                const int off[3] = {-s, 0, 0};
                const grid::Field shifted = grid::cyclic_shift(b.raster, std::span<const int>(off, 3));
                double sum = 0.0;
                for (std::size_t j = 0; j < shifted.size(); ++j) sum += std::max(a.raster[j], shifted[j]);
                if (sum < best_measure) {
                    best_measure = sum;
                    best_shift = s;
                }
            }
            shift_cluster(b, -best_shift * h, g);
            Cluster merged;
            merged.tris = a.tris;
            merged.tris.insert(merged.tris.end(), b.tris.begin(), b.tris.end());
            merged.raster = grid::Field(g);
            for (std::size_t j = 0; j < merged.raster.size(); ++j)
                merged.raster[j] = std::max(a.raster[j], b.raster[j]);
            next.push_back(std::move(merged));
        }
        if (clusters.size() % 2 == 1) next.push_back(std::move(clusters.back()));
        clusters = std::move(next);
    }

    PerronTree tree;
    tree.levels = levels;
    tree.triangles = clusters.front().tris;
    tree.field = std::move(clusters.front().raster);
    tree.measure = grid::integral(tree.field);
    (void)delta;
    return tree;
}

double perron_direction_coverage(const PerronTree& tree, int sample_count) {
    const auto& g = tree.field.shape();
    const int n = g.n_per_axis;
    const double h = g.spacing();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& t : tree.triangles) {
        lo = std::min(lo, t.theta_lo);
        hi = std::max(hi, t.theta_hi);
    }
    int covered = 0;
    for (int s = 0; s < sample_count; ++s) {
        const double theta = lo + (hi - lo) * (s + 0.5) / sample_count;
        const Triangle* owner = nullptr;
        for (const auto& t : tree.triangles)
            if (theta >= t.theta_lo - 1e-12 && theta <= t.theta_hi + 1e-12) {
                owner = &t;
                break;
            }
        if (!owner) continue;
        // Base point whose segment to the apex has direction theta.
        const double xb = owner->apex[0] - std::tan(theta);
        const Vec p{xb, 0.0};
        const int steps = 4 * n;
        int inside = 0;
        for (int m = 0; m <= steps; ++m) {
            const double u = static_cast<double>(m) / steps;
            const double x = p[0] + u * (owner->apex[0] - p[0]);
            const double y = p[1] + u * (owner->apex[1] - p[1]);
            const int a = ((static_cast<int>(std::llround(x / h)) % n) + n) % n;
            const int b = ((static_cast<int>(std::llround(y / h)) % n) + n) % n;
            if (tree.field[grid::flat_index(g, a, b)] >= 0.25) ++inside;
        }
        // Slivers narrow below one cell near the shared apex, where
        // nearest-cell sampling can miss; 90% of the segment registering at
        // quarter feather weight counts as containment.
        if (inside >= static_cast<int>(0.90 * (steps + 1))) ++covered;
    }
    return static_cast<double>(covered) / sample_count;
}

grid::Field bandlimited_random(std::uint64_t seed, double cutoff, const grid::GridShape& g) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("cutoff must be positive");
    if (cutoff > g.nyquist() * (1.0 + 1e-12)) throw std::invalid_argument("cutoff beyond grid Nyquist");
    const int n = g.n_per_axis;
    const double L = g.side_length;
    const int m_max = static_cast<int>(std::floor(cutoff * L));

    grid::SpectralField F(g);
    auto encode = [](int m0, int m1, int m2) {
        const auto u = [](int m) { return static_cast<std::uint64_t>(m + (1 << 20)); };
        return (u(m0) << 42) | (u(m1) << 21) | u(m2);
    };
    auto wrap_idx = [n](int m) { return ((m % n) + n) % n; };

    auto lattice_loop = [&](auto&& body) {
        if (g.dim == 2) {
            for (int m0 = -m_max; m0 <= m_max; ++m0)
                for (int m1 = -m_max; m1 <= m_max; ++m1) body(m0, m1, 0);
        } else {
            for (int m0 = -m_max; m0 <= m_max; ++m0)
                for (int m1 = -m_max; m1 <= m_max; ++m1)
                    for (int m2 = -m_max; m2 <= m_max; ++m2) body(m0, m1, m2);
        }
    };

    lattice_loop([&](int m0, int m1, int m2) {
        const double r2 = (static_cast<double>(m0) * m0 + static_cast<double>(m1) * m1 +
                           static_cast<double>(m2) * m2) /
                          (L * L);
        if (r2 > cutoff * cutoff * (1.0 + 1e-15)) return;
        // Canonical representative of the +/- pair: lexicographically positive.
        const bool canonical = m0 > 0 || (m0 == 0 && (m1 > 0 || (m1 == 0 && m2 > 0)));
        const bool zero = m0 == 0 && m1 == 0 && m2 == 0;
        if (!canonical && !zero) return;
        Rng rng(mix_seed(seed, encode(m0, m1, m2)));
        const std::size_t i = g.dim == 2 ? grid::flat_index(g, wrap_idx(m0), wrap_idx(m1))
                                         : grid::flat_index(g, wrap_idx(m0), wrap_idx(m1), wrap_idx(m2));
        if (zero) {
            F[i] = rng.gaussian();
            return;
        }
        const std::complex<double> z{rng.gaussian(), rng.gaussian()};
        F[i] = z;
        const std::size_t j = g.dim == 2 ? grid::flat_index(g, wrap_idx(-m0), wrap_idx(-m1))
                                         : grid::flat_index(g, wrap_idx(-m0), wrap_idx(-m1), wrap_idx(-m2));
        F[j] = std::conj(z);
    });

    const double l2 = F.l2_norm();
    if (!(l2 > 0.0)) throw std::runtime_error("degenerate band-limited draw");
    for (auto& z : F.coeffs()) z /= l2;
    return grid::inverse_transform(F);
}

grid::Field bump_sum(std::uint64_t seed, int count, const grid::GridShape& g, double* amplitude_sum) {
    if (count < 0) throw std::invalid_argument("bump count must be nonnegative");
    const int n = g.n_per_axis;
    const double h = g.spacing();
    const double L = g.side_length;
    grid::Field out(g);
    if (amplitude_sum) *amplitude_sum = 0.0;
    if (count == 0) return out;
    if (L / 8.0 < 4.0 * h) throw std::invalid_argument("grid too coarse for resolved bumps");
    Rng rng(mix_seed(seed, 0xb0f5u));
    const int n2 = g.dim == 3 ? n : 1;
    for (int j = 0; j < count; ++j) {
        Vec center;
        for (int d = 0; d < g.dim; ++d) center[d] = std::floor(rng.uniform() * n) * h;
        const double amplitude = 0.5 + 1.5 * rng.uniform();
        if (amplitude_sum) *amplitude_sum += amplitude;
        const double sigma = 4.0 * h + (L / 8.0 - 4.0 * h) * rng.uniform();
        const double norm_c = amplitude / std::pow(sigma, g.dim);
        auto min_dist = [&](double a, double b) {
            double d = std::fmod(a - b, L);
            if (d < -0.5 * L) d += L;
            if (d >= 0.5 * L) d -= L;
            return d;
        };
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n2; ++c) {
                    Vec d{min_dist(a * h, center[0]), min_dist(b * h, center[1]),
                          g.dim == 3 ? min_dist(c * h, center[2]) : 0.0};
                    out[g.dim == 2 ? grid::flat_index(g, a, b) : grid::flat_index(g, a, b, c)] +=
                        norm_c * std::exp(-std::numbers::pi * dot(d, d) / (sigma * sigma));
                }
    }
    return out;
}

GeneratedField generate(const TestSpec& spec, const grid::GridShape& shape) {
    GeneratedField out{grid::Field(shape)};
    switch (spec.kind) {
        case Kind::ball:
            out.field = ball_indicator(spec.radius, Vec{0.0, 0.0, 0.0}, shape);
            break;
        case Kind::tube:
            out.field = rotated_tube_union(1, spec.delta, shape, spec.seed);
            break;
        case Kind::tube_union:
            out.field = rotated_tube_union(spec.count, spec.delta, shape, spec.seed);
            break;
        case Kind::perron:
            out.field = perron_tree(spec.levels, spec.delta, shape).field;
            break;
        case Kind::bandlimited:
            out.field = bandlimited_random(spec.seed, spec.cutoff, shape);
            break;
        case Kind::bump_sum:
            out.field = bump_sum(spec.seed, spec.count, shape);
            break;
    }
    out.measure = grid::integral(out.field);
    out.l1 = grid::lp_norm(out.field, 1.0);
    out.l2 = grid::lp_norm(out.field, 2.0);
    return out;
}

Kind kind_from_name(const std::string& name) {
    static const std::map<std::string, Kind> names{
        {"ball", Kind::ball},           {"tube", Kind::tube},
        {"tube_union", Kind::tube_union}, {"perron_tree", Kind::perron},
        {"bandlimited_random", Kind::bandlimited}, {"bump_sum", Kind::bump_sum}};
    auto it = names.find(name);
    if (it == names.end()) throw std::invalid_argument("unknown test set kind: " + name);
    return it->second;
}

std::string kind_name(Kind kind) {
    switch (kind) {
        case Kind::ball: return "ball";
        case Kind::tube: return "tube";
        case Kind::tube_union: return "tube_union";
        case Kind::perron: return "perron_tree";
        case Kind::bandlimited: return "bandlimited_random";
        case Kind::bump_sum: return "bump_sum";
    }
    return "unknown";
}

}  // namespace kakeya::testsets
