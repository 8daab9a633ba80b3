#include "kakeya/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kakeya/parallel.hpp"

namespace kakeya::verify {

namespace {

double boundary_weight(const grid::GridShape& g, double scale, double exponent) {
    const double r = 0.5 * g.side_length * std::sqrt(static_cast<double>(g.dim));
    return std::pow(1.0 + r / scale, exponent);
}

/// Max |kernel| on the outermost index shell (the torus seam).
double boundary_tail(const grid::Field& f) {
    const auto& g = f.shape();
    const int n = g.n_per_axis;
    double tail = 0.0;
    if (g.dim == 2) {
        for (int a = 0; a < n; ++a) {
            tail = std::max(tail, std::abs(f[grid::flat_index(g, a, n / 2)]));
            tail = std::max(tail, std::abs(f[grid::flat_index(g, n / 2, a)]));
        }
    } else {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                tail = std::max(tail, std::abs(f[grid::flat_index(g, a, b, n / 2)]));
                tail = std::max(tail, std::abs(f[grid::flat_index(g, a, n / 2, b)]));
                tail = std::max(tail, std::abs(f[grid::flat_index(g, n / 2, a, b)]));
            }
    }
    return tail;
}

/// Synthesizes the rotated/dilated band kernel with symbol
/// eta_hat(t A^{-1} xi) and returns its weighted masses for each requested
/// (scale, exponent) pair.
std::vector<double> rotated_band_masses(const grid::GridShape& shape,
                                        const std::function<double(const Vec&)>& eta_symbol, double t,
                                        const Rotation& A,
                                        const std::vector<std::pair<double, double>>& weights) {
    const grid::Field kernel = grid::synthesize(
        shape, [&](const Vec& xi) { return eta_symbol(t * A.apply_inverse(xi)); });
    std::vector<double> out;
    out.reserve(weights.size());
    for (const auto& [scale, exponent] : weights)
        out.push_back(weighted_kernel_integral(kernel, scale, exponent));
    return out;
}

std::function<double(const Vec&)> eta1_symbol(const filters::FilterBank& bank, const filters::TestFunction& tf,
                                              int k) {
    return [bank, tf, k](const Vec& xi) {
        const Vec z = bank.compress(xi);
        const double band = bank.band_symbol(filters::Family::eps_scaled, k, z);
        return band == 0.0 ? 0.0 : band * tf.spectral(z);
    };
}

std::function<double(const Vec&)> eta0_symbol(const filters::FilterBank& bank, const filters::TestFunction& tf,
                                              int k) {
    return [bank, tf, k](const Vec& xi) {
        const Vec z = bank.compress(xi);
        const double low = bank.band_symbol(filters::Family::eps_scaled, 0, z) +
                           bank.band_symbol(filters::Family::eps_scaled, 1, z);
        if (low == 0.0) return 0.0;
        const double band = bank.band_symbol(filters::Family::dyadic, k, z);
        return band == 0.0 ? 0.0 : low * band * tf.spectral(z);
    };
}

std::vector<double> dedup_sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v)
        if (out.empty() || x > out.back() * (1.0 + 1e-9)) out.push_back(x);
    return out;
}

}  // namespace

double weighted_kernel_integral(const grid::Field& kernel, double scale, double exponent, bool* tail_warning) {
    if (!(scale > 0.0)) throw std::invalid_argument("weight scale must be positive");
    const auto& g = kernel.shape();
    const int n = g.n_per_axis;
    const double h = g.spacing();
    const int n2 = g.dim == 3 ? n : 1;
    // Small integer exponents dominate usage; avoid pow per cell for them.
    const int iexp = static_cast<int>(exponent);
    const bool integral_exp = exponent == iexp && iexp >= 0 && iexp <= 8;
    auto weight = [&](double r) {
        const double base = 1.0 + r / scale;
        if (!integral_exp) return std::pow(base, exponent);
        double w = 1.0;
        for (int e = 0; e < iexp; ++e) w *= base;
        return w;
    };
    double sum = 0.0;
    for (int a = 0; a < n; ++a) {
        const double xa = grid::torus_coord(a, n, h);
        for (int b = 0; b < n; ++b) {
            const double xb = grid::torus_coord(b, n, h);
            if (g.dim == 2) {
                const double r = std::hypot(xa, xb);
                sum += weight(r) * std::abs(kernel[grid::flat_index(g, a, b)]);
            } else {
                for (int c = 0; c < n2; ++c) {
                    const double xc = grid::torus_coord(c, n, h);
                    const double r = std::sqrt(xa * xa + xb * xb + xc * xc);
                    sum += weight(r) * std::abs(kernel[grid::flat_index(g, a, b, c)]);
                }
            }
        }
    }
    if (tail_warning)
        *tail_warning = boundary_weight(g, scale, exponent) * boundary_tail(kernel) > 1e-8;
    return g.cell_volume() * sum;
}

std::vector<DecayRow> lemma31_table(const filters::FilterBank& bank, const filters::TestFunction& tf,
                                    double weight_exponent, int k_lo, int k_hi, const grid::GridShape& shape) {
    if (k_lo < 2) throw std::invalid_argument("eta1 rows start at k = 2");
    if (!(weight_exponent > 1.0)) throw std::invalid_argument("weight exponent must exceed 1");
    std::vector<DecayRow> rows;
    for (int k = k_lo; k <= std::min(k_hi, bank.k_max); ++k) {
        const filters::EtaKernel kernel = filters::eta1_kernel(bank, tf, k, shape);
        DecayRow row;
        row.k = k;
        const double scale = std::pow(bank.delta, 1.0 + (k + 3) * bank.eps);
        row.integral = weighted_kernel_integral(kernel.spatial, scale, weight_exponent, &row.tail_warning);
        row.bound = std::pow(bank.delta, k * bank.eps);
        row.ratio = row.integral / row.bound;
        row.truncated = kernel.diag.truncated;
        rows.push_back(row);
    }
    return rows;
}

std::vector<LowBandRow> lemma32_table(const filters::FilterBank& bank, const filters::TestFunction& tf,
                                      double weight_exponent, const grid::GridShape& shape) {
    if (!(weight_exponent > 1.0)) throw std::invalid_argument("weight exponent must exceed 1");
    std::vector<LowBandRow> rows;
    const double N = weight_exponent;
    for (int k = 0; k <= bank.s; ++k) {
        const filters::EtaKernel kernel = filters::eta0_kernel(bank, tf, k, shape);
        LowBandRow row;
        row.k = k;
        const double scale_tight = std::exp2(k + 1) * bank.delta;
        const double scale_wide = std::exp2(k + 1);
        bool warn_tight = false, warn_wide = false;
        row.integral_tight = weighted_kernel_integral(kernel.spatial, scale_tight, N, &warn_tight);
        row.integral_wide = weighted_kernel_integral(kernel.spatial, scale_wide, N, &warn_wide);
        row.tail_warning = warn_tight || warn_wide;
        const double common = std::pow(bank.delta, -2.0 * (N + 1.0) * bank.eps) * std::exp2(-k);
        row.bound_tight = common * std::pow(bank.delta, -N);
        row.bound_wide = common;
        row.ratio_tight = row.integral_tight / row.bound_tight;
        row.ratio_wide = row.integral_wide / row.bound_wide;
        row.l1_mass = grid::lp_norm(kernel.spatial, 1.0);
        rows.push_back(row);
    }
    return rows;
}

BernsteinReport bernstein_check(const grid::Field& u, double t, double r, double c0,
                                const std::vector<std::size_t>& sample_points) {
    if (!(r > 0.0)) throw std::invalid_argument("bernstein check requires r > 0");
    const auto& g = u.shape();
    const grid::SpectralField U = grid::forward_transform(u);

    // Verify the stated band limit before using it.
    double inside_peak = 0.0, outside_peak = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) {
        const double mag = std::abs(U[i]);
        if (norm(U.frequency(i)) <= c0 * t * (1.0 + 1e-12)) inside_peak = std::max(inside_peak, mag);
        else outside_peak = std::max(outside_peak, mag);
    }
    if (outside_peak > 1e-10 * std::max(inside_peak, 1e-300))
        throw std::invalid_argument("field violates the stated band limit");

    const double exponent = g.dim / r;
    // Value form: sup_z |u(x-z)| (1 + t|z|)^{-n/r}.
    const std::vector<double> lhs_value = maximal::weighted_shift_sup(u, 1.0 / t, exponent, sample_points);

    // Gradient form via spectral differentiation.
    grid::Field grad_mag(g);
    {
        std::vector<grid::Field> parts;
        for (int d = 0; d < g.dim; ++d) {
            grid::SpectralField D(g);
            for (std::size_t i = 0; i < U.size(); ++i) {
                const Vec xi = U.frequency(i);
                D[i] = U[i] * std::complex<double>(0.0, 2.0 * std::numbers::pi * xi[d]);
            }
            const auto buf = grid::inverse_transform_complex(D);
            grid::Field part(g);
            for (std::size_t i = 0; i < part.size(); ++i) part[i] = buf[i].real();
            parts.push_back(std::move(part));
        }
        for (std::size_t i = 0; i < grad_mag.size(); ++i) {
            double s = 0.0;
            for (const auto& part : parts) s += part[i] * part[i];
            grad_mag[i] = std::sqrt(s);
        }
    }
    const std::vector<double> lhs_grad = maximal::weighted_shift_sup(grad_mag, 1.0 / t, exponent, sample_points);

    // Hardy-Littlewood side: (M(|u|^r)(x))^{1/r}.
    grid::Field ur(g);
    for (std::size_t i = 0; i < ur.size(); ++i) ur[i] = std::pow(std::abs(u[i]), r);
    const grid::Field m = maximal::hl_maximal(ur);

    BernsteinReport rep;
    for (std::size_t p = 0; p < sample_points.size(); ++p) {
        const double rhs = std::pow(std::max(m[sample_points[p]], 0.0), 1.0 / r);
        if (!(rhs > 0.0)) continue;
        rep.max_ratio_value = std::max(rep.max_ratio_value, lhs_value[p] / rhs);
        rep.max_ratio_gradient = std::max(rep.max_ratio_gradient, lhs_grad[p] / (t * rhs));
    }
    return rep;
}

DominationFactors domination_factors(const filters::FilterBank& bank, const filters::TestDictionary& dict,
                                     const maximal::RotationSet& rots, const std::vector<double>& t_grid,
                                     double weight_exponent, const grid::GridShape& shape) {
    if (!bank.decomposition_regime())
        throw std::invalid_argument("domination factors require delta^eps <= 1/2");
    DominationFactors out;
    for (int k = 2; k <= bank.k_max; ++k) out.k_eta1.push_back(k);
    out.eta1_factor.assign(out.k_eta1.size(), 0.0);
    out.eta0_factor.assign(static_cast<std::size_t>(bank.s) + 1, 0.0);
    out.eta0_factor_wide.assign(static_cast<std::size_t>(bank.s) + 1, 0.0);

    struct Item {
        bool high_band;
        int k;
        std::size_t dict_index;
        double t;
        std::size_t rot_index;
    };
    std::vector<Item> items;
    for (std::size_t d = 0; d < dict.size(); ++d)
        for (double t : t_grid)
            for (std::size_t a = 0; a < rots.rotations.size(); ++a) {
                for (int k = 2; k <= bank.k_max; ++k) items.push_back({true, k, d, t, a});
                for (int k = 0; k <= bank.s; ++k) items.push_back({false, k, d, t, a});
            }

    std::vector<std::array<double, 2>> results(items.size(), {0.0, 0.0});
    parallel_for(items.size(), [&](std::size_t i) {
        const Item& it = items[i];
        const auto& tf = dict[it.dict_index];
        const Rotation& A = rots.rotations[it.rot_index];
        if (it.high_band) {
            const double scale = std::pow(bank.delta, 1.0 + (it.k + 3) * bank.eps) * it.t;
            const auto masses = rotated_band_masses(shape, eta1_symbol(bank, tf, it.k), it.t, A,
                                                    {{scale, weight_exponent}});
            results[i][0] = masses[0];
        } else {
            const double scale_direct = std::exp2(-(it.k + 1)) * bank.delta * it.t;
            const double scale_wide = std::exp2(-(it.k + 1)) * it.t;
            const auto masses = rotated_band_masses(shape, eta0_symbol(bank, tf, it.k), it.t, A,
                                                    {{scale_direct, weight_exponent}, {scale_wide, weight_exponent}});
            results[i][0] = masses[0];
            results[i][1] = masses[1];
        }
    });
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Item& it = items[i];
        if (it.high_band) {
            auto& slot = out.eta1_factor[static_cast<std::size_t>(it.k - 2)];
            slot = std::max(slot, results[i][0]);
        } else {
            auto& slot = out.eta0_factor[static_cast<std::size_t>(it.k)];
            slot = std::max(slot, results[i][0]);
            auto& wide = out.eta0_factor_wide[static_cast<std::size_t>(it.k)];
            wide = std::max(wide, results[i][1]);
        }
    }

    double s1 = 0.0, s0 = 0.0, s0w = 0.0;
    for (double v : out.eta1_factor) s1 += v;
    for (double v : out.eta0_factor) s0 += v;
    for (double v : out.eta0_factor_wide) s0w += v;
    out.sum_direct = s1 + s0;
    out.sum_wide = s1 + std::pow(bank.delta, -weight_exponent) * s0w;

    std::vector<double> scales;
    for (double t : t_grid) {
        for (int k = 2; k <= bank.k_max; ++k) scales.push_back(std::pow(bank.delta, 1.0 + (k + 3) * bank.eps) * t);
        for (int k = 0; k <= bank.s; ++k) scales.push_back(std::exp2(-(k + 1)) * bank.delta * t);
    }
    out.mstar_scales = dedup_sorted(std::move(scales));
    return out;
}

DominationReport domination_check(const grid::Field& f, const filters::FilterBank& bank,
                                  const filters::TestDictionary& dict, const maximal::RotationSet& rots,
                                  const std::vector<double>& t_grid, double weight_exponent, int point_count,
                                  const DominationFactors* cached) {
    DominationFactors local;
    if (!cached) {
        local = domination_factors(bank, dict, rots, t_grid, weight_exponent, f.shape());
        cached = &local;
    }
    const auto points = maximal::quasi_random_points(f.shape(), point_count);

    const grid::Field lhs_field = maximal::smoothed_kakeya(f, bank, dict, rots, t_grid);
    const filters::BumpProfile psi{};
    const std::vector<double> mstar = maximal::tangential_at_points(
        f, [psi](const Vec& xi) { return psi(norm(xi)); }, weight_exponent, cached->mstar_scales, points);

    DominationReport rep;
    rep.factors = *cached;
    rep.points_checked = static_cast<int>(points.size());
    rep.tolerance = 1e-8 * grid::max_abs(f);
    rep.min_slack = std::numeric_limits<double>::infinity();
    rep.min_slack_wide = rep.min_slack;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const double lhs = lhs_field[points[p]];
        rep.lhs_max = std::max(rep.lhs_max, lhs);
        const double rhs = cached->sum_direct * mstar[p];
        const double rhs_wide = cached->sum_wide * mstar[p];
        rep.min_slack = std::min(rep.min_slack, rhs - lhs);
        rep.min_slack_wide = std::min(rep.min_slack_wide, rhs_wide - lhs);
        if (lhs > rhs + rep.tolerance) ++rep.violations;
        if (lhs > rhs_wide + rep.tolerance) ++rep.violations_wide;
    }
    return rep;
}

FrozenFactors frozen_factors(const filters::FilterBank& bank, const filters::TestDictionary& dict,
                             const maximal::RotationSet& rots, double t, double r,
                             const grid::GridShape& shape) {
    if (!bank.decomposition_regime())
        throw std::invalid_argument("frozen factors require delta^eps <= 1/2");
    FrozenFactors out;
    out.t = t;
    for (int k = 2; k <= bank.k_max; ++k) out.k_eta1.push_back(k);
    out.j_eta1.assign(out.k_eta1.size(), 0.0);
    out.j_eta0.assign(static_cast<std::size_t>(bank.s) + 1, 0.0);
    const double exponent = shape.dim / r;

    struct Item {
        bool high_band;
        int k;
        std::size_t dict_index;
        std::size_t rot_index;
    };
    std::vector<Item> items;
    for (std::size_t d = 0; d < dict.size(); ++d)
        for (std::size_t a = 0; a < rots.rotations.size(); ++a) {
            for (int k = 2; k <= bank.k_max; ++k) items.push_back({true, k, d, a});
            for (int k = 0; k <= bank.s; ++k) items.push_back({false, k, d, a});
        }
    std::vector<double> results(items.size(), 0.0);
    parallel_for(items.size(), [&](std::size_t i) {
        const Item& it = items[i];
        const auto& tf = dict[it.dict_index];
        const Rotation& A = rots.rotations[it.rot_index];
        const double scale = it.high_band ? std::pow(bank.delta, -(it.k + 3) * bank.eps) * t
                                          : std::exp2(it.k + 1) * t;
        const auto symbol = it.high_band ? eta1_symbol(bank, tf, it.k) : eta0_symbol(bank, tf, it.k);
        results[i] = rotated_band_masses(shape, symbol, t, A, {{scale, exponent}})[0];
    });
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Item& it = items[i];
        auto& slot = it.high_band ? out.j_eta1[static_cast<std::size_t>(it.k - 2)]
                                  : out.j_eta0[static_cast<std::size_t>(it.k)];
        slot = std::max(slot, results[i]);
    }
    return out;
}

FrozenDominationReport frozen_domination_check(const grid::Field& f, const filters::FilterBank& bank,
                                               const filters::TestDictionary& dict,
                                               const maximal::RotationSet& rots, double t, double r,
                                               int point_count, const FrozenFactors* cached) {
    FrozenFactors local;
    if (!cached) {
        local = frozen_factors(bank, dict, rots, t, r, f.shape());
        cached = &local;
    }
    const auto& g = f.shape();
    const auto points = maximal::quasi_random_points(g, point_count);
    const grid::Field lhs_field = maximal::smoothed_frozen_t(f, bank, dict, rots, t);
    const grid::SpectralField F = grid::forward_transform(f);
    const filters::BumpProfile psi{};
    const double exponent = g.dim / r;

    std::vector<double> rhs(points.size(), 0.0);
    auto add_band = [&](double conv_scale, double weight_scale, double factor) {
        if (factor == 0.0) return;
        const grid::Field conv =
            grid::apply_symbol(F, [&](const Vec& xi) { return psi(conv_scale * norm(xi)); });
        const auto w = maximal::weighted_shift_sup(conv, weight_scale, exponent, points);
        for (std::size_t p = 0; p < points.size(); ++p) rhs[p] += factor * w[p];
    };
    for (std::size_t j = 0; j < cached->k_eta1.size(); ++j) {
        const int k = cached->k_eta1[j];
        add_band(std::pow(bank.delta, 1.0 + (k + 3) * bank.eps) * t,
                 std::pow(bank.delta, -(k + 3) * bank.eps) * t, cached->j_eta1[j]);
    }
    for (int k = 0; k <= bank.s; ++k)
        add_band(std::exp2(-(k + 1)) * bank.delta * t, std::exp2(k + 1) * t,
                 cached->j_eta0[static_cast<std::size_t>(k)]);

    FrozenDominationReport rep;
    rep.points_checked = static_cast<int>(points.size());
    rep.tolerance = 1e-8 * grid::max_abs(f);
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < points.size(); ++p) {
        const double lhs = lhs_field[points[p]];
        rep.min_slack = std::min(rep.min_slack, rhs[p] - lhs);
        if (lhs > rhs[p] + rep.tolerance) ++rep.violations;
    }
    return rep;
}

FitResult fit_exponent(const std::vector<double>& deltas, const std::vector<double>& ratios) {
    if (deltas.size() != ratios.size()) throw std::invalid_argument("fit inputs differ in length");
    if (deltas.size() < 3) throw std::invalid_argument("need >= 3 points");
    const std::size_t n = deltas.size();
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(deltas[i] > 0.0 && ratios[i] > 0.0)) throw std::invalid_argument("fit requires positive data");
        xs[i] = std::log(1.0 / deltas[i]);
        ys[i] = std::log(ratios[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 1e-20)) throw std::invalid_argument("degenerate abscissae");
    FitResult fit;
    fit.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = my + fit.slope * (xs[i] - mx);
        rss += (ys[i] - pred) * (ys[i] - pred);
    }
    fit.residual = std::sqrt(rss / static_cast<double>(n));
    return fit;
}

std::vector<double> default_t_grid(double delta, double eps, const grid::GridShape& shape) {
    const double start = std::max(2.0 * shape.spacing(), delta);
    const double cap = std::pow(delta, -eps);
    std::vector<double> out;
    if (start >= cap) return {cap};
    for (double t = start; t <= cap * (1.0 + 1e-12); t *= std::numbers::sqrt2) out.push_back(t);
    if (cap > out.back() * (1.0 + 1e-9)) out.push_back(cap);
    return out;
}

int perron_levels_for(double delta) {
    const int levels = static_cast<int>(std::lround(std::log2(1.0 / delta))) - 1;
    return std::clamp(levels, 1, 6);
}

SweepReport norm_ratio_sweep(const SweepConfig& config) {
    if (config.deltas.size() < 3) throw std::invalid_argument("need >= 3 points");
    const auto shape = grid::GridShape::make(config.dim, config.grid_n, config.grid_l);
    SweepReport report;
    report.op_name = sweep_op_name(config.op);
    report.family_name = testsets::kind_name(config.family.kind);

    for (double delta : config.deltas) {
        if (delta < 2.0 * shape.spacing() * (1.0 - 1e-12))
            throw std::invalid_argument("sweep delta below two cells");
        testsets::TestSpec spec = config.family;
        if (config.adapt_family_delta) {
            spec.delta = delta;
            if (spec.kind == testsets::Kind::perron) spec.levels = perron_levels_for(delta);
            if (spec.kind == testsets::Kind::tube_union)
                spec.count = static_cast<int>(std::ceil(std::numbers::pi / delta));
        }
        const grid::Field f = testsets::generate(spec, shape).field;

        SweepRow row;
        row.delta = delta;
        row.p = config.p;
        row.q = config.q;
        row.in_norm = grid::lp_norm(f, config.p);

        const maximal::DirectionSet dirs = config.dirs_override > 0
                                               ? (config.dim == 2 ? maximal::DirectionSet::uniform_2d(config.dirs_override)
                                                                  : maximal::DirectionSet::fibonacci_3d(config.dirs_override))
                                               : maximal::DirectionSet::for_width(delta, config.dim);
        switch (config.op) {
            case SweepOp::kakeya: {
                const auto values = maximal::kakeya_maximal(f, delta, dirs);
                row.out_norm = maximal::direction_lq_norm(values, dirs.weights, config.q);
                break;
            }
            case SweepOp::nikodym:
                row.out_norm = grid::lp_norm(maximal::nikodym_maximal(f, delta, dirs), config.q);
                break;
            case SweepOp::hl:
                row.out_norm = grid::lp_norm(maximal::hl_maximal(f), config.q);
                break;
            case SweepOp::smoothed: {
                const auto bank = filters::FilterBank::create(delta, config.eps, config.dim, shape);
                const auto rots = maximal::RotationSet::from_directions(dirs);
                const auto t_grid = default_t_grid(delta, config.eps, shape);
                row.out_norm = grid::lp_norm(
                    maximal::smoothed_kakeya(f, bank, filters::dictionary(config.dim), rots, t_grid), config.q);
                break;
            }
            case SweepOp::frozen: {
                const auto bank = filters::FilterBank::create(delta, config.eps, config.dim, shape);
                const auto rots = maximal::RotationSet::from_directions(dirs);
                const double t = config.frozen_t > 0.0 ? config.frozen_t : std::pow(delta, -config.eps);
                row.out_norm = grid::lp_norm(
                    maximal::smoothed_frozen_t(f, bank, filters::dictionary(config.dim), rots, t), config.q);
                break;
            }
            case SweepOp::smoothed_vs_nontangential: {
                const auto bank = filters::FilterBank::create(delta, config.eps, config.dim, shape);
                const auto rots = maximal::RotationSet::from_directions(dirs);
                const auto t_grid = default_t_grid(delta, config.eps, shape);
                row.out_norm = grid::lp_norm(
                    maximal::smoothed_kakeya(f, bank, filters::dictionary(config.dim), rots, t_grid), config.p);
                const filters::BumpProfile psi{};
                const grid::Field nt = maximal::nontangential_maximal(
                    f, [&psi, delta](const Vec& xi) { return psi(delta * norm(xi)); }, t_grid);
                row.in_norm = grid::lp_norm(nt, config.p);
                break;
            }
        }
        row.ratio = row.out_norm / row.in_norm;
        report.rows.push_back(row);
    }

    std::vector<double> ds, ratios;
    for (const auto& row : report.rows) {
        ds.push_back(row.delta);
        ratios.push_back(row.ratio);
    }
    report.fit = fit_exponent(ds, ratios);
    return report;
}

std::string sweep_op_name(SweepOp op) {
    switch (op) {
        case SweepOp::kakeya: return "kakeya";
        case SweepOp::nikodym: return "nikodym";
        case SweepOp::hl: return "hl";
        case SweepOp::smoothed: return "smoothed";
        case SweepOp::frozen: return "frozen";
        case SweepOp::smoothed_vs_nontangential: return "smoothed_vs_nontangential";
    }
    return "unknown";
}

SweepOp sweep_op_from_name(const std::string& name) {
    if (name == "kakeya") return SweepOp::kakeya;
    if (name == "nikodym") return SweepOp::nikodym;
    if (name == "hl") return SweepOp::hl;
    if (name == "smoothed") return SweepOp::smoothed;
    if (name == "frozen") return SweepOp::frozen;
    if (name == "smoothed_vs_nontangential") return SweepOp::smoothed_vs_nontangential;
    throw std::invalid_argument("unknown sweep operator: " + name);
}

}  // namespace kakeya::verify
