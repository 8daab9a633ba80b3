#include "kakeya/filters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace kakeya::filters {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

grid::GridShape reference_shape(int dim) {
    return dim == 2 ? grid::GridShape::make(2, 256, 8.0) : grid::GridShape::make(3, 64, 8.0);
}

double max_compressed_norm(const FilterBank& bank, const grid::GridShape& shape) {
    const double nyq = shape.nyquist();
    double s = 1.0;  // slow axis contributes nyq^2
    for (int d = 0; d + 1 < bank.dim; ++d) s += bank.delta * bank.delta;
    return nyq * std::sqrt(s);
}

std::vector<std::array<int, 3>> multi_indices(int dim, int order) {
    std::vector<std::array<int, 3>> out;
    if (dim == 2) {
        for (int a = 0; a <= order; ++a)
            for (int b = 0; a + b <= order; ++b) out.push_back({a, b, 0});
    } else {
        for (int a = 0; a <= order; ++a)
            for (int b = 0; a + b <= order; ++b)
                for (int c = 0; a + b + c <= order; ++c) out.push_back({a, b, c});
    }
    return out;
}

}  // namespace

FilterBank FilterBank::create(double delta, double eps, int dim, const grid::GridShape& shape) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("filter bank requires 0 < delta < 1");
    if (!(eps > 0.0)) throw std::invalid_argument("filter bank requires eps > 0");
    if (dim != shape.dim) throw std::invalid_argument("filter bank dimension does not match grid");

    FilterBank bank;
    bank.delta = delta;
    bank.eps = eps;
    bank.dim = dim;
    bank.grid_nyquist = shape.nyquist();

    // 2^s < delta^{-2 eps} <= 2^{s+1}
    const double u = 2.0 * eps * std::log2(1.0 / delta);
    int s = std::max(0, static_cast<int>(std::ceil(u - 1e-9)) - 1);
    const double target = std::pow(delta, -2.0 * eps);
    while (!(std::exp2(s) < target * (1.0 + 1e-12))) --s;
    while (!(target <= std::exp2(s + 1) * (1.0 + 1e-12))) ++s;
    bank.s = std::max(0, s);

    // k-sum truncation: delta^{k eps} < 1e-6, or the band's inner radius
    // already beyond every representable compressed frequency.
    const double bold_max = max_compressed_norm(bank, shape);
    int k = 2;
    for (; k < 10000; ++k) {
        if (std::pow(delta, k * eps) < 1e-6) break;
        if (std::pow(delta, -(k - 1) * eps) > bold_max) break;
    }
    bank.k_max = k;
    return bank;
}

double FilterBank::band_symbol_radial(Family family, int k, double r) const {
    if (k < 0) throw std::invalid_argument("band index must be >= 0");
    if (k == 0) return profile(r);
    if (family == Family::dyadic) return profile(std::ldexp(r, -k)) - profile(std::ldexp(r, 1 - k));
    const double a = std::pow(delta, k * eps);
    const double b = std::pow(delta, (k - 1) * eps);
    return profile(a * r) - profile(b * r);
}

std::pair<double, double> FilterBank::band_support(Family family, int k) const {
    if (k == 0) return {0.0, 2.0};
    if (family == Family::dyadic) return {std::exp2(k - 1), std::exp2(k + 1)};
    return {std::pow(delta, -(k - 1) * eps), 2.0 * std::pow(delta, -k * eps)};
}

double TestFunction::base_spectral(const Vec& xi) const {
    static const BumpProfile psi{};
    // Gaussian tails below ~1e-170 are flushed to zero; skipping the exp is
    // what keeps dense kernel sweeps fast.
    constexpr double kGaussCut = 124.0;
    switch (kind) {
        case Kind::phi:
            return psi(norm(xi));
        case Kind::gaussian: {
            const double q = dot(xi, xi);
            return q > kGaussCut ? 0.0 : std::exp(-M_PI * q);
        }
        case Kind::hermite_radial: {
            const double q = dot(xi, xi);
            return q > kGaussCut ? 0.0 : q * std::exp(-M_PI * q);
        }
        case Kind::hermite_pair: {
            const double q = dot(xi, xi);
            return q > kGaussCut ? 0.0 : (xi[0] * xi[0] - xi[1] * xi[1]) * std::exp(-M_PI * q);
        }
        case Kind::cosine_bump: {
            Vec p = xi, m = xi;
            p[dim - 1] -= 1.0;
            m[dim - 1] += 1.0;
            return 0.5 * (psi(4.0 * norm(p)) + psi(4.0 * norm(m)));
        }
    }
    return 0.0;
}

TestFunction raw_phi(int dim) {
    TestFunction tf;
    tf.name = "phi";
    tf.kind = TestFunction::Kind::phi;
    tf.dim = dim;
    tf.scale = 1.0;
    const auto shape = reference_shape(dim);
    tf.l1_mass = grid::lp_norm(grid::synthesize(shape, [&](const Vec& xi) { return tf.base_spectral(xi); }), 1.0);
    return tf;
}

double estimate_max_seminorm(const TestFunction& tf, int order) {
    const auto shape = reference_shape(tf.dim);
    const int n = shape.n_per_axis;
    const double h = shape.spacing();

    // max over |alpha| <= order of |x^alpha| equals max(1, max_d |x_d|)^order.
    std::vector<double> weight(shape.cell_count());
    {
        std::vector<double> axis(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) axis[static_cast<std::size_t>(i)] = std::abs(grid::torus_coord(i, n, h));
        std::size_t idx = 0;
        if (tf.dim == 2) {
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b, ++idx)
                    weight[idx] = std::pow(std::max({1.0, axis[static_cast<std::size_t>(a)],
                                                     axis[static_cast<std::size_t>(b)]}),
                                           order);
        } else {
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c, ++idx)
                        weight[idx] = std::pow(std::max({1.0, axis[static_cast<std::size_t>(a)],
                                                         axis[static_cast<std::size_t>(b)],
                                                         axis[static_cast<std::size_t>(c)]}),
                                               order);
        }
    }

    const auto base = grid::sample_symbol(shape, [&](const Vec& xi) { return tf.base_spectral(xi); });
    double worst = 0.0;
    for (const auto& beta : multi_indices(tf.dim, order)) {
        grid::SpectralField D(shape);
        for (std::size_t i = 0; i < D.size(); ++i) {
            const Vec xi = D.frequency(i);
            std::complex<double> mult{1.0, 0.0};
            for (int d = 0; d < tf.dim; ++d)
                for (int p = 0; p < beta[static_cast<std::size_t>(d)]; ++p)
                    mult *= std::complex<double>(0.0, kTwoPi * xi[d]);
            D[i] = base[i] * mult;
        }
        const auto spatial = grid::inverse_transform_complex(D);
        double m = 0.0;
        for (std::size_t i = 0; i < spatial.size(); ++i) m = std::max(m, std::abs(spatial[i]) * weight[i]);
        worst = std::max(worst, m);
    }
    return worst;
}

const TestDictionary& dictionary(int dim, int order) {
    if (order < 0) order = 2 * dim + 2;
    static std::mutex mutex;
    static std::map<std::pair<int, int>, TestDictionary> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({dim, order});
    if (it != cache.end()) return it->second;

    TestDictionary dict;
    const auto shape = reference_shape(dim);
    const std::vector<std::pair<std::string, TestFunction::Kind>> entries = {
        {"phi", TestFunction::Kind::phi},
        {"gauss", TestFunction::Kind::gaussian},
        {"hermite-radial", TestFunction::Kind::hermite_radial},
        {"hermite-pair", TestFunction::Kind::hermite_pair},
        {"cos-bump", TestFunction::Kind::cosine_bump},
    };
    for (const auto& [name, kind] : entries) {
        TestFunction tf;
        tf.name = name;
        tf.kind = kind;
        tf.dim = dim;
        const double sn = estimate_max_seminorm(tf, order);
        tf.max_seminorm = sn;
        tf.scale = sn > 1.0 ? 1.0 / sn : 1.0;
        tf.l1_mass =
            grid::lp_norm(grid::synthesize(shape, [&](const Vec& xi) { return tf.spectral(xi); }), 1.0);
        dict.push_back(tf);
    }
    return cache.emplace(std::pair<int, int>{dim, order}, std::move(dict)).first->second;
}

grid::Field phi_field(const FilterBank& bank, double t, const grid::GridShape& shape, KernelDiagnostics* diag) {
    if (!(t > 0.0)) throw std::invalid_argument("phi_field requires t > 0");
    KernelDiagnostics d;
    d.unresolved = 2.0 / t > shape.nyquist();
    grid::Field f =
        grid::synthesize(shape, [&](const Vec& xi) { return bank.phi_hat_radial(t * norm(xi)); }, &d.max_imag);
    // Symmetrize: the symbol is exactly even, so enforce f(x) = f(-x) bitwise.
    const int n = shape.n_per_axis;
    auto mirror = [n](int i) { return i == 0 ? 0 : n - i; };
    if (shape.dim == 2) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const auto i = grid::flat_index(shape, a, b);
                const auto j = grid::flat_index(shape, mirror(a), mirror(b));
                if (i < j) f[i] = f[j] = 0.5 * (f[i] + f[j]);
            }
    } else {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    const auto i = grid::flat_index(shape, a, b, c);
                    const auto j = grid::flat_index(shape, mirror(a), mirror(b), mirror(c));
                    if (i < j) f[i] = f[j] = 0.5 * (f[i] + f[j]);
                }
    }
    if (diag) *diag = d;
    return f;
}

namespace {

EtaKernel make_eta(const FilterBank& bank, const std::function<double(const Vec&)>& symbol,
                   const std::function<double(const Vec&)>& divisor, int k, double nominal_inner,
                   const grid::GridShape& shape) {
    EtaKernel out;
    out.k = k;
    out.symbol = symbol;

    grid::SpectralField F = grid::sample_symbol(shape, symbol);
    double peak = 0.0, boundary_peak = 0.0, divisor_defect = 0.0;
    const int n = shape.n_per_axis;
    for (std::size_t i = 0; i < F.size(); ++i) {
        const double v = std::abs(F[i].real());
        peak = std::max(peak, v);
        if (v > 1e-12) {
            const Vec xi = F.frequency(i);
            divisor_defect = std::max(divisor_defect, std::abs(divisor(xi) - 1.0));
        }
    }
    // Nyquist shell scan: any index at the -N/2 plane.
    if (shape.dim == 2) {
        for (int a = 0; a < n; ++a) {
            boundary_peak = std::max(boundary_peak, std::abs(F[grid::flat_index(shape, a, n / 2)].real()));
            boundary_peak = std::max(boundary_peak, std::abs(F[grid::flat_index(shape, n / 2, a)].real()));
        }
    } else {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                boundary_peak = std::max(boundary_peak, std::abs(F[grid::flat_index(shape, a, b, n / 2)].real()));
                boundary_peak = std::max(boundary_peak, std::abs(F[grid::flat_index(shape, a, n / 2, b)].real()));
                boundary_peak = std::max(boundary_peak, std::abs(F[grid::flat_index(shape, n / 2, a, b)].real()));
            }
    }
    out.diag.divisor_defect = divisor_defect;
    out.diag.truncated = peak == 0.0 && nominal_inner > max_compressed_norm(bank, shape);
    out.diag.unresolved = peak > 0.0 && boundary_peak > 1e-9 * peak;

    std::vector<std::complex<double>> coeffs(F.coeffs().begin(), F.coeffs().end());
    const auto buf = grid::inverse_transform_complex(grid::SpectralField(shape, std::move(coeffs)));
    grid::Field spatial(shape);
    for (std::size_t i = 0; i < buf.size(); ++i) {
        spatial[i] = buf[i].real();
        out.diag.max_imag = std::max(out.diag.max_imag, std::abs(buf[i].imag()));
    }
    out.spatial = std::move(spatial);
    return out;
}

}  // namespace

EtaKernel eta1_kernel(const FilterBank& bank, const TestFunction& tf, int k, const grid::GridShape& shape) {
    if (k < 2) throw std::invalid_argument("eta1 kernel requires k >= 2");
    if (!bank.decomposition_regime())
        throw std::invalid_argument("eta1 kernel requires delta^eps <= 1/2");
    const double divisor_scale = std::pow(bank.delta, 1.0 + (k + 3) * bank.eps);
    // Capture by value: the returned kernel's symbol may outlive the bank.
    auto symbol = [bank, tf, k](const Vec& xi) {
        const Vec z = bank.compress(xi);
        const double band = bank.band_symbol(Family::eps_scaled, k, z);
        return band == 0.0 ? 0.0 : band * tf.spectral(z);
    };
    auto divisor = [bank, divisor_scale](const Vec& xi) { return bank.phi_hat_radial(divisor_scale * norm(xi)); };
    return make_eta(bank, symbol, divisor, k, bank.band_support(Family::eps_scaled, k).first, shape);
}

EtaKernel eta0_kernel(const FilterBank& bank, const TestFunction& tf, int k, const grid::GridShape& shape) {
    if (k < 0 || k > bank.s) throw std::invalid_argument("eta0 kernel requires 0 <= k <= s");
    if (!bank.decomposition_regime())
        throw std::invalid_argument("eta0 kernel requires delta^eps <= 1/2");
    const double divisor_scale = std::exp2(-(k + 1)) * bank.delta;
    auto symbol = [bank, tf, k](const Vec& xi) {
        const Vec z = bank.compress(xi);
        const double low = bank.band_symbol(Family::eps_scaled, 0, z) + bank.band_symbol(Family::eps_scaled, 1, z);
        if (low == 0.0) return 0.0;
        const double band = bank.band_symbol(Family::dyadic, k, z);
        return band == 0.0 ? 0.0 : low * band * tf.spectral(z);
    };
    auto divisor = [bank, divisor_scale](const Vec& xi) { return bank.phi_hat_radial(divisor_scale * norm(xi)); };
    return make_eta(bank, symbol, divisor, k, 0.0, shape);
}

ReconstructionReport reconstruct(const FilterBank& bank, const TestFunction& tf, const Rotation& A,
                                 const grid::GridShape& shape, double tol) {
    if (!bank.decomposition_regime())
        throw std::invalid_argument("reconstruction requires delta^eps <= 1/2");
    ReconstructionReport rep;
    rep.k_max_used = bank.k_max;

    const int n = shape.n_per_axis;
    const double L = shape.side_length;
    const double tail_scale = std::pow(bank.delta, bank.k_max * bank.eps);

    auto eval = [&](const Vec& xi) {
        const Vec w = A.apply(xi);
        const Vec z = bank.compress(w);
        const double r = norm(xi);
        const double target = tf.spectral(z);

        double resum = 0.0;
        const double low = bank.band_symbol(Family::eps_scaled, 0, z) + bank.band_symbol(Family::eps_scaled, 1, z);
        if (low != 0.0) {
            double dyadic_sum = 0.0;
            for (int k = 0; k <= bank.s; ++k) {
                const double band = bank.band_symbol(Family::dyadic, k, z);
                if (band != 0.0)
                    dyadic_sum += band * bank.phi_hat_radial(std::exp2(-(k + 1)) * bank.delta * r);
            }
            resum += low * dyadic_sum * target;
        }
        for (int k = 2; k <= bank.k_max; ++k) {
            const double band = bank.band_symbol(Family::eps_scaled, k, z);
            if (band != 0.0)
                resum += band * target * bank.phi_hat_radial(std::pow(bank.delta, 1.0 + (k + 3) * bank.eps) * r);
        }

        const double err = std::abs(resum - target);
        const double tail = std::abs((1.0 - bank.phi_hat_radial(tail_scale * norm(z))) * target);
        return std::pair<double, double>{err, tail};
    };

    if (shape.dim == 2) {
        for (int a = 0; a < n; ++a) {
            const double xa = grid::freq_int(a, n) / L;
            for (int b = 0; b < n; ++b) {
                auto [err, tail] = eval(Vec{xa, grid::freq_int(b, n) / L});
                rep.sup_error = std::max(rep.sup_error, err);
                rep.truncation_residual = std::max(rep.truncation_residual, tail);
            }
        }
    } else {
        for (int a = 0; a < n; ++a) {
            const double xa = grid::freq_int(a, n) / L;
            for (int b = 0; b < n; ++b) {
                const double xb = grid::freq_int(b, n) / L;
                for (int c = 0; c < n; ++c) {
                    auto [err, tail] = eval(Vec{xa, xb, grid::freq_int(c, n) / L});
                    rep.sup_error = std::max(rep.sup_error, err);
                    rep.truncation_residual = std::max(rep.truncation_residual, tail);
                }
            }
        }
    }
    rep.ok = rep.sup_error < tol;
    return rep;
}

double tube_test_symbol(const FilterBank& bank, const TestFunction& tf, double t, const Rotation& A,
                        const Vec& xi) {
    return tf.spectral(bank.compress(t * A.apply_inverse(xi)));
}

grid::Field tube_test_kernel(const FilterBank& bank, const TestFunction& tf, double t, const Rotation& A,
                             const grid::GridShape& shape, KernelDiagnostics* diag) {
    if (!(t > 0.0)) throw std::invalid_argument("tube test kernel requires t > 0");
    KernelDiagnostics d;
    grid::Field f = grid::synthesize(
        shape, [&](const Vec& xi) { return tube_test_symbol(bank, tf, t, A, xi); }, &d.max_imag);
    // Resolution heuristic: kernel widths are ~ (t delta) across the tube,
    // so the symbol reaches the Nyquist shell when t delta is near the
    // spacing. Probe the axis points of the shell.
    const double nyq = shape.nyquist();
    double boundary = std::abs(tube_test_symbol(bank, tf, t, A, shape.dim == 2 ? Vec{nyq, 0.0} : Vec{nyq, 0.0, 0.0}));
    boundary = std::max(boundary, std::abs(tube_test_symbol(bank, tf, t, A,
                                                            shape.dim == 2 ? Vec{0.0, nyq} : Vec{0.0, nyq, 0.0})));
    if (shape.dim == 3)
        boundary = std::max(boundary, std::abs(tube_test_symbol(bank, tf, t, A, Vec{0.0, 0.0, nyq})));
    d.unresolved = boundary > 1e-6;
    if (diag) *diag = d;
    return f;
}

}  // namespace kakeya::filters
