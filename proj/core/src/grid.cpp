#include "kakeya/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace kakeya::grid {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Plan cache shared by all transforms. FFTW plan creation is not
/// thread-safe; execution through the new-array interface is.
class FftEngine {
public:
    static FftEngine& instance() {
        static FftEngine e;
        return e;
    }

    void transform(const GridShape& g, int sign, std::complex<double>* in, std::complex<double>* out) {
        fftw_plan plan = plan_for(g, sign);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
    }

    void transform_r2c(const GridShape& g, double* in, std::complex<double>* out) {
        fftw_plan plan = plan_half(g, /*forward=*/true);
        fftw_execute_dft_r2c(plan, in, reinterpret_cast<fftw_complex*>(out));
    }

    void transform_c2r(const GridShape& g, std::complex<double>* in, double* out) {
        fftw_plan plan = plan_half(g, /*forward=*/false);
        fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in), out);
    }

private:
    fftw_plan plan_for(const GridShape& g, int sign) {
        const std::tuple<int, int, int> key{g.dim, g.n_per_axis, sign};
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // Plan on scratch buffers with FFTW_ESTIMATE: deterministic across
        // runs, and the buffers passed to execute_dft may differ.
        std::vector<std::complex<double>> scratch(g.cell_count());
        int dims[kMaxDim] = {g.n_per_axis, g.n_per_axis, g.n_per_axis};
        fftw_plan p = fftw_plan_dft(g.dim, dims, reinterpret_cast<fftw_complex*>(scratch.data()),
                                    reinterpret_cast<fftw_complex*>(scratch.data()), sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

    fftw_plan plan_half(const GridShape& g, bool forward) {
        const std::tuple<int, int, int> key{g.dim, g.n_per_axis, forward ? 2 : 3};
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = half_plans_.find(key);
        if (it != half_plans_.end()) return it->second;
        const std::size_t half = HalfSpectrum::expected_size(g);
        std::vector<double> real_buf(g.cell_count());
        std::vector<std::complex<double>> cplx_buf(half);
        int dims[kMaxDim] = {g.n_per_axis, g.n_per_axis, g.n_per_axis};
        fftw_plan p;
        if (forward) {
            p = fftw_plan_dft_r2c(g.dim, dims, real_buf.data(),
                                  reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
        } else {
            p = fftw_plan_dft_c2r(g.dim, dims, reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                  real_buf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        }
        if (!p) throw std::runtime_error("fftw half plan creation failed");
        half_plans_.emplace(key, p);
        return p;
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
    std::map<std::tuple<int, int, int>, fftw_plan> half_plans_;
};

}  // namespace

GridShape GridShape::make(int dim, int n_per_axis, double side_length) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
    if (!is_pow2(n_per_axis)) throw std::invalid_argument("samples per axis must be a power of two");
    if (!(side_length > 0.0)) throw std::invalid_argument("side length must be positive");
    return GridShape{dim, n_per_axis, side_length};
}

Field::Field(const GridShape& shape, std::vector<double> values) : shape_(shape), v_(std::move(values)) {
    if (v_.size() != shape.cell_count()) throw std::invalid_argument("field value count does not match grid");
    check_finite();
}

void Field::check_finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) throw std::invalid_argument("field contains non-finite values");
}

SpectralField::SpectralField(const GridShape& shape, std::vector<std::complex<double>> coeffs)
    : shape_(shape), c_(std::move(coeffs)) {
    if (c_.size() != shape.cell_count()) throw std::invalid_argument("coefficient count does not match grid");
}

Vec SpectralField::frequency(std::size_t i) const {
    const int n = shape_.n_per_axis;
    const double L = shape_.side_length;
    Vec xi;
    if (shape_.dim == 2) {
        const auto un = static_cast<std::size_t>(n);
        xi[0] = freq_int(static_cast<int>(i / un), n) / L;
        xi[1] = freq_int(static_cast<int>(i % un), n) / L;
    } else {
        const auto un = static_cast<std::size_t>(n);
        xi[2] = freq_int(static_cast<int>(i % un), n) / L;
        xi[1] = freq_int(static_cast<int>((i / un) % un), n) / L;
        xi[0] = freq_int(static_cast<int>(i / (un * un)), n) / L;
    }
    return xi;
}

double SpectralField::hermitian_defect() const {
    const int n = shape_.n_per_axis;
    double worst = 0.0;
    auto mirror = [n](int i) { return i == 0 ? 0 : n - i; };
    if (shape_.dim == 2) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const auto i = flat_index(shape_, a, b);
                const auto j = flat_index(shape_, mirror(a), mirror(b));
                worst = std::max(worst, std::abs(c_[i] - std::conj(c_[j])));
            }
    } else {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    const auto i = flat_index(shape_, a, b, c);
                    const auto j = flat_index(shape_, mirror(a), mirror(b), mirror(c));
                    worst = std::max(worst, std::abs(c_[i] - std::conj(c_[j])));
                }
    }
    return worst;
}

double SpectralField::l2_norm() const {
    double s = 0.0;
    for (const auto& z : c_) s += std::norm(z);
    double vol = 1.0;
    for (int d = 0; d < shape_.dim; ++d) vol *= shape_.side_length;
    return std::sqrt(s / vol);
}

SpectralField forward_transform(const Field& f) {
    const GridShape& g = f.shape();
    if (!is_pow2(g.n_per_axis)) throw std::invalid_argument("unsupported grid: N not a power of two");
    std::vector<std::complex<double>> buf(g.cell_count());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = f[i];
    SpectralField F(g, std::move(buf));
    FftEngine::instance().transform(g, FFTW_FORWARD, F.coeffs().data(), F.coeffs().data());
    const double hn = g.cell_volume();
    for (auto& z : F.coeffs()) z *= hn;
    return F;
}

Field inverse_transform(const SpectralField& F) {
    const GridShape& g = F.shape();
    std::vector<std::complex<double>> buf(F.coeffs().begin(), F.coeffs().end());
    FftEngine::instance().transform(g, FFTW_BACKWARD, buf.data(), buf.data());
    double vol = 1.0;
    for (int d = 0; d < g.dim; ++d) vol *= g.side_length;
    Field out(g);
    const double inv = 1.0 / vol;
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real() * inv;
    return out;
}

double lp_norm(const Field& f, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("lp_norm requires p > 0");
    if (std::isinf(p)) return max_abs(f);
    double s = 0.0;
    if (p == 2.0) {
        for (double x : f.values()) s += x * x;
    } else if (p == 1.0) {
        for (double x : f.values()) s += std::abs(x);
    } else {
        for (double x : f.values()) s += std::pow(std::abs(x), p);
    }
    return std::pow(f.shape().cell_volume() * s, 1.0 / p);
}

Field convolve(const Field& f, const Field& g) {
    if (!(f.shape() == g.shape())) throw std::invalid_argument("convolve: grid shapes differ");
    SpectralField F = forward_transform(f);
    SpectralField G = forward_transform(g);
    for (std::size_t i = 0; i < F.size(); ++i) F[i] *= G[i];
    return inverse_transform(F);
}

Field abs(const Field& f) {
    Field out(f.shape());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::abs(f[i]);
    return out;
}

Field add(const Field& f, const Field& g) {
    if (!(f.shape() == g.shape())) throw std::invalid_argument("add: grid shapes differ");
    Field out(f.shape());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] + g[i];
    return out;
}

Field scale(const Field& f, double a) {
    Field out(f.shape());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = a * f[i];
    return out;
}

Field cyclic_shift(const Field& f, std::span<const int> offsets) {
    const GridShape& g = f.shape();
    const int n = g.n_per_axis;
    auto wrap = [n](int i) { return ((i % n) + n) % n; };
    Field out(g);
    if (g.dim == 2) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                out[flat_index(g, a, b)] = f[flat_index(g, wrap(a - offsets[0]), wrap(b - offsets[1]))];
    } else {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    out[flat_index(g, a, b, c)] =
                        f[flat_index(g, wrap(a - offsets[0]), wrap(b - offsets[1]), wrap(c - offsets[2]))];
    }
    return out;
}

double integral(const Field& f) {
    double s = 0.0;
    for (double x : f.values()) s += x;
    return f.shape().cell_volume() * s;
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (double x : f.values()) m = std::max(m, std::abs(x));
    return m;
}

double sup_diff(const Field& f, const Field& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
    return m;
}

SpectralField sample_symbol(const GridShape& shape, const std::function<double(const Vec&)>& symbol) {
    SpectralField F(shape);
    const int n = shape.n_per_axis;
    const double L = shape.side_length;
    if (shape.dim == 2) {
        std::size_t i = 0;
        for (int a = 0; a < n; ++a) {
            const double xa = freq_int(a, n) / L;
            for (int b = 0; b < n; ++b, ++i) F[i] = symbol(Vec{xa, freq_int(b, n) / L});
        }
    } else {
        std::size_t i = 0;
        for (int a = 0; a < n; ++a) {
            const double xa = freq_int(a, n) / L;
            for (int b = 0; b < n; ++b) {
                const double xb = freq_int(b, n) / L;
                for (int c = 0; c < n; ++c, ++i) F[i] = symbol(Vec{xa, xb, freq_int(c, n) / L});
            }
        }
    }
    return F;
}

Field synthesize(const GridShape& shape, const std::function<double(const Vec&)>& symbol, double* max_imag) {
    SpectralField F = sample_symbol(shape, symbol);
    std::vector<std::complex<double>> buf(F.coeffs().begin(), F.coeffs().end());
    FftEngine::instance().transform(shape, FFTW_BACKWARD, buf.data(), buf.data());
    double vol = 1.0;
    for (int d = 0; d < shape.dim; ++d) vol *= shape.side_length;
    const double inv = 1.0 / vol;
    double imag = 0.0;
    Field out(shape);
    for (std::size_t i = 0; i < buf.size(); ++i) {
        out[i] = buf[i].real() * inv;
        imag = std::max(imag, std::abs(buf[i].imag()) * inv);
    }
    if (max_imag) *max_imag = imag;
    return out;
}

std::vector<std::complex<double>> inverse_transform_complex(const SpectralField& F) {
    const GridShape& g = F.shape();
    std::vector<std::complex<double>> buf(F.coeffs().begin(), F.coeffs().end());
    FftEngine::instance().transform(g, FFTW_BACKWARD, buf.data(), buf.data());
    double vol = 1.0;
    for (int d = 0; d < g.dim; ++d) vol *= g.side_length;
    const double inv = 1.0 / vol;
    for (auto& z : buf) z *= inv;
    return buf;
}

Field apply_symbol_values(const SpectralField& F, std::span<const double> symbol_values) {
    const GridShape& g = F.shape();
    if (symbol_values.size() != F.size()) throw std::invalid_argument("symbol sample count mismatch");
    std::vector<std::complex<double>> buf(g.cell_count());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = F[i] * symbol_values[i];
    FftEngine::instance().transform(g, FFTW_BACKWARD, buf.data(), buf.data());
    double vol = 1.0;
    for (int d = 0; d < g.dim; ++d) vol *= g.side_length;
    const double inv = 1.0 / vol;
    Field out(g);
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real() * inv;
    return out;
}

std::size_t HalfSpectrum::expected_size(const GridShape& g) {
    const auto n = static_cast<std::size_t>(g.n_per_axis);
    const auto last = n / 2 + 1;
    return g.dim == 2 ? n * last : n * n * last;
}

HalfSpectrum forward_r2c(const Field& f) {
    const GridShape& g = f.shape();
    std::vector<double> in(f.values().begin(), f.values().end());
    std::vector<std::complex<double>> out(HalfSpectrum::expected_size(g));
    FftEngine::instance().transform_r2c(g, in.data(), out.data());
    const double hn = g.cell_volume();
    for (auto& z : out) z *= hn;
    return HalfSpectrum(g, std::move(out));
}

Field apply_symbol_half(const HalfSpectrum& F, std::span<const double> half_symbol) {
    const GridShape& g = F.shape();
    if (half_symbol.size() != F.size()) throw std::invalid_argument("half symbol sample count mismatch");
    std::vector<std::complex<double>> buf(F.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = F[i] * half_symbol[i];
    Field out(g);
    FftEngine::instance().transform_c2r(g, buf.data(), out.values().data());
    double vol = 1.0;
    for (int d = 0; d < g.dim; ++d) vol *= g.side_length;
    const double inv = 1.0 / vol;
    for (auto& v : out.values()) v *= inv;
    return out;
}

Field apply_symbol(const SpectralField& F, const std::function<double(const Vec&)>& symbol) {
    const GridShape& g = F.shape();
    std::vector<std::complex<double>> buf(g.cell_count());
    const int n = g.n_per_axis;
    const double L = g.side_length;
    if (g.dim == 2) {
        std::size_t i = 0;
        for (int a = 0; a < n; ++a) {
            const double xa = freq_int(a, n) / L;
            for (int b = 0; b < n; ++b, ++i) buf[i] = F[i] * symbol(Vec{xa, freq_int(b, n) / L});
        }
    } else {
        std::size_t i = 0;
        for (int a = 0; a < n; ++a) {
            const double xa = freq_int(a, n) / L;
            for (int b = 0; b < n; ++b) {
                const double xb = freq_int(b, n) / L;
                for (int c = 0; c < n; ++c, ++i) buf[i] = F[i] * symbol(Vec{xa, xb, freq_int(c, n) / L});
            }
        }
    }
    FftEngine::instance().transform(g, FFTW_BACKWARD, buf.data(), buf.data());
    double vol = 1.0;
    for (int d = 0; d < g.dim; ++d) vol *= g.side_length;
    const double inv = 1.0 / vol;
    Field out(g);
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real() * inv;
    return out;
}

}  // namespace kakeya::grid
