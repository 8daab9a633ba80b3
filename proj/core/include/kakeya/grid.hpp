#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kakeya/geometry.hpp"

namespace kakeya::grid {

/// Uniform periodic grid on the torus [0,L)^n with N samples per axis.
/// N must be a power of two; n is 2 or 3.
struct GridShape {
    int dim = 2;
    int n_per_axis = 256;
    double side_length = 1.0;

    double spacing() const { return side_length / n_per_axis; }
    std::size_t cell_count() const {
        std::size_t c = 1;
        for (int d = 0; d < dim; ++d) c *= static_cast<std::size_t>(n_per_axis);
        return c;
    }
    double cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < dim; ++d) v *= spacing();
        return v;
    }
    /// Largest representable frequency magnitude per axis, N/(2L).
    double nyquist() const { return n_per_axis / (2.0 * side_length); }

    bool operator==(const GridShape&) const = default;

    static GridShape make(int dim, int n_per_axis, double side_length);
};

/// Integer multi-index helpers for row-major flattened storage.
inline std::size_t flat_index(const GridShape& g, int i0, int i1, int i2 = 0) {
    const auto n = static_cast<std::size_t>(g.n_per_axis);
    if (g.dim == 2) return static_cast<std::size_t>(i0) * n + static_cast<std::size_t>(i1);
    return (static_cast<std::size_t>(i0) * n + static_cast<std::size_t>(i1)) * n + static_cast<std::size_t>(i2);
}

/// Signed frequency integer for FFT-ordered index i, in [-N/2, N/2).
inline int freq_int(int i, int n) { return i < n / 2 ? i : i - n; }

/// Torus-minimal signed coordinate for index i: value in [-L/2, L/2).
inline double torus_coord(int i, int n, double spacing) { return freq_int(i, n) * spacing; }

/// Real scalar field sampled on a GridShape. Immutable by convention after
/// construction; operations return new fields.
class Field {
public:
    Field() = default;
    explicit Field(const GridShape& shape) : shape_(shape), v_(shape.cell_count(), 0.0) {}
    Field(const GridShape& shape, std::vector<double> values);

    const GridShape& shape() const { return shape_; }
    std::span<const double> values() const { return v_; }
    std::span<double> values() { return v_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }

    /// Throws if any value is NaN or infinite.
    void check_finite() const;

private:
    GridShape shape_;
    std::vector<double> v_;
};

/// Complex Fourier coefficients of a Field, FFT-ordered, normalized so that
/// the coefficient at integer frequency m approximates the continuum
/// transform at xi = m/L with kernel e^{-2 pi i <xi, x>}.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(const GridShape& shape) : shape_(shape), c_(shape.cell_count(), {0.0, 0.0}) {}
    SpectralField(const GridShape& shape, std::vector<std::complex<double>> coeffs);

    const GridShape& shape() const { return shape_; }
    std::span<const std::complex<double>> coeffs() const { return c_; }
    std::span<std::complex<double>> coeffs() { return c_; }
    std::size_t size() const { return c_.size(); }
    std::complex<double> operator[](std::size_t i) const { return c_[i]; }
    std::complex<double>& operator[](std::size_t i) { return c_[i]; }

    /// Physical frequency vector xi = m/L for flat index i.
    Vec frequency(std::size_t i) const;

    /// Max |c(m) - conj(c(-m))| over all coefficients.
    double hermitian_defect() const;

    /// L2 norm computed spectrally; equals the spatial L2 norm by Parseval.
    double l2_norm() const;

private:
    GridShape shape_;
    std::vector<std::complex<double>> c_;
};

SpectralField forward_transform(const Field& f);
Field inverse_transform(const SpectralField& F);

/// (h^n sum |f|^p)^{1/p} for finite p, max|f| for p = infinity.
double lp_norm(const Field& f, double p);

/// Circular convolution computed spectrally. With this library's transform
/// normalization, coefficients multiply with no extra factor.
Field convolve(const Field& f, const Field& g);

Field abs(const Field& f);
Field add(const Field& f, const Field& g);
Field scale(const Field& f, double a);
/// Cyclic shift by whole cells; offsets has one entry per axis.
Field cyclic_shift(const Field& f, std::span<const int> offsets);
/// h^n sum f (the discrete integral).
double integral(const Field& f);
double max_abs(const Field& f);
double sup_diff(const Field& f, const Field& g);

/// Samples a frequency-domain symbol at every grid frequency and returns the
/// spatial field (inverse transform). The symbol must be real-valued; for a
/// real output it should be even. max_imag, when non-null, receives the
/// largest imaginary residue dropped.
Field synthesize(const GridShape& shape, const std::function<double(const Vec&)>& symbol,
                 double* max_imag = nullptr);

/// Samples a symbol into spectral storage without transforming.
SpectralField sample_symbol(const GridShape& shape, const std::function<double(const Vec&)>& symbol);

/// Inverse transform keeping the full complex spatial values (for spectral
/// differentiation, where the output need not be real).
std::vector<std::complex<double>> inverse_transform_complex(const SpectralField& F);

/// Pointwise product in frequency space applied to a precomputed transform:
/// returns inverse_transform(F * symbol). The workhorse behind kernel sweeps.
Field apply_symbol(const SpectralField& F, const std::function<double(const Vec&)>& symbol);

/// Same with the symbol already sampled at the grid frequencies (FFT order).
Field apply_symbol_values(const SpectralField& F, std::span<const double> symbol_values);

/// Hermitian half-spectrum of a real field (last axis truncated to N/2+1),
/// for the dense kernel sweeps where a full complex transform per kernel
/// would double the work. Coefficients carry the same h^n normalization.
class HalfSpectrum {
public:
    HalfSpectrum() = default;
    HalfSpectrum(const GridShape& shape, std::vector<std::complex<double>> coeffs)
        : shape_(shape), c_(std::move(coeffs)) {}

    const GridShape& shape() const { return shape_; }
    std::span<const std::complex<double>> coeffs() const { return c_; }
    std::size_t size() const { return c_.size(); }
    std::complex<double> operator[](std::size_t i) const { return c_[i]; }

    static std::size_t expected_size(const GridShape& g);

private:
    GridShape shape_;
    std::vector<std::complex<double>> c_;
};

HalfSpectrum forward_r2c(const Field& f);

/// inverse_transform(F * symbol) for an even real symbol sampled on the
/// half lattice (same layout as HalfSpectrum).
Field apply_symbol_half(const HalfSpectrum& F, std::span<const double> half_symbol);

}  // namespace kakeya::grid
