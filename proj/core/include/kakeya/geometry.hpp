#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace kakeya {

inline constexpr int kMaxDim = 3;

/// Small fixed-capacity vector for points, directions and frequencies in
/// dimension 2 or 3. Unused components stay zero so norms and dot products
/// can ignore the runtime dimension.
struct Vec {
    std::array<double, kMaxDim> c{0.0, 0.0, 0.0};

    Vec() = default;
    Vec(double x, double y) : c{x, y, 0.0} {}
    Vec(double x, double y, double z) : c{x, y, z} {}

    double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
};

inline double dot(const Vec& a, const Vec& b) {
    return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator*(double s, const Vec& a) { return {s * a.c[0], s * a.c[1], s * a.c[2]}; }
inline Vec operator+(const Vec& a, const Vec& b) { return {a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]}; }

/// Orthogonal matrix acting on Vec. Stored row-major; apply_inverse uses the
/// transpose, which equals the inverse for orthogonal input.
struct Rotation {
    int dim = 2;
    std::array<double, kMaxDim * kMaxDim> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double entry(int r, int col) const { return m[static_cast<std::size_t>(r * kMaxDim + col)]; }
    double& entry(int r, int col) { return m[static_cast<std::size_t>(r * kMaxDim + col)]; }

    Vec apply(const Vec& v) const {
        Vec out;
        for (int r = 0; r < dim; ++r) {
            double s = 0.0;
            for (int col = 0; col < dim; ++col) s += entry(r, col) * v[col];
            out[r] = s;
        }
        return out;
    }

    Vec apply_inverse(const Vec& v) const {
        Vec out;
        for (int r = 0; r < dim; ++r) {
            double s = 0.0;
            for (int col = 0; col < dim; ++col) s += entry(col, r) * v[col];
            out[r] = s;
        }
        return out;
    }

    static Rotation identity(int dim) {
        Rotation a;
        a.dim = dim;
        return a;
    }

    /// Counter-clockwise rotation by angle (2D).
    static Rotation planar(double angle) {
        Rotation a;
        a.dim = 2;
        const double c = std::cos(angle), s = std::sin(angle);
        a.entry(0, 0) = c;
        a.entry(0, 1) = -s;
        a.entry(1, 0) = s;
        a.entry(1, 1) = c;
        return a;
    }

    /// Orthogonal map sending the last coordinate axis e_n to the unit
    /// vector omega. 2D: plane rotation; 3D: Rodrigues rotation about
    /// e_n x omega.
    static Rotation axis_to(const Vec& omega, int dim);

    /// Max entry-wise deviation of A^T A from the identity.
    double orthogonality_defect() const;
};

inline Rotation Rotation::axis_to(const Vec& omega, int dim) {
    if (dim == 2) {
        // e_2 = (0,1) -> (sin t, cos t) is the planar rotation by -t.
        const double t = std::atan2(omega[0], omega[1]);
        return planar(-t);
    }
    Rotation a = identity(3);
    const Vec en{0.0, 0.0, 1.0};
    const double c = dot(en, omega);
    Vec k{en[1] * omega[2] - en[2] * omega[1],
          en[2] * omega[0] - en[0] * omega[2],
          en[0] * omega[1] - en[1] * omega[0]};
    const double s = norm(k);
    if (s < 1e-15) {
        if (c < 0.0) {  // omega = -e_n: rotate half-turn about e_1
            a.entry(1, 1) = -1.0;
            a.entry(2, 2) = -1.0;
        }
        return a;
    }
    k = (1.0 / s) * k;
    // Rodrigues: R = I + sin(t) K + (1-cos(t)) K^2 with t from (c, s).
    const std::array<double, 9> K{0, -k[2], k[1], k[2], 0, -k[0], -k[1], k[0], 0};
    for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) {
            double k2 = 0.0;
            for (int j = 0; j < 3; ++j)
                k2 += K[static_cast<std::size_t>(r * 3 + j)] * K[static_cast<std::size_t>(j * 3 + col)];
            a.entry(r, col) = (r == col ? 1.0 : 0.0) + s * K[static_cast<std::size_t>(r * 3 + col)] + (1.0 - c) * k2;
        }
    }
    return a;
}

inline double Rotation::orthogonality_defect() const {
    double worst = 0.0;
    for (int r = 0; r < dim; ++r) {
        for (int col = 0; col < dim; ++col) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j) s += entry(j, r) * entry(j, col);
            worst = std::max(worst, std::abs(s - (r == col ? 1.0 : 0.0)));
        }
    }
    return worst;
}

}  // namespace kakeya
