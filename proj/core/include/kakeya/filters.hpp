#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kakeya/geometry.hpp"
#include "kakeya/grid.hpp"

namespace kakeya::filters {

/// Radial profile psi: [0,inf) -> [0,1] with psi = 1 on [0,1], psi = 0 on
/// [2,inf), smooth and non-increasing in between. The bridge on [1,2] is
/// g(2-r)/(g(2-r)+g(r-1)) with g(u) = exp(-1/u) for u > 0, so all
/// derivatives vanish at both endpoints and psi(1.5) = 1/2.
struct BumpProfile {
    double operator()(double r) const {
        if (r <= 1.0) return 1.0;
        if (r >= 2.0) return 0.0;
        const double a = std::exp(-1.0 / (2.0 - r));
        const double b = std::exp(-1.0 / (r - 1.0));
        return a / (a + b);
    }
};

enum class Family { dyadic, eps_scaled };

/// Scale bookkeeping for one (delta, eps, n) configuration: the dyadic and
/// delta^eps-based band families, their tube-adapted anisotropic variants,
/// and the truncation indices s and k_max.
struct FilterBank {
    double delta = 0.0625;
    double eps = 0.25;
    int dim = 2;
    int s = 0;       // 2^s < delta^{-2 eps} <= 2^{s+1}
    int k_max = 0;   // eps-family truncation index
    double grid_nyquist = 0.0;
    BumpProfile profile;

    /// True when delta^eps <= 1/2; the band decomposition (eta kernels and
    /// the resummation identity) requires this regime. The smoothed maximal
    /// operators themselves do not.
    bool decomposition_regime() const { return std::pow(delta, eps) <= 0.5 + 1e-12; }

    static FilterBank create(double delta, double eps, int dim, const grid::GridShape& shape);

    double phi_hat(const Vec& xi) const { return profile(norm(xi)); }
    double phi_hat_radial(double r) const { return profile(r); }

    /// Anisotropic compression (xi_1,...,xi_{n-1}, xi_n) -> (delta xi_1, ..., xi_n).
    Vec compress(const Vec& xi) const {
        Vec out = xi;
        for (int d = 0; d + 1 < dim; ++d) out[d] *= delta;
        return out;
    }

    /// Band symbol value. dyadic k>=1: phi_hat(2^-k xi) - phi_hat(2^{1-k} xi);
    /// eps_scaled k>=1: phi_hat(delta^{k eps} xi) - phi_hat(delta^{(k-1) eps} xi);
    /// k=0 is phi_hat for both families.
    double band_symbol(Family family, int k, const Vec& xi) const { return band_symbol_radial(family, k, norm(xi)); }
    double band_symbol_radial(Family family, int k, double r) const;

    /// Tube-adapted variant: the base symbol evaluated at the compressed
    /// frequency.
    double anisotropic_symbol(Family family, int k, const Vec& xi) const {
        return band_symbol(family, k, compress(xi));
    }

    /// Nominal support annulus [inner, outer] in |.|_e of the base symbol
    /// (for the anisotropic variant the same radii apply to the compressed
    /// frequency).
    std::pair<double, double> band_support(Family family, int k) const;
};

/// Normalized Schwartz-class test function: closed-form frequency side plus
/// a normalization factor making every grid-estimated seminorm
/// sup |x^a d^b f| of order up to the configured bound at most 1.
struct TestFunction {
    enum class Kind { phi, gaussian, hermite_radial, hermite_pair, cosine_bump };

    std::string name;
    Kind kind = Kind::gaussian;
    int dim = 2;
    double scale = 1.0;       // normalization applied to the base function
    double l1_mass = 0.0;     // recorded discrete L1 mass of the normalized function
    double max_seminorm = 0.0;

    /// Frequency-side value of the *base* (unnormalized) function.
    double base_spectral(const Vec& xi) const;
    /// Frequency-side value including the normalization factor.
    double spectral(const Vec& xi) const { return scale * base_spectral(xi); }
    bool spectrally_compact() const { return kind == Kind::phi || kind == Kind::cosine_bump; }
};

using TestDictionary = std::vector<TestFunction>;

/// The raw mass-one bump phi (no seminorm rescaling); the kernel behind the
/// maximal-operator fixed points.
TestFunction raw_phi(int dim);

/// The shipped dictionary: phi, a Gaussian, two degree-2 Hermite-modulated
/// Gaussians and a cosine bump with compact frequency support, each rescaled
/// so grid-estimated seminorms up to order `order` (default 2n+2) are <= 1.
/// Results are cached per (dim, order).
const TestDictionary& dictionary(int dim, int order = -1);

/// Grid estimate of max over |a|<=order, |b|<=order of sup |x^a d^b f| for
/// the base function of tf, computed spectrally on a reference grid.
double estimate_max_seminorm(const TestFunction& tf, int order);

struct KernelDiagnostics {
    bool unresolved = false;       // symbol not negligible at the grid Nyquist shell
    bool truncated = false;        // band annulus entirely beyond the Nyquist shell
    double max_imag = 0.0;         // largest imaginary residue dropped in synthesis
    double divisor_defect = 0.0;   // max |divisor - 1| on the detected support
};

/// Spatial dilate phi_t (inverse transform of phi_hat(t xi)); discrete mass
/// 1 up to rounding. Output symmetrized so phi_t(x) = phi_t(-x) exactly.
grid::Field phi_field(const FilterBank& bank, double t, const grid::GridShape& shape,
                      KernelDiagnostics* diag = nullptr);

/// One band kernel of the resummation: symbol evaluator plus its sampled
/// spatial field.
struct EtaKernel {
    int k = 0;
    std::function<double(const Vec&)> symbol;  // includes the test function factor
    grid::Field spatial;
    KernelDiagnostics diag;
};

/// eta_1^k: the k-th eps-family anisotropic band of Upsilon_I, for k >= 2.
/// The nominal divisor phi_hat(delta^{1+(k+3)eps} xi) equals 1 on the
/// support; it is asserted there and dropped from the product.
EtaKernel eta1_kernel(const FilterBank& bank, const TestFunction& tf, int k, const grid::GridShape& shape);

/// eta_0^k for 0 <= k <= s: the low band (Psi_0 + Psi_1) split across dyadic
/// anisotropic bands, divisor phi_hat(2^{-(k+1)} delta xi) asserted = 1.
EtaKernel eta0_kernel(const FilterBank& bank, const TestFunction& tf, int k, const grid::GridShape& shape);

struct ReconstructionReport {
    double sup_error = 0.0;            // max |resummed - target| over grid frequencies
    double truncation_residual = 0.0;  // sup of the dropped k > k_max tail on the grid
    int k_max_used = 0;
    bool ok = false;
};

/// Checks the exact band resummation: the eta_0 and eta_1 symbols evaluated
/// at A xi, times their phi multipliers, sum back to Upsilon_I(A xi) at
/// every grid frequency. tol is the pass threshold on the sup error.
ReconstructionReport reconstruct(const FilterBank& bank, const TestFunction& tf, const Rotation& A,
                                 const grid::GridShape& shape, double tol = 1e-8);

/// The rotated, dilated, tube-adapted test kernel Upsilon_{A I_t}: spatial
/// field with symbol Upsilon_hat(D_delta(t A^{-1} xi)). Mass-preserving.
grid::Field tube_test_kernel(const FilterBank& bank, const TestFunction& tf, double t, const Rotation& A,
                             const grid::GridShape& shape, KernelDiagnostics* diag = nullptr);

/// Symbol form of the same kernel (what multiplies f_hat during sweeps).
double tube_test_symbol(const FilterBank& bank, const TestFunction& tf, double t, const Rotation& A,
                        const Vec& xi);

}  // namespace kakeya::filters
