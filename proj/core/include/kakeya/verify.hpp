#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kakeya/filters.hpp"
#include "kakeya/grid.hpp"
#include "kakeya/maximal.hpp"
#include "kakeya/testsets.hpp"

namespace kakeya::verify {

/// Riemann sum of (1 + |x|_e / scale)^exponent |kernel(x)| over the torus
/// (minimal-distance |x|). tail_warning flags boundary-weight times
/// kernel-tail above 1e-8 (periodization contamination).
double weighted_kernel_integral(const grid::Field& kernel, double scale, double exponent,
                                bool* tail_warning = nullptr);

struct DecayRow {
    int k = 0;
    double integral = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    bool truncated = false;
    bool tail_warning = false;
};

/// Weighted integrals of eta_1^k against the target delta^{k eps}: weight
/// scale delta^{1+(k+3) eps}, exponent N.
std::vector<DecayRow> lemma31_table(const filters::FilterBank& bank, const filters::TestFunction& tf,
                                    double weight_exponent, int k_lo, int k_hi, const grid::GridShape& shape);

struct LowBandRow {
    int k = 0;
    double integral_tight = 0.0;  // weight scale 2^{k+1} delta
    double bound_tight = 0.0;     // delta^{-2(N+1) eps} delta^{-N} 2^{-k}
    double ratio_tight = 0.0;
    double integral_wide = 0.0;  // weight scale 2^{k+1}
    double bound_wide = 0.0;     // delta^{-2(N+1) eps} 2^{-k}
    double ratio_wide = 0.0;
    double l1_mass = 0.0;
    bool tail_warning = false;
};

/// Weighted integrals of eta_0^k, k = 0..s, against both low-band targets.
std::vector<LowBandRow> lemma32_table(const filters::FilterBank& bank, const filters::TestFunction& tf,
                                      double weight_exponent, const grid::GridShape& shape);

struct BernsteinReport {
    double max_ratio_value = 0.0;
    double max_ratio_gradient = 0.0;
};

/// Shift-weighted sup of a band-limited field (and of its gradient /
/// dilation) against the Hardy-Littlewood side, max ratio over sample
/// points. Rejects u whose transform leaks outside |xi| <= c0 t.
BernsteinReport bernstein_check(const grid::Field& u, double t, double r, double c0,
                                const std::vector<std::size_t>& sample_points);

/// Field-independent factors of the pointwise domination chain: for each
/// band k, the discrete weighted mass of the rotated, dilated band kernel,
/// maximized over the sweep's (Upsilon, t, A). mstar_scales collects the
/// deduplicated convolution scales the shift-maximal side must cover.
struct DominationFactors {
    std::vector<int> k_eta1;
    std::vector<double> eta1_factor;        // weight scale delta^{1+(k+3)eps} t
    std::vector<double> eta0_factor;        // weight scale 2^{-(k+1)} delta t
    std::vector<double> eta0_factor_wide;   // weight scale 2^{-(k+1)} t (second chain)
    double sum_direct = 0.0;                // eta1 + eta0 (first chain)
    double sum_wide = 0.0;                  // eta1 + delta^{-N} eta0_wide (second chain)
    std::vector<double> mstar_scales;
};

DominationFactors domination_factors(const filters::FilterBank& bank, const filters::TestDictionary& dict,
                                     const maximal::RotationSet& rots, const std::vector<double>& t_grid,
                                     double weight_exponent, const grid::GridShape& shape);

struct DominationReport {
    int points_checked = 0;
    int violations = 0;
    int violations_wide = 0;
    double min_slack = 0.0;       // min over points of RHS - LHS
    double min_slack_wide = 0.0;
    double lhs_max = 0.0;
    double tolerance = 0.0;
    DominationFactors factors;
};

/// Pointwise domination of the sup-over-dilations smoothed maximal by the
/// band factor sums times the shift-penalized maximal, at sampled points,
/// tolerance 1e-8 ||f||_inf.
DominationReport domination_check(const grid::Field& f, const filters::FilterBank& bank,
                                  const filters::TestDictionary& dict, const maximal::RotationSet& rots,
                                  const std::vector<double>& t_grid, double weight_exponent, int point_count,
                                  const DominationFactors* cached = nullptr);

struct FrozenFactors {
    double t = 1.0;
    std::vector<int> k_eta1;
    std::vector<double> j_eta1;  // weight scale delta^{-(k+3) eps} t, exponent n/r
    std::vector<double> j_eta0;  // weight scale 2^{k+1} t, exponent n/r
};

FrozenFactors frozen_factors(const filters::FilterBank& bank, const filters::TestDictionary& dict,
                             const maximal::RotationSet& rots, double t, double r,
                             const grid::GridShape& shape);

struct FrozenDominationReport {
    int points_checked = 0;
    int violations = 0;
    double min_slack = 0.0;
    double tolerance = 0.0;
};

/// Frozen-dilation domination: per band, weighted kernel mass times the
/// matching shift-weighted sup of f * phi_{c_k t}, summed, checked against
/// the frozen smoothed maximal at sampled points.
FrozenDominationReport frozen_domination_check(const grid::Field& f, const filters::FilterBank& bank,
                                               const filters::TestDictionary& dict,
                                               const maximal::RotationSet& rots, double t, double r,
                                               int point_count, const FrozenFactors* cached = nullptr);

struct FitResult {
    double slope = 0.0;
    double residual = 0.0;  // RMS of fit residuals
};

/// Ordinary least squares of log(ratio) on log(1/delta). Needs >= 3 rows
/// and non-degenerate abscissae.
FitResult fit_exponent(const std::vector<double>& deltas, const std::vector<double>& ratios);

enum class SweepOp { kakeya, nikodym, hl, smoothed, frozen, smoothed_vs_nontangential };

struct SweepRow {
    double delta = 0.0;
    double p = 2.0;
    double q = 2.0;
    double in_norm = 0.0;
    double out_norm = 0.0;
    double ratio = 0.0;
};

struct SweepConfig {
    SweepOp op = SweepOp::kakeya;
    testsets::TestSpec family;  // delta-adapted fields get their delta overwritten per run
    bool adapt_family_delta = true;
    std::vector<double> deltas;
    double p = 2.0;
    double q = 2.0;
    double eps = 0.25;
    int dim = 2;
    int grid_n = 256;
    double grid_l = 1.0;
    double frozen_t = -1.0;  // <= 0 picks delta^{-eps}
    int dirs_override = 0;   // 0: width-adapted count
};

struct SweepReport {
    std::string op_name;
    std::string family_name;
    std::vector<SweepRow> rows;
    FitResult fit;
};

SweepReport norm_ratio_sweep(const SweepConfig& config);

/// Geometric dilation grid with ratio sqrt(2) from max(2h, delta) to
/// delta^{-eps}.
std::vector<double> default_t_grid(double delta, double eps, const grid::GridShape& shape);

/// Bisection depth used for the delta-adapted near-extremal family.
int perron_levels_for(double delta);

std::string sweep_op_name(SweepOp op);
SweepOp sweep_op_from_name(const std::string& name);

}  // namespace kakeya::verify
