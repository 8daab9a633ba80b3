#pragma once

#include <array>
#include <functional>
#include <vector>

#include "kakeya/filters.hpp"
#include "kakeya/geometry.hpp"
#include "kakeya/grid.hpp"

namespace kakeya::maximal {

/// A 1 x delta^{n-1} tube: unit length along `direction`, width `width`
/// across. Averaging kernels are centered at the origin; placements range
/// over all grid translates.
struct TubeSpec {
    Vec direction;
    double width = 0.125;
};

/// Quadrature-weighted sample of the unit sphere of directions.
struct DirectionSet {
    int dim = 2;
    std::vector<Vec> directions;
    std::vector<double> weights;   // positive, summing to |S^{n-1}|
    double separation = 0.0;       // minimal pairwise angle

    /// 2D: `count` uniform angles on [0, pi) (antipodal tubes coincide),
    /// weight 2 pi / count each.
    static DirectionSet uniform_2d(int count);
    /// 3D: Fibonacci-sphere nodes, weight 4 pi / count each.
    static DirectionSet fibonacci_3d(int count);
    /// Width-adapted default: 2D count ceil(pi/delta) rounded even,
    /// 3D count ceil(4 pi / delta^2).
    static DirectionSet for_width(double delta, int dim);
};

struct RotationSet {
    std::vector<Rotation> rotations;

    static RotationSet identity_only(int dim);
    /// One orthogonal map per sampled direction, sending e_n to it.
    static RotationSet from_directions(const DirectionSet& dirs);
};

/// Feathered [0,1] tube profile: 1 on the core box, linear one-cell ramp at
/// the boundary, 0 outside. Centered at the origin.
grid::Field tube_shape(const TubeSpec& spec, const grid::GridShape& shape);

/// Mass-one averaging kernel: tube_shape normalized by its measured
/// discrete mass. Rejects width < 2h.
grid::Field tube_indicator(const TubeSpec& spec, const grid::GridShape& shape);

/// Grid offsets of the unfeathered core (the plateau where the profile is
/// exactly 1); the containment rule behind the Nikodym supremum.
std::vector<std::array<int, 3>> tube_core_offsets(const TubeSpec& spec, const grid::GridShape& shape);

/// Kakeya maximal values: for each direction, the largest tube average of
/// |f| over all grid translates.
std::vector<double> kakeya_maximal(const grid::Field& f, double delta, const DirectionSet& dirs);

/// Nikodym maximal field: at x, the largest average of |f| over tubes whose
/// core contains x.
grid::Field nikodym_maximal(const grid::Field& f, double delta, const DirectionSet& dirs);

/// Hardy-Littlewood maximal field over dyadic ball radii (plus the single
/// cell), mass-one feathered ball kernels.
grid::Field hl_maximal(const grid::Field& f);

/// Nontangential maximal: sup over t in t_grid and |x-y| <= t of
/// |f * K_t(y)|, where K_t has symbol base_symbol(t xi).
grid::Field nontangential_maximal(const grid::Field& f, const std::function<double(const Vec&)>& base_symbol,
                                  const std::vector<double>& t_grid);

/// Tangential maximal: sup over t and all grid shifts s of
/// |f * K_t(x - s)| (1 + |s|/t)^{-N}. Exact full-field evaluation; cost
/// grows with N^{2n}, intended for modest grids.
grid::Field tangential_maximal(const grid::Field& f, const std::function<double(const Vec&)>& base_symbol,
                               double weight_exponent, const std::vector<double>& t_grid);

/// Same supremum evaluated only at chosen flat indices, with a pruned
/// nearest-first scan; `scales` plays the role of the t grid.
std::vector<double> tangential_at_points(const grid::Field& f,
                                         const std::function<double(const Vec&)>& base_symbol,
                                         double weight_exponent, const std::vector<double>& scales,
                                         const std::vector<std::size_t>& points);

/// sup_s field(x - s) (1 + |s|/scale)^{-exponent} at chosen points, for an
/// already-convolved nonnegative field.
std::vector<double> weighted_shift_sup(const grid::Field& field, double scale, double exponent,
                                       const std::vector<std::size_t>& points);

struct SmoothedDiagnostics {
    bool unresolved = false;
    int kernel_count = 0;
};

/// Smoothed Kakeya-type maximal: pointwise sup over (t, A, Upsilon) of
/// |f * Upsilon_{A I_t}|, all convolutions spectral.
grid::Field smoothed_kakeya(const grid::Field& f, const filters::FilterBank& bank,
                            const filters::TestDictionary& dict, const RotationSet& rots,
                            const std::vector<double>& t_grid, SmoothedDiagnostics* diag = nullptr);

/// Frozen-t variant: same supremum at a single dilation 0 < t <= delta^{-eps}.
grid::Field smoothed_frozen_t(const grid::Field& f, const filters::FilterBank& bank,
                              const filters::TestDictionary& dict, const RotationSet& rots, double t,
                              SmoothedDiagnostics* diag = nullptr);

/// (sum_i w_i |v_i|^q)^{1/q}; q = infinity gives the max.
double direction_lq_norm(const std::vector<double>& values, const std::vector<double>& weights, double q);

/// Euclidean-ball max filter of radius r (torus metric); exposed for tests.
grid::Field dilate_ball(const grid::Field& f, double radius);

/// Max filter with an arbitrary offset structuring element; exposed for tests.
grid::Field dilate_offsets(const grid::Field& f, const std::vector<std::array<int, 3>>& offsets);

/// Flat indices of a deterministic low-discrepancy sample of grid points.
std::vector<std::size_t> quasi_random_points(const grid::GridShape& shape, int count);

}  // namespace kakeya::maximal
