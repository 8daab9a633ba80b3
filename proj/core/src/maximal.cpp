#include "kakeya/maximal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "kakeya/parallel.hpp"

namespace kakeya::maximal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int wrap(int i, int n) { return ((i % n) + n) % n; }

/// One-cell linear feather: 1 for |v| <= H - h/2, 0 for |v| >= H + h/2.
double feather(double v, double half_width, double h) {
    const double t = (half_width + 0.5 * h - std::abs(v)) / h;
    return std::clamp(t, 0.0, 1.0);
}

bool in_plateau(double v, double half_width, double h) { return half_width + 0.5 * h - std::abs(v) >= h; }

Vec torus_point(const grid::GridShape& g, int i0, int i1, int i2) {
    const int n = g.n_per_axis;
    const double h = g.spacing();
    Vec x;
    x[0] = grid::torus_coord(i0, n, h);
    x[1] = grid::torus_coord(i1, n, h);
    if (g.dim == 3) x[2] = grid::torus_coord(i2, n, h);
    return x;
}

/// All representatives of a cell on the closed cube [-L/2, L/2]^n: indices
/// at the seam (-L/2) also appear as +L/2. Direction-dependent kernels must
/// consider both, or central symmetry breaks on the seam rows.
int cell_representatives(const grid::GridShape& g, int i0, int i1, int i2, std::array<Vec, 8>& out) {
    const int n = g.n_per_axis;
    const Vec base = torus_point(g, i0, i1, i2);
    const int idx[3] = {i0, i1, i2};
    int count = 1;
    out[0] = base;
    for (int d = 0; d < g.dim; ++d) {
        if (idx[d] != n / 2) continue;
        for (int r = 0; r < count; ++r) {
            out[static_cast<std::size_t>(count + r)] = out[static_cast<std::size_t>(r)];
            out[static_cast<std::size_t>(count + r)][d] = 0.5 * g.side_length;
        }
        count *= 2;
    }
    return count;
}

/// out[b] = max over m in [0, W) of in[(b + lo + m) mod n].
void circular_window_max(const double* in, int n, int lo, int W, double* out) {
    if (W >= n) {
        double m = -kInf;
        for (int i = 0; i < n; ++i) m = std::max(m, in[i]);
        for (int i = 0; i < n; ++i) out[i] = m;
        return;
    }
    thread_local std::vector<double> ext;
    thread_local std::vector<int> deque;
    ext.resize(static_cast<std::size_t>(n + W - 1));
    for (int i = 0; i < n + W - 1; ++i) ext[static_cast<std::size_t>(i)] = in[wrap(lo + i, n)];
    deque.clear();
    int head = 0;
    for (int i = 0; i < n + W - 1; ++i) {
        while (static_cast<int>(deque.size()) > head && ext[static_cast<std::size_t>(deque.back())] <= ext[static_cast<std::size_t>(i)])
            deque.pop_back();
        deque.push_back(i);
        const int b = i - W + 1;
        if (b >= 0) {
            if (deque[static_cast<std::size_t>(head)] < b) ++head;
            if (b < n) out[b] = ext[static_cast<std::size_t>(deque[static_cast<std::size_t>(head)])];
        }
    }
}

struct Run {
    std::array<int, 2> group{0, 0};  // offsets on the non-run axes, in axis order
    int lo = 0;
    int hi = 0;
};

/// Splits structuring-element offsets into contiguous runs along run_axis.
std::vector<Run> build_runs(const std::vector<std::array<int, 3>>& offsets, int dim, int run_axis) {
    std::map<std::array<int, 2>, std::vector<int>> groups;
    for (const auto& o : offsets) {
        std::array<int, 2> key{0, 0};
        int slot = 0;
        for (int d = 0; d < dim; ++d)
            if (d != run_axis) key[static_cast<std::size_t>(slot++)] = o[static_cast<std::size_t>(d)];
        groups[key].push_back(o[static_cast<std::size_t>(run_axis)]);
    }
    std::vector<Run> runs;
    for (auto& [key, js] : groups) {
        std::sort(js.begin(), js.end());
        int start = js.front(), prev = js.front();
        for (std::size_t i = 1; i <= js.size(); ++i) {
            if (i == js.size() || js[i] != prev + 1) {
                runs.push_back(Run{key, start, prev});
                if (i < js.size()) start = prev = js[i];
            } else {
                prev = js[i];
            }
        }
    }
    return runs;
}

int pick_run_axis(const std::vector<std::array<int, 3>>& offsets, int dim) {
    int best_axis = dim - 1;
    std::size_t best_groups = std::numeric_limits<std::size_t>::max();
    for (int r = 0; r < dim; ++r) {
        std::map<std::array<int, 2>, bool> groups;
        for (const auto& o : offsets) {
            std::array<int, 2> key{0, 0};
            int slot = 0;
            for (int d = 0; d < dim; ++d)
                if (d != r) key[static_cast<std::size_t>(slot++)] = o[static_cast<std::size_t>(d)];
            groups[key] = true;
        }
        if (groups.size() < best_groups) {
            best_groups = groups.size();
            best_axis = r;
        }
    }
    return best_axis;
}

grid::Field dilate_runs(const grid::Field& f, const std::vector<Run>& runs, int run_axis) {
    const auto& g = f.shape();
    const int n = g.n_per_axis;
    grid::Field out(g);
    for (auto& v : out.values()) v = -kInf;

    thread_local std::vector<double> line, tmp;
    line.resize(static_cast<std::size_t>(n));
    tmp.resize(static_cast<std::size_t>(n));

    auto gather = [&](std::array<int, 2> base, double* dst) {
        if (g.dim == 2) {
            const int fixed = wrap(base[0], n);
            for (int b = 0; b < n; ++b)
                dst[b] = run_axis == 1 ? f[grid::flat_index(g, fixed, b)] : f[grid::flat_index(g, b, fixed)];
        } else {
            const int fa = wrap(base[0], n), fb = wrap(base[1], n);
            for (int b = 0; b < n; ++b) {
                if (run_axis == 0) dst[b] = f[grid::flat_index(g, b, fa, fb)];
                else if (run_axis == 1) dst[b] = f[grid::flat_index(g, fa, b, fb)];
                else dst[b] = f[grid::flat_index(g, fa, fb, b)];
            }
        }
    };
    auto merge = [&](std::array<int, 2> base, const double* src) {
        if (g.dim == 2) {
            const int fixed = base[0];
            for (int b = 0; b < n; ++b) {
                const auto idx = run_axis == 1 ? grid::flat_index(g, fixed, b) : grid::flat_index(g, b, fixed);
                out[idx] = std::max(out[idx], src[b]);
            }
        } else {
            const int fa = base[0], fb = base[1];
            for (int b = 0; b < n; ++b) {
                std::size_t idx;
                if (run_axis == 0) idx = grid::flat_index(g, b, fa, fb);
                else if (run_axis == 1) idx = grid::flat_index(g, fa, b, fb);
                else idx = grid::flat_index(g, fa, fb, b);
                out[idx] = std::max(out[idx], src[b]);
            }
        }
    };

    const int lines0 = n;
    const int lines1 = g.dim == 3 ? n : 1;
    for (const auto& run : runs) {
        const int W = run.hi - run.lo + 1;
        for (int a = 0; a < lines0; ++a) {
            for (int b = 0; b < lines1; ++b) {
                const std::array<int, 2> out_base{a, b};
                const std::array<int, 2> in_base{a + run.group[0], b + run.group[1]};
                gather(in_base, line.data());
                circular_window_max(line.data(), n, run.lo, W, tmp.data());
                merge(out_base, tmp.data());
            }
        }
    }
    return out;
}

/// Offsets sorted by torus distance, cached per grid shape; drives the
/// pruned nearest-first scans of the shift suprema.
struct SortedOffsets {
    std::vector<float> dist;
    std::vector<std::array<int, 3>> off;
};

const SortedOffsets& sorted_offsets(const grid::GridShape& g) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, std::uint64_t>, SortedOffsets> cache;
    const std::tuple<int, int, std::uint64_t> key{g.dim, g.n_per_axis, std::bit_cast<std::uint64_t>(g.side_length)};
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const int n = g.n_per_axis;
    const double h = g.spacing();
    std::vector<std::pair<double, std::array<int, 3>>> all;
    all.reserve(g.cell_count());
    if (g.dim == 2) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const double da = grid::torus_coord(a, n, h), db = grid::torus_coord(b, n, h);
                all.push_back({da * da + db * db, {a, b, 0}});
            }
    } else {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    const double da = grid::torus_coord(a, n, h), db = grid::torus_coord(b, n, h),
                                 dc = grid::torus_coord(c, n, h);
                    all.push_back({da * da + db * db + dc * dc, {a, b, c}});
                }
    }
    std::sort(all.begin(), all.end(),
              [](const auto& x, const auto& y) { return x.first < y.first || (x.first == y.first && x.second < y.second); });
    SortedOffsets so;
    so.dist.reserve(all.size());
    so.off.reserve(all.size());
    for (const auto& [d2, o] : all) {
        so.dist.push_back(static_cast<float>(std::sqrt(d2)));
        so.off.push_back(o);
    }
    return cache.emplace(key, std::move(so)).first->second;
}

std::size_t shifted_index(const grid::GridShape& g, std::size_t x, const std::array<int, 3>& o) {
    const int n = g.n_per_axis;
    const auto un = static_cast<std::size_t>(n);
    if (g.dim == 2) {
        const int a = static_cast<int>(x / un), b = static_cast<int>(x % un);
        return grid::flat_index(g, wrap(a - o[0], n), wrap(b - o[1], n));
    }
    const int c = static_cast<int>(x % un);
    const int b = static_cast<int>((x / un) % un);
    const int a = static_cast<int>(x / (un * un));
    return grid::flat_index(g, wrap(a - o[0], n), wrap(b - o[1], n), wrap(c - o[2], n));
}

/// Runs fn(i) for i in [0, count) on worker threads; thread t also receives
/// its own slot index for accumulator use.
void threaded_for(std::size_t count, int nthreads, const std::function<void(std::size_t, int)>& fn) {
    if (nthreads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i, 0);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = static_cast<std::size_t>(t); i < count; i += static_cast<std::size_t>(nthreads))
                    fn(i, t);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

grid::Field merge_max(std::vector<grid::Field>& parts) {
    grid::Field out = std::move(parts.front());
    for (std::size_t t = 1; t < parts.size(); ++t)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], parts[t][i]);
    return out;
}

/// Samples the rotated, dilated, tube-adapted symbol of tf on the r2c half
/// lattice without per-point indirection: the composed linear map
/// D_delta t A^{-1} is applied directly. All dictionary symbols are even, so
/// the half lattice determines the kernel.
void fill_tube_symbol_half(std::vector<double>& values, const grid::GridShape& g,
                           const filters::FilterBank& bank, const filters::TestFunction& tf, double t,
                           const Rotation& A) {
    const int n = g.n_per_axis;
    const int last = n / 2 + 1;
    const double L = g.side_length;
    values.resize(grid::HalfSpectrum::expected_size(g));
    // Row d of M: (delta on the first dim-1 rows) * t * (A^T row d).
    double M[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (int r = 0; r < g.dim; ++r) {
        const double s = (r + 1 < g.dim ? bank.delta : 1.0) * t;
        for (int c = 0; c < g.dim; ++c) M[r][c] = s * A.entry(c, r);
    }
    std::size_t i = 0;
    if (g.dim == 2) {
        for (int a = 0; a < n; ++a) {
            const double x0 = grid::freq_int(a, n) / L;
            const double r0 = M[0][0] * x0, r1 = M[1][0] * x0;
            for (int b = 0; b < last; ++b, ++i) {
                const double x1 = b / L;
                values[i] = tf.spectral(Vec{r0 + M[0][1] * x1, r1 + M[1][1] * x1});
            }
        }
    } else {
        for (int a = 0; a < n; ++a) {
            const double x0 = grid::freq_int(a, n) / L;
            for (int b = 0; b < n; ++b) {
                const double x1 = grid::freq_int(b, n) / L;
                const double r0 = M[0][0] * x0 + M[0][1] * x1;
                const double r1 = M[1][0] * x0 + M[1][1] * x1;
                const double r2 = M[2][0] * x0 + M[2][1] * x1;
                for (int c = 0; c < last; ++c, ++i) {
                    const double x2 = c / L;
                    values[i] = tf.spectral(Vec{r0 + M[0][2] * x2, r1 + M[1][2] * x2, r2 + M[2][2] * x2});
                }
            }
        }
    }
}

}  // namespace

DirectionSet DirectionSet::uniform_2d(int count) {
    if (count < 1) throw std::invalid_argument("direction count must be positive");
    DirectionSet out;
    out.dim = 2;
    const double step = std::numbers::pi / count;
    for (int i = 0; i < count; ++i) {
        const double theta = i * step;
        out.directions.push_back(Vec{std::sin(theta), std::cos(theta)});
        out.weights.push_back(2.0 * step);  // antipodal identification doubles the cap
    }
    out.separation = step;
    return out;
}

DirectionSet DirectionSet::fibonacci_3d(int count) {
    if (count < 1) throw std::invalid_argument("direction count must be positive");
    DirectionSet out;
    out.dim = 3;
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = ga * i;
        out.directions.push_back(Vec{r * std::cos(phi), r * std::sin(phi), z});
        out.weights.push_back(4.0 * std::numbers::pi / count);
    }
    double min_angle = std::numbers::pi;
    for (std::size_t i = 0; i < out.directions.size(); ++i)
        for (std::size_t j = i + 1; j < out.directions.size(); ++j) {
            const double c = std::clamp(dot(out.directions[i], out.directions[j]), -1.0, 1.0);
            min_angle = std::min(min_angle, std::acos(c));
        }
    out.separation = min_angle;
    return out;
}

DirectionSet DirectionSet::for_width(double delta, int dim) {
    if (dim == 2) {
        int count = static_cast<int>(std::ceil(std::numbers::pi / delta));
        if (count % 2 == 1) ++count;  // quarter-turn symmetric sets need an even count
        return uniform_2d(count);
    }
    const int count = static_cast<int>(std::ceil(4.0 * std::numbers::pi / (delta * delta)));
    return fibonacci_3d(count);
}

RotationSet RotationSet::identity_only(int dim) { return RotationSet{{Rotation::identity(dim)}}; }

RotationSet RotationSet::from_directions(const DirectionSet& dirs) {
    RotationSet out;
    out.rotations.reserve(dirs.directions.size());
    for (const auto& omega : dirs.directions) out.rotations.push_back(Rotation::axis_to(omega, dirs.dim));
    return out;
}

grid::Field tube_shape(const TubeSpec& spec, const grid::GridShape& g) {
    if (std::abs(norm(spec.direction) - 1.0) > 1e-12)
        throw std::invalid_argument("tube direction must be a unit vector");
    if (!(spec.width > 0.0 && spec.width < 1.0)) throw std::invalid_argument("tube width must be in (0,1)");
    const Rotation A = Rotation::axis_to(spec.direction, g.dim);
    const double h = g.spacing();
    const int n = g.n_per_axis;
    grid::Field out(g);
    const int n2 = g.dim == 3 ? n : 1;
    std::array<Vec, 8> reps;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n2; ++c) {
                const int nrep = cell_representatives(g, a, b, c, reps);
                double best = 0.0;
                for (int r = 0; r < nrep; ++r) {
                    const Vec u = A.apply_inverse(reps[static_cast<std::size_t>(r)]);
                    double v = feather(u[g.dim - 1], 0.5, h);
                    for (int d = 0; v > 0.0 && d + 1 < g.dim; ++d) v *= feather(u[d], 0.5 * spec.width, h);
                    best = std::max(best, v);
                }
                out[g.dim == 2 ? grid::flat_index(g, a, b) : grid::flat_index(g, a, b, c)] = best;
            }
    return out;
}

grid::Field tube_indicator(const TubeSpec& spec, const grid::GridShape& g) {
    if (spec.width < 2.0 * g.spacing() * (1.0 - 1e-12))
        throw std::invalid_argument("tube width below two cells is unresolvable");
    grid::Field f = tube_shape(spec, g);
    const double mass = grid::integral(f);
    if (!(mass > 0.0)) throw std::runtime_error("tube rasterized to zero mass");
    return grid::scale(f, 1.0 / mass);
}

std::vector<std::array<int, 3>> tube_core_offsets(const TubeSpec& spec, const grid::GridShape& g) {
    const Rotation A = Rotation::axis_to(spec.direction, g.dim);
    const double h = g.spacing();
    const int n = g.n_per_axis;
    const int n2 = g.dim == 3 ? n : 1;
    std::vector<std::array<int, 3>> offsets;
    std::array<Vec, 8> reps;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n2; ++c) {
                const int nrep = cell_representatives(g, a, b, c, reps);
                bool core = false;
                for (int r = 0; r < nrep && !core; ++r) {
                    const Vec u = A.apply_inverse(reps[static_cast<std::size_t>(r)]);
                    bool ok = in_plateau(u[g.dim - 1], 0.5, h);
                    for (int d = 0; ok && d + 1 < g.dim; ++d) ok = in_plateau(u[d], 0.5 * spec.width, h);
                    core = ok;
                }
                if (core)
                    offsets.push_back({grid::freq_int(a, n), grid::freq_int(b, n), g.dim == 3 ? grid::freq_int(c, n) : 0});
            }
    return offsets;
}

std::vector<double> kakeya_maximal(const grid::Field& f, double delta, const DirectionSet& dirs) {
    const auto& g = f.shape();
    if (delta < 2.0 * g.spacing() * (1.0 - 1e-12))
        throw std::invalid_argument("tube width below two cells is unresolvable");
    const grid::SpectralField F = grid::forward_transform(grid::abs(f));
    std::vector<double> values(dirs.directions.size(), 0.0);
    parallel_for(dirs.directions.size(), [&](std::size_t i) {
        const grid::Field tube = tube_indicator(TubeSpec{dirs.directions[i], delta}, g);
        grid::SpectralField T = grid::forward_transform(tube);
        for (std::size_t j = 0; j < T.size(); ++j) T[j] *= F[j];
        const grid::Field conv = grid::inverse_transform(T);
        double m = -kInf;
        for (double v : conv.values()) m = std::max(m, v);
        values[i] = m;
    });
    return values;
}

grid::Field dilate_offsets(const grid::Field& f, const std::vector<std::array<int, 3>>& offsets) {
    if (offsets.empty()) throw std::invalid_argument("dilation requires a nonempty structuring element");
    const int axis = pick_run_axis(offsets, f.shape().dim);
    return dilate_runs(f, build_runs(offsets, f.shape().dim, axis), axis);
}

grid::Field nikodym_maximal(const grid::Field& f, double delta, const DirectionSet& dirs) {
    const auto& g = f.shape();
    if (delta < 2.0 * g.spacing() * (1.0 - 1e-12))
        throw std::invalid_argument("tube width below two cells is unresolvable");
    const grid::SpectralField F = grid::forward_transform(grid::abs(f));
    const int nthreads = std::min<int>(worker_count(), static_cast<int>(dirs.directions.size()));
    std::vector<grid::Field> acc(static_cast<std::size_t>(std::max(1, nthreads)), grid::Field(g));
    for (auto& part : acc)
        for (auto& v : part.values()) v = -kInf;
    threaded_for(dirs.directions.size(), nthreads, [&](std::size_t i, int slot) {
        const TubeSpec spec{dirs.directions[i], delta};
        grid::SpectralField T = grid::forward_transform(tube_indicator(spec, g));
        for (std::size_t j = 0; j < T.size(); ++j) T[j] *= F[j];
        const grid::Field conv = grid::inverse_transform(T);
        const grid::Field dil = dilate_offsets(conv, tube_core_offsets(spec, g));
        auto& part = acc[static_cast<std::size_t>(slot)];
        for (std::size_t j = 0; j < part.size(); ++j) part[j] = std::max(part[j], dil[j]);
    });
    return merge_max(acc);
}

grid::Field hl_maximal(const grid::Field& f) {
    const auto& g = f.shape();
    static std::mutex mutex;
    static std::map<std::tuple<int, int, std::uint64_t>, std::vector<grid::SpectralField>> cache;
    const std::tuple<int, int, std::uint64_t> key{g.dim, g.n_per_axis, std::bit_cast<std::uint64_t>(g.side_length)};
    const std::vector<grid::SpectralField>* kernels = nullptr;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it == cache.end()) {
            std::vector<grid::SpectralField> built;
            const double h = g.spacing();
            const int n = g.n_per_axis;
            const int n2 = g.dim == 3 ? n : 1;
            for (double r = h; r <= 0.5 * g.side_length * (1.0 + 1e-12); r *= 2.0) {
                grid::Field ball(g);
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n2; ++c)
                            ball[g.dim == 2 ? grid::flat_index(g, a, b) : grid::flat_index(g, a, b, c)] =
                                feather(norm(torus_point(g, a, b, c)), r, h);
                const double mass = grid::integral(ball);
                built.push_back(grid::forward_transform(grid::scale(ball, 1.0 / mass)));
            }
            it = cache.emplace(key, std::move(built)).first;
        }
        kernels = &it->second;
    }
    const grid::Field af = grid::abs(f);
    const grid::SpectralField F = grid::forward_transform(af);
    grid::Field out = af;  // sub-cell ball: the cell average itself
    for (const auto& K : *kernels) {
        grid::SpectralField P(g);
        for (std::size_t j = 0; j < P.size(); ++j) P[j] = F[j] * K[j];
        const grid::Field conv = grid::inverse_transform(P);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(out[j], conv[j]);
    }
    return out;
}

grid::Field dilate_ball(const grid::Field& f, double radius) {
    const auto& g = f.shape();
    const int n = g.n_per_axis;
    const double h = g.spacing();
    if (!(radius >= 0.0)) throw std::invalid_argument("ball radius must be nonnegative");

    std::vector<Run> runs;
    const int half = n / 2;
    auto make_run = [&](int g0, int g1, double rem2) {
        if (rem2 < 0.0) return;
        const int w = static_cast<int>(std::floor(std::sqrt(rem2) / h + 1e-12));
        if (w >= half) runs.push_back(Run{{g0, g1}, -half, half - 1});
        else runs.push_back(Run{{g0, g1}, -w, w});
    };
    if (g.dim == 2) {
        for (int da = -half; da < half; ++da) make_run(da, 0, radius * radius - da * h * da * h);
        if (runs.empty()) runs.push_back(Run{{0, 0}, 0, 0});
        return dilate_runs(f, runs, 1);
    }
    for (int da = -half; da < half; ++da)
        for (int db = -half; db < half; ++db)
            make_run(da, db, radius * radius - da * h * da * h - db * h * db * h);
    if (runs.empty()) runs.push_back(Run{{0, 0}, 0, 0});
    return dilate_runs(f, runs, 2);
}

grid::Field nontangential_maximal(const grid::Field& f, const std::function<double(const Vec&)>& base_symbol,
                                  const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("nontangential maximal requires a nonempty t grid");
    const grid::SpectralField F = grid::forward_transform(f);
    grid::Field out(f.shape());
    for (auto& v : out.values()) v = -kInf;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("t grid entries must be positive");
        const grid::Field conv =
            grid::abs(grid::apply_symbol(F, [&](const Vec& xi) { return base_symbol(t * xi); }));
        const grid::Field dil = dilate_ball(conv, t);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], dil[i]);
    }
    return out;
}

grid::Field tangential_maximal(const grid::Field& f, const std::function<double(const Vec&)>& base_symbol,
                               double weight_exponent, const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("tangential maximal requires a nonempty t grid");
    const auto& g = f.shape();
    const grid::SpectralField F = grid::forward_transform(f);
    const auto& so = sorted_offsets(g);
    grid::Field out(g);
    for (auto& v : out.values()) v = -kInf;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("t grid entries must be positive");
        const grid::Field conv =
            grid::abs(grid::apply_symbol(F, [&](const Vec& xi) { return base_symbol(t * xi); }));
        double peak = 0.0;
        for (double v : conv.values()) peak = std::max(peak, v);
        // Shift supremum, nearest shifts first; once the remaining weight
        // cannot beat the weakest accumulated value, stop.
        double weakest = -kInf;
        for (std::size_t r = 0; r < so.off.size(); ++r) {
            const double w = std::pow(1.0 + so.dist[r] / t, -weight_exponent);
            if (peak * w <= weakest) break;
            const auto& o = so.off[r];
            double round_min = kInf;
            for (std::size_t x = 0; x < out.size(); ++x) {
                const double cand = w * conv[shifted_index(g, x, {grid::freq_int(o[0], g.n_per_axis),
                                                                  grid::freq_int(o[1], g.n_per_axis),
                                                                  grid::freq_int(o[2], g.n_per_axis)})];
                if (cand > out[x]) out[x] = cand;
                round_min = std::min(round_min, out[x]);
            }
            weakest = round_min;
        }
    }
    return out;
}

std::vector<double> tangential_at_points(const grid::Field& f,
                                         const std::function<double(const Vec&)>& base_symbol,
                                         double weight_exponent, const std::vector<double>& scales,
                                         const std::vector<std::size_t>& points) {
    const auto& g = f.shape();
    const grid::SpectralField F = grid::forward_transform(f);
    const auto& so = sorted_offsets(g);
    std::vector<double> best(points.size(), 0.0);
    std::vector<double> weights(so.dist.size());
    for (double t : scales) {
        if (!(t > 0.0)) throw std::invalid_argument("scales must be positive");
        const grid::Field conv =
            grid::abs(grid::apply_symbol(F, [&](const Vec& xi) { return base_symbol(t * xi); }));
        double peak = 0.0;
        for (double v : conv.values()) peak = std::max(peak, v);
        for (std::size_t r = 0; r < so.dist.size(); ++r)
            weights[r] = std::pow(1.0 + static_cast<double>(so.dist[r]) / t, -weight_exponent);
        parallel_for(points.size(), [&](std::size_t p) {
            double b = best[p];
            for (std::size_t r = 0; r < so.off.size(); ++r) {
                if (peak * weights[r] <= b) break;
                const auto& o = so.off[r];
                const double cand = weights[r] * conv[shifted_index(g, points[p],
                                                                    {grid::freq_int(o[0], g.n_per_axis),
                                                                     grid::freq_int(o[1], g.n_per_axis),
                                                                     grid::freq_int(o[2], g.n_per_axis)})];
                if (cand > b) b = cand;
            }
            best[p] = b;
        });
    }
    return best;
}

std::vector<double> weighted_shift_sup(const grid::Field& field, double scale, double exponent,
                                       const std::vector<std::size_t>& points) {
    const auto& g = field.shape();
    const auto& so = sorted_offsets(g);
    double peak = 0.0;
    for (double v : field.values()) peak = std::max(peak, std::abs(v));
    std::vector<double> weights(so.dist.size());
    for (std::size_t r = 0; r < so.dist.size(); ++r)
        weights[r] = std::pow(1.0 + static_cast<double>(so.dist[r]) / scale, -exponent);
    std::vector<double> best(points.size(), 0.0);
    parallel_for(points.size(), [&](std::size_t p) {
        double b = 0.0;
        for (std::size_t r = 0; r < so.off.size(); ++r) {
            if (peak * weights[r] <= b) break;
            const auto& o = so.off[r];
            const double cand =
                weights[r] * std::abs(field[shifted_index(g, points[p],
                                                          {grid::freq_int(o[0], g.n_per_axis),
                                                           grid::freq_int(o[1], g.n_per_axis),
                                                           grid::freq_int(o[2], g.n_per_axis)})]);
            if (cand > b) b = cand;
        }
        best[p] = b;
    });
    return best;
}

grid::Field smoothed_kakeya(const grid::Field& f, const filters::FilterBank& bank,
                            const filters::TestDictionary& dict, const RotationSet& rots,
                            const std::vector<double>& t_grid, SmoothedDiagnostics* diag) {
    if (t_grid.empty() || dict.empty() || rots.rotations.empty())
        throw std::invalid_argument("smoothed maximal requires kernels, rotations and dilations");
    const double t_cap = std::pow(bank.delta, -bank.eps) * (1.0 + 1e-12);
    for (double t : t_grid)
        if (!(t > 0.0 && t <= t_cap))
            throw std::invalid_argument("smoothed maximal requires 0 < t <= delta^{-eps}");

    const auto& g = f.shape();
    const grid::HalfSpectrum F = grid::forward_r2c(f);
    const std::size_t items = t_grid.size() * rots.rotations.size() * dict.size();
    const int nthreads = std::min<int>(worker_count(), static_cast<int>(items));
    std::vector<grid::Field> acc(static_cast<std::size_t>(std::max(1, nthreads)), grid::Field(g));
    std::vector<char> unresolved(static_cast<std::size_t>(std::max(1, nthreads)), 0);
    const double nyq = g.nyquist();

    threaded_for(items, nthreads, [&](std::size_t idx, int slot) {
        const std::size_t nt = t_grid.size();
        const std::size_t nr = rots.rotations.size();
        const double t = t_grid[idx % nt];
        const Rotation& A = rots.rotations[(idx / nt) % nr];
        const filters::TestFunction& tf = dict[idx / (nt * nr)];
        thread_local std::vector<double> symbol;
        fill_tube_symbol_half(symbol, g, bank, tf, t, A);
        const grid::Field conv = grid::apply_symbol_half(F, symbol);
        auto& part = acc[static_cast<std::size_t>(slot)];
        for (std::size_t j = 0; j < part.size(); ++j) part[j] = std::max(part[j], std::abs(conv[j]));
        double boundary = std::abs(filters::tube_test_symbol(bank, tf, t, A, Vec{nyq, 0.0, 0.0}));
        boundary = std::max(boundary, std::abs(filters::tube_test_symbol(
                                          bank, tf, t, A, g.dim == 2 ? Vec{0.0, nyq} : Vec{0.0, 0.0, nyq})));
        if (boundary > 1e-6) unresolved[static_cast<std::size_t>(slot)] = 1;
    });
    if (diag) {
        diag->kernel_count = static_cast<int>(items);
        diag->unresolved = std::any_of(unresolved.begin(), unresolved.end(), [](char c) { return c != 0; });
    }
    return merge_max(acc);
}

grid::Field smoothed_frozen_t(const grid::Field& f, const filters::FilterBank& bank,
                              const filters::TestDictionary& dict, const RotationSet& rots, double t,
                              SmoothedDiagnostics* diag) {
    const double t_cap = std::pow(bank.delta, -bank.eps) * (1.0 + 1e-12);
    if (!(t > 0.0 && t <= t_cap))
        throw std::invalid_argument("frozen dilation requires 0 < t <= delta^{-eps}");
    return smoothed_kakeya(f, bank, dict, rots, {t}, diag);
}

double direction_lq_norm(const std::vector<double>& values, const std::vector<double>& weights, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("direction norm requires q > 0");
    if (values.size() != weights.size()) throw std::invalid_argument("values/weights size mismatch");
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * std::pow(std::abs(values[i]), q);
    return std::pow(s, 1.0 / q);
}

std::vector<std::size_t> quasi_random_points(const grid::GridShape& g, int count) {
    // Additive low-discrepancy lattice (plastic-number recurrence).
    const double g1 = 1.3247179572447460260;
    const double a1 = 1.0 / g1, a2 = 1.0 / (g1 * g1), a3 = 1.0 / (g1 * g1 * g1);
    const int n = g.n_per_axis;
    std::vector<std::size_t> points;
    points.reserve(static_cast<std::size_t>(count));
    double u = 0.5, v = 0.5, w = 0.5;
    std::map<std::size_t, bool> seen;
    int emitted = 0, iter = 0;
    while (emitted < count && iter < 100 * count + 1000) {
        ++iter;
        u += a1;
        u -= std::floor(u);
        v += a2;
        v -= std::floor(v);
        w += a3;
        w -= std::floor(w);
        const int a = std::min(n - 1, static_cast<int>(u * n));
        const int b = std::min(n - 1, static_cast<int>(v * n));
        const int c = std::min(n - 1, static_cast<int>(w * n));
        const std::size_t idx = g.dim == 2 ? grid::flat_index(g, a, b) : grid::flat_index(g, a, b, c);
        if (seen.emplace(idx, true).second) {
            points.push_back(idx);
            ++emitted;
        }
    }
    return points;
}

}  // namespace kakeya::maximal
