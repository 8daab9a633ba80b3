#include "kakeya/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "kakeya/io.hpp"
#include "kakeya/parallel.hpp"
#include "kakeya/report.hpp"
#include "kakeya/verify.hpp"
#include "kakeya/version.hpp"

namespace kakeya::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

/// Every run leaves its fully-resolved configuration next to its outputs.
void emit_config(const fs::path& anchor, const std::string& subcommand, json params) {
    json cfg;
    cfg["version"] = kVersion;
    cfg["subcommand"] = subcommand;
    cfg["threads"] = worker_count();
    cfg["parameters"] = std::move(params);
    fs::path where = anchor;
    if (fs::is_directory(anchor)) where = anchor / "config.json";
    else where = anchor.string() + ".config.json";
    write_json(where, cfg);
}

json load_params(const std::string& params_path, json defaults) {
    if (params_path.empty()) return defaults;
    std::ifstream in(params_path);
    if (!in) throw std::runtime_error("cannot open params file: " + params_path);
    json user = json::parse(in);
    for (auto& [key, value] : user.items()) defaults[key] = value;
    return defaults;
}

grid::GridShape shape_from(const json& p) {
    return grid::GridShape::make(p.at("dim").get<int>(), p.at("grid_n").get<int>(),
                                 p.at("grid_l").get<double>());
}

maximal::DirectionSet directions_for(double delta, int dim, int override_count) {
    if (override_count > 0)
        return dim == 2 ? maximal::DirectionSet::uniform_2d(override_count)
                        : maximal::DirectionSet::fibonacci_3d(override_count);
    return maximal::DirectionSet::for_width(delta, dim);
}

// ---------------------------------------------------------------------------
// filters subcommand

struct FiltersOpts {
    double delta = 0.0625;
    double eps = 0.25;
    int dim = 2;
    int grid_n = 512;
    double grid_l = 4.0;
    std::string out;
    bool dump_kernels = false;
};

int run_filters(const FiltersOpts& o) {
    const auto shape = grid::GridShape::make(o.dim, o.grid_n, o.grid_l);
    const auto bank = filters::FilterBank::create(o.delta, o.eps, o.dim, shape);
    fs::create_directories(o.out);

    std::ofstream csv(fs::path(o.out) / "bands.csv");
    csv << "k,family,inner_radius,outer_radius,l1_mass\n";

    auto emit_family = [&](const std::string& name, filters::Family family, bool bold, int k_hi) {
        for (int k = 0; k <= k_hi; ++k) {
            auto symbol = [&](const Vec& xi) {
                return bold ? bank.anisotropic_symbol(family, k, xi) : bank.band_symbol(family, k, xi);
            };
            const grid::SpectralField S = grid::sample_symbol(shape, symbol);
            double inner = std::numeric_limits<double>::infinity(), outer = 0.0;
            for (std::size_t i = 0; i < S.size(); ++i) {
                if (std::abs(S[i].real()) <= 1e-12) continue;
                const Vec xi = S.frequency(i);
                const double r = bold ? norm(bank.compress(xi)) : norm(xi);
                inner = std::min(inner, r);
                outer = std::max(outer, r);
            }
            if (!(outer > 0.0) && !std::isfinite(inner)) inner = 0.0;
            const double mass = grid::lp_norm(grid::synthesize(shape, symbol), 1.0);
            csv << k << "," << name << "," << io::format_double(inner) << "," << io::format_double(outer)
                << "," << io::format_double(mass) << "\n";
            if (o.dump_kernels) {
                io::write_field(fs::path(o.out) / (name + "_k" + std::to_string(k) + ".field"),
                                grid::synthesize(shape, symbol));
            }
        }
    };
    const int dyadic_hi = static_cast<int>(std::ceil(std::log2(std::max(2.0, shape.nyquist())))) + 1;
    emit_family("dyadic", filters::Family::dyadic, false, dyadic_hi);
    emit_family("eps_scaled", filters::Family::eps_scaled, false, bank.k_max);
    emit_family("bold_dyadic", filters::Family::dyadic, true, dyadic_hi);
    emit_family("bold_eps_scaled", filters::Family::eps_scaled, true, bank.k_max);

    emit_config(fs::path(o.out), "filters",
                json{{"delta", o.delta},
                     {"eps", o.eps},
                     {"dim", o.dim},
                     {"grid_n", o.grid_n},
                     {"grid_l", o.grid_l},
                     {"s", bank.s},
                     {"k_max", bank.k_max},
                     {"out", o.out}});
    return 0;
}

// ---------------------------------------------------------------------------
// testset subcommand

struct TestsetOpts {
    std::string kind = "ball";
    std::uint64_t seed = 0;
    double radius = 0.25;
    double delta = 0.125;
    int count = 1;
    int levels = 3;
    double cutoff = 1.0;
    int dim = 2;
    int grid_n = 256;
    double grid_l = 1.0;
    bool csv = false;
    std::string out;
};

int run_testset(const TestsetOpts& o) {
    const auto shape = grid::GridShape::make(o.dim, o.grid_n, o.grid_l);
    testsets::TestSpec spec;
    spec.kind = testsets::kind_from_name(o.kind);
    spec.seed = o.seed;
    spec.radius = o.radius;
    spec.delta = o.delta;
    spec.count = o.count;
    spec.levels = o.levels;
    spec.cutoff = o.cutoff;
    const auto generated = testsets::generate(spec, shape);

    fs::create_directories(o.out);
    io::write_field(fs::path(o.out) / "field.bin", generated.field);
    if (o.csv) io::write_field_csv(fs::path(o.out) / "field.csv", generated.field);

    json manifest;
    manifest["spec"] = json{{"kind", o.kind},     {"seed", o.seed},   {"radius", o.radius},
                            {"delta", o.delta},   {"count", o.count}, {"levels", o.levels},
                            {"cutoff", o.cutoff}, {"dim", o.dim},     {"grid_n", o.grid_n},
                            {"grid_l", o.grid_l}};
    manifest["measure"] = generated.measure;
    manifest["l1"] = generated.l1;
    manifest["l2"] = generated.l2;
    write_json(fs::path(o.out) / "manifest.json", manifest);
    emit_config(fs::path(o.out), "testset", manifest["spec"]);
    return 0;
}

// ---------------------------------------------------------------------------
// maximal subcommand

struct MaximalOpts {
    std::string op = "kakeya";
    std::string input;
    double delta = 0.125;
    double eps = 0.25;
    int dirs = 0;
    double t = -1.0;
    std::string out;
};

int run_maximal(const MaximalOpts& o) {
    const grid::Field f = io::read_field(o.input);
    const auto& shape = f.shape();
    const auto dirs = directions_for(o.delta, shape.dim, o.dirs);

    if (o.op == "kakeya") {
        const auto values = maximal::kakeya_maximal(f, o.delta, dirs);
        std::ofstream csv(o.out);
        if (!csv) throw std::runtime_error("cannot open for writing: " + o.out);
        csv << (shape.dim == 2 ? "omega_0,omega_1,weight,value\n" : "omega_0,omega_1,omega_2,weight,value\n");
        for (std::size_t i = 0; i < values.size(); ++i) {
            for (int d = 0; d < shape.dim; ++d) csv << io::format_double(dirs.directions[i][d]) << ",";
            csv << io::format_double(dirs.weights[i]) << "," << io::format_double(values[i]) << "\n";
        }
    } else {
        grid::Field result(shape);
        if (o.op == "nikodym") {
            result = maximal::nikodym_maximal(f, o.delta, dirs);
        } else if (o.op == "hl") {
            result = maximal::hl_maximal(f);
        } else if (o.op == "smoothed" || o.op == "frozen") {
            const auto bank = filters::FilterBank::create(o.delta, o.eps, shape.dim, shape);
            const auto rots = maximal::RotationSet::from_directions(dirs);
            const auto& dict = filters::dictionary(shape.dim);
            if (o.op == "smoothed") {
                result = maximal::smoothed_kakeya(f, bank, dict, rots,
                                                  verify::default_t_grid(o.delta, o.eps, shape));
            } else {
                const double t = o.t > 0.0 ? o.t : std::pow(o.delta, -o.eps);
                result = maximal::smoothed_frozen_t(f, bank, dict, rots, t);
            }
        } else {
            throw CLI::ValidationError("--op", "unknown operator: " + o.op);
        }
        io::write_field(o.out, result);
    }
    emit_config(fs::path(o.out), "maximal",
                json{{"op", o.op},
                     {"input", o.input},
                     {"delta", o.delta},
                     {"eps", o.eps},
                     {"dirs", static_cast<int>(dirs.directions.size())},
                     {"t", o.t},
                     {"out", o.out}});
    return 0;
}

// ---------------------------------------------------------------------------
// verify subcommand

verify::SweepConfig sweep_config_from_json(const json& p) {
    verify::SweepConfig c;
    c.op = verify::sweep_op_from_name(p.at("op").get<std::string>());
    c.family.kind = testsets::kind_from_name(p.at("family").get<std::string>());
    c.family.seed = p.value("seed", 0);
    c.family.count = p.value("count", 1);
    c.family.levels = p.value("levels", 3);
    c.family.cutoff = p.value("cutoff", 1.0);
    c.family.radius = p.value("radius", 0.25);
    c.adapt_family_delta = p.value("adapt_family_delta", true);
    c.deltas = p.at("deltas").get<std::vector<double>>();
    c.p = p.value("p", 2.0);
    c.q = p.value("q", 2.0);
    c.eps = p.value("eps", 0.25);
    c.dim = p.value("dim", 2);
    c.grid_n = p.value("grid_n", 256);
    c.grid_l = p.value("grid_l", 1.0);
    c.frozen_t = p.value("frozen_t", -1.0);
    c.dirs_override = p.value("dirs", 0);
    return c;
}

int run_sweep_to_files(const verify::SweepConfig& config, const std::string& out,
                       std::optional<double> bound_slope, const json& resolved) {
    const verify::SweepReport report = verify::norm_ratio_sweep(config);
    report::write_sweep_csv(out, report);

    json summary;
    summary["op"] = report.op_name;
    summary["family"] = report.family_name;
    summary["fitted_exponent"] = report.fit.slope;
    summary["residual"] = report.fit.residual;
    summary["unreliable"] = report.fit.residual > 0.2;
    bool pass = true;
    if (bound_slope) {
        summary["bound_slope"] = *bound_slope;
        pass = report.fit.slope <= *bound_slope;
    }
    summary["pass"] = pass;
    if (!pass)
        summary["failures"] = json::array({json{{"check", "fitted_exponent"},
                                                {"value", report.fit.slope},
                                                {"bound", *bound_slope}}});
    write_json(out + ".summary.json", summary);
    emit_config(fs::path(out), "sweep", resolved);
    return pass ? 0 : 2;
}

int run_verify(const std::string& suite, const std::string& params_path, const std::string& out) {
    if (suite == "decay31" || suite == "decay32") {
        json p = load_params(params_path, json{{"delta", 0.0625},
                                               {"eps", 0.25},
                                               {"dim", 2},
                                               {"grid_n", 512},
                                               {"grid_l", 4.0},
                                               {"weight_exponent", 2.0},
                                               {"k_lo", 2},
                                               {"k_hi", 8},
                                               {"refine", true},
                                               {"functions", json::array({"phi", "gauss", "hermite-radial",
                                                                          "hermite-pair", "cos-bump"})}});
        const auto shape = shape_from(p);
        const auto shape2 =
            grid::GridShape::make(shape.dim, 2 * shape.n_per_axis, shape.side_length);
        const auto bank = filters::FilterBank::create(p.at("delta").get<double>(), p.at("eps").get<double>(),
                                                      shape.dim, shape);
        const auto bank2 = filters::FilterBank::create(p.at("delta").get<double>(), p.at("eps").get<double>(),
                                                       shape.dim, shape2);
        const double N = p.at("weight_exponent").get<double>();
        const bool refine = p.at("refine").get<bool>();

        std::ofstream csv(out);
        if (!csv) throw std::runtime_error("cannot open for writing: " + out);
        double max_ratio = 0.0, min_ratio = std::numeric_limits<double>::infinity();
        double max_rel_change = 0.0;
        bool all_finite = true;

        const auto& dict = filters::dictionary(shape.dim);
        auto tf_by_name = [&](const std::string& name) -> const filters::TestFunction& {
            for (const auto& tf : dict)
                if (tf.name == name) return tf;
            throw std::invalid_argument("unknown test function: " + name);
        };

        if (suite == "decay31") {
            csv << "function,k,integral,bound,ratio,truncated,tail_warning,integral_refined,rel_change\n";
            for (const auto& name : p.at("functions")) {
                const auto& tf = tf_by_name(name.get<std::string>());
                const auto rows = verify::lemma31_table(bank, tf, N, p.at("k_lo").get<int>(),
                                                        p.at("k_hi").get<int>(), shape);
                const auto rows2 = refine ? verify::lemma31_table(bank2, tf, N, p.at("k_lo").get<int>(),
                                                                  p.at("k_hi").get<int>(), shape2)
                                          : rows;
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const auto& r = rows[i];
                    double refined = r.integral, rel = 0.0;
                    if (refine && i < rows2.size()) {
                        refined = rows2[i].integral;
                        const double base = std::max(std::abs(refined), 1e-300);
                        rel = std::abs(r.integral - refined) / base;
                        if (refined == 0.0 && r.integral == 0.0) rel = 0.0;
                    }
                    all_finite = all_finite && std::isfinite(r.ratio);
                    if (r.integral > 0.0) {
                        max_ratio = std::max(max_ratio, r.ratio);
                        min_ratio = std::min(min_ratio, r.ratio);
                        max_rel_change = std::max(max_rel_change, rel);
                    }
                    csv << tf.name << "," << r.k << "," << io::format_double(r.integral) << ","
                        << io::format_double(r.bound) << "," << io::format_double(r.ratio) << ","
                        << (r.truncated ? 1 : 0) << "," << (r.tail_warning ? 1 : 0) << ","
                        << io::format_double(refined) << "," << io::format_double(rel) << "\n";
                }
            }
        } else {
            csv << "function,k,integral_tight,bound_tight,ratio_tight,integral_wide,bound_wide,ratio_wide,"
                   "l1_mass,tail_warning,rel_change_tight\n";
            for (const auto& name : p.at("functions")) {
                const auto& tf = tf_by_name(name.get<std::string>());
                const auto rows = verify::lemma32_table(bank, tf, N, shape);
                const auto rows2 = refine ? verify::lemma32_table(bank2, tf, N, shape2) : rows;
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const auto& r = rows[i];
                    double rel = 0.0;
                    if (refine && i < rows2.size() && rows2[i].integral_tight > 0.0)
                        rel = std::abs(r.integral_tight - rows2[i].integral_tight) / rows2[i].integral_tight;
                    all_finite = all_finite && std::isfinite(r.ratio_tight) && std::isfinite(r.ratio_wide);
                    if (r.integral_tight > 0.0) {
                        max_ratio = std::max(max_ratio, r.ratio_tight);
                        min_ratio = std::min(min_ratio, r.ratio_tight);
                        max_rel_change = std::max(max_rel_change, rel);
                    }
                    csv << tf.name << "," << r.k << "," << io::format_double(r.integral_tight) << ","
                        << io::format_double(r.bound_tight) << "," << io::format_double(r.ratio_tight) << ","
                        << io::format_double(r.integral_wide) << "," << io::format_double(r.bound_wide) << ","
                        << io::format_double(r.ratio_wide) << "," << io::format_double(r.l1_mass) << ","
                        << (r.tail_warning ? 1 : 0) << "," << io::format_double(rel) << "\n";
                }
            }
        }
        const bool pass = all_finite && (!refine || max_rel_change < 0.05);
        json summary;
        summary["suite"] = suite;
        summary["max_ratio"] = max_ratio;
        summary["min_ratio"] = std::isfinite(min_ratio) ? min_ratio : 0.0;
        summary["ratio_spread"] = (min_ratio > 0.0 && std::isfinite(min_ratio)) ? max_ratio / min_ratio : 0.0;
        summary["max_rel_change"] = max_rel_change;
        summary["pass"] = pass;
        if (!pass)
            summary["failures"] = json::array(
                {json{{"check", "decay_stability"}, {"max_rel_change", max_rel_change}, {"tolerance", 0.05}}});
        write_json(out + ".summary.json", summary);
        emit_config(fs::path(out), "verify-" + suite, p);
        return pass ? 0 : 2;
    }

    if (suite == "bernstein") {
        json p = load_params(params_path, json{{"seeds", json::array({0, 1, 2, 3, 4})},
                                               {"c0", 1.0},
                                               {"t", 1.0},
                                               {"r", 1.0},
                                               {"dim", 2},
                                               {"grid_n", 256},
                                               {"grid_l", 8.0},
                                               {"points", 200},
                                               {"refine", true}});
        const auto shape = shape_from(p);
        const auto shape2 = grid::GridShape::make(shape.dim, 2 * shape.n_per_axis, shape.side_length);
        const double c0 = p.at("c0").get<double>(), t = p.at("t").get<double>(), r = p.at("r").get<double>();
        const bool refine = p.at("refine").get<bool>();
        std::ofstream csv(out);
        if (!csv) throw std::runtime_error("cannot open for writing: " + out);
        csv << "seed,ratio_value,ratio_gradient,ratio_value_refined,ratio_gradient_refined,rel_change\n";
        double worst_rel = 0.0;
        bool all_finite = true;
        for (const auto& seed_json : p.at("seeds")) {
            const auto seed = seed_json.get<std::uint64_t>();
            const grid::Field u = testsets::bandlimited_random(seed, c0 * t, shape);
            const auto rep = verify::bernstein_check(u, t, r, c0, maximal::quasi_random_points(shape, p.at("points").get<int>()));
            double rv2 = rep.max_ratio_value, rg2 = rep.max_ratio_gradient, rel = 0.0;
            if (refine) {
                const grid::Field u2 = testsets::bandlimited_random(seed, c0 * t, shape2);
                const auto rep2 = verify::bernstein_check(
                    u2, t, r, c0, maximal::quasi_random_points(shape2, p.at("points").get<int>()));
                rv2 = rep2.max_ratio_value;
                rg2 = rep2.max_ratio_gradient;
                rel = std::max(std::abs(rep.max_ratio_value - rv2) / rv2,
                               std::abs(rep.max_ratio_gradient - rg2) / std::max(rg2, 1e-300));
            }
            worst_rel = std::max(worst_rel, rel);
            all_finite = all_finite && std::isfinite(rep.max_ratio_value) && std::isfinite(rep.max_ratio_gradient);
            csv << seed << "," << io::format_double(rep.max_ratio_value) << ","
                << io::format_double(rep.max_ratio_gradient) << "," << io::format_double(rv2) << ","
                << io::format_double(rg2) << "," << io::format_double(rel) << "\n";
        }
        const bool pass = all_finite && (!refine || worst_rel < 0.10);
        json summary{{"suite", suite}, {"max_rel_change", worst_rel}, {"pass", pass}};
        if (!pass)
            summary["failures"] = json::array(
                {json{{"check", "bernstein_stability"}, {"max_rel_change", worst_rel}, {"tolerance", 0.10}}});
        write_json(out + ".summary.json", summary);
        emit_config(fs::path(out), "verify-" + suite, p);
        return pass ? 0 : 2;
    }

    if (suite == "domination") {
        json p = load_params(params_path,
                             json{{"delta", 0.0625},
                                  {"eps", 0.25},
                                  {"dim", 2},
                                  {"grid_n", 256},
                                  {"grid_l", 8.0},
                                  {"weight_exponent", 2.0},
                                  {"points", 1000},
                                  {"seeds", json::array({0, 1, 2, 3, 4, 5, 6, 7, 8, 9})},
                                  {"families", json::array({"bandlimited_random", "bump_sum", "tube_union"})},
                                  {"frozen_t", 1.0},
                                  {"r", 1.0}});
        const auto shape = shape_from(p);
        const double delta = p.at("delta").get<double>(), eps = p.at("eps").get<double>();
        const auto bank = filters::FilterBank::create(delta, eps, shape.dim, shape);
        const auto& dict = filters::dictionary(shape.dim);
        const auto dirs = maximal::DirectionSet::for_width(delta, shape.dim);
        const auto rots = maximal::RotationSet::from_directions(dirs);
        const auto t_grid = verify::default_t_grid(delta, eps, shape);
        const double N = p.at("weight_exponent").get<double>();
        const int points = p.at("points").get<int>();
        const double frozen_t = p.at("frozen_t").get<double>();
        const double r = p.at("r").get<double>();

        const auto factors = verify::domination_factors(bank, dict, rots, t_grid, N, shape);
        const auto fro = verify::frozen_factors(bank, dict, rots, frozen_t, r, shape);

        std::ofstream csv(out);
        if (!csv) throw std::runtime_error("cannot open for writing: " + out);
        csv << "family,seed,violations,min_slack,violations_wide,min_slack_wide,frozen_violations,"
               "frozen_min_slack\n";
        int total_violations = 0;
        for (const auto& fam_json : p.at("families")) {
            const auto kind = testsets::kind_from_name(fam_json.get<std::string>());
            for (const auto& seed_json : p.at("seeds")) {
                testsets::TestSpec spec;
                spec.kind = kind;
                spec.seed = seed_json.get<std::uint64_t>();
                spec.delta = delta;
                spec.count = kind == testsets::Kind::tube_union ? 12 : 6;
                spec.cutoff = 1.0;
                const grid::Field f = testsets::generate(spec, shape).field;
                const auto rep = verify::domination_check(f, bank, dict, rots, t_grid, N, points, &factors);
                const auto frep = verify::frozen_domination_check(f, bank, dict, rots, frozen_t, r, points, &fro);
                total_violations += rep.violations + rep.violations_wide + frep.violations;
                csv << fam_json.get<std::string>() << "," << spec.seed << "," << rep.violations << ","
                    << io::format_double(rep.min_slack) << "," << rep.violations_wide << ","
                    << io::format_double(rep.min_slack_wide) << "," << frep.violations << ","
                    << io::format_double(frep.min_slack) << "\n";
            }
        }
        const bool pass = total_violations == 0;
        json summary{{"suite", suite}, {"total_violations", total_violations}, {"pass", pass}};
        summary["factor_sum_direct"] = factors.sum_direct;
        summary["factor_sum_wide"] = factors.sum_wide;
        if (!pass)
            summary["failures"] =
                json::array({json{{"check", "domination_violations"}, {"count", total_violations}}});
        write_json(out + ".summary.json", summary);
        emit_config(fs::path(out), "verify-" + suite, p);
        return pass ? 0 : 2;
    }

    if (suite == "sweep") {
        json p = load_params(params_path, json{{"op", "kakeya"},
                                               {"family", "perron_tree"},
                                               {"deltas", json::array({0.125, 0.0625, 0.03125, 0.015625, 0.0078125})},
                                               {"p", 2.0},
                                               {"q", 2.0},
                                               {"eps", 0.25},
                                               {"dim", 2},
                                               {"grid_n", 256},
                                               {"grid_l", 1.0}});
        std::optional<double> bound;
        if (p.contains("bound_slope") && !p.at("bound_slope").is_null())
            bound = p.at("bound_slope").get<double>();
        return run_sweep_to_files(sweep_config_from_json(p), out, bound, p);
    }

    throw CLI::ValidationError("--suite", "unknown suite: " + suite);
}

// ---------------------------------------------------------------------------
// report subcommand

int run_report(const std::vector<std::string>& inputs, const std::string& out,
               std::optional<double> bound_slope) {
    fs::create_directories(out);
    std::vector<verify::SweepReport> reports;
    for (const auto& in : inputs) {
        verify::SweepReport rep = report::read_sweep_csv(in);
        const std::string svg = report::svg_loglog_chart(rep, bound_slope);
        std::ofstream f(fs::path(out) / (fs::path(in).stem().string() + ".svg"));
        if (!f) throw std::runtime_error("cannot write chart");
        f << svg;
        reports.push_back(std::move(rep));
    }
    std::ofstream md(fs::path(out) / "summary.md");
    md << report::markdown_summary(reports, bound_slope);
    json cfg{{"inputs", inputs}, {"out", out}};
    if (bound_slope) cfg["bound_slope"] = *bound_slope;
    emit_config(fs::path(out), "report", cfg);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"kakeya-lab: Kakeya/Nikodym-type maximal operators and anisotropic band decompositions "
                 "on discretized tori"};
    app.require_subcommand(1);

    FiltersOpts fo;
    auto* filters_cmd = app.add_subcommand("filters", "Emit band-family support radii and kernel masses");
    filters_cmd->add_option("--delta", fo.delta, "Tube width parameter in (0,1)")->required();
    filters_cmd->add_option("--eps", fo.eps, "Band-scaling exponent");
    filters_cmd->add_option("--dim", fo.dim, "Dimension (2 or 3)");
    filters_cmd->add_option("--grid-n", fo.grid_n, "Samples per axis (power of two)");
    filters_cmd->add_option("--grid-l", fo.grid_l, "Torus side length");
    filters_cmd->add_option("--out", fo.out, "Output directory")->required();
    filters_cmd->add_flag("--dump-kernels", fo.dump_kernels, "Also write spatial kernels");

    TestsetOpts to;
    auto* testset_cmd = app.add_subcommand("testset", "Generate a deterministic test field");
    testset_cmd->add_option("--kind", to.kind,
                            "ball|tube|tube_union|perron_tree|bandlimited_random|bump_sum")->required();
    testset_cmd->add_option("--seed", to.seed, "Seed");
    testset_cmd->add_option("--radius", to.radius, "Ball radius");
    testset_cmd->add_option("--delta", to.delta, "Tube width");
    testset_cmd->add_option("--count", to.count, "Tube/bump count");
    testset_cmd->add_option("--levels", to.levels, "Bisection depth");
    testset_cmd->add_option("--cutoff", to.cutoff, "Band limit");
    testset_cmd->add_option("--dim", to.dim, "Dimension");
    testset_cmd->add_option("--grid-n", to.grid_n, "Samples per axis");
    testset_cmd->add_option("--grid-l", to.grid_l, "Torus side length");
    testset_cmd->add_flag("--csv", to.csv, "Also export CSV");
    testset_cmd->add_option("--out", to.out, "Output directory")->required();

    MaximalOpts mo;
    auto* maximal_cmd = app.add_subcommand("maximal", "Apply a maximal operator to a stored field");
    maximal_cmd->add_option("--op", mo.op, "kakeya|nikodym|hl|smoothed|frozen")->required();
    maximal_cmd->add_option("--input", mo.input, "Input field file")->required();
    maximal_cmd->add_option("--delta", mo.delta, "Tube width")->required();
    maximal_cmd->add_option("--eps", mo.eps, "Band-scaling exponent");
    maximal_cmd->add_option("--dirs", mo.dirs, "Direction count override");
    maximal_cmd->add_option("--t", mo.t, "Frozen dilation (<=0 picks delta^-eps)");
    maximal_cmd->add_option("--out", mo.out, "Output field file or CSV")->required();

    std::string verify_suite, verify_params, verify_out;
    auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
    verify_cmd->add_option("--suite", verify_suite, "decay31|decay32|bernstein|domination|sweep")->required();
    verify_cmd->add_option("--params", verify_params, "JSON parameter file");
    verify_cmd->add_option("--out", verify_out, "Output CSV path")->required();

    verify::SweepConfig sc;
    std::string sweep_op = "kakeya", sweep_family = "perron_tree", sweep_out;
    std::vector<double> sweep_deltas;
    double sweep_bound = std::numeric_limits<double>::quiet_NaN();
    auto* sweep_cmd = app.add_subcommand("sweep", "Operator-norm ratio sweep over delta");
    sweep_cmd->add_option("--op", sweep_op, "kakeya|nikodym|hl|smoothed|frozen|smoothed_vs_nontangential");
    sweep_cmd->add_option("--family", sweep_family, "Input family kind");
    sweep_cmd->add_option("--deltas", sweep_deltas, "Tube widths (>= 3 values)")->required()->expected(-1);
    sweep_cmd->add_option("--p", sc.p, "Input norm exponent");
    sweep_cmd->add_option("--q", sc.q, "Output norm exponent");
    sweep_cmd->add_option("--eps", sc.eps, "Band-scaling exponent");
    sweep_cmd->add_option("--dim", sc.dim, "Dimension");
    sweep_cmd->add_option("--grid-n", sc.grid_n, "Samples per axis");
    sweep_cmd->add_option("--grid-l", sc.grid_l, "Torus side length");
    sweep_cmd->add_option("--frozen-t", sc.frozen_t, "Frozen dilation");
    sweep_cmd->add_option("--dirs", sc.dirs_override, "Direction count override");
    sweep_cmd->add_option("--seed", sc.family.seed, "Family seed");
    sweep_cmd->add_option("--bound-slope", sweep_bound, "Pass/fail bound on the fitted exponent");
    sweep_cmd->add_option("--out", sweep_out, "Output CSV path")->required();

    std::vector<std::string> report_inputs;
    std::string report_out;
    double report_bound = std::numeric_limits<double>::quiet_NaN();
    auto* report_cmd = app.add_subcommand("report", "Render sweep CSVs as SVG charts plus a markdown summary");
    report_cmd->add_option("--in", report_inputs, "Input sweep CSVs")->required()->expected(-1);
    report_cmd->add_option("--out", report_out, "Output directory")->required();
    report_cmd->add_option("--bound-slope", report_bound, "Reference slope to overlay");

    std::vector<std::string> argv_store;
    argv_store.push_back("kakeya-lab");
    for (const auto& a : args) argv_store.push_back(a);
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (*filters_cmd) return run_filters(fo);
        if (*testset_cmd) return run_testset(to);
        if (*maximal_cmd) return run_maximal(mo);
        if (*verify_cmd) return run_verify(verify_suite, verify_params, verify_out);
        if (*sweep_cmd) {
            sc.op = verify::sweep_op_from_name(sweep_op);
            sc.family.kind = testsets::kind_from_name(sweep_family);
            sc.deltas = sweep_deltas;
            json resolved{{"op", sweep_op}, {"family", sweep_family}, {"deltas", sweep_deltas},
                          {"p", sc.p},      {"q", sc.q},              {"eps", sc.eps},
                          {"dim", sc.dim},  {"grid_n", sc.grid_n},    {"grid_l", sc.grid_l},
                          {"seed", sc.family.seed}};
            std::optional<double> bound;
            if (!std::isnan(sweep_bound)) {
                bound = sweep_bound;
                resolved["bound_slope"] = sweep_bound;
            }
            return run_sweep_to_files(sc, sweep_out, bound, resolved);
        }
        if (*report_cmd) {
            std::optional<double> bound;
            if (!std::isnan(report_bound)) bound = report_bound;
            return run_report(report_inputs, report_out, bound);
        }
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace kakeya::cli
