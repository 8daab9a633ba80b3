#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kakeya/verify.hpp"

namespace kakeya::report {

/// Log-log chart of ratio against 1/delta: data points, the least-squares
/// fit line (only with >= 2 points), and an optional reference line of the
/// given slope anchored at the first point. Byte-deterministic for fixed
/// input.
std::string svg_loglog_chart(const verify::SweepReport& report, std::optional<double> bound_slope);

std::string markdown_summary(const std::vector<verify::SweepReport>& reports,
                             std::optional<double> bound_slope);

void write_sweep_csv(const std::filesystem::path& path, const verify::SweepReport& report);

/// Reads a sweep CSV (columns delta,p,q,in_norm,out_norm,ratio); the label
/// is taken from the file stem. Fit is recomputed when >= 3 rows exist.
verify::SweepReport read_sweep_csv(const std::filesystem::path& path);

}  // namespace kakeya::report
