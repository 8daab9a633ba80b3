#pragma once

#include <filesystem>
#include <string>

#include "kakeya/grid.hpp"

namespace kakeya::io {

/// Field file format: one JSON header line {"dim":..,"N":..,"L":..} followed
/// by the raw values as little-endian 64-bit floats, row-major.
void write_field(const std::filesystem::path& path, const grid::Field& f);
grid::Field read_field(const std::filesystem::path& path);

/// CSV export: one row per cell, index columns first, then the value.
void write_field_csv(const std::filesystem::path& path, const grid::Field& f);

std::string format_double(double x);

}  // namespace kakeya::io
