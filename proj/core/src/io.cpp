#include "kakeya/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace kakeya::io {

static_assert(std::endian::native == std::endian::little,
              "field serialization assumes a little-endian host");

void write_field(const std::filesystem::path& path, const grid::Field& f) {
    nlohmann::ordered_json header;
    header["dim"] = f.shape().dim;
    header["N"] = f.shape().n_per_axis;
    header["L"] = f.shape().side_length;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << header.dump() << "\n";
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

grid::Field read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("missing field header: " + path.string());
    nlohmann::json header = nlohmann::json::parse(line);
    const auto shape = grid::GridShape::make(header.at("dim").get<int>(), header.at("N").get<int>(),
                                             header.at("L").get<double>());
    std::vector<double> values(shape.cell_count());
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != values.size() * sizeof(double))
        throw std::runtime_error("truncated field payload: " + path.string());
    return grid::Field(shape, std::move(values));
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_field_csv(const std::filesystem::path& path, const grid::Field& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    const auto& g = f.shape();
    const int n = g.n_per_axis;
    if (g.dim == 2) {
        out << "i0,i1,value\n";
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                out << a << "," << b << "," << format_double(f[grid::flat_index(g, a, b)]) << "\n";
    } else {
        out << "i0,i1,i2,value\n";
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    out << a << "," << b << "," << c << ","
                        << format_double(f[grid::flat_index(g, a, b, c)]) << "\n";
    }
}

}  // namespace kakeya::io
