#include "kakeya/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kakeya::report {

namespace {

std::string fmt(double x, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, x);
    return buf;
}

}  // namespace

std::string svg_loglog_chart(const verify::SweepReport& report, std::optional<double> bound_slope) {
    const int width = 640, height = 480, margin = 56;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    std::vector<std::pair<double, double>> pts;  // (log10(1/delta), log10 ratio)
    for (const auto& row : report.rows)
        if (row.delta > 0.0 && row.ratio > 0.0)
            pts.push_back({std::log10(1.0 / row.delta), std::log10(row.ratio)});
    if (pts.empty()) {
        svg << "<text x=\"20\" y=\"30\" font-size=\"14\">no data</text>\n</svg>\n";
        return svg.str();
    }
    double x0 = pts[0].first, x1 = pts[0].first, y0 = pts[0].second, y1 = pts[0].second;
    for (const auto& [x, y] : pts) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (bound_slope) {
        const double by = pts[0].second + *bound_slope * (x1 - pts[0].first);
        y0 = std::min(y0, by);
        y1 = std::max(y1, by);
    }
    const double padx = std::max(0.25, 0.08 * (x1 - x0));
    const double pady = std::max(0.25, 0.08 * (y1 - y0));
    x0 -= padx;
    x1 += padx;
    y0 -= pady;
    y1 += pady;
    auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
    auto py = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

    svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
        << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 14
        << "\" font-size=\"13\" text-anchor=\"middle\">log10(1/delta)</text>\n";
    svg << "<text x=\"16\" y=\"" << height / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << height / 2
        << ")\">log10(ratio)</text>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << margin - 12 << "\" font-size=\"14\">" << report.op_name
        << " / " << report.family_name << "</text>\n";

    // Reference line with the stated slope, anchored at the first point.
    if (bound_slope && pts.size() >= 1) {
        const double bx0 = pts[0].first, by0 = pts[0].second;
        const double bx1 = x1 - padx;
        const double by1 = by0 + *bound_slope * (bx1 - bx0);
        svg << "<line x1=\"" << fmt(px(bx0)) << "\" y1=\"" << fmt(py(by0)) << "\" x2=\"" << fmt(px(bx1))
            << "\" y2=\"" << fmt(py(by1)) << "\" stroke=\"#c22\" stroke-dasharray=\"6 4\"/>\n";
        svg << "<text x=\"" << fmt(px(bx1)) << "\" y=\"" << fmt(py(by1) - 6.0)
            << "\" font-size=\"12\" fill=\"#c22\" text-anchor=\"end\">bound slope " << fmt(*bound_slope)
            << "</text>\n";
    }
    // Fit line only when a fit is meaningful.
    if (pts.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (const auto& [x, y] : pts) {
            mx += x;
            my += y;
        }
        mx /= static_cast<double>(pts.size());
        my /= static_cast<double>(pts.size());
        double sxx = 0.0, sxy = 0.0;
        for (const auto& [x, y] : pts) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        if (sxx > 1e-20) {
            const double m = sxy / sxx;
            const double xa = x0 + padx, xb = x1 - padx;
            svg << "<line x1=\"" << fmt(px(xa)) << "\" y1=\"" << fmt(py(my + m * (xa - mx))) << "\" x2=\""
                << fmt(px(xb)) << "\" y2=\"" << fmt(py(my + m * (xb - mx)))
                << "\" stroke=\"#26c\"/>\n";
            svg << "<text x=\"" << margin + 8 << "\" y=\"" << margin + 18
                << "\" font-size=\"12\" fill=\"#26c\">fit slope " << fmt(m) << "</text>\n";
        }
    }
    for (const auto& [x, y] : pts)
        svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"4\" fill=\"#222\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string markdown_summary(const std::vector<verify::SweepReport>& reports,
                             std::optional<double> bound_slope) {
    std::ostringstream md;
    md << "# Norm-ratio sweep summary\n\n";
    for (const auto& rep : reports) {
        md << "## " << rep.op_name << " / " << rep.family_name << "\n\n";
        md << "| delta | p | q | in_norm | out_norm | ratio |\n";
        md << "|---|---|---|---|---|---|\n";
        for (const auto& row : rep.rows)
            md << "| " << fmt(row.delta) << " | " << fmt(row.p) << " | " << fmt(row.q) << " | "
               << fmt(row.in_norm) << " | " << fmt(row.out_norm) << " | " << fmt(row.ratio) << " |\n";
        md << "\n";
        if (rep.rows.size() >= 3) {
            md << "fitted exponent: " << fmt(rep.fit.slope) << " (residual " << fmt(rep.fit.residual) << ")";
            if (bound_slope) md << ", bound slope: " << fmt(*bound_slope);
            md << "\n\n";
        }
    }
    return md.str();
}

void write_sweep_csv(const std::filesystem::path& path, const verify::SweepReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "delta,p,q,in_norm,out_norm,ratio\n";
    for (const auto& row : report.rows)
        out << fmt(row.delta, "%.17g") << "," << fmt(row.p, "%.17g") << "," << fmt(row.q, "%.17g") << ","
            << fmt(row.in_norm, "%.17g") << "," << fmt(row.out_norm, "%.17g") << ","
            << fmt(row.ratio, "%.17g") << "\n";
}

verify::SweepReport read_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    verify::SweepReport rep;
    rep.op_name = path.stem().string();
    rep.family_name = "csv";
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path.string());
    if (line.find("delta") == std::string::npos) throw std::runtime_error("malformed sweep csv header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        verify::SweepRow row;
        std::istringstream ss(line);
        std::string tok;
        double vals[6];
        for (int i = 0; i < 6; ++i) {
            if (!std::getline(ss, tok, ',')) throw std::runtime_error("malformed sweep csv row");
            vals[i] = std::stod(tok);
        }
        row.delta = vals[0];
        row.p = vals[1];
        row.q = vals[2];
        row.in_norm = vals[3];
        row.out_norm = vals[4];
        row.ratio = vals[5];
        rep.rows.push_back(row);
    }
    if (rep.rows.size() >= 3) {
        std::vector<double> ds, rs;
        for (const auto& row : rep.rows) {
            ds.push_back(row.delta);
            rs.push_back(row.ratio);
        }
        rep.fit = verify::fit_exponent(ds, rs);
    }
    return rep;
}

}  // namespace kakeya::report
