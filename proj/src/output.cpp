#include "fracinv/output.hpp"

#include "fracinv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

namespace fracinv {

namespace {

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string num(double v) { return fmt("%.17g", v); }

std::string delta_label(double delta) { return fmt("%g", delta); }

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open output file '" + path + "' for writing");
    }
    out << content;
    out.close();
    if (!out) {
        throw ConfigError("failed writing output file '" + path + "'");
    }
}

struct Series {
    std::string label;
    std::string color;
    std::string dash; // empty for solid
    std::vector<double> y;
};

// Self-contained SVG line plot: polylines over a framed axis box with ticks
// and a legend, no external renderer required.
std::string svg_line_plot(const std::string& title, const std::vector<double>& x,
                          const std::vector<Series>& series, const std::string& x_label,
                          const std::string& y_label)
{
    const double width = 760.0;
    const double height = 520.0;
    const double ml = 72.0;
    const double mr = 24.0;
    const double mt = 44.0;
    const double mb = 56.0;
    const double pw = width - ml - mr;
    const double ph = height - mt - mb;

    double x_lo = x.front();
    double x_hi = x.back();
    double y_lo = std::numeric_limits<double>::infinity();
    double y_hi = -y_lo;
    for (const Series& s : series) {
        for (double v : s.y) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (!(y_hi > y_lo)) {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    auto px = [&](double v) { return ml + (v - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double v) { return mt + (y_hi - v) / (y_hi - y_lo) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"520\" "
           "viewBox=\"0 0 760 520\">\n";
    svg += "<rect width=\"760\" height=\"520\" fill=\"white\"/>\n";
    svg += "<text x=\"380\" y=\"26\" font-family=\"sans-serif\" font-size=\"16\" "
           "text-anchor=\"middle\">" + title + "</text>\n";

    // axis frame
    svg += "<rect x=\"" + fmt("%.2f", ml) + "\" y=\"" + fmt("%.2f", mt) + "\" width=\"" +
           fmt("%.2f", pw) + "\" height=\"" + fmt("%.2f", ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    const int n_ticks = 6;
    for (int i = 0; i < n_ticks; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / (n_ticks - 1);
        const double gx = px(fx);
        svg += "<line x1=\"" + fmt("%.2f", gx) + "\" y1=\"" + fmt("%.2f", mt + ph) +
               "\" x2=\"" + fmt("%.2f", gx) + "\" y2=\"" + fmt("%.2f", mt + ph + 5) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt("%.2f", gx) + "\" y=\"" + fmt("%.2f", mt + ph + 20) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
               fmt("%.4g", fx) + "</text>\n";

        const double fy = y_lo + (y_hi - y_lo) * i / (n_ticks - 1);
        const double gy = py(fy);
        svg += "<line x1=\"" + fmt("%.2f", ml - 5) + "\" y1=\"" + fmt("%.2f", gy) +
               "\" x2=\"" + fmt("%.2f", ml) + "\" y2=\"" + fmt("%.2f", gy) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt("%.2f", ml - 9) + "\" y=\"" + fmt("%.2f", gy + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" +
               fmt("%.4g", fy) + "</text>\n";
    }
    svg += "<text x=\"" + fmt("%.2f", ml + pw / 2) + "\" y=\"" + fmt("%.2f", height - 14) +
           "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" +
           x_label + "</text>\n";
    svg += "<text x=\"20\" y=\"" + fmt("%.2f", mt + ph / 2) +
           "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 20 " + fmt("%.2f", mt + ph / 2) + ")\">" + y_label +
           "</text>\n";

    for (const Series& s : series) {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
        if (!s.dash.empty()) {
            svg += " stroke-dasharray=\"" + s.dash + "\"";
        }
        svg += " points=\"";
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (i > 0) {
                svg += " ";
            }
            svg += fmt("%.2f", px(x[i])) + "," + fmt("%.2f", py(s.y[i]));
        }
        svg += "\"/>\n";
    }

    // legend, top-right inside the frame
    double ly = mt + 16.0;
    for (const Series& s : series) {
        const double lx = ml + pw - 150.0;
        svg += "<line x1=\"" + fmt("%.2f", lx) + "\" y1=\"" + fmt("%.2f", ly - 4) +
               "\" x2=\"" + fmt("%.2f", lx + 28) + "\" y2=\"" + fmt("%.2f", ly - 4) +
               "\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
        if (!s.dash.empty()) {
            svg += " stroke-dasharray=\"" + s.dash + "\"";
        }
        svg += "/>\n";
        svg += "<text x=\"" + fmt("%.2f", lx + 34) + "\" y=\"" + fmt("%.2f", ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + s.label + "</text>\n";
        ly += 18.0;
    }
    svg += "</svg>\n";
    return svg;
}

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b"};

} // namespace

RunArtifacts emit_outputs(const std::string& out_dir, const std::string& stub,
                          const GridSpec& grid, const RegionIndex& regions,
                          const Medium& truth, std::span<const RunOutput> runs)
{
    if (runs.empty()) {
        throw ConfigError("emit_outputs: no runs to emit");
    }
    std::filesystem::create_directories(out_dir);

    RunArtifacts artifacts;
    const std::size_t m = regions.interior.size();
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = grid.node(regions.interior[i]);
    }

    for (const RunOutput& run : runs) {
        const std::string tag = stub + "_delta" + delta_label(run.delta);

        std::string rec = "x,q_true,q_rec,g_true,g_rec\n";
        for (std::size_t i = 0; i < m; ++i) {
            rec += num(x[i]) + "," + num(truth.q[i]) + "," + num(run.reconstruction.q[i]) +
                   "," + num(truth.g[i]) + "," + num(run.reconstruction.g[i]) + "\n";
        }
        const std::string rec_path = out_dir + "/" + tag + "_rec.csv";
        write_file(rec_path, rec);
        artifacts.rec_csvs.push_back(rec_path);

        std::string tr = "iter,J,E,beta,gamma,err_q,err_g\n";
        for (const IterationRecord& it : run.trace) {
            tr += std::to_string(it.k) + "," + num(it.J_value) + "," + num(it.E_value) +
                  "," + num(it.beta) + "," + num(it.gamma) + "," + num(it.err_q) + "," +
                  num(it.err_g) + "\n";
        }
        const std::string trace_path = out_dir + "/" + tag + "_trace.csv";
        write_file(trace_path, tr);
        artifacts.trace_csvs.push_back(trace_path);

        RunSummary summary;
        summary.delta = run.delta;
        summary.iterations = run.trace.size() - 1;
        summary.termination = run.termination;
        summary.E_final = run.trace.back().E_value;
        summary.err_q = run.trace.back().err_q;
        summary.err_g = run.trace.back().err_g;
        artifacts.summaries.push_back(summary);
    }

    for (int which = 0; which < 2; ++which) {
        std::vector<Series> series;
        Series truth_series;
        truth_series.label = which == 0 ? "q true" : "g true";
        truth_series.color = "#000000";
        truth_series.dash = "6,4";
        truth_series.y = which == 0 ? truth.q : truth.g;
        series.push_back(std::move(truth_series));
        for (std::size_t r = 0; r < runs.size(); ++r) {
            Series s;
            s.label = std::string(which == 0 ? "q rec, delta=" : "g rec, delta=") +
                      delta_label(runs[r].delta);
            s.color = kPalette[r % (sizeof(kPalette) / sizeof(kPalette[0]))];
            s.y = which == 0 ? runs[r].reconstruction.q : runs[r].reconstruction.g;
            series.push_back(std::move(s));
        }
        const std::string path =
            out_dir + "/" + stub + (which == 0 ? "_q.svg" : "_g.svg");
        write_file(path, svg_line_plot(which == 0 ? "Reconstruction of the potential q"
                                                  : "Reconstruction of the source g",
                                       x, series, "x", which == 0 ? "q(x)" : "g(x)"));
        (which == 0 ? artifacts.plot_q : artifacts.plot_g) = path;
    }

    // Every listed artifact must exist and be non-empty.
    auto check = [](const std::string& p) {
        std::error_code ec;
        const auto sz = std::filesystem::file_size(p, ec);
        if (ec || sz == 0) {
            throw ConfigError("artifact '" + p + "' was not written correctly");
        }
    };
    for (const auto& p : artifacts.rec_csvs) {
        check(p);
    }
    for (const auto& p : artifacts.trace_csvs) {
        check(p);
    }
    check(artifacts.plot_q);
    check(artifacts.plot_g);
    return artifacts;
}

} // namespace fracinv
