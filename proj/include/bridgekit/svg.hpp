#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bridgekit/error.hpp"
#include "bridgekit/textio.hpp"

namespace bridgekit {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

enum class AxisScale { linear, log10 };

namespace detail {

inline double axis_transform(double v, AxisScale scale, const char* axis) {
    if (scale == AxisScale::linear) return v;
    if (!(v > 0.0))
        raise(ErrorKind::DomainError,
              std::string("svg_line_plot: nonpositive value on log-scaled ") + axis + " axis");
    return std::log10(v);
}

inline std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double transformed, AxisScale scale) {
    double v = (scale == AxisScale::log10) ? std::pow(10.0, transformed) : transformed;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace detail

// Standalone SVG line plot: one polyline per series, fixed 6-color palette,
// ticks on both axes, legend from series labels. Log axes reject nonpositive
// values instead of dropping points.
inline std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& x_label,
                                 const std::string& y_label, AxisScale x_scale = AxisScale::linear,
                                 AxisScale y_scale = AxisScale::linear) {
    if (series.empty()) raise(ErrorKind::InvalidParameters, "svg_line_plot: no series");
    for (const SvgSeries& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            raise(ErrorKind::InvalidParameters,
                  "svg_line_plot: series '" + s.label + "' empty or x/y lengths differ");
    }

    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    bool first = true;
    for (const SvgSeries& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double tx = detail::axis_transform(s.x[i], x_scale, "x");
            double ty = detail::axis_transform(s.y[i], y_scale, "y");
            if (first) {
                xmin = xmax = tx;
                ymin = ymax = ty;
                first = false;
            } else {
                xmin = std::min(xmin, tx);
                xmax = std::max(xmax, tx);
                ymin = std::min(ymin, ty);
                ymax = std::max(ymax, ty);
            }
        }
    if (xmax - xmin < 1e-12) {
        double pad = std::max(0.5, std::fabs(xmax) * 0.1);
        xmin -= pad;
        xmax += pad;
    }
    if (ymax - ymin < 1e-12) {
        double pad = std::max(0.5, std::fabs(ymax) * 0.1);
        ymin -= pad;
        ymax += pad;
    }

    const double W = 640.0, H = 420.0;
    const double L = 70.0, R = 20.0, T = 20.0, B = 50.0;
    const double pw = W - L - R, ph = H - T - B;
    auto px = [&](double tx) { return L + (tx - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double ty) { return T + ph - (ty - ymin) / (ymax - ymin) * ph; };

    static const char* palette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#9467bd", "#ff7f0e", "#17becf"};

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
           "viewBox=\"0 0 640 420\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"#ffffff\"/>\n";

    // frame and ticks
    out += "<line x1=\"" + detail::fmt2(L) + "\" y1=\"" + detail::fmt2(T + ph) + "\" x2=\"" +
           detail::fmt2(L + pw) + "\" y2=\"" + detail::fmt2(T + ph) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    out += "<line x1=\"" + detail::fmt2(L) + "\" y1=\"" + detail::fmt2(T) + "\" x2=\"" +
           detail::fmt2(L) + "\" y2=\"" + detail::fmt2(T + ph) +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double fx = xmin + (xmax - xmin) * i / 4.0;
        double fy = ymin + (ymax - ymin) * i / 4.0;
        out += "<line x1=\"" + detail::fmt2(px(fx)) + "\" y1=\"" + detail::fmt2(T + ph) +
               "\" x2=\"" + detail::fmt2(px(fx)) + "\" y2=\"" + detail::fmt2(T + ph + 5) +
               "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + detail::fmt2(px(fx)) + "\" y=\"" + detail::fmt2(T + ph + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333333\">" +
               detail::fmt_tick(fx, x_scale) + "</text>\n";
        out += "<line x1=\"" + detail::fmt2(L - 5) + "\" y1=\"" + detail::fmt2(py(fy)) +
               "\" x2=\"" + detail::fmt2(L) + "\" y2=\"" + detail::fmt2(py(fy)) +
               "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + detail::fmt2(L - 8) + "\" y=\"" + detail::fmt2(py(fy) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333333\">" +
               detail::fmt_tick(fy, y_scale) + "</text>\n";
    }
    out += "<text x=\"" + detail::fmt2(L + pw / 2) + "\" y=\"" + detail::fmt2(H - 12) +
           "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111111\">" + x_label + "</text>\n";
    out += "<text x=\"16\" y=\"" + detail::fmt2(T + ph / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111111\" transform=\"rotate(-90 16 " +
           detail::fmt2(T + ph / 2) + ")\">" + y_label + "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const SvgSeries& s = series[si];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) pts += " ";
            pts += detail::fmt2(px(detail::axis_transform(s.x[i], x_scale, "x"))) + "," +
                   detail::fmt2(py(detail::axis_transform(s.y[i], y_scale, "y")));
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
               palette[si % 6] + "\" stroke-width=\"1.5\"/>\n";
        out += "<text x=\"" + detail::fmt2(L + pw - 6) + "\" y=\"" +
               detail::fmt2(T + 16 + 16 * static_cast<double>(si)) +
               "\" font-size=\"12\" text-anchor=\"end\" fill=\"" + palette[si % 6] + "\">" +
               s.label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

inline void emit_svg_lineplot(const std::vector<SvgSeries>& series, const std::string& x_label,
                              const std::string& y_label, const std::string& path,
                              AxisScale x_scale = AxisScale::linear,
                              AxisScale y_scale = AxisScale::linear) {
    write_text_file(path, svg_line_plot(series, x_label, y_label, x_scale, y_scale));
}

} // namespace bridgekit
