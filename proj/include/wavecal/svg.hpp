// Minimal SVG emitter for log-log variance plots. Plots are views: every
// plotted series is also written as a companion CSV, and the SVG is a pure
// function of that data.
#pragma once

#include <wavecal/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace wavecal {

enum class PlotKind { Wv, WvCompare, FitOverlay, FitDecomposition, AutoGrid };

struct PlotSeries {
    std::string label;
    std::vector<double> x; ///< scales, > 0
    std::vector<double> y; ///< variances, > 0 to appear
    std::vector<double> band_lo, band_hi; ///< optional CI ribbon
    bool dashed = false;
    std::string color = "#1f6fb5";
};

struct PlotSpec {
    PlotKind kind = PlotKind::Wv;
    std::string title;
    std::string x_label = "scale";
    std::string y_label = "variance";
    bool ci_bands = true;
    int width = 760, height = 520;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace detail

/// Render the series to an SVG document string (log-log axes, decade grid).
inline std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool any = false;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0) || !(s.y[i] > 0) || !std::isfinite(s.y[i])) continue;
            double lo = (spec.ci_bands && i < s.band_lo.size() && s.band_lo[i] > 0) ? s.band_lo[i]
                                                                                   : s.y[i];
            double hi = (spec.ci_bands && i < s.band_hi.size() && std::isfinite(s.band_hi[i]) &&
                         s.band_hi[i] > 0)
                            ? s.band_hi[i]
                            : s.y[i];
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = lo;
                ymax = hi;
                any = true;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, lo);
                ymax = std::max(ymax, hi);
            }
        }
    if (!any) throw DataError("plot: no positive finite points to draw");
    const double lx0 = std::log10(xmin), lx1 = std::log10(xmax * 1.0000001);
    const double ly0 = std::log10(ymin) - 0.05, ly1 = std::log10(ymax) + 0.05;
    const double ml = 70, mr = 20, mt = 40, mb = 55;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
    auto X = [&](double v) { return ml + (std::log10(v) - lx0) / std::max(lx1 - lx0, 1e-12) * pw; };
    auto Y = [&](double v) {
        return mt + ph - (std::log10(v) - ly0) / std::max(ly1 - ly0, 1e-12) * ph;
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
       << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << detail::xml_escape(spec.title) << "</text>\n";

    // decade grid + tick labels
    for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1)); ++d) {
        double px = X(std::pow(10.0, d));
        os << "<line x1=\"" << detail::svg_num(px) << "\" y1=\"" << mt << "\" x2=\""
           << detail::svg_num(px) << "\" y2=\"" << mt + ph
           << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << detail::svg_num(px) << "\" y=\"" << mt + ph + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1)); ++d) {
        double py = Y(std::pow(10.0, d));
        os << "<line x1=\"" << ml << "\" y1=\"" << detail::svg_num(py) << "\" x2=\"" << ml + pw
           << "\" y2=\"" << detail::svg_num(py)
           << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << detail::svg_num(py + 4)
           << "\" text-anchor=\"end\" font-size=\"11\">1e" << d << "</text>\n";
    }
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << detail::svg_num(pw)
       << "\" height=\"" << detail::svg_num(ph) << "\" fill=\"none\" stroke=\"#444444\"/>\n";
    os << "<text x=\"" << spec.width / 2 << "\" y=\"" << spec.height - 12
       << "\" text-anchor=\"middle\" font-size=\"12\">" << detail::xml_escape(spec.x_label)
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << mt + ph / 2
       << ")\">" << detail::xml_escape(spec.y_label) << "</text>\n";

    // CI ribbons under the lines
    for (const auto& s : series) {
        if (!spec.ci_bands || s.band_lo.empty()) continue;
        std::string fwd, back;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.band_lo[i] > 0) || !(s.band_hi[i] > 0) || !std::isfinite(s.band_hi[i])) continue;
            fwd += (fwd.empty() ? "M" : "L") + detail::svg_num(X(s.x[i])) + " " +
                   detail::svg_num(Y(s.band_hi[i]));
            back = "L" + detail::svg_num(X(s.x[i])) + " " + detail::svg_num(Y(s.band_lo[i])) + back;
        }
        if (!fwd.empty())
            os << "<path d=\"" << fwd << back << "Z\" fill=\"" << s.color
               << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    // lines + markers
    for (const auto& s : series) {
        std::string d;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0) || !(s.y[i] > 0) || !std::isfinite(s.y[i])) continue;
            d += (d.empty() ? "M" : "L") + detail::svg_num(X(s.x[i])) + " " +
                 detail::svg_num(Y(s.y[i]));
        }
        os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << s.color
           << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
           << "/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0) || !(s.y[i] > 0) || !std::isfinite(s.y[i])) continue;
            os << "<circle cx=\"" << detail::svg_num(X(s.x[i])) << "\" cy=\""
               << detail::svg_num(Y(s.y[i])) << "\" r=\"2.6\" fill=\"" << s.color << "\"/>\n";
        }
    }
    // legend
    double ly = mt + 14;
    for (const auto& s : series) {
        os << "<line x1=\"" << ml + 12 << "\" y1=\"" << detail::svg_num(ly - 4) << "\" x2=\""
           << ml + 40 << "\" y2=\"" << detail::svg_num(ly - 4) << "\" stroke=\"" << s.color
           << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        os << "<text x=\"" << ml + 46 << "\" y=\"" << detail::svg_num(ly)
           << "\" font-size=\"11\">" << detail::xml_escape(s.label) << "</text>\n";
        ly += 16;
    }
    os << "</svg>\n";
    return os.str();
}

/// Companion CSV: one row per (series, point), the ground truth for the SVG.
inline void write_plot_csv(std::ostream& os, const std::vector<PlotSeries>& series) {
    os << "series,scale,value,band_lo,band_hi\r\n";
    char buf[40];
    auto g = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            os << '"' << s.label << "\"," << g(s.x[i]) << ',' << g(s.y[i]) << ',';
            if (i < s.band_lo.size()) os << g(s.band_lo[i]);
            os << ',';
            if (i < s.band_hi.size()) os << g(s.band_hi[i]);
            os << "\r\n";
        }
}

inline void write_plot(const std::string& svg_path, const PlotSpec& spec,
                       const std::vector<PlotSeries>& series) {
    std::string svg = render_svg(spec, series);
    std::ofstream out(svg_path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + svg_path + "' for writing");
    out << svg;
    std::string csv_path = svg_path;
    auto dot = csv_path.rfind('.');
    csv_path = (dot == std::string::npos ? csv_path : csv_path.substr(0, dot)) + ".csv";
    std::ofstream cout_(csv_path, std::ios::binary | std::ios::trunc);
    if (!cout_) throw DataError("cannot open '" + csv_path + "' for writing");
    write_plot_csv(cout_, series);
}

} // namespace wavecal
