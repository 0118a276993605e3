#ifndef MCD_PLOT_HPP
#define MCD_PLOT_HPP

/**
 * @file plot.hpp
 * @brief Minimal static SVG writer for log-scale BER-versus-power plots.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcd {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/**
 * @brief Writes a line plot with a linear x axis and log10 y axis.
 *
 * Deterministic output: identical input produces identical bytes.
 */
inline void write_log_plot_svg(const std::vector<PlotSeries>& series, const std::string& x_label,
                               const std::string& y_label, const std::string& path) {
    if (series.empty()) throw std::invalid_argument("nothing to plot");
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const double W = 840, H = 560, L = 90, R = 30, T = 30, B = 70;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double ly = std::log10(std::max(s.y[i], 1e-12));
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, ly);
            ymax = std::max(ymax, ly);
        }
    if (xmax <= xmin) { xmin -= 1.0; xmax += 1.0; }
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax <= ymin) ymax = ymin + 1.0;

    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[512];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"560\" "
           "viewBox=\"0 0 840 560\">\n<rect width=\"840\" height=\"560\" fill=\"white\"/>\n";

    // decade gridlines and y tick labels
    for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
        const double y = py(d);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.2f\" x2=\"%.1f\" y2=\"%.2f\" stroke=\"#dddddd\"/>\n"
                      "<text x=\"%.1f\" y=\"%.2f\" font-size=\"13\" text-anchor=\"end\" "
                      "font-family=\"sans-serif\">1e%d</text>\n",
                      L, y, W - R, y, L - 8.0, y + 4.0, d);
        out << buf;
    }
    // x ticks at the union of sample positions
    std::vector<double> xs;
    for (const auto& s : series) xs.insert(xs.end(), s.x.begin(), s.x.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double x : xs) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.1f\" x2=\"%.2f\" y2=\"%.1f\" stroke=\"#aaaaaa\"/>\n"
                      "<text x=\"%.2f\" y=\"%.1f\" font-size=\"13\" text-anchor=\"middle\" "
                      "font-family=\"sans-serif\">%.10g</text>\n",
                      px(x), H - B, px(x), H - B + 6.0, px(x), H - B + 22.0, x);
        out << buf;
    }
    // axes
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  L, T, L, H - B, L, H - B, W - R, H - B);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"15\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\">%s</text>\n",
                  L + (W - L - R) / 2, H - 18.0, x_label.c_str());
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"22\" y=\"%.1f\" font-size=\"15\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" transform=\"rotate(-90 22 %.1f)\">%s</text>\n",
                  T + (H - T - B) / 2, T + (H - T - B) / 2, y_label.c_str());
    out << buf;

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = palette[si % 8];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]),
                          py(std::log10(std::max(s.y[i], 1e-12))));
            pts += buf;
        }
        std::snprintf(buf, sizeof buf,
                      "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                      pts.c_str(), color);
        out << buf;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            std::snprintf(buf, sizeof buf,
                          "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3.5\" fill=\"%s\"/>\n", px(s.x[i]),
                          py(std::log10(std::max(s.y[i], 1e-12))), color);
            out << buf;
        }
        // legend entry
        const double ly = T + 10.0 + 20.0 * static_cast<double>(si);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                      "stroke-width=\"2\"/>\n"
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"13\" "
                      "font-family=\"sans-serif\">%s</text>\n",
                      W - R - 190.0, ly, W - R - 160.0, ly, color, W - R - 152.0, ly + 4.0,
                      s.label.c_str());
        out << buf;
    }
    out << "</svg>\n";
}

}  // namespace mcd

#endif  // MCD_PLOT_HPP
