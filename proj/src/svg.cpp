#include "tlf/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace tlf {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 220;
constexpr int kMarginLeft = 50;
constexpr int kMarginRight = 15;
constexpr int kMarginTop = 28;
constexpr int kMarginBottom = 30;
constexpr const char* kPredColor = "#ff7f0e";
constexpr const char* kRefColor = "#1f77b4";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Step polyline: each sample holds its value for one sample period.
std::string step_path(const std::vector<double>& values, double x_per_sample, double y_lo,
                      double y_hi, double v_lo, double v_hi) {
    std::string d;
    for (size_t i = 0; i < values.size(); ++i) {
        double frac = (values[i] - v_lo) / (v_hi - v_lo);
        double y = y_lo + (1.0 - frac) * (y_hi - y_lo);
        double x0 = kMarginLeft + double(i) * x_per_sample;
        double x1 = kMarginLeft + double(i + 1) * x_per_sample;
        d += (i == 0 ? "M" : "L") + fmt(x0) + "," + fmt(y) + " L" + fmt(x1) + "," + fmt(y) + " ";
    }
    return d;
}

void write_panel(const std::string& path, const std::string& title,
                 const std::vector<double>& predicted, const std::vector<double>& reference,
                 double v_lo, double v_hi, double seconds_per_sample, double threshold,
                 bool show_threshold) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write svg: " + path);
    const size_t n = std::max(predicted.size(), reference.size());
    const double x_per_sample =
        n == 0 ? 1.0 : double(kWidth - kMarginLeft - kMarginRight) / double(n);
    const double y_lo = kMarginTop;
    const double y_hi = kHeight - kMarginBottom;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kMarginLeft << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">"
        << title << "</text>\n";
    // axes
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y_hi << "\" x2=\""
        << kWidth - kMarginRight << "\" y2=\"" << y_hi << "\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y_lo << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << y_hi << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"8\" y=\"" << y_lo + 4 << "\" font-family=\"sans-serif\" font-size=\"10\">"
        << fmt(v_hi) << "</text>\n";
    out << "<text x=\"8\" y=\"" << y_hi + 4 << "\" font-family=\"sans-serif\" font-size=\"10\">"
        << fmt(v_lo) << "</text>\n";
    // x labels every ~60 samples
    size_t tick = n <= 120 ? 30 : 60;
    for (size_t i = 0; i <= n; i += tick) {
        double x = kMarginLeft + double(i) * x_per_sample;
        out << "<text x=\"" << fmt(x) << "\" y=\"" << kHeight - 10
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << fmt(double(i) * seconds_per_sample)
            << "s</text>\n";
    }
    if (show_threshold) {
        double frac = (threshold - v_lo) / (v_hi - v_lo);
        double y = y_lo + (1.0 - frac) * (y_hi - y_lo);
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(y) << "\" x2=\""
            << kWidth - kMarginRight << "\" y2=\"" << fmt(y)
            << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    }
    if (!reference.empty())
        out << "<path d=\"" << step_path(reference, x_per_sample, y_lo, y_hi, v_lo, v_hi)
            << "\" fill=\"none\" stroke=\"" << kRefColor << "\" stroke-width=\"1.5\"/>\n";
    if (!predicted.empty())
        out << "<path d=\"" << step_path(predicted, x_per_sample, y_lo, y_hi, v_lo, v_hi)
            << "\" fill=\"none\" stroke=\"" << kPredColor << "\" stroke-width=\"1.5\"/>\n";
    out << "</svg>\n";
}

}  // namespace

void write_timeline_svg(const std::string& path, const std::string& title,
                        const std::vector<double>& predicted_probs,
                        const std::vector<uint8_t>& reference, double threshold) {
    std::vector<double> ref(reference.begin(), reference.end());
    write_panel(path, title, predicted_probs, ref, 0.0, 1.0, 1.0, threshold, true);
}

void write_count_svg(const std::string& path, const std::string& title,
                     const std::vector<int>& predicted, const std::vector<int>& reference,
                     double samples_per_second) {
    int maxv = 1;
    for (int v : predicted) maxv = std::max(maxv, v);
    for (int v : reference) maxv = std::max(maxv, v);
    std::vector<double> p(predicted.begin(), predicted.end());
    std::vector<double> r(reference.begin(), reference.end());
    write_panel(path, title, p, r, 0.0, double(maxv), 1.0 / samples_per_second, 0.0, false);
}

}  // namespace tlf
