#include "reprocs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "reprocs/errors.hpp"

namespace reprocs::svg {

namespace {

constexpr double kWidth = 900.0, kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 40.0, kBottom = 50.0;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out.precision(6);
    return out;
}

}  // namespace

void write_log_plot(const std::filesystem::path& path,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label,
                    const std::vector<Series>& series) {
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            if (s.y[i] > 0.0) {
                y_lo = std::min(y_lo, s.y[i]);
                y_hi = std::max(y_hi, s.y[i]);
            }
        }
    }
    if (x_hi < x_lo) {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    if (y_hi < y_lo) {
        y_lo = 1e-6;
        y_hi = 1.0;
    }
    const double ly_lo = std::floor(std::log10(y_lo));
    const double ly_hi = std::ceil(std::log10(y_hi) + 1e-12);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    auto map_x = [&](double x) {
        return kLeft + (x - x_lo) / std::max(1e-300, x_hi - x_lo) * plot_w;
    };
    auto map_y = [&](double y) {
        const double ly =
            std::clamp(std::log10(std::max(y, 1e-300)), ly_lo, ly_hi);
        return kTop + (ly_hi - ly) / std::max(1.0, ly_hi - ly_lo) * plot_h;
    };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n";

    // Decade grid and y tick labels.
    for (double d = ly_lo; d <= ly_hi + 1e-9; d += 1.0) {
        const double y = map_y(std::pow(10.0, d));
        out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\""
            << kWidth - kRight << "\" y2=\"" << y
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">1e"
            << static_cast<long>(d) << "</text>\n";
    }
    const int x_ticks = 5;
    for (int i = 0; i <= x_ticks; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / x_ticks;
        const double x = map_x(xv);
        out << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x
            << "\" y2=\"" << kHeight - kBottom
            << "\" stroke=\"#eeeeee\" stroke-width=\"1\"/>\n"
            << "<text x=\"" << x << "\" y=\"" << kHeight - kBottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">"
            << static_cast<long>(xv) << "</text>\n";
    }
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
        << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"#333333\"/>\n";

    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.3\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            out << map_x(s.x[i]) << ',' << map_y(s.y[i]) << ' ';
        }
        out << "\"/>\n";
    }

    double legend_y = kTop + 14;
    for (const auto& s : series) {
        out << "<line x1=\"" << kWidth - kRight - 150 << "\" y1=\"" << legend_y
            << "\" x2=\"" << kWidth - kRight - 120 << "\" y2=\"" << legend_y
            << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << kWidth - kRight - 112 << "\" y=\""
            << legend_y + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
            << "</text>\n";
        legend_y += 18;
    }

    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << x_label << "</text>\n"
        << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 16 "
        << kHeight / 2 << ")\">" << y_label << "</text>\n</svg>\n";
}

void write_support_raster(const std::filesystem::path& path,
                          const std::string& title,
                          const synth::SupportSequence& supports,
                          long stride) {
    if (stride < 1) stride = 1;
    const long t_max = supports.t_max();
    const long cols = (t_max + stride - 1) / stride;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double cw = plot_w / std::max<long>(cols, 1);
    const double ch = plot_h / std::max<Index>(supports.n, 1);

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">"
        << title << "</text>\n";

    long col = 0;
    for (long t = 1; t <= t_max; t += stride, ++col) {
        const double x = kLeft + col * cw;
        // Merge consecutive indices into one rect per run.
        const auto& support = supports.at(t);
        size_t i = 0;
        while (i < support.size()) {
            size_t j = i;
            while (j + 1 < support.size() && support[j + 1] == support[j] + 1) {
                ++j;
            }
            const double y = kTop + support[i] * ch;
            const double h = (support[j] - support[i] + 1) * ch;
            out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\""
                << std::max(cw, 0.4) << "\" height=\"" << std::max(h, 0.4)
                << "\" fill=\"#1f3b73\"/>\n";
            i = j + 1;
        }
    }
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
        << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"#333333\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">t</text>\n"
        << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 16 " << kHeight / 2
        << ")\">index</text>\n</svg>\n";
}

}  // namespace reprocs::svg
