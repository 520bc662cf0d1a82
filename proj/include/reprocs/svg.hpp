#ifndef REPROCS_SVG_HPP
#define REPROCS_SVG_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "reprocs/synth.hpp"

namespace reprocs::svg {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

// Line plot with a logarithmic y axis (decade ticks).  Nonpositive y
// values are clamped to the plot floor.
void write_log_plot(const std::filesystem::path& path,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label,
                    const std::vector<Series>& series);

// Sparsity raster of X = [x_1 .. x_tmax]: one filled cell per support
// entry, subsampled in time by `stride` to keep files small.
void write_support_raster(const std::filesystem::path& path,
                          const std::string& title,
                          const synth::SupportSequence& supports, long stride);

}  // namespace reprocs::svg

#endif  // REPROCS_SVG_HPP
