#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prime_lab::svg {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    double stroke_width = 1.0;
    bool dashed = false;
    std::string label;
};

struct Marker {
    double x = 0.0;
    double y = 0.0;
    std::string color = "#d62728";
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
    std::vector<Marker> markers;
    // Full-height dashed vertical lines (reference ordinates).
    std::vector<double> vlines;
    std::string vline_color = "#d62728";
    std::optional<std::pair<double, double>> y_range;
};

/// Grid of line-chart panels rendered as plain SVG 1.1. Output depends only
/// on the data, so identical inputs give byte-identical files.
class Figure {
public:
    Figure(std::size_t rows, std::size_t cols, std::string title = {},
           double panel_width = 520.0, double panel_height = 260.0);

    Panel& panel(std::size_t row, std::size_t col) { return panels_.at(row * cols_ + col); }

    std::string render() const;

    /// Throws IoError if the file cannot be written.
    void save(const std::filesystem::path& path) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::string title_;
    double panel_width_;
    double panel_height_;
    std::vector<Panel> panels_;
};

}  // namespace prime_lab::svg
