#include "prime_lab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "prime_lab/errors.hpp"

namespace prime_lab::svg {

namespace {

constexpr double kMarginLeft = 62.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 28.0;
constexpr double kMarginBottom = 40.0;
constexpr double kTitleHeight = 30.0;

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double transform(double v) const { return log ? std::log10(v) : v; }
};

Axis fit_axis(const std::vector<double>& values, bool log) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        if (!std::isfinite(v) || (log && v <= 0.0)) continue;
        const double tv = log ? std::log10(v) : v;
        lo = std::min(lo, tv);
        hi = std::max(hi, tv);
    }
    if (!std::isfinite(lo)) return {0.0, 1.0, log};
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    return {lo, hi, log};
}

// Round tick spacing (1, 2, 5 x 10^k) giving roughly `target` ticks.
double tick_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double nice = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

std::string tick_label(double v, bool log) {
    if (log) return fmt::format("1e{:.0f}", v);
    if (std::abs(v) < 1e-12) return "0";
    return fmt::format("{:.4g}", v);
}

void render_panel(std::string& out, const Panel& p, double x0, double y0, double w, double h) {
    const double pw = w - kMarginLeft - kMarginRight;
    const double ph = h - kMarginTop - kMarginBottom;
    const double left = x0 + kMarginLeft;
    const double top = y0 + kMarginTop;

    std::vector<double> xs, ys;
    for (const auto& s : p.series) {
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    for (const auto& m : p.markers) ys.push_back(m.y);
    Axis ax = fit_axis(xs, p.log_x);
    Axis ay = fit_axis(ys, p.log_y);
    if (p.y_range) ay = {ay.transform(p.y_range->first), ay.transform(p.y_range->second), p.log_y};
    if (!p.log_y) {
        const double pad = 0.05 * (ay.hi - ay.lo);
        ay.lo -= pad;
        ay.hi += pad;
    }

    auto px = [&](double v) { return left + (ax.transform(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double v) { return top + ph - (ay.transform(v) - ay.lo) / (ay.hi - ay.lo) * ph; };
    auto in_x = [&](double v) {
        const double tv = ax.transform(v);
        return std::isfinite(tv) && tv >= ax.lo && tv <= ax.hi;
    };

    out += fmt::format("<g>\n<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" "
                       "fill=\"white\" stroke=\"#444\" stroke-width=\"0.8\"/>\n",
                       left, top, pw, ph);
    if (!p.title.empty())
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"13\" "
                           "text-anchor=\"middle\">{}</text>\n",
                           left + pw / 2, y0 + 18.0, escape(p.title));

    // Ticks and grid lines.
    const auto ticks = [](const Axis& a) {
        std::vector<double> t;
        const double step = a.log ? 1.0 : tick_step(a.hi - a.lo, 5);
        for (double v = std::ceil(a.lo / step) * step; v <= a.hi + 1e-9 * step; v += step)
            t.push_back(v);
        return t;
    };
    for (double tv : ticks(ax)) {
        const double x = left + (tv - ax.lo) / (ax.hi - ax.lo) * pw;
        out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
                           "stroke=\"#ddd\" stroke-width=\"0.5\"/>\n"
                           "<text x=\"{0:.2f}\" y=\"{3:.2f}\" font-size=\"10\" "
                           "text-anchor=\"middle\">{4}</text>\n",
                           x, top, top + ph, top + ph + 13.0, tick_label(tv, ax.log));
    }
    for (double tv : ticks(ay)) {
        const double y = top + ph - (tv - ay.lo) / (ay.hi - ay.lo) * ph;
        out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" "
                           "stroke=\"#ddd\" stroke-width=\"0.5\"/>\n"
                           "<text x=\"{3:.2f}\" y=\"{4:.2f}\" font-size=\"10\" "
                           "text-anchor=\"end\">{5}</text>\n",
                           left, y, left + pw, left - 4.0, y + 3.5, tick_label(tv, ay.log));
    }
    if (!p.x_label.empty())
        out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" "
                           "text-anchor=\"middle\">{}</text>\n",
                           left + pw / 2, top + ph + 30.0, escape(p.x_label));
    if (!p.y_label.empty())
        out += fmt::format("<text x=\"{0:.2f}\" y=\"{1:.2f}\" font-size=\"11\" "
                           "text-anchor=\"middle\" transform=\"rotate(-90 {0:.2f} {1:.2f})\">"
                           "{2}</text>\n",
                           x0 + 14.0, top + ph / 2, escape(p.y_label));

    for (double v : p.vlines) {
        if (!in_x(v)) continue;
        out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
                           "stroke=\"{3}\" stroke-width=\"0.8\" stroke-dasharray=\"4,3\"/>\n",
                           px(v), top, top + ph, p.vline_color);
    }

    for (const auto& s : p.series) {
        std::string points;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (p.log_y && s.y[i] <= 0.0) continue;
            if (p.log_x && s.x[i] <= 0.0) continue;
            if (!points.empty()) points += ' ';
            points += fmt::format("{:.2f},{:.2f}", px(s.x[i]), py(s.y[i]));
        }
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2f}\"{} "
                           "points=\"{}\"/>\n",
                           s.color, s.stroke_width, s.dashed ? " stroke-dasharray=\"6,4\"" : "",
                           points);
    }
    for (const auto& m : p.markers) {
        if (!in_x(m.x)) continue;
        out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(m.x),
                           py(m.y), m.color);
    }

    // Legend, top-right.
    double ly = top + 12.0;
    for (const auto& s : p.series) {
        if (s.label.empty()) continue;
        out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" "
                           "stroke=\"{3}\" stroke-width=\"2\"/>\n"
                           "<text x=\"{4:.2f}\" y=\"{5:.2f}\" font-size=\"10\">{6}</text>\n",
                           left + pw - 110.0, ly, left + pw - 92.0, s.color, left + pw - 88.0,
                           ly + 3.5, escape(s.label));
        ly += 13.0;
    }
    out += "</g>\n";
}

}  // namespace

Figure::Figure(std::size_t rows, std::size_t cols, std::string title, double panel_width,
               double panel_height)
    : rows_(rows),
      cols_(cols),
      title_(std::move(title)),
      panel_width_(panel_width),
      panel_height_(panel_height),
      panels_(rows * cols) {}

std::string Figure::render() const {
    const double title_h = title_.empty() ? 0.0 : kTitleHeight;
    const double width = static_cast<double>(cols_) * panel_width_;
    const double height = static_cast<double>(rows_) * panel_height_ + title_h;
    std::string out = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0:.0f}\" "
        "height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        width, height);
    if (!title_.empty())
        out += fmt::format("<text x=\"{:.2f}\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">"
                           "{}</text>\n",
                           width / 2, escape(title_));
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            render_panel(out, panels_[r * cols_ + c], static_cast<double>(c) * panel_width_,
                         title_h + static_cast<double>(r) * panel_height_, panel_width_,
                         panel_height_);
    out += "</svg>\n";
    return out;
}

void Figure::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
    out << render();
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace prime_lab::svg
