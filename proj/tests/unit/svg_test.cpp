#include <doctest.h>

#include "prime_lab/svg.hpp"

using namespace prime_lab::svg;

TEST_CASE("svg: figure structure") {
    Figure fig(1, 2, "demo & test");
    auto& left = fig.panel(0, 0);
    left.series.push_back({{0, 1, 2}, {0, 1, 0}, "#123456", 1.0, false, "tri"});
    left.vlines = {0.5, 1.5, 7.0};  // 7 is outside the data range
    left.markers.push_back({1.0, 1.0, "#ff0000"});
    auto& right = fig.panel(0, 1);
    right.log_x = right.log_y = true;
    right.series.push_back({{10, 100, 1000}, {1, 10, 100}, "#654321", 1.0, true, {}});

    const std::string svg = fig.render();
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
    CHECK(svg.find("demo &amp; test") != std::string::npos);
    CHECK(svg.find("stroke-dasharray=\"4,3\"") != std::string::npos);
    // two visible reference lines, the out-of-range one dropped
    std::size_t count = 0;
    for (auto pos = svg.find("stroke-dasharray=\"4,3\""); pos != std::string::npos;
         pos = svg.find("stroke-dasharray=\"4,3\"", pos + 1))
        ++count;
    CHECK(count == 2);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("1e2") != std::string::npos);
    CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
    CHECK(svg == fig.render());
}
