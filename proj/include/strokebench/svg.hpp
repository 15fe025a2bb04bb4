#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace strokebench {

// Minimal static SVG builder. Output carries no timestamps or generator
// metadata so identical data produces identical bytes.
class SvgDocument {
public:
    SvgDocument(double width, double height);

    void line(double x1, double y1, double x2, double y2, const std::string& color,
              double stroke_width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  double stroke_width = 1.5);
    void circle(double cx, double cy, double r, const std::string& fill);
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none");
    void text(double x, double y, const std::string& content, double size = 11.0,
              const std::string& anchor = "start", const std::string& color = "#333333");

    void save(const std::filesystem::path& path) const;
    std::string str() const;

private:
    double width_;
    double height_;
    std::vector<std::string> elements_;
};

// Maps data coordinates onto a pixel viewport (y flipped).
struct PlotAxes {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    double left = 50.0, top = 20.0;
    double plot_width = 500.0, plot_height = 300.0;

    double px(double x) const {
        return left + (x - x_min) / (x_max - x_min) * plot_width;
    }
    double py(double y) const {
        return top + (y_max - y) / (y_max - y_min) * plot_height;
    }
};

// Shared qualitative palette for cluster ids.
const std::string& cluster_color(int cluster_id);

}  // namespace strokebench
