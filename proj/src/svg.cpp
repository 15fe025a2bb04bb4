#include "strokebench/svg.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "strokebench/errors.hpp"

namespace strokebench {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

SvgDocument::SvgDocument(double width, double height) : width_(width), height_(height) {}

void SvgDocument::line(double x1, double y1, double x2, double y2, const std::string& color,
                       double stroke_width) {
    elements_.push_back("<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
                        "\" y2=\"" + fmt(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" +
                        fmt(stroke_width) + "\"/>");
}

void SvgDocument::polyline(const std::vector<std::pair<double, double>>& pts,
                           const std::string& color, double stroke_width) {
    std::string points;
    for (const auto& [x, y] : pts) {
        if (!points.empty()) points += ' ';
        points += fmt(x) + "," + fmt(y);
    }
    elements_.push_back("<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
                        "\" stroke-width=\"" + fmt(stroke_width) + "\"/>");
}

void SvgDocument::circle(double cx, double cy, double r, const std::string& fill) {
    elements_.push_back("<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) +
                        "\" fill=\"" + fill + "\"/>");
}

void SvgDocument::rect(double x, double y, double w, double h, const std::string& fill,
                       const std::string& stroke) {
    elements_.push_back("<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
                        "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
                        "\"/>");
}

void SvgDocument::text(double x, double y, const std::string& content, double size,
                       const std::string& anchor, const std::string& color) {
    elements_.push_back("<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" +
                        fmt(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
                        "\" fill=\"" + color + "\">" + escape(content) + "</text>");
}

std::string SvgDocument::str() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) + "\" height=\"" +
           fmt(height_) + "\" viewBox=\"0 0 " + fmt(width_) + " " + fmt(height_) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + fmt(width_) + "\" height=\"" + fmt(height_) +
           "\" fill=\"white\"/>\n";
    for (const auto& e : elements_) {
        out += e;
        out += '\n';
    }
    out += "</svg>\n";
    return out;
}

void SvgDocument::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << str();
    if (!out) throw IoError("write failed for " + path.string());
}

const std::string& cluster_color(int cluster_id) {
    static const std::array<std::string, 10> palette = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[static_cast<std::size_t>(cluster_id) % palette.size()];
}

}  // namespace strokebench
