#include "strokebench/geometry.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "strokebench/errors.hpp"

namespace strokebench {

using nlohmann::json;

namespace {

double dist(const PixelPoint& a, const PixelPoint& b) {
    return std::hypot(a.u - b.u, a.v - b.v);
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite ") + what);
}

}  // namespace

PixelPoint intersect_lines(const std::pair<PixelPoint, PixelPoint>& l1,
                           const std::pair<PixelPoint, PixelPoint>& l2) {
    const double d1u = l1.second.u - l1.first.u;
    const double d1v = l1.second.v - l1.first.v;
    const double d2u = l2.second.u - l2.first.u;
    const double d2v = l2.second.v - l2.first.v;
    if (dist(l1.first, l1.second) == 0.0 || dist(l2.first, l2.second) == 0.0)
        throw GeometryError("degenerate line: endpoints coincide");

    const double det = d1u * d2v - d1v * d2u;
    const double scale = std::max({std::abs(d1u), std::abs(d1v), std::abs(d2u), std::abs(d2v)});
    if (std::abs(det) <= 1e-12 * scale * scale)
        throw GeometryError("lines are parallel: vanishing point at infinity");

    const double bu = l2.first.u - l1.first.u;
    const double bv = l2.first.v - l1.first.v;
    const double t = (bu * d2v - bv * d2u) / det;
    return {l1.first.u + t * d1u, l1.first.v + t * d1v};
}

BounceDistances measure_bounce(const BounceAnnotation& ann) {
    const PixelPoint v = intersect_lines(ann.edge_line_1, ann.edge_line_2);
    const PixelPoint b = intersect_lines(ann.across_ref, {ann.ball, v});
    BounceDistances d;
    d.d1 = dist(ann.across_ref.first, b);
    d.d2 = dist(b, ann.across_ref.second);
    d.de = dist(ann.ball, ann.net_ref);
    d.be = dist(b, ann.net_ref);
    d.dv = dist(ann.ball, v);
    d.bv = dist(b, v);
    return d;
}

double bounce_x(double d1, double d2, const TableDims& dims) {
    require_finite(d1, "d1");
    require_finite(d2, "d2");
    if (d1 < 0.0 || d2 < 0.0) throw GeometryError("pixel distances must be non-negative");
    if (d1 + d2 <= 0.0) throw GeometryError("d1 + d2 must be positive");
    return dims.width_cm * d1 / (d1 + d2);
}

double bounce_y(double de, double be, double dv, double bv, const TableDims& dims) {
    for (double v : {de, be, dv, bv}) require_finite(v, "cross-ratio distance");
    if (be <= 0.0 || dv <= 0.0) throw GeometryError("cross ratio denominator (BE * DV) is zero");
    return (de * bv) / (be * dv) * dims.length_cm;
}

double net_clearance(double h_ball_cm, const TableDims& dims) {
    require_finite(h_ball_cm, "ball height");
    return h_ball_cm - dims.net_height_cm;
}

double ball_speed(double d_ball_m, std::int64_t n_frames, double fps) {
    require_finite(d_ball_m, "ball travel distance");
    if (d_ball_m < 0.0) throw GeometryError("ball travel distance must be non-negative");
    if (n_frames < 1) throw GeometryError("frame count must be at least 1");
    if (!(fps > 0.0)) throw GeometryError("fps must be positive");
    return d_ball_m / (static_cast<double>(n_frames) / fps);
}

double height_ratio(double h0_cm, double h1_cm) {
    require_finite(h0_cm, "release height");
    require_finite(h1_cm, "contact height");
    if (h0_cm <= 0.0) throw GeometryError("release height h0 must be positive");
    return 1.0 - h1_cm / h0_cm;
}

StrokeParameters extract_parameters(const StrokeMeasurement& m, const TableDims& dims,
                                    double fps) {
    try {
        StrokeParameters p;
        p.bounce_x_cm = bounce_x(m.d1_px, m.d2_px, dims);
        p.bounce_y_cm = bounce_y(m.de_px, m.be_px, m.dv_px, m.bv_px, dims);
        p.net_clearance_cm = net_clearance(m.h_ball_cm, dims);
        p.below_net = p.net_clearance_cm < 0.0;
        p.ball_speed_mps = ball_speed(m.d_ball_m, m.n_frames, fps);
        p.height_ratio = height_ratio(m.h0_cm, m.h1_cm);
        return p;
    } catch (const Error& e) {
        throw GeometryError("stroke " + std::to_string(m.stroke_index) + " of " + m.person_id +
                            ": " + e.what());
    }
}

std::vector<StrokeMeasurement> parse_measurement_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open measurement file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad measurement JSON: ") + e.what(), path.string());
    }

    std::vector<StrokeMeasurement> out;
    try {
        const std::string person = j.at("person_id").get<std::string>();
        for (const auto& rj : j.at("strokes")) {
            StrokeMeasurement m;
            m.person_id = rj.value("person_id", person);
            m.stroke_index = rj.at("stroke_index").get<std::int64_t>();
            m.d1_px = rj.at("d1_px").get<double>();
            m.d2_px = rj.at("d2_px").get<double>();
            m.de_px = rj.at("de_px").get<double>();
            m.be_px = rj.at("be_px").get<double>();
            m.dv_px = rj.at("dv_px").get<double>();
            m.bv_px = rj.at("bv_px").get<double>();
            m.h_ball_cm = rj.at("h_ball_cm").get<double>();
            m.d_ball_m = rj.at("d_ball_m").get<double>();
            m.n_frames = rj.at("n_frames").get<std::int64_t>();
            m.h0_cm = rj.at("h0_cm").get<double>();
            m.h1_cm = rj.at("h1_cm").get<double>();
            out.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad measurement schema: ") + e.what(), path.string());
    }
    return out;
}

}  // namespace strokebench
