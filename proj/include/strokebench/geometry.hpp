#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace strokebench {

// Standard table-tennis dimensions, centimetres.
struct TableDims {
    double length_cm = 275.00;
    double width_cm = 152.50;
    double net_height_cm = 15.25;
    double ball_diameter_cm = 4.00;
};

struct PixelPoint {
    double u = 0.0;
    double v = 0.0;
};

// Annotated image points for one bounce (two table edge lines, the ball D,
// the far-edge segment AC and the measurement-line reference E).
struct BounceAnnotation {
    std::pair<PixelPoint, PixelPoint> edge_line_1;
    std::pair<PixelPoint, PixelPoint> edge_line_2;
    PixelPoint ball;                              // D
    std::pair<PixelPoint, PixelPoint> across_ref; // A, C
    PixelPoint net_ref;                           // E
};

// Pixel distances entering the bounce formulas.
struct BounceDistances {
    double d1 = 0.0;  // AB
    double d2 = 0.0;  // BC
    double de = 0.0;
    double be = 0.0;
    double dv = 0.0;
    double bv = 0.0;
};

struct StrokeParameters {
    double bounce_x_cm = 0.0;      // p1
    double bounce_y_cm = 0.0;      // p2
    double net_clearance_cm = 0.0; // p3 (negative = below net height)
    double ball_speed_mps = 0.0;   // p4
    double height_ratio = 0.0;     // p5
    bool below_net = false;
};

// One stroke's annotated measurements as found in the measurement file.
struct StrokeMeasurement {
    std::string person_id;
    std::int64_t stroke_index = 0;
    double d1_px = 0.0;
    double d2_px = 0.0;
    double de_px = 0.0;
    double be_px = 0.0;
    double dv_px = 0.0;
    double bv_px = 0.0;
    double h_ball_cm = 0.0;
    double d_ball_m = 0.0;
    std::int64_t n_frames = 1;
    double h0_cm = 0.0;
    double h1_cm = 0.0;
};

PixelPoint intersect_lines(const std::pair<PixelPoint, PixelPoint>& l1,
                           const std::pair<PixelPoint, PixelPoint>& l2);

// Derives the pixel distances of the perspective construction: V from the
// two edge lines, B from line AC vs line DV, distances along the lines.
BounceDistances measure_bounce(const BounceAnnotation& ann);

// X = W_table * d1 / (d1 + d2).
double bounce_x(double d1, double d2, const TableDims& dims);

// Y = (DE * BV) / (BE * DV) * L_table (cross ratio with V at infinity in
// world coordinates; the E..B reference pair must span the table length for
// Y to equal the physical distance from E).
double bounce_y(double de, double be, double dv, double bv, const TableDims& dims);

// h_ball - h_net; negative values are preserved and flagged downstream.
double net_clearance(double h_ball_cm, const TableDims& dims);

// Distance over elapsed time n_frames / fps.
double ball_speed(double d_ball_m, std::int64_t n_frames, double fps);

// 1 - h1 / h0.
double height_ratio(double h0_cm, double h1_cm);

StrokeParameters extract_parameters(const StrokeMeasurement& m, const TableDims& dims,
                                    double fps = 60.0);

// Measurement file: {"person_id": ..., "strokes": [ {record}, ... ]}.
std::vector<StrokeMeasurement> parse_measurement_file(const std::filesystem::path& path);

}  // namespace strokebench
