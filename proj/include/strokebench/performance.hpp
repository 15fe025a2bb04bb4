#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "strokebench/geometry.hpp"

namespace strokebench {

enum class CostKind { LinearDecreasing, LinearIncreasing, PiecewiseLinear, TargetDeviation };

const char* cost_kind_name(CostKind kind);
CostKind cost_kind_from_name(const std::string& name);

// Per-parameter cost shape. The three linear kinds interpolate over knots and
// clamp beyond the end knots; target_deviation is slope * |raw - target|.
struct CostFunctionSpec {
    int parameter_id = 0;  // 0..4 for p1..p5
    CostKind kind = CostKind::PiecewiseLinear;
    std::vector<std::pair<double, double>> knots;  // (raw value, cost)
    double target = 0.0;
    double slope = 1.0;

    void validate() const;
};

// Gaussian RBF psi(x) = psi0 * exp(-alpha^2 (x - mu)^2) with psi0 fixed at 1.
struct RbfSpec {
    int parameter_id = 0;
    double alpha = 1.5;
    double mu = 0.0;
    static constexpr double psi0 = 1.0;

    void validate() const;
};

struct PerformancePoint {
    Eigen::Matrix<double, 5, 1> scores;
    std::string person_id;
    std::int64_t stroke_index = 0;
};

struct IdealPoint {
    static Eigen::Matrix<double, 5, 1> coordinates() {
        return Eigen::Matrix<double, 5, 1>::Ones();
    }
};

double eval_cost(const CostFunctionSpec& spec, double raw);

double rbf_score(const RbfSpec& spec, double cost);

PerformancePoint map_stroke(const StrokeParameters& params,
                            const std::array<CostFunctionSpec, 5>& cost_specs,
                            const std::array<RbfSpec, 5>& rbf_specs);

// Defaults encoding the qualitative stroke-quality preferences: far bounce,
// deep placement, ~5 cm net clearance, fast ball, contact near release height.
std::array<CostFunctionSpec, 5> default_cost_specs(const TableDims& dims = {});
std::array<RbfSpec, 5> default_rbf_specs();

}  // namespace strokebench
