#include "strokebench/performance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "strokebench/errors.hpp"

namespace strokebench {

const char* cost_kind_name(CostKind kind) {
    switch (kind) {
        case CostKind::LinearDecreasing: return "linear_decreasing";
        case CostKind::LinearIncreasing: return "linear_increasing";
        case CostKind::PiecewiseLinear: return "piecewise_linear";
        case CostKind::TargetDeviation: return "target_deviation";
    }
    return "?";
}

CostKind cost_kind_from_name(const std::string& name) {
    for (CostKind k : {CostKind::LinearDecreasing, CostKind::LinearIncreasing,
                       CostKind::PiecewiseLinear, CostKind::TargetDeviation})
        if (name == cost_kind_name(k)) return k;
    throw ConfigError("unknown cost kind '" + name + "'");
}

void CostFunctionSpec::validate() const {
    if (parameter_id < 0 || parameter_id > 4) throw ConfigError("parameter_id must be 0..4");
    if (kind == CostKind::TargetDeviation) {
        if (!std::isfinite(target) || !std::isfinite(slope) || slope <= 0.0)
            throw ConfigError("target_deviation needs finite target and positive slope");
        return;
    }
    if (knots.size() < 2) throw ConfigError("linear cost kinds need at least 2 knots");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second))
            throw ConfigError("cost knots must be finite");
        if (i > 0 && knots[i].first <= knots[i - 1].first)
            throw ConfigError("cost knots must be sorted by raw value");
        if (i > 0 && kind == CostKind::LinearDecreasing && knots[i].second > knots[i - 1].second)
            throw ConfigError("linear_decreasing knots must have non-increasing cost");
        if (i > 0 && kind == CostKind::LinearIncreasing && knots[i].second < knots[i - 1].second)
            throw ConfigError("linear_increasing knots must have non-decreasing cost");
    }
}

void RbfSpec::validate() const {
    if (parameter_id < 0 || parameter_id > 4) throw ConfigError("parameter_id must be 0..4");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("rbf alpha must be positive");
    if (!std::isfinite(mu)) throw ConfigError("rbf mu must be finite");
}

double eval_cost(const CostFunctionSpec& spec, double raw) {
    if (!std::isfinite(raw)) throw NumericError("raw parameter value is not finite");
    if (spec.kind == CostKind::TargetDeviation) return spec.slope * std::abs(raw - spec.target);

    const auto& knots = spec.knots;
    if (raw <= knots.front().first) return knots.front().second;
    if (raw >= knots.back().first) return knots.back().second;
    auto it = std::upper_bound(knots.begin(), knots.end(), raw,
                               [](double v, const auto& k) { return v < k.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (raw - lo.first) / (hi.first - lo.first);
    return (1.0 - t) * lo.second + t * hi.second;
}

double rbf_score(const RbfSpec& spec, double cost) {
    const double d = cost - spec.mu;
    const double score = RbfSpec::psi0 * std::exp(-spec.alpha * spec.alpha * d * d);
    // exp underflows to +0 past ~745; the score contract is (0, 1].
    return std::max(score, std::numeric_limits<double>::min());
}

PerformancePoint map_stroke(const StrokeParameters& params,
                            const std::array<CostFunctionSpec, 5>& cost_specs,
                            const std::array<RbfSpec, 5>& rbf_specs) {
    const double raw[5] = {params.bounce_x_cm, params.bounce_y_cm, params.net_clearance_cm,
                           params.ball_speed_mps, params.height_ratio};
    PerformancePoint point;
    for (int p = 0; p < 5; ++p) {
        if (cost_specs[p].parameter_id != p || rbf_specs[p].parameter_id != p)
            throw ConfigError("cost/rbf specs must be ordered p1..p5");
        try {
            point.scores[p] = rbf_score(rbf_specs[p], eval_cost(cost_specs[p], raw[p]));
        } catch (const Error& e) {
            throw NumericError("parameter p" + std::to_string(p + 1) + ": " + e.what());
        }
    }
    return point;
}

std::array<CostFunctionSpec, 5> default_cost_specs(const TableDims& dims) {
    std::array<CostFunctionSpec, 5> specs;
    // p1: bounce X, farther across the table is better.
    specs[0] = {0, CostKind::LinearDecreasing, {{0.0, 1.0}, {dims.width_cm, 0.0}}, 0.0, 1.0};
    // p2: bounce Y, deep placement up to the receiver's half-table extent.
    specs[1] = {1, CostKind::LinearDecreasing, {{0.0, 1.0}, {dims.length_cm / 2.0, 0.0}}, 0.0, 1.0};
    // p3: net clearance, low but safely above the net.
    specs[2] = {2, CostKind::TargetDeviation, {}, 5.0, 0.05};
    // p4: ball speed, faster is better up to a 25 m/s cap.
    specs[3] = {3, CostKind::LinearDecreasing, {{0.0, 1.0}, {25.0, 0.0}}, 0.0, 1.0};
    // p5: height ratio, contact near the release height (ratio 0) is best.
    specs[4] = {4, CostKind::LinearIncreasing, {{0.0, 0.0}, {1.0, 1.0}}, 0.0, 1.0};
    for (const auto& s : specs) s.validate();
    return specs;
}

std::array<RbfSpec, 5> default_rbf_specs() {
    std::array<RbfSpec, 5> specs;
    for (int p = 0; p < 5; ++p) specs[p] = {p, 1.5, 0.0};
    return specs;
}

}  // namespace strokebench
