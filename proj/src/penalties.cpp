#include <grpsel/penalties.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include <grpsel/error.hpp>

namespace grpsel {

std::string_view to_string(PenaltyFamily f) noexcept
{
    switch (f) {
        case PenaltyFamily::Lasso: return "lasso";
        case PenaltyFamily::SCAD: return "scad";
        case PenaltyFamily::MCP: return "mcp";
    }
    return "unknown";
}

void PenaltySpec::validate() const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorCode::InvalidSpec, "lambda must be a finite nonnegative number");
    }
    if (family == PenaltyFamily::SCAD && !(gamma > 2.0)) {
        throw Error(ErrorCode::InvalidSpec, "SCAD requires gamma > 2, got " + std::to_string(gamma));
    }
    if (family == PenaltyFamily::MCP && !(gamma > 1.0)) {
        throw Error(ErrorCode::InvalidSpec, "MCP requires gamma > 1, got " + std::to_string(gamma));
    }
}

double penalty_value(const PenaltySpec& spec, double w)
{
    spec.validate();
    const double a = std::abs(w);
    const double l = spec.lambda;
    const double g = spec.gamma;
    switch (spec.family) {
        case PenaltyFamily::Lasso:
            return l * a;
        case PenaltyFamily::SCAD:
            if (a <= l) return l * a;
            if (a < g * l) return (2.0 * g * l * a - a * a - l * l) / (2.0 * (g - 1.0));
            return (g + 1.0) * l * l / 2.0;
        case PenaltyFamily::MCP:
            if (a <= g * l) return l * a - a * a / (2.0 * g);
            return g * l * l / 2.0;
    }
    return 0.0;
}

double penalty_derivative(const PenaltySpec& spec, double w)
{
    spec.validate();
    const double a = std::abs(w);
    const double l = spec.lambda;
    const double g = spec.gamma;
    const double sign = w < 0.0 ? -1.0 : 1.0;
    switch (spec.family) {
        case PenaltyFamily::Lasso:
            return l * sign;
        case PenaltyFamily::SCAD:
            if (a <= l) return l * sign;
            if (a < g * l) return (g * l - a) / (g - 1.0) * sign;
            return 0.0;
        case PenaltyFamily::MCP:
            if (a <= g * l) return (l - a / g) * sign;
            return 0.0;
    }
    return 0.0;
}

double well_posed_curvature(const PenaltySpec& spec, double step_weight) noexcept
{
    constexpr double margin = 1.0 + 1e-3;
    switch (spec.family) {
        case PenaltyFamily::Lasso:
            return step_weight;
        case PenaltyFamily::SCAD:
            return std::max(step_weight, margin / (spec.gamma - 1.0));
        case PenaltyFamily::MCP:
            return std::max(step_weight, margin / spec.gamma);
    }
    return step_weight;
}

double scalar_threshold(const PenaltySpec& spec, double z, double step_weight)
{
    spec.validate();
    if (!(step_weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_weight must be positive");

    const double l = spec.lambda;
    const double g = spec.gamma;
    const double v = step_weight;
    const double a = std::abs(z);

    switch (spec.family) {
        case PenaltyFamily::Lasso:
            return soft_threshold(z, l / v);

        case PenaltyFamily::MCP: {
            if (v * g <= 1.0) throw Error(ErrorCode::IllPosed, "MCP subproblem requires step_weight * gamma > 1");
            if (a <= g * l) return soft_threshold(z, l / v) / (1.0 - 1.0 / (v * g));
            return z;
        }

        case PenaltyFamily::SCAD: {
            if (v * (g - 1.0) <= 1.0) {
                throw Error(ErrorCode::IllPosed, "SCAD subproblem requires step_weight * (gamma - 1) > 1");
            }
            if (a <= l * (1.0 + 1.0 / v)) return soft_threshold(z, l / v);
            if (a <= g * l) return soft_threshold(z, g * l / (v * (g - 1.0))) / (1.0 - 1.0 / (v * (g - 1.0)));
            return z;
        }
    }
    return z;
}

} // namespace grpsel
