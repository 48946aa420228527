#pragma once

#include <string_view>

namespace grpsel {

enum class PenaltyFamily { Lasso, SCAD, MCP };

inline constexpr double default_scad_gamma = 3.7;
inline constexpr double default_mcp_gamma = 3.0;

struct PenaltySpec
{
    PenaltyFamily family = PenaltyFamily::Lasso;
    double lambda = 0.0;
    double gamma = 0.0;

    static PenaltySpec lasso(double lambda) { return {PenaltyFamily::Lasso, lambda, 0.0}; }
    static PenaltySpec scad(double lambda, double gamma = default_scad_gamma) { return {PenaltyFamily::SCAD, lambda, gamma}; }
    static PenaltySpec mcp(double lambda, double gamma = default_mcp_gamma) { return {PenaltyFamily::MCP, lambda, gamma}; }

    PenaltySpec with_lambda(double l) const { return {family, l, gamma}; }

    /// Throws InvalidSpec unless lambda >= 0, SCAD gamma > 2, MCP gamma > 1.
    void validate() const;
};

std::string_view to_string(PenaltyFamily f) noexcept;

double penalty_value(const PenaltySpec& spec, double w);

/// Derivative of the penalty. At w = 0 the right-derivative (lambda) is returned.
double penalty_derivative(const PenaltySpec& spec, double w);

/**
 * Minimizer over b of  0.5 * step_weight * (b - z)^2 + penalty_value(spec, b).
 *
 * Lasso yields soft-thresholding; MCP the firm threshold; SCAD the
 * three-region clipped form. Throws IllPosed if the nonconvex subproblem
 * has no unique minimizer (MCP: step_weight*gamma <= 1,
 * SCAD: step_weight*(gamma-1) <= 1).
 */
double scalar_threshold(const PenaltySpec& spec, double z, double step_weight);

/// Smallest curvature c >= step_weight for which scalar_threshold(spec, ., c) is well posed.
double well_posed_curvature(const PenaltySpec& spec, double step_weight) noexcept;

inline double soft_threshold(double z, double t) noexcept
{
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

} // namespace grpsel
