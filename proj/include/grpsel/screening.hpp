#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include <grpsel/core_data.hpp>

namespace grpsel {

enum class ScreeningMethod { SIS, DCSIS };

std::string_view to_string(ScreeningMethod m) noexcept;

struct ScreeningResult
{
    std::vector<double> scores;
    std::vector<std::size_t> ranking;   // variable indices by descending score
    std::vector<std::size_t> kept;      // first d entries of ranking
    std::size_t d = 0;
    ScreeningMethod method = ScreeningMethod::DCSIS;
};

/// Sample Pearson correlation. Throws ConstantVector for a constant input.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/**
 * Sample distance covariance S1 + S2 - 2 S3 between the rows of u and v
 * (one observation per row; Euclidean distances within each space).
 * S3 is evaluated through row means of the distance matrices.
 */
double distance_covariance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

/// dcov(u,v) / sqrt(dcov(u,u) dcov(v,v)); throws DegenerateMargin when either margin is 0.
double distance_correlation(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

/// ceil(k_factor * n / ln n), capped at p.
std::size_t screening_size(std::size_t n, std::size_t p, double k_factor);

/**
 * Marginal screening of every variable against y. Qualitative variables
 * are scored through their indicator block: as a multivariate sample for
 * DC-SIS, by the largest absolute indicator correlation for SIS.
 */
ScreeningResult screen(const StandardizedMatrix& z, const Eigen::VectorXd& y, ScreeningMethod method,
    double k_factor = 1.0, std::size_t jobs = 1);

} // namespace grpsel
