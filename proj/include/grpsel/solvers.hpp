#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include <grpsel/core_data.hpp>
#include <grpsel/penalties.hpp>

namespace grpsel {

enum class LossKind { SquaredError, Logistic };

enum class GroupFamily { GrLasso, GrSCAD, GrMCP, SGL };

std::string_view to_string(LossKind k) noexcept;
std::string_view to_string(GroupFamily f) noexcept;

/**
 * Group penalty. For grLasso/grSCAD/grMCP the penalty is
 * sum_k P(||beta_k||; lambda * w_k, gamma). For SGL it is
 * alpha*lambda * sum_k w_k ||beta_k|| + (1-alpha)*lambda * ||beta||_1.
 *
 * Empty group_weights means the family default: sqrt(p_k) for the
 * grLasso/grSCAD/grMCP families, 1 for SGL.
 */
struct GroupPenaltySpec
{
    GroupFamily family = GroupFamily::GrLasso;
    double lambda = 0.0;
    double gamma = 0.0;
    double alpha = 0.5;
    std::vector<double> group_weights;

    static GroupPenaltySpec gr_lasso() { return {GroupFamily::GrLasso, 0.0, 0.0, 0.0, {}}; }
    static GroupPenaltySpec gr_scad(double gamma = default_scad_gamma) { return {GroupFamily::GrSCAD, 0.0, gamma, 0.0, {}}; }
    static GroupPenaltySpec gr_mcp(double gamma = default_mcp_gamma) { return {GroupFamily::GrMCP, 0.0, gamma, 0.0, {}}; }
    static GroupPenaltySpec sgl(double alpha = 0.5) { return {GroupFamily::SGL, 0.0, 0.0, alpha, {}}; }

    void validate(std::size_t group_count) const;
    std::vector<double> weights_for(const Partition& groups) const;
};

struct SolverOptions
{
    double tol = 1e-7;
    int max_iter = 10000;
    /// When set, the penalized objective after every sweep is appended here.
    std::vector<double>* objective_trace = nullptr;
};

/// Coefficient path over a descending lambda grid.
struct FitResult
{
    std::vector<double> lambdas;
    std::vector<Coefficients> path;
    std::vector<double> loss_path;
    std::vector<std::size_t> df_path;
    std::vector<std::uint8_t> converged;
    std::vector<int> iterations;
    Partition groups;
    /// The path stopped early: logistic deviance under 1% of the null
    /// deviance, or as many nonzero coefficients as observations.
    bool saturated = false;

    std::size_t size() const noexcept { return lambdas.size(); }
};

/// `count` log-spaced values from lmax down to min_ratio * lmax.
std::vector<double> make_lambda_grid(double lmax, std::size_t count = 100, double min_ratio = 0.001);

/// 0.001 when columns <= n, 0.05 otherwise.
double default_min_ratio(std::size_t n, std::size_t columns) noexcept;

FitResult fit_individual(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const PenaltySpec& spec, std::span<const double> lambda_grid, const SolverOptions& opts = {});

FitResult fit_group(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const GroupPenaltySpec& spec, std::span<const double> lambda_grid,
    const SolverOptions& opts = {});

/// SGL path with lambda1 = alpha * lambda, lambda2 = (1 - alpha) * lambda.
FitResult fit_sparse_group(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, double alpha, std::span<const double> lambda_grid,
    const SolverOptions& opts = {}, std::vector<double> group_weights = {});

/// Single SGL fit at explicit (lambda1, lambda2).
Coefficients fit_sparse_group_at(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, double lambda1, double lambda2, const SolverOptions& opts = {},
    std::vector<double> group_weights = {});

/// Smallest lambda at which the fit is the null (intercept-only) model.
double lambda_max(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss, const PenaltySpec& spec);
double lambda_max(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const GroupPenaltySpec& spec);

/// Data-fit term: ||r||^2 / (2n) for squared error, mean negative log-likelihood for logistic.
double loss_value(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss, const Coefficients& coef);

double penalized_objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Coefficients& coef, const PenaltySpec& spec);
double penalized_objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const Coefficients& coef, const GroupPenaltySpec& spec);

/// Gradient of loss_value with respect to beta (intercept excluded).
Eigen::VectorXd loss_gradient(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss, const Coefficients& coef);

/**
 * Largest first-order optimality violation over all groups.
 *
 * Zero groups: ||grad_k|| <= lambda*w_k (SGL: ||S(grad_k, lambda2)|| <= lambda1*w_k).
 * Active groups: grad_k + P'(||beta_k||) beta_k / ||beta_k|| = 0. The
 * intercept stationarity residual is included.
 */
double kkt_residual(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const Coefficients& coef, const GroupPenaltySpec& spec);
double kkt_residual(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Coefficients& coef, const PenaltySpec& spec);

/// Linear predictor for squared error, P(Y=1) for logistic.
Eigen::VectorXd predict(const Eigen::MatrixXd& z, LossKind loss, const Coefficients& coef);

struct CvResult
{
    std::vector<double> lambdas;
    std::vector<double> mean_loss;
    std::vector<double> sd_loss;
    Eigen::MatrixXd fold_loss;           // folds x G
    Eigen::MatrixXd oof_predictions;     // n x G, response scale
    std::vector<int> fold_of;            // fold index per observation
    std::size_t best_index = 0;
    double best_lambda = 0.0;
};

struct CvOptions
{
    std::size_t folds = 10;
    std::uint64_t seed = 20240917;
    std::size_t jobs = 1;
    SolverOptions solver;
};

/// Seeded assignment of n observations to folds of near-equal size.
std::vector<int> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

/**
 * K-fold cross-validation over a fixed lambda grid.
 *
 * Validation loss per fold: RMSE for squared error, mean deviance for
 * logistic. best_lambda minimizes the mean over folds; ties go to the
 * larger lambda. When a fold's path saturates, the result covers only the
 * leading lambdas that every fold reached.
 */
CvResult cross_validate(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const GroupPenaltySpec& spec, std::span<const double> lambda_grid,
    const CvOptions& opts = {});
CvResult cross_validate(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const PenaltySpec& spec, std::span<const double> lambda_grid, const CvOptions& opts = {});

/// Validation loss of a prediction vector under the CV convention.
double validation_loss(LossKind loss, const Eigen::VectorXd& y, const Eigen::VectorXd& prediction);

} // namespace grpsel
