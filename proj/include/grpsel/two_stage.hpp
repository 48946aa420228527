#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <grpsel/clustering.hpp>
#include <grpsel/core_data.hpp>
#include <grpsel/screening.hpp>
#include <grpsel/solvers.hpp>

namespace grpsel {

struct TwoStageConfig
{
    /// Screening runs iff p exceeds this; unset means p > n.
    std::optional<std::size_t> screen_threshold;
    /// Screening size factor; unset means 1, or 2 once p >= 1000.
    std::optional<double> k_factor;
    std::size_t j_boot = 50;
    std::size_t max_m = 30;
    GroupFamily family = GroupFamily::GrLasso;
    /// Concavity for grSCAD/grMCP; 0 selects the family default.
    double gamma = 0.0;
    double alpha = 0.5;
    /// Unset means squared error for a continuous response, logistic for binary.
    std::optional<LossKind> loss;
    std::size_t cv_folds = 10;
    std::size_t nlambda = 100;
    std::uint64_t seed = 20240917;
    std::size_t jobs = 1;
    SolverOptions solver;
    /// Skips clustering and uses this partition of the retained variables.
    std::optional<Partition> fixed_partition;

    void validate() const;
    GroupPenaltySpec penalty() const;
};

/// Stage one output: retained variables and their discovered groups.
struct StageOne
{
    std::optional<ScreeningResult> screened;
    std::vector<std::size_t> retained;     // original indices that entered clustering
    std::optional<Dendrogram> dendrogram;
    StabilityCurve stability;
    Partition partition;                   // over `retained`, in that order
};

struct TwoStageReport
{
    std::optional<ScreeningResult> screened;
    std::vector<std::size_t> retained;     // original indices that entered clustering
    std::optional<Dendrogram> dendrogram;
    StabilityCurve stability;
    Partition partition;                   // over `retained`, in that order
    LossKind loss = LossKind::SquaredError;
    GroupFamily family = GroupFamily::GrLasso;
    FitResult fit;
    CvResult cv;
    std::size_t best_index = 0;
    double best_lambda = 0.0;
    std::vector<ColumnRange> column_map;   // expanded columns of the retained design
    std::vector<std::size_t> selected_variables;   // original indices, ascending
    std::vector<std::string> selected_names;

    const Coefficients& best() const { return fit.path.at(best_index); }
};

/// Variables (positions in `column_map`) with at least one nonzero coefficient.
std::vector<std::size_t> nonzero_variables(const Coefficients& coef, std::span<const ColumnRange> column_map);

/**
 * Fits the group path and its cross-validation for one variable-level
 * partition of a standardized design. Shared by the pipeline, the CLI's
 * fit command and the simulation runner.
 */
struct GroupFit
{
    FitResult fit;
    CvResult cv;
};
GroupFit fit_with_cv(const StandardizedMatrix& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& variable_groups, const GroupPenaltySpec& spec, std::size_t nlambda,
    const CvOptions& cv_opts);

/// Screening (when p is above the threshold) followed by stability-selected clustering.
StageOne run_stage_one(const Dataset& d, const TwoStageConfig& cfg);

/// Group-penalized fit with cross-validation over the groups found by stage one.
TwoStageReport run_stage_two(const Dataset& d, const TwoStageConfig& cfg, StageOne stage_one);

TwoStageReport run_two_stage(const Dataset& d, const TwoStageConfig& cfg);

/// Shuffles 0..p-1 and deals the positions round-robin into k groups.
Partition random_equal_partition(std::size_t p, std::size_t k, std::uint64_t seed);

} // namespace grpsel
