#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include <grpsel/error.hpp>

namespace grpsel {

double rmse(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

/// Active (truly nonzero) and inactive variable indices over 0..p-1.
struct SelectionTruth
{
    std::vector<std::size_t> active;
    std::vector<std::size_t> inactive;
    std::size_t p = 0;

    /// Builds the complement of `active` in 0..p-1.
    static SelectionTruth from_active(std::vector<std::size_t> active, std::size_t p);
};

struct SelectionMetrics
{
    double sensitivity = 0.0;
    double specificity = 0.0;
};

/**
 * Default: sensitivity |U n U^|/|U|, specificity |V n V^|/|V|.
 * With `divide_by_p` both counts are divided by p instead.
 * An empty inactive set gives specificity 1 by convention.
 */
SelectionMetrics selection_metrics(const SelectionTruth& truth, std::span<const std::size_t> selected,
    bool divide_by_p = false);

struct ClassificationMetrics
{
    double accuracy = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double auc = 0.0;
};

/// Rank-sum AUC with midranks for ties. Throws OneClassOnly.
double auc(const Eigen::VectorXd& y_true, const Eigen::VectorXd& scores);

/// Predicts class 1 when score >= cutoff.
ClassificationMetrics classification_metrics(const Eigen::VectorXd& y_true, const Eigen::VectorXd& scores,
    double cutoff = 0.5);

struct SmoteConfig
{
    std::size_t k_neighbors = 5;
    double target_ratio = 1.0;
    std::uint64_t seed = 20240917;
};

struct SmoteResult
{
    Eigen::MatrixXd synthetic;          // one row per generated point
    std::vector<std::size_t> base;      // minority row each point starts from
    std::vector<std::size_t> neighbor;  // minority row it moves toward
    std::vector<double> step;           // interpolation weight in (0,1)
};

/// ceil(target_ratio * majority - minority), or 0 when already balanced.
std::size_t smote_count(std::size_t minority, std::size_t majority, double target_ratio);

/**
 * Synthetic minority oversampling. Base points are taken in round-robin
 * order over the minority rows; each moves a uniform fraction of the way
 * toward one of its k nearest minority neighbours chosen at random.
 */
SmoteResult smote(const Eigen::MatrixXd& minority, std::size_t majority_count, const SmoteConfig& cfg = {});

} // namespace grpsel
