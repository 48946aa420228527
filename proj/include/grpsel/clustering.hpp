#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <grpsel/core_data.hpp>

namespace grpsel {

/// Singular value decomposition of the PCAMIX matrix W = Z / sqrt(n).
struct PcamixResult
{
    Eigen::MatrixXd u;
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd v;
    Eigen::VectorXd eigenvalues;
};

/// W = standardize(d).z / sqrt(n): quantitative columns scaled to unit norm,
/// qualitative columns as centered frequency-scaled indicators.
Eigen::MatrixXd pcamix_matrix(const Dataset& d);

PcamixResult pcamix(const Dataset& d);

/// First PCAMIX eigenvalue of all variables of `d`.
double homogeneity(const Dataset& d);

/// H(A) + H(B) - H(A u B) for disjoint variable index sets of `d`, clamped at 0.
double dissimilarity(const Dataset& d, std::span<const std::size_t> a, std::span<const std::size_t> b);

/**
 * Evaluates cluster homogeneities of one dataset.
 *
 * Holds the Gram matrix W'W once; the first eigenvalue of a cluster is
 * the largest eigenvalue of the principal submatrix on its columns.
 * Dense eigen-solve up to 64 columns, power iteration above.
 */
class HomogeneityEvaluator
{
public:
    explicit HomogeneityEvaluator(const Dataset& d);

    std::size_t variables() const noexcept { return column_map_.size(); }
    double homogeneity(std::span<const std::size_t> vars) const;
    double dissimilarity(std::span<const std::size_t> a, std::span<const std::size_t> b) const;

private:
    Eigen::MatrixXd gram_;
    std::vector<ColumnRange> column_map_;
};

struct Merge
{
    std::size_t left = 0;   // node id: leaves are 0..p-1, merge t creates node p+t
    std::size_t right = 0;
    double height = 0.0;
    std::size_t size = 0;   // leaves under the new node
};

struct Dendrogram
{
    std::vector<Merge> merges;
    std::vector<std::string> leaf_names;

    std::size_t leaves() const noexcept { return leaf_names.size(); }
};

/**
 * Agglomerative variable clustering. Each step merges the pair of
 * current clusters with the smallest dissimilarity; ties go to the pair
 * whose (smallest leaf of left, smallest leaf of right) is lowest.
 */
Dendrogram hierarchical_cluster(const Dataset& d);
Dendrogram hierarchical_cluster(const HomogeneityEvaluator& eval, std::vector<std::string> leaf_names);

/// Partition after undoing the last m-1 merges. Labels follow first leaf appearance.
Partition cut_tree(const Dendrogram& dend, std::size_t m);

double rand_index(const Partition& a, const Partition& b);
double adjusted_rand_index(const Partition& a, const Partition& b);

struct StabilityOptions
{
    std::size_t j_boot = 50;
    std::uint64_t seed = 20240917;
    std::size_t max_m = 30;
    std::size_t jobs = 1;
    int max_redraws = 10;
};

struct StabilityCurve
{
    std::vector<std::size_t> cluster_counts;
    std::vector<double> mean_ari;
    std::size_t chosen_m = 0;
};

struct StabilityResult
{
    Dendrogram dendrogram;
    StabilityCurve curve;
    Partition partition;    // cut of the initial dendrogram at chosen_m
};

/**
 * Bootstrap choice of the cluster count. For each candidate m and each of
 * J resamples of the rows, the resample is reclustered and both trees are
 * cut at m; the curve is the mean ARI of those partition pairs. Replicate j
 * draws from a generator seeded with seed + j.
 */
StabilityResult stability_select(const Dataset& d, const StabilityOptions& opts = {});

} // namespace grpsel
