#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <grpsel/error.hpp>

namespace grpsel {

enum class VariableKind { Quantitative, Qualitative };
enum class ResponseKind { Continuous, Binary };

/**
 * One predictor column.
 *
 * Quantitative columns carry their raw values. Qualitative columns carry
 * a level code per observation (index into `levels`).
 */
struct Column
{
    std::string name;
    VariableKind kind = VariableKind::Quantitative;
    std::vector<double> values;
    std::vector<int> codes;
    std::vector<std::string> levels;

    static Column quantitative(std::string name, std::vector<double> values);
    static Column qualitative(std::string name, std::vector<int> codes, std::vector<std::string> levels);
    /// Levels are the distinct labels in lexicographic order.
    static Column qualitative_from_labels(std::string name, const std::vector<std::string>& labels);

    std::size_t size() const noexcept
    {
        return kind == VariableKind::Quantitative ? values.size() : codes.size();
    }
    bool is_qualitative() const noexcept { return kind == VariableKind::Qualitative; }
    std::vector<std::size_t> level_counts() const;
};

/**
 * Mixed-type design matrix plus an optional response.
 *
 * Immutable after construction. The constructor enforces: equal column
 * lengths, finite values, at least two observed categories for every
 * qualitative column, and a {0,1} response when it is binary.
 */
class Dataset
{
public:
    Dataset() = default;
    explicit Dataset(std::vector<Column> columns);
    Dataset(std::vector<Column> columns, Eigen::VectorXd y, ResponseKind kind);

    std::size_t n() const noexcept { return n_; }
    std::size_t p() const noexcept { return columns_.size(); }

    const Column& column(std::size_t j) const { return columns_.at(j); }
    const std::vector<Column>& columns() const noexcept { return columns_; }
    std::vector<std::string> column_names() const;

    bool has_response() const noexcept { return has_response_; }
    const Eigen::VectorXd& y() const noexcept { return y_; }
    ResponseKind response_kind() const noexcept { return response_kind_; }

    /// Keeps the listed variables, in the listed order.
    Dataset select_columns(std::span<const std::size_t> vars) const;

    /// Keeps the listed rows (repeats allowed). Unobserved levels are dropped.
    Dataset select_rows(std::span<const std::size_t> rows) const;

    Dataset with_response(Eigen::VectorXd y, ResponseKind kind) const;

private:
    std::vector<Column> columns_;
    Eigen::VectorXd y_;
    ResponseKind response_kind_ = ResponseKind::Continuous;
    bool has_response_ = false;
    std::size_t n_ = 0;

    void validate();
};

/// Columns [begin, begin + size) of a StandardizedMatrix that one variable expanded into.
struct ColumnRange
{
    std::size_t begin = 0;
    std::size_t size = 0;

    std::size_t end() const noexcept { return begin + size; }
};

/**
 * Numeric matrix fed to the solvers and to PCAMIX.
 *
 * Quantitative variables become (x - mean) / sd with the 1/n standard
 * deviation. A qualitative variable with level frequencies f_s = n_s / n
 * becomes one column per level, (1{x = s} - f_s) / sqrt(f_s).
 */
struct StandardizedMatrix
{
    Eigen::MatrixXd z;
    Eigen::VectorXd centers;
    Eigen::VectorXd scales;
    std::vector<ColumnRange> column_map;

    std::size_t variables() const noexcept { return column_map.size(); }
    std::size_t columns() const noexcept { return static_cast<std::size_t>(z.cols()); }
    std::vector<std::size_t> variable_of_column() const;
};

StandardizedMatrix standardize(const Dataset& d);

/**
 * Assignment of elements to K disjoint clusters.
 *
 * Labels are 0-based internally; every label in [0, K) is used.
 * Serialized forms (CSV/JSON) are 1-based.
 */
class Partition
{
public:
    Partition() = default;
    explicit Partition(std::vector<int> labels);

    static Partition singletons(std::size_t size);
    static Partition single_block(std::size_t size);
    /// Relabels arbitrary integer labels by order of first appearance.
    static Partition from_any_labels(std::span<const int> labels);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t cluster_count() const noexcept { return k_; }
    int label(std::size_t i) const { return labels_.at(i); }
    const std::vector<int>& labels() const noexcept { return labels_; }

    std::vector<std::vector<std::size_t>> members() const;
    std::vector<std::size_t> sizes() const;

    /// Same clustering with labels renumbered by first appearance.
    Partition canonical() const;

    bool operator==(const Partition&) const = default;

private:
    std::vector<int> labels_;
    std::size_t k_ = 0;
};

/// Lifts a variable-level partition to the expanded columns of a StandardizedMatrix.
Partition expand_groups(const Partition& part, std::span<const ColumnRange> column_map);

struct Coefficients
{
    double intercept = 0.0;
    Eigen::VectorXd beta;
    Eigen::VectorXd group_norms;

    static Coefficients make(double intercept, Eigen::VectorXd beta, const Partition& groups);
    std::size_t nonzero_count() const;
};

} // namespace grpsel
