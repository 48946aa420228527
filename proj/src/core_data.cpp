#include <grpsel/core_data.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace grpsel {

Column Column::quantitative(std::string name, std::vector<double> values)
{
    Column c;
    c.name = std::move(name);
    c.kind = VariableKind::Quantitative;
    c.values = std::move(values);
    return c;
}

Column Column::qualitative(std::string name, std::vector<int> codes, std::vector<std::string> levels)
{
    Column c;
    c.name = std::move(name);
    c.kind = VariableKind::Qualitative;
    c.codes = std::move(codes);
    c.levels = std::move(levels);
    return c;
}

Column Column::qualitative_from_labels(std::string name, const std::vector<std::string>& labels)
{
    std::set<std::string> distinct(labels.begin(), labels.end());
    std::vector<std::string> levels(distinct.begin(), distinct.end());
    std::map<std::string, int> index;
    for (std::size_t s = 0; s < levels.size(); ++s) index[levels[s]] = static_cast<int>(s);
    std::vector<int> codes;
    codes.reserve(labels.size());
    for (const auto& l : labels) codes.push_back(index[l]);
    return qualitative(std::move(name), std::move(codes), std::move(levels));
}

std::vector<std::size_t> Column::level_counts() const
{
    std::vector<std::size_t> counts(levels.size(), 0);
    for (int c : codes) ++counts[static_cast<std::size_t>(c)];
    return counts;
}

Dataset::Dataset(std::vector<Column> columns)
    : columns_(std::move(columns))
{
    validate();
}

Dataset::Dataset(std::vector<Column> columns, Eigen::VectorXd y, ResponseKind kind)
    : columns_(std::move(columns)), y_(std::move(y)), response_kind_(kind), has_response_(true)
{
    validate();
}

void Dataset::validate()
{
    if (columns_.empty() && !has_response_) {
        throw Error(ErrorCode::InvalidArgument, "dataset has no columns");
    }
    n_ = columns_.empty() ? static_cast<std::size_t>(y_.size()) : columns_.front().size();
    if (n_ == 0) throw Error(ErrorCode::InvalidArgument, "dataset has no observations");

    for (const auto& c : columns_) {
        if (c.size() != n_) {
            throw Error(ErrorCode::DimensionMismatch,
                "column '" + c.name + "' has " + std::to_string(c.size()) + " entries, expected " + std::to_string(n_));
        }
        if (c.kind == VariableKind::Quantitative) {
            for (double v : c.values) {
                if (!std::isfinite(v)) throw Error(ErrorCode::MissingValue, "column '" + c.name + "' has a non-finite value");
            }
        } else {
            for (int code : c.codes) {
                if (code < 0 || static_cast<std::size_t>(code) >= c.levels.size()) {
                    throw Error(ErrorCode::OutOfRange, "column '" + c.name + "' has a level code out of range");
                }
            }
            const auto counts = c.level_counts();
            const auto observed = std::count_if(counts.begin(), counts.end(), [](std::size_t k) { return k > 0; });
            if (observed < 2) {
                throw Error(ErrorCode::EmptyCategory,
                    "qualitative column '" + c.name + "' has fewer than 2 observed categories");
            }
        }
    }

    if (has_response_) {
        if (static_cast<std::size_t>(y_.size()) != n_) {
            throw Error(ErrorCode::DimensionMismatch, "response length does not match the number of rows");
        }
        for (Eigen::Index i = 0; i < y_.size(); ++i) {
            if (!std::isfinite(y_[i])) throw Error(ErrorCode::MissingValue, "response has a non-finite value");
            if (response_kind_ == ResponseKind::Binary && y_[i] != 0.0 && y_[i] != 1.0) {
                throw Error(ErrorCode::NonBinaryResponse, "binary response must take values in {0,1}");
            }
        }
    }
}

std::vector<std::string> Dataset::column_names() const
{
    std::vector<std::string> names;
    names.reserve(columns_.size());
    for (const auto& c : columns_) names.push_back(c.name);
    return names;
}

Dataset Dataset::select_columns(std::span<const std::size_t> vars) const
{
    std::vector<Column> cols;
    cols.reserve(vars.size());
    for (auto j : vars) {
        if (j >= columns_.size()) throw Error(ErrorCode::OutOfRange, "variable index out of range");
        cols.push_back(columns_[j]);
    }
    if (has_response_) return Dataset(std::move(cols), y_, response_kind_);
    return Dataset(std::move(cols));
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const
{
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) {
        if (c.kind == VariableKind::Quantitative) {
            std::vector<double> v;
            v.reserve(rows.size());
            for (auto i : rows) v.push_back(c.values.at(i));
            cols.push_back(Column::quantitative(c.name, std::move(v)));
        } else {
            std::vector<int> remap(c.levels.size(), -1);
            std::vector<bool> seen(c.levels.size(), false);
            for (auto i : rows) seen[static_cast<std::size_t>(c.codes.at(i))] = true;
            std::vector<std::string> levels;
            for (std::size_t s = 0; s < c.levels.size(); ++s) {
                if (seen[s]) {
                    remap[s] = static_cast<int>(levels.size());
                    levels.push_back(c.levels[s]);
                }
            }
            std::vector<int> codes;
            codes.reserve(rows.size());
            for (auto i : rows) codes.push_back(remap[static_cast<std::size_t>(c.codes[i])]);
            cols.push_back(Column::qualitative(c.name, std::move(codes), std::move(levels)));
        }
    }
    if (!has_response_) return Dataset(std::move(cols));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) y[static_cast<Eigen::Index>(r)] = y_[static_cast<Eigen::Index>(rows[r])];
    return Dataset(std::move(cols), std::move(y), response_kind_);
}

Dataset Dataset::with_response(Eigen::VectorXd y, ResponseKind kind) const
{
    return Dataset(columns_, std::move(y), kind);
}

std::vector<std::size_t> StandardizedMatrix::variable_of_column() const
{
    std::vector<std::size_t> owner(columns());
    for (std::size_t v = 0; v < column_map.size(); ++v) {
        for (std::size_t c = column_map[v].begin; c < column_map[v].end(); ++c) owner[c] = v;
    }
    return owner;
}

StandardizedMatrix standardize(const Dataset& d)
{
    const auto n = static_cast<Eigen::Index>(d.n());
    const double nd = static_cast<double>(d.n());

    std::size_t total = 0;
    for (const auto& c : d.columns()) total += c.is_qualitative() ? c.levels.size() : 1;

    StandardizedMatrix out;
    out.z.resize(n, static_cast<Eigen::Index>(total));
    out.centers.resize(static_cast<Eigen::Index>(total));
    out.scales.resize(static_cast<Eigen::Index>(total));
    out.column_map.reserve(d.p());

    Eigen::Index col = 0;
    for (std::size_t j = 0; j < d.p(); ++j) {
        const auto& c = d.column(j);
        if (!c.is_qualitative()) {
            Eigen::Map<const Eigen::VectorXd> x(c.values.data(), n);
            const double mean = x.mean();
            const double sd = std::sqrt((x.array() - mean).square().sum() / nd);
            if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
                throw Error(ErrorCode::ConstantColumn, "column " + std::to_string(j) + " ('" + c.name + "') is constant");
            }
            out.z.col(col) = (x.array() - mean) / sd;
            out.centers[col] = mean;
            out.scales[col] = sd;
            out.column_map.push_back({static_cast<std::size_t>(col), 1});
            ++col;
        } else {
            const auto counts = c.level_counts();
            for (std::size_t s = 0; s < counts.size(); ++s) {
                if (counts[s] == 0) {
                    throw Error(ErrorCode::EmptyCategory,
                        "column " + std::to_string(j) + " ('" + c.name + "') level '" + c.levels[s] + "' is never observed");
                }
            }
            out.column_map.push_back({static_cast<std::size_t>(col), counts.size()});
            for (std::size_t s = 0; s < counts.size(); ++s) {
                const double freq = static_cast<double>(counts[s]) / nd;
                const double scale = std::sqrt(freq);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double indicator = c.codes[static_cast<std::size_t>(i)] == static_cast<int>(s) ? 1.0 : 0.0;
                    out.z(i, col) = (indicator - freq) / scale;
                }
                out.centers[col] = freq;
                out.scales[col] = scale;
                ++col;
            }
        }
    }
    return out;
}

Partition::Partition(std::vector<int> labels)
    : labels_(std::move(labels))
{
    int max_label = -1;
    for (int l : labels_) {
        if (l < 0) throw Error(ErrorCode::OutOfRange, "partition labels must be nonnegative");
        max_label = std::max(max_label, l);
    }
    k_ = static_cast<std::size_t>(max_label + 1);
    std::vector<bool> used(k_, false);
    for (int l : labels_) used[static_cast<std::size_t>(l)] = true;
    for (std::size_t k = 0; k < k_; ++k) {
        if (!used[k]) throw Error(ErrorCode::EmptyGroup, "cluster " + std::to_string(k + 1) + " has no members");
    }
}

Partition Partition::singletons(std::size_t size)
{
    std::vector<int> labels(size);
    for (std::size_t i = 0; i < size; ++i) labels[i] = static_cast<int>(i);
    return Partition(std::move(labels));
}

Partition Partition::single_block(std::size_t size)
{
    return Partition(std::vector<int>(size, 0));
}

Partition Partition::from_any_labels(std::span<const int> labels)
{
    std::map<int, int> relabel;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) {
        auto [it, inserted] = relabel.try_emplace(l, static_cast<int>(relabel.size()));
        out.push_back(it->second);
    }
    return Partition(std::move(out));
}

std::vector<std::vector<std::size_t>> Partition::members() const
{
    std::vector<std::vector<std::size_t>> m(k_);
    for (std::size_t i = 0; i < labels_.size(); ++i) m[static_cast<std::size_t>(labels_[i])].push_back(i);
    return m;
}

std::vector<std::size_t> Partition::sizes() const
{
    std::vector<std::size_t> s(k_, 0);
    for (int l : labels_) ++s[static_cast<std::size_t>(l)];
    return s;
}

Partition Partition::canonical() const
{
    return from_any_labels(labels_);
}

Partition expand_groups(const Partition& part, std::span<const ColumnRange> column_map)
{
    if (part.size() != column_map.size()) {
        throw Error(ErrorCode::SizeMismatch, "partition covers " + std::to_string(part.size()) +
            " variables but the column map has " + std::to_string(column_map.size()));
    }
    std::size_t total = 0;
    for (const auto& r : column_map) total = std::max(total, r.end());
    std::vector<int> labels(total, -1);
    for (std::size_t v = 0; v < column_map.size(); ++v) {
        for (std::size_t c = column_map[v].begin; c < column_map[v].end(); ++c) labels[c] = part.label(v);
    }
    if (std::find(labels.begin(), labels.end(), -1) != labels.end()) {
        throw Error(ErrorCode::InvalidArgument, "column map does not cover every column");
    }
    return Partition(std::move(labels));
}

Coefficients Coefficients::make(double intercept, Eigen::VectorXd beta, const Partition& groups)
{
    if (static_cast<std::size_t>(beta.size()) != groups.size()) {
        throw Error(ErrorCode::DimensionMismatch, "coefficient vector does not match the group partition");
    }
    Coefficients c;
    c.intercept = intercept;
    c.group_norms = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(groups.cluster_count()));
    for (std::size_t j = 0; j < groups.size(); ++j) {
        c.group_norms[groups.label(j)] += beta[static_cast<Eigen::Index>(j)] * beta[static_cast<Eigen::Index>(j)];
    }
    c.group_norms = c.group_norms.cwiseSqrt();
    c.beta = std::move(beta);
    return c;
}

std::size_t Coefficients::nonzero_count() const
{
    return static_cast<std::size_t>((beta.array() != 0.0).count());
}

} // namespace grpsel
