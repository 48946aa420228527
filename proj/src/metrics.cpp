#include <grpsel/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace grpsel {

double rmse(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred)
{
    if (y_true.size() != y_pred.size()) throw Error(ErrorCode::SizeMismatch, "rmse inputs differ in length");
    if (y_true.size() == 0) throw Error(ErrorCode::TooFewObservations, "rmse of empty vectors");
    return std::sqrt((y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size()));
}

SelectionTruth SelectionTruth::from_active(std::vector<std::size_t> active, std::size_t p)
{
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    if (!active.empty() && active.back() >= p) throw Error(ErrorCode::OutOfRange, "active index beyond p");
    SelectionTruth t;
    t.p = p;
    std::size_t a = 0;
    for (std::size_t i = 0; i < p; ++i) {
        if (a < active.size() && active[a] == i) ++a;
        else t.inactive.push_back(i);
    }
    t.active = std::move(active);
    return t;
}

SelectionMetrics selection_metrics(const SelectionTruth& truth, std::span<const std::size_t> selected, bool divide_by_p)
{
    if (truth.active.empty()) throw Error(ErrorCode::EmptyActiveSet, "sensitivity is undefined without active variables");
    std::vector<char> chosen(truth.p, 0);
    for (std::size_t s : selected) {
        if (s >= truth.p) throw Error(ErrorCode::OutOfRange, "selected index " + std::to_string(s) + " beyond p");
        chosen[s] = 1;
    }
    double tp = 0.0, tn = 0.0;
    for (std::size_t i : truth.active) tp += chosen[i] ? 1.0 : 0.0;
    for (std::size_t i : truth.inactive) tn += chosen[i] ? 0.0 : 1.0;

    SelectionMetrics m;
    if (divide_by_p) {
        const auto p = static_cast<double>(truth.p);
        m.sensitivity = tp / p;
        m.specificity = tn / p;
    } else {
        m.sensitivity = tp / static_cast<double>(truth.active.size());
        m.specificity = truth.inactive.empty() ? 1.0 : tn / static_cast<double>(truth.inactive.size());
    }
    return m;
}

namespace {

void check_binary(const Eigen::VectorXd& y)
{
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) throw Error(ErrorCode::NonBinaryResponse, "labels must be 0 or 1");
    }
}

} // namespace

double auc(const Eigen::VectorXd& y_true, const Eigen::VectorXd& scores)
{
    if (y_true.size() != scores.size()) throw Error(ErrorCode::SizeMismatch, "labels and scores differ in length");
    check_binary(y_true);
    const auto n = static_cast<std::size_t>(y_true.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks, 1-based.
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = mid;
        i = j + 1;
    }
    double pos = 0.0, rank_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (y_true[static_cast<Eigen::Index>(i)] == 1.0) {
            pos += 1.0;
            rank_sum += rank[i];
        }
    }
    const double neg = static_cast<double>(n) - pos;
    if (pos == 0.0 || neg == 0.0) throw Error(ErrorCode::OneClassOnly, "AUC needs both classes");
    return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

ClassificationMetrics classification_metrics(const Eigen::VectorXd& y_true, const Eigen::VectorXd& scores, double cutoff)
{
    ClassificationMetrics m;
    m.auc = auc(y_true, scores);
    double tp = 0.0, tn = 0.0, pos = 0.0, neg = 0.0;
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        const bool predicted = scores[i] >= cutoff;
        if (y_true[i] == 1.0) {
            pos += 1.0;
            tp += predicted ? 1.0 : 0.0;
        } else {
            neg += 1.0;
            tn += predicted ? 0.0 : 1.0;
        }
    }
    m.accuracy = (tp + tn) / (pos + neg);
    m.sensitivity = tp / pos;
    m.specificity = tn / neg;
    return m;
}

std::size_t smote_count(std::size_t minority, std::size_t majority, double target_ratio)
{
    if (!(target_ratio > 0.0)) throw Error(ErrorCode::InvalidArgument, "target_ratio must be positive");
    const double need = target_ratio * static_cast<double>(majority) - static_cast<double>(minority);
    // Guard against 0.9999999 * 76 style rounding before taking the ceiling.
    const double rounded = std::round(need);
    const double c = std::abs(need - rounded) < 1e-9 ? rounded : std::ceil(need);
    return c > 0.0 ? static_cast<std::size_t>(c) : 0;
}

SmoteResult smote(const Eigen::MatrixXd& minority, std::size_t majority_count, const SmoteConfig& cfg)
{
    if (cfg.k_neighbors < 1) throw Error(ErrorCode::InvalidArgument, "k_neighbors must be at least 1");
    const auto m = static_cast<std::size_t>(minority.rows());
    if (m <= cfg.k_neighbors) {
        throw Error(ErrorCode::TooFewMinority, "need more than " + std::to_string(cfg.k_neighbors) +
            " minority rows, got " + std::to_string(m));
    }
    if (!minority.allFinite()) throw Error(ErrorCode::MissingValue, "minority rows contain non-finite values");
    const std::size_t count = smote_count(m, majority_count, cfg.target_ratio);

    // k nearest neighbours of every minority row, ties broken by index.
    std::vector<std::vector<std::size_t>> knn(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(m - 1);
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) dist.emplace_back((minority.row(static_cast<Eigen::Index>(i)) - minority.row(static_cast<Eigen::Index>(j))).squaredNorm(), j);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(cfg.k_neighbors), dist.end());
        for (std::size_t t = 0; t < cfg.k_neighbors; ++t) knn[i].push_back(dist[t].second);
    }

    SmoteResult out;
    out.synthetic.resize(static_cast<Eigen::Index>(count), minority.cols());
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, cfg.k_neighbors - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t base = s % m;
        const std::size_t nb = knn[base][pick(rng)];
        double r = unit(rng);
        while (r == 0.0) r = unit(rng);
        const auto row = static_cast<Eigen::Index>(s);
        out.synthetic.row(row) = minority.row(static_cast<Eigen::Index>(base)) +
            r * (minority.row(static_cast<Eigen::Index>(nb)) - minority.row(static_cast<Eigen::Index>(base)));
        out.base.push_back(base);
        out.neighbor.push_back(nb);
        out.step.push_back(r);
    }
    return out;
}

} // namespace grpsel
