#pragma once

// Brute-force reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include <grpsel/clustering.hpp>
#include <grpsel/core_data.hpp>

namespace oracle {

// Counts of element pairs: together in both, only in a, only in b, apart in both.
struct PairCounts
{
    double both = 0, only_a = 0, only_b = 0, neither = 0;
};

inline PairCounts pair_counts(const std::vector<int>& a, const std::vector<int>& b)
{
    PairCounts c;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const bool sa = a[i] == a[j];
            const bool sb = b[i] == b[j];
            if (sa && sb) c.both += 1;
            else if (sa) c.only_a += 1;
            else if (sb) c.only_b += 1;
            else c.neither += 1;
        }
    }
    return c;
}

inline double rand_index(const std::vector<int>& a, const std::vector<int>& b)
{
    const auto c = pair_counts(a, b);
    return (c.both + c.neither) / (c.both + c.only_a + c.only_b + c.neither);
}

// Pair-counting form of the adjusted Rand index.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b)
{
    const auto c = pair_counts(a, b);
    const double den = (c.both + c.only_a) * (c.only_a + c.neither) + (c.both + c.only_b) * (c.only_b + c.neither);
    if (den == 0.0) return 1.0;
    return 2.0 * (c.both * c.neither - c.only_a * c.only_b) / den;
}

// Distance covariance from the literal double and triple sums.
inline double naive_dcov(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v)
{
    const Eigen::Index n = u.rows();
    auto du = [&](Eigen::Index k, Eigen::Index l) { return (u.row(k) - u.row(l)).norm(); };
    auto dv = [&](Eigen::Index k, Eigen::Index l) { return (v.row(k) - v.row(l)).norm(); };
    double s1 = 0, su = 0, sv = 0, s3 = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = 0; l < n; ++l) {
            s1 += du(k, l) * dv(k, l);
            su += du(k, l);
            sv += dv(k, l);
            for (Eigen::Index m = 0; m < n; ++m) s3 += du(k, m) * dv(l, m);
        }
    }
    const double n2 = static_cast<double>(n * n);
    return s1 / n2 + (su / n2) * (sv / n2) - 2.0 * s3 / (n2 * static_cast<double>(n));
}

struct OracleMerge
{
    std::vector<std::size_t> left, right;   // leaf sets
    double height = 0.0;
};

// Agglomeration recomputing every pairwise dissimilarity from scratch each step.
// Clusters are keyed by their smallest leaf; ties go to the lowest key pair.
inline std::vector<OracleMerge> agglomerate(const grpsel::Dataset& d)
{
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t j = 0; j < d.p(); ++j) clusters.push_back({j});
    std::vector<OracleMerge> out;
    while (clusters.size() > 1) {
        std::size_t bi = 0, bj = 1;
        double best = 0.0;
        bool first = true;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double dij = std::max(0.0, grpsel::dissimilarity(d, clusters[i], clusters[j]));
                if (first || dij < best) {
                    first = false;
                    best = dij;
                    bi = i;
                    bj = j;
                }
            }
        }
        out.push_back({clusters[bi], clusters[bj], best});
        clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
        std::sort(clusters.begin(), clusters.end(), [](const auto& x, const auto& y) {
            return *std::min_element(x.begin(), x.end()) < *std::min_element(y.begin(), y.end());
        });
    }
    return out;
}

// Leaf set under each dendrogram node.
inline std::vector<std::vector<std::size_t>> node_leaves(const grpsel::Dendrogram& dend)
{
    const std::size_t p = dend.leaves();
    std::vector<std::vector<std::size_t>> leaves(2 * p - 1);
    for (std::size_t i = 0; i < p; ++i) leaves[i] = {i};
    for (std::size_t t = 0; t < dend.merges.size(); ++t) {
        auto& node = leaves[p + t];
        node = leaves[dend.merges[t].left];
        node.insert(node.end(), leaves[dend.merges[t].right].begin(), leaves[dend.merges[t].right].end());
    }
    for (auto& l : leaves) std::sort(l.begin(), l.end());
    return leaves;
}

// True when the dendrogram performs the oracle merges in the same order at the same heights.
inline bool same_merges(const grpsel::Dendrogram& dend, std::vector<OracleMerge> ref, double tol)
{
    if (dend.merges.size() != ref.size()) return false;
    const auto leaves = node_leaves(dend);
    for (std::size_t t = 0; t < ref.size(); ++t) {
        auto a = leaves[dend.merges[t].left];
        auto b = leaves[dend.merges[t].right];
        std::sort(ref[t].left.begin(), ref[t].left.end());
        std::sort(ref[t].right.begin(), ref[t].right.end());
        const bool match = (a == ref[t].left && b == ref[t].right) || (a == ref[t].right && b == ref[t].left);
        if (!match || std::abs(dend.merges[t].height - ref[t].height) > tol) return false;
    }
    return true;
}

} // namespace oracle
