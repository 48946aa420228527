#include <grpsel/clustering.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <grpsel/parallel.hpp>

namespace grpsel {

namespace {

constexpr Eigen::Index dense_eigen_limit = 64;

double top_eigenvalue(const Eigen::MatrixXd& sym)
{
    if (sym.rows() == 1) return sym(0, 0);
    if (sym.rows() <= dense_eigen_limit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff();
    }
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(sym.rows(), 1.0, 2.0).normalized();
    double value = 0.0;
    for (int it = 0; it < 1000; ++it) {
        Eigen::VectorXd w = sym * v;
        const double next = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        if (std::abs(next - value) <= 1e-9 * std::max(1.0, std::abs(next))) {
            value = next;
            break;
        }
        value = next;
    }
    return value;
}

double choose2(double k) noexcept { return k * (k - 1.0) / 2.0; }

struct PairCounts
{
    double total = 0.0;   // C(n,2)
    double both = 0.0;    // sum_ij C(n_ij, 2)
    double in_a = 0.0;    // sum_i C(n_i., 2)
    double in_b = 0.0;    // sum_j C(n_.j, 2)
};

PairCounts pair_counts(const Partition& a, const Partition& b)
{
    if (a.size() != b.size()) {
        throw Error(ErrorCode::SizeMismatch, "partitions cover " + std::to_string(a.size()) + " and " +
            std::to_string(b.size()) + " elements");
    }
    const std::size_t ka = a.cluster_count();
    const std::size_t kb = b.cluster_count();
    std::vector<double> table(ka * kb, 0.0), rows(ka, 0.0), cols(kb, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto la = static_cast<std::size_t>(a.label(i));
        const auto lb = static_cast<std::size_t>(b.label(i));
        table[la * kb + lb] += 1.0;
        rows[la] += 1.0;
        cols[lb] += 1.0;
    }
    PairCounts pc;
    pc.total = choose2(static_cast<double>(a.size()));
    for (double t : table) pc.both += choose2(t);
    for (double r : rows) pc.in_a += choose2(r);
    for (double c : cols) pc.in_b += choose2(c);
    return pc;
}

std::vector<std::size_t> all_variables(std::size_t p)
{
    std::vector<std::size_t> v(p);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

StandardizedMatrix pcamix_standardize(const Dataset& d)
{
    if (d.n() < 2) throw Error(ErrorCode::DegenerateInput, "PCAMIX needs at least 2 observations");
    if (d.p() < 1) throw Error(ErrorCode::DegenerateInput, "PCAMIX needs at least 1 variable");
    try {
        auto sm = standardize(d);
        sm.z /= std::sqrt(static_cast<double>(d.n()));
        return sm;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConstantColumn || e.code() == ErrorCode::EmptyCategory) {
            throw Error(ErrorCode::DegenerateInput, e.what());
        }
        throw;
    }
}

} // namespace

Eigen::MatrixXd pcamix_matrix(const Dataset& d)
{
    return pcamix_standardize(d).z;
}

PcamixResult pcamix(const Dataset& d)
{
    const Eigen::MatrixXd w = pcamix_matrix(d);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    PcamixResult out;
    out.u = svd.matrixU();
    out.singular_values = svd.singularValues();
    out.v = svd.matrixV();
    out.eigenvalues = out.singular_values.array().square();
    return out;
}

double homogeneity(const Dataset& d)
{
    HomogeneityEvaluator eval(d);
    const auto vars = all_variables(d.p());
    return eval.homogeneity(vars);
}

double dissimilarity(const Dataset& d, std::span<const std::size_t> a, std::span<const std::size_t> b)
{
    return HomogeneityEvaluator(d).dissimilarity(a, b);
}

HomogeneityEvaluator::HomogeneityEvaluator(const Dataset& d)
{
    auto sm = pcamix_standardize(d);
    gram_ = sm.z.transpose() * sm.z;
    column_map_ = std::move(sm.column_map);
}

double HomogeneityEvaluator::homogeneity(std::span<const std::size_t> vars) const
{
    if (vars.empty()) throw Error(ErrorCode::InvalidArgument, "homogeneity of an empty cluster");
    std::vector<Eigen::Index> cols;
    for (auto v : vars) {
        if (v >= column_map_.size()) throw Error(ErrorCode::OutOfRange, "variable index out of range");
        for (std::size_t c = column_map_[v].begin; c < column_map_[v].end(); ++c) cols.push_back(static_cast<Eigen::Index>(c));
    }
    const auto m = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) sub(r, c) = gram_(cols[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
    }
    return top_eigenvalue(sub);
}

double HomogeneityEvaluator::dissimilarity(std::span<const std::size_t> a, std::span<const std::size_t> b) const
{
    std::vector<std::size_t> joint(a.begin(), a.end());
    joint.insert(joint.end(), b.begin(), b.end());
    std::vector<std::size_t> sorted = joint;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error(ErrorCode::InvalidArgument, "dissimilarity requires disjoint clusters");
    }
    const double d = homogeneity(a) + homogeneity(b) - homogeneity(joint);
    return std::max(d, 0.0);
}

Dendrogram hierarchical_cluster(const Dataset& d)
{
    if (d.p() < 2) throw Error(ErrorCode::InvalidArgument, "hierarchical clustering needs at least 2 variables");
    return hierarchical_cluster(HomogeneityEvaluator(d), d.column_names());
}

Dendrogram hierarchical_cluster(const HomogeneityEvaluator& eval, std::vector<std::string> leaf_names)
{
    const std::size_t p = eval.variables();
    if (p < 2) throw Error(ErrorCode::InvalidArgument, "hierarchical clustering needs at least 2 variables");
    if (leaf_names.size() != p) throw Error(ErrorCode::SizeMismatch, "leaf name count does not match the variables");

    // Slot i holds the cluster whose smallest leaf is i.
    std::vector<std::vector<std::size_t>> members(p);
    std::vector<std::size_t> node(p);
    std::vector<double> h(p);
    std::vector<bool> active(p, true);
    for (std::size_t i = 0; i < p; ++i) {
        members[i] = {i};
        node[i] = i;
        h[i] = eval.homogeneity(members[i]);
    }

    auto joint_h = [&](std::size_t i, std::size_t j) {
        std::vector<std::size_t> u = members[i];
        u.insert(u.end(), members[j].begin(), members[j].end());
        return eval.homogeneity(u);
    };

    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::max(0.0, h[i] + h[j] - joint_h(i, j));
        }
    }

    Dendrogram dend;
    dend.leaf_names = std::move(leaf_names);
    dend.merges.reserve(p - 1);
    for (std::size_t step = 0; step + 1 < p; ++step) {
        std::size_t best_i = p, best_j = p;
        double best = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < p; ++j) {
                if (!active[j]) continue;
                const double dij = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (best_i == p || dij < best) {
                    best = dij;
                    best_i = i;
                    best_j = j;
                }
            }
        }

        dend.merges.push_back({node[best_i], node[best_j], best, members[best_i].size() + members[best_j].size()});
        members[best_i].insert(members[best_i].end(), members[best_j].begin(), members[best_j].end());
        members[best_j].clear();
        active[best_j] = false;
        node[best_i] = p + step;
        h[best_i] = eval.homogeneity(members[best_i]);

        for (std::size_t k = 0; k < p; ++k) {
            if (!active[k] || k == best_i) continue;
            const double dk = std::max(0.0, h[best_i] + h[k] - joint_h(best_i, k));
            const auto lo = static_cast<Eigen::Index>(std::min(k, best_i));
            const auto hi = static_cast<Eigen::Index>(std::max(k, best_i));
            dist(lo, hi) = dk;
        }
    }
    return dend;
}

Partition cut_tree(const Dendrogram& dend, std::size_t m)
{
    const std::size_t p = dend.leaves();
    if (m < 1 || m > p) {
        throw Error(ErrorCode::OutOfRange, "cannot cut a " + std::to_string(p) + "-leaf tree into " + std::to_string(m) + " clusters");
    }
    if (dend.merges.size() + 1 != p) throw Error(ErrorCode::InvalidArgument, "dendrogram must hold p-1 merges");

    std::vector<std::size_t> parent(2 * p - 1);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t t = 0; t < p - m; ++t) {
        const auto& mg = dend.merges[t];
        parent[find(mg.left)] = p + t;
        parent[find(mg.right)] = p + t;
    }
    std::vector<int> roots(p);
    for (std::size_t i = 0; i < p; ++i) roots[i] = static_cast<int>(find(i));
    return Partition::from_any_labels(roots);
}

double rand_index(const Partition& a, const Partition& b)
{
    const auto pc = pair_counts(a, b);
    if (pc.total == 0.0) return 1.0;
    const double disagree_free = pc.total - pc.in_a - pc.in_b + pc.both;
    return (pc.both + disagree_free) / pc.total;
}

double adjusted_rand_index(const Partition& a, const Partition& b)
{
    const auto pc = pair_counts(a, b);
    if (pc.total == 0.0) return 1.0;
    const double expected = pc.in_a * pc.in_b / pc.total;
    const double maximum = 0.5 * (pc.in_a + pc.in_b);
    if (maximum == expected) return 1.0;
    return (pc.both - expected) / (maximum - expected);
}

StabilityResult stability_select(const Dataset& d, const StabilityOptions& opts)
{
    const std::size_t p = d.p();
    const std::size_t n = d.n();
    if (p < 3) throw Error(ErrorCode::InvalidArgument, "stability selection needs at least 3 variables");
    if (opts.j_boot < 1) throw Error(ErrorCode::InvalidArgument, "stability selection needs at least one bootstrap replicate");
    if (opts.max_m < 2) throw Error(ErrorCode::InvalidArgument, "candidate cluster cap must be at least 2");

    StabilityResult out;
    out.dendrogram = hierarchical_cluster(d);
    const std::size_t top = std::min(p - 1, opts.max_m);
    for (std::size_t m = 2; m <= top; ++m) out.curve.cluster_counts.push_back(m);
    const std::size_t mc = out.curve.cluster_counts.size();

    std::vector<Partition> initial_cuts;
    initial_cuts.reserve(mc);
    for (auto m : out.curve.cluster_counts) initial_cuts.push_back(cut_tree(out.dendrogram, m));

    Eigen::MatrixXd ari(static_cast<Eigen::Index>(opts.j_boot), static_cast<Eigen::Index>(mc));
    parallel_for(opts.j_boot, opts.jobs, [&](std::size_t j) {
        std::mt19937_64 rng(opts.seed + j);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<std::size_t> rows(n);
        for (int attempt = 0;; ++attempt) {
            for (auto& r : rows) r = pick(rng);
            try {
                const Dataset boot = d.select_rows(rows);
                const Dendrogram bd = hierarchical_cluster(HomogeneityEvaluator(boot), boot.column_names());
                for (std::size_t c = 0; c < mc; ++c) {
                    ari(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) =
                        adjusted_rand_index(cut_tree(bd, out.curve.cluster_counts[c]), initial_cuts[c]);
                }
                return;
            } catch (const Error& e) {
                const bool degenerate = e.code() == ErrorCode::DegenerateInput || e.code() == ErrorCode::ConstantColumn ||
                    e.code() == ErrorCode::EmptyCategory;
                if (!degenerate) throw;
                if (attempt >= opts.max_redraws) {
                    throw Error(ErrorCode::DegenerateInput, "bootstrap replicate " + std::to_string(j) +
                        " stayed degenerate after " + std::to_string(opts.max_redraws) + " redraws");
                }
            }
        }
    });

    out.curve.mean_ari.resize(mc);
    std::size_t best = 0;
    for (std::size_t c = 0; c < mc; ++c) {
        out.curve.mean_ari[c] = ari.col(static_cast<Eigen::Index>(c)).mean();
        if (out.curve.mean_ari[c] > out.curve.mean_ari[best]) best = c;
    }
    out.curve.chosen_m = out.curve.cluster_counts[best];
    out.partition = initial_cuts[best];
    return out;
}

} // namespace grpsel
