#include <grpsel/solvers.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <grpsel/parallel.hpp>

namespace grpsel {

std::string_view to_string(LossKind k) noexcept
{
    return k == LossKind::SquaredError ? "squared_error" : "logistic";
}

std::string_view to_string(GroupFamily f) noexcept
{
    switch (f) {
        case GroupFamily::GrLasso: return "grlasso";
        case GroupFamily::GrSCAD: return "grscad";
        case GroupFamily::GrMCP: return "grmcp";
        case GroupFamily::SGL: return "sgl";
    }
    return "unknown";
}

void GroupPenaltySpec::validate(std::size_t group_count) const
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidSpec, "lambda must be a finite nonnegative number");
    if (family == GroupFamily::GrSCAD && !(gamma > 2.0)) {
        throw Error(ErrorCode::InvalidSpec, "group SCAD requires gamma > 2, got " + std::to_string(gamma));
    }
    if (family == GroupFamily::GrMCP && !(gamma > 1.0)) {
        throw Error(ErrorCode::InvalidSpec, "group MCP requires gamma > 1, got " + std::to_string(gamma));
    }
    if (family == GroupFamily::SGL && !(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::InvalidSpec, "SGL alpha must lie in [0,1], got " + std::to_string(alpha));
    }
    if (!group_weights.empty()) {
        if (group_weights.size() != group_count) {
            throw Error(ErrorCode::InvalidSpec, "expected " + std::to_string(group_count) + " group weights");
        }
        for (double w : group_weights) {
            if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidSpec, "group weights must be positive");
        }
    }
}

std::vector<double> GroupPenaltySpec::weights_for(const Partition& groups) const
{
    if (!group_weights.empty()) return group_weights;
    std::vector<double> w(groups.cluster_count(), 1.0);
    if (family != GroupFamily::SGL) {
        const auto sizes = groups.sizes();
        for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::sqrt(static_cast<double>(sizes[k]));
    }
    return w;
}

std::vector<double> make_lambda_grid(double lmax, std::size_t count, double min_ratio)
{
    if (!(lmax > 0.0) || !std::isfinite(lmax)) {
        throw Error(ErrorCode::DegenerateInput, "lambda_max is not positive; the response carries no signal for any column");
    }
    if (count == 0) throw Error(ErrorCode::InvalidArgument, "lambda grid needs at least one point");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda min ratio must lie in (0,1)");
    std::vector<double> grid(count);
    grid[0] = lmax;
    if (count == 1) return grid;
    const double step = std::log(min_ratio) / static_cast<double>(count - 1);
    for (std::size_t g = 1; g < count; ++g) grid[g] = lmax * std::exp(step * static_cast<double>(g));
    return grid;
}

double default_min_ratio(std::size_t n, std::size_t columns) noexcept
{
    return columns > n ? 0.05 : 0.001;
}

namespace {

inline double sigmoid(double eta) noexcept
{
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

// log(1 + exp(eta)) - y * eta
inline double logistic_term(double eta, double y) noexcept
{
    return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta))) - y * eta;
}

void check_inputs(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss)
{
    if (z.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "design has " + std::to_string(z.rows()) +
            " rows but the response has " + std::to_string(y.size()));
    }
    if (z.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "design has no rows");
    if (loss == LossKind::Logistic) {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (y[i] != 0.0 && y[i] != 1.0) throw Error(ErrorCode::NonBinaryResponse, "logistic loss requires a {0,1} response");
        }
    }
}

void check_grid(std::span<const double> grid)
{
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!(grid[g] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda values must be nonnegative");
        if (g > 0 && !(grid[g] < grid[g - 1])) throw Error(ErrorCode::InvalidArgument, "lambda grid must be strictly decreasing");
    }
}

// Penalty applied to one block, parameterized by a single path level lambda.
struct BlockPenalty
{
    bool sparse_group = false;
    PenaltyFamily family = PenaltyFamily::Lasso;
    double gamma = 0.0;
    double group_scale = 1.0;  // SGL: lambda1 = group_scale * lambda
    double l1_scale = 0.0;     // SGL: lambda2 = l1_scale * lambda
    std::vector<double> weights;

    PenaltySpec scalar_spec(double lambda, std::size_t k) const
    {
        return {family, lambda * weights[k], gamma};
    }
};

BlockPenalty make_block_penalty(const GroupPenaltySpec& spec, const Partition& groups)
{
    spec.validate(groups.cluster_count());
    BlockPenalty pen;
    pen.weights = spec.weights_for(groups);
    switch (spec.family) {
        case GroupFamily::GrLasso: pen.family = PenaltyFamily::Lasso; break;
        case GroupFamily::GrSCAD: pen.family = PenaltyFamily::SCAD; pen.gamma = spec.gamma; break;
        case GroupFamily::GrMCP: pen.family = PenaltyFamily::MCP; pen.gamma = spec.gamma; break;
        case GroupFamily::SGL:
            pen.sparse_group = true;
            pen.group_scale = spec.alpha;
            pen.l1_scale = 1.0 - spec.alpha;
            break;
    }
    return pen;
}

BlockPenalty make_block_penalty(const PenaltySpec& spec, std::size_t p)
{
    spec.validate();
    BlockPenalty pen;
    pen.family = spec.family;
    pen.gamma = spec.gamma;
    pen.weights.assign(p, 1.0);
    return pen;
}

// Smallest lambda with ||S(g, l2s*lambda)|| <= l1s*lambda*w.
double sparse_group_zero_level(const Eigen::VectorXd& g, double l1s, double l2s, double w)
{
    const double gnorm = g.norm();
    const double gmax = g.cwiseAbs().maxCoeff();
    if (gnorm == 0.0) return 0.0;
    if (l1s * w <= 0.0) return l2s > 0.0 ? gmax / l2s : std::numeric_limits<double>::infinity();
    if (l2s <= 0.0) return gnorm / (l1s * w);

    auto excess = [&](double lambda) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < g.size(); ++j) {
            const double t = soft_threshold(g[j], l2s * lambda);
            s += t * t;
        }
        return std::sqrt(s) - l1s * lambda * w;
    };
    double lo = 0.0;
    double hi = std::min(gnorm / (l1s * w), gmax / l2s);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) <= 0.0) hi = mid;
        else lo = mid;
    }
    return hi;
}

/**
 * Block coordinate descent over contiguous column blocks.
 *
 * Each block update is a majorize-minimize step: the loss is bounded by a
 * quadratic with curvature L_k (largest eigenvalue of X_k'X_k/n, times 1/4
 * for logistic), and the penalty's exact proximal map is applied. The
 * radial structure of norm penalties reduces the prox to scalar_threshold
 * on ||u||.
 */
class BlockEngine
{
public:
    struct State
    {
        double intercept = 0.0;
        Eigen::VectorXd beta;   // permuted (grouped) order
        Eigen::VectorXd resid;  // squared error: y - intercept - Z beta
        Eigen::VectorXd eta;    // logistic: intercept + Z beta
        Eigen::VectorXd mu;     // logistic: sigmoid(eta)
        Eigen::ArrayXd expo;    // logistic: exp(-|eta|)
        std::vector<double> scale;  // logistic: per-block curvature fraction of the 1/4 bound
        double intercept_scale = 1.0;
    };

    BlockEngine(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
        const Partition& groups, BlockPenalty pen, SolverOptions opts)
        : y_(y), loss_(loss), pen_(std::move(pen)), opts_(opts)
    {
        check_inputs(z, y, loss);
        if (groups.size() != static_cast<std::size_t>(z.cols())) {
            throw Error(ErrorCode::DimensionMismatch, "partition covers " + std::to_string(groups.size()) +
                " columns but the design has " + std::to_string(z.cols()));
        }
        n_ = static_cast<double>(z.rows());
        const auto members = groups.members();
        const std::size_t k_count = members.size();
        start_.resize(k_count + 1, 0);
        perm_.reserve(groups.size());
        for (std::size_t k = 0; k < k_count; ++k) {
            if (members[k].empty()) throw Error(ErrorCode::EmptyGroup, "group " + std::to_string(k + 1) + " is empty");
            start_[k] = perm_.size();
            perm_.insert(perm_.end(), members[k].begin(), members[k].end());
        }
        start_[k_count] = perm_.size();

        zp_.resize(z.rows(), z.cols());
        for (std::size_t c = 0; c < perm_.size(); ++c) zp_.col(static_cast<Eigen::Index>(c)) = z.col(static_cast<Eigen::Index>(perm_[c]));

        const double loss_scale = loss_ == LossKind::Logistic ? 0.25 : 1.0;
        curvature_.resize(k_count);
        hessian_.resize(k_count);
        for (std::size_t k = 0; k < k_count; ++k) {
            const auto blk = block(k);
            hessian_[k] = loss_scale * (blk.transpose() * blk) / n_;
            double lk;
            if (blk.cols() == 1) {
                lk = hessian_[k](0, 0);
            } else {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian_[k], Eigen::EigenvaluesOnly);
                lk = es.eigenvalues().maxCoeff();
            }
            curvature_[k] = lk <= 1e-14 * loss_scale ? 0.0 : lk;
        }

        const double ybar = y_.mean();
        if (loss_ == LossKind::Logistic) {
            if (ybar <= 0.0 || ybar >= 1.0) throw Error(ErrorCode::DegenerateInput, "logistic response has a single class");
            null_intercept_ = std::log(ybar / (1.0 - ybar));
        } else {
            null_intercept_ = ybar;
        }
        null_gradient_ = zp_.transpose() * (y_.array() - ybar).matrix() / n_;
        lambda_max_ = compute_lambda_max();
        null_loss_ = this->loss(null_state());
    }

    double lambda_max() const noexcept { return lambda_max_; }
    std::size_t columns() const noexcept { return perm_.size(); }

    State null_state() const
    {
        State s;
        s.intercept = null_intercept_;
        s.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(perm_.size()));
        refresh(s);
        return s;
    }

    void refresh(State& s) const
    {
        if (loss_ == LossKind::SquaredError) {
            s.resid = y_ - zp_ * s.beta;
            s.resid.array() -= s.intercept;
        } else {
            s.eta = zp_ * s.beta;
            s.eta.array() += s.intercept;
            s.expo = (-s.eta.array().abs()).exp();
            mu_from(s.eta, s.expo, s.mu);
            if (s.scale.size() != curvature_.size()) s.scale.assign(curvature_.size(), 1.0);
        }
    }

    struct Outcome
    {
        bool converged = false;
        int iterations = 0;
    };

    Outcome solve(double lambda, State& s) const
    {
        if (lambda >= lambda_max_) {
            s = null_state();
            if (opts_.objective_trace) opts_.objective_trace->push_back(objective(lambda, s));
            return {true, 0};
        }
        Outcome out;
        while (out.iterations < opts_.max_iter) {
            double change = sweep(lambda, s, false);
            ++out.iterations;
            if (opts_.objective_trace) opts_.objective_trace->push_back(objective(lambda, s));
            if (change < opts_.tol) {
                out.converged = true;
                break;
            }
            if (separated(s)) break;
            while (out.iterations < opts_.max_iter) {
                change = sweep(lambda, s, true);
                ++out.iterations;
                if (opts_.objective_trace) opts_.objective_trace->push_back(objective(lambda, s));
                if (change < opts_.tol || separated(s)) break;
            }
        }
        return out;
    }

    Coefficients to_coefficients(const State& s, const Partition& groups) const
    {
        Eigen::VectorXd beta(static_cast<Eigen::Index>(perm_.size()));
        for (std::size_t c = 0; c < perm_.size(); ++c) beta[static_cast<Eigen::Index>(perm_[c])] = s.beta[static_cast<Eigen::Index>(c)];
        return Coefficients::make(s.intercept, std::move(beta), groups);
    }

    double loss(const State& s) const
    {
        if (loss_ == LossKind::SquaredError) return s.resid.squaredNorm() / (2.0 * n_);
        return logistic_mean(s.eta);
    }

    double penalty(double lambda, const State& s) const
    {
        double total = 0.0;
        for (std::size_t k = 0; k + 1 < start_.size(); ++k) {
            const auto bk = s.beta.segment(static_cast<Eigen::Index>(start_[k]), static_cast<Eigen::Index>(start_[k + 1] - start_[k]));
            if (pen_.sparse_group) {
                total += pen_.group_scale * lambda * pen_.weights[k] * bk.norm() + pen_.l1_scale * lambda * bk.lpNorm<1>();
            } else {
                total += penalty_value(pen_.scalar_spec(lambda, k), bk.norm());
            }
        }
        return total;
    }

    double objective(double lambda, const State& s) const { return loss(s) + penalty(lambda, s); }

    double null_loss() const noexcept { return null_loss_; }

    // Logistic fits whose deviance has collapsed are drifting toward a
    // separating direction; iterating further only grows the coefficients.
    bool separated(const State& s) const
    {
        return loss_ == LossKind::Logistic && loss(s) < kSaturation * null_loss_;
    }

private:
    Eigen::VectorXd y_;
    LossKind loss_;
    BlockPenalty pen_;
    SolverOptions opts_;
    double n_ = 0.0;
    Eigen::MatrixXd zp_;
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> start_;
    std::vector<double> curvature_;
    std::vector<Eigen::MatrixXd> hessian_;   // block Gram / n, times 1/4 for logistic
    static constexpr int kInnerSteps = 200;
    static constexpr double kSaturation = 0.01;
    static constexpr double kMinScale = 1.0 / 256.0;
    Eigen::VectorXd null_gradient_;
    double null_intercept_ = 0.0;
    double lambda_max_ = 0.0;
    double null_loss_ = 0.0;

    Eigen::Block<const Eigen::MatrixXd, Eigen::Dynamic, Eigen::Dynamic, true> block(std::size_t k) const
    {
        return zp_.middleCols(static_cast<Eigen::Index>(start_[k]), static_cast<Eigen::Index>(start_[k + 1] - start_[k]));
    }

    // Mean logistic deviance term; leaves exp(-|eta|) in e for mu_from.
    double logistic_mean(const Eigen::VectorXd& eta, Eigen::ArrayXd& e) const
    {
        e = (-eta.array().abs()).exp();
        return (eta.array().max(0.0) + e.log1p() - y_.array() * eta.array()).sum() / n_;
    }

    double logistic_mean(const Eigen::VectorXd& eta) const
    {
        Eigen::ArrayXd e;
        return logistic_mean(eta, e);
    }

    // Moving eta to eta + d, the logistic loss curvature of observation i
    // never exceeds mu(1 - mu) at the point of the segment nearest zero.
    // Sets eta_new and e_new; returns sum_i w_i d_i^2.
    static double segment_curvature(const State& s, const Eigen::VectorXd& d, Eigen::VectorXd& eta_new,
        Eigen::ArrayXd& e_new)
    {
        eta_new = s.eta + d;
        e_new = (-eta_new.array().abs()).exp();
        const Eigen::ArrayXd near = s.expo.max(e_new);
        const Eigen::ArrayXd w = ((s.eta.array() >= 0.0) != (eta_new.array() >= 0.0))
            .select(Eigen::ArrayXd::Constant(near.size(), 0.25), near / (1.0 + near).square());
        return (w * d.array().square()).sum();
    }

    static void mu_from(const Eigen::VectorXd& eta, const Eigen::ArrayXd& e, Eigen::VectorXd& mu)
    {
        mu = (eta.array() >= 0.0).select(1.0 / (1.0 + e), e / (1.0 + e)).matrix();
    }

    double compute_lambda_max() const
    {
        double lmax = 0.0;
        for (std::size_t k = 0; k + 1 < start_.size(); ++k) {
            if (curvature_[k] == 0.0) continue;
            const Eigen::VectorXd gk = null_gradient_.segment(static_cast<Eigen::Index>(start_[k]),
                static_cast<Eigen::Index>(start_[k + 1] - start_[k]));
            double level;
            if (pen_.sparse_group) level = sparse_group_zero_level(gk, pen_.group_scale, pen_.l1_scale, pen_.weights[k]);
            else level = gk.norm() / pen_.weights[k];
            lmax = std::max(lmax, level);
        }
        return lmax;
    }

    // Proximal map of the block penalty at curvature c, applied to u in place.
    void prox(std::size_t k, double lambda, double c, Eigen::Ref<Eigen::VectorXd> u) const
    {
        if (pen_.sparse_group) {
            const double l2 = pen_.l1_scale * lambda / c;
            for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = soft_threshold(u[j], l2);
            const double norm = u.norm();
            const double l1 = pen_.group_scale * lambda * pen_.weights[k] / c;
            if (norm <= l1) u.setZero();
            else u *= 1.0 - l1 / norm;
            return;
        }
        const double norm = u.norm();
        if (norm == 0.0) return;
        const double shrunk = scalar_threshold(pen_.scalar_spec(lambda, k), norm, c);
        if (shrunk == 0.0) u.setZero();
        else u *= shrunk / norm;
    }

    // Minimize g'd + d'(t H)d / 2 + P(bk + d) over d by proximal steps,
    // returning bk + d. One step is exact for an uninflated singleton.
    Eigen::VectorXd block_step(std::size_t k, double lambda, double t, const Eigen::VectorXd& grad,
        const Eigen::VectorXd& bk) const
    {
        double c = t * curvature_[k];
        if (!pen_.sparse_group) c = well_posed_curvature(pen_.scalar_spec(lambda, k), c);
        const auto& h = hessian_[k];
        Eigen::VectorXd u = bk + grad / c;
        prox(k, lambda, c, u);
        const bool exact = bk.size() == 1 && c == t * h(0, 0);
        for (int inner = 1; !exact && inner < kInnerSteps; ++inner) {
            Eigen::VectorXd v = u + (grad - t * (h * (u - bk))) / c;
            prox(k, lambda, c, v);
            const double moved = (v - u).cwiseAbs().maxCoeff();
            u = std::move(v);
            if (moved < 0.1 * opts_.tol) break;
        }
        return u;
    }

    // Logistic blocks try a fraction t of the 1/4 curvature bound and keep
    // the step only if the segment curvature confirms the quadratic still
    // majorizes the loss; t doubles on rejection and t = 1 always holds.
    // Far from the decision boundary mu(1 - mu) is small, so steps grow.
    double sweep(double lambda, State& s, bool active_only) const
    {
        double max_change = 0.0;
        const bool logistic = loss_ == LossKind::Logistic;
        Eigen::VectorXd eta_new;
        Eigen::ArrayXd e_new;
        Eigen::VectorXd deta;
        for (std::size_t k = 0; k + 1 < start_.size(); ++k) {
            if (curvature_[k] == 0.0) continue;
            const auto off = static_cast<Eigen::Index>(start_[k]);
            const auto len = static_cast<Eigen::Index>(start_[k + 1] - start_[k]);
            auto bk = s.beta.segment(off, len);
            if (active_only && bk.isZero(0.0)) continue;

            const auto blk = block(k);
            Eigen::VectorXd grad;
            if (!logistic) grad = blk.transpose() * s.resid / n_;
            else grad = blk.transpose() * (y_ - s.mu) / n_;
            const Eigen::VectorXd b0 = bk;

            if (!logistic) {
                const Eigen::VectorXd delta = block_step(k, lambda, 1.0, grad, b0) - b0;
                const double change = delta.cwiseAbs().maxCoeff();
                if (change == 0.0) continue;
                max_change = std::max(max_change, change);
                bk += delta;
                s.resid.noalias() -= blk * delta;
                continue;
            }

            double t = s.scale[k];
            bool first = true;
            for (;;) {
                const Eigen::VectorXd delta = block_step(k, lambda, t, grad, b0) - b0;
                const double change = delta.cwiseAbs().maxCoeff();
                if (change == 0.0) break;
                deta.noalias() = blk * delta;
                const double bound = segment_curvature(s, deta, eta_new, e_new);
                if (t < 1.0 && bound > 0.25 * t * deta.squaredNorm()) {
                    t = std::min(1.0, 2.0 * t);
                    first = false;
                    continue;
                }
                max_change = std::max(max_change, change);
                bk += delta;
                s.eta.swap(eta_new);
                s.expo.swap(e_new);
                mu_from(s.eta, s.expo, s.mu);
                break;
            }
            s.scale[k] = first ? std::max(kMinScale, 0.5 * t) : t;
        }

        if (!logistic) {
            const double shift = s.resid.mean();
            s.intercept += shift;
            s.resid.array() -= shift;
            return std::max(max_change, std::abs(shift));
        }
        const double g0 = (y_ - s.mu).mean();
        double t = s.intercept_scale;
        bool first = true;
        for (;;) {
            const double step = g0 / (0.25 * t);
            if (step == 0.0) break;
            deta.setConstant(y_.size(), step);
            const double bound = segment_curvature(s, deta, eta_new, e_new);
            if (t < 1.0 && bound > 0.25 * t * deta.squaredNorm()) {
                t = std::min(1.0, 2.0 * t);
                first = false;
                continue;
            }
            s.intercept += step;
            s.eta.swap(eta_new);
            s.expo.swap(e_new);
            mu_from(s.eta, s.expo, s.mu);
            max_change = std::max(max_change, std::abs(step));
            break;
        }
        s.intercept_scale = first ? std::max(kMinScale, 0.5 * t) : t;
        return max_change;
    }
};

void record(FitResult& out, double lambda, const BlockEngine& engine, const BlockEngine::State& s,
    BlockEngine::Outcome outcome, const Partition& groups)
{
    out.lambdas.push_back(lambda);
    out.path.push_back(engine.to_coefficients(s, groups));
    out.loss_path.push_back(engine.loss(s));
    out.df_path.push_back(out.path.back().nonzero_count());
    out.converged.push_back(outcome.converged ? 1 : 0);
    out.iterations.push_back(outcome.iterations);
}

// The rest of the path is not computed once the fit is saturated: a
// logistic deviance under 1% of the null deviance (the data are nearly
// separable and the coefficients diverge) or as many nonzero
// coefficients as observations.
bool saturated(FitResult& out, LossKind loss, double null_loss, Eigen::Index n)
{
    const bool hit = (loss == LossKind::Logistic && out.loss_path.back() < 0.01 * null_loss) ||
        out.df_path.back() >= static_cast<std::size_t>(n);
    if (hit) out.saturated = true;
    return hit;
}

// Convex families run one warm-started chain. Nonconvex families start
// each lambda from the convex solution at the same lambda.
FitResult run_path(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss, const Partition& groups,
    const BlockPenalty& pen, std::span<const double> grid, const SolverOptions& opts)
{
    check_grid(grid);
    FitResult out;
    out.groups = groups;

    const bool nonconvex = !pen.sparse_group && pen.family != PenaltyFamily::Lasso;
    if (!nonconvex) {
        BlockEngine engine(z, y, loss, groups, pen, opts);
        auto state = engine.null_state();
        const double null_loss = engine.null_loss();
        for (double lambda : grid) {
            const auto outcome = engine.solve(lambda, state);
            record(out, lambda, engine, state, outcome, groups);
            if (saturated(out, loss, null_loss, z.rows())) break;
        }
        return out;
    }

    BlockPenalty convex_pen = pen;
    convex_pen.family = PenaltyFamily::Lasso;
    SolverOptions convex_opts = opts;
    convex_opts.objective_trace = nullptr;
    BlockEngine convex(z, y, loss, groups, convex_pen, convex_opts);
    BlockEngine engine(z, y, loss, groups, pen, opts);
    auto convex_state = convex.null_state();
    const double null_loss = convex.null_loss();
    for (double lambda : grid) {
        convex.solve(lambda, convex_state);
        auto state = convex_state;
        const auto outcome = engine.solve(lambda, state);
        record(out, lambda, engine, state, outcome, groups);
        if (saturated(out, loss, null_loss, z.rows())) break;
    }
    return out;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
    return out;
}

Eigen::VectorXd select_rows(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Eigen::Index>(r)] = v[static_cast<Eigen::Index>(rows[r])];
    return out;
}

template <class PathFn>
CvResult cross_validate_impl(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    std::span<const double> grid, const CvOptions& opts, PathFn&& fit_path)
{
    check_inputs(z, y, loss);
    check_grid(grid);
    const auto n = static_cast<std::size_t>(z.rows());
    if (opts.folds < 2) throw Error(ErrorCode::InvalidArgument, "cross-validation needs at least 2 folds");
    if (n < opts.folds) {
        throw Error(ErrorCode::TooFewObservations, std::to_string(n) + " observations cannot fill " +
            std::to_string(opts.folds) + " folds");
    }

    CvResult out;
    out.lambdas.assign(grid.begin(), grid.end());
    out.fold_of = assign_folds(n, opts.folds, opts.seed);
    const auto g_count = static_cast<Eigen::Index>(grid.size());
    out.fold_loss.resize(static_cast<Eigen::Index>(opts.folds), g_count);
    out.oof_predictions.resize(static_cast<Eigen::Index>(n), g_count);

    std::vector<std::size_t> reached(opts.folds, 0);
    parallel_for(opts.folds, opts.jobs, [&](std::size_t f) {
        std::vector<std::size_t> train, valid;
        for (std::size_t i = 0; i < n; ++i) (out.fold_of[i] == static_cast<int>(f) ? valid : train).push_back(i);
        const Eigen::MatrixXd z_train = select_rows(z, train);
        const Eigen::VectorXd y_train = select_rows(y, train);
        const Eigen::MatrixXd z_valid = select_rows(z, valid);
        const Eigen::VectorXd y_valid = select_rows(y, valid);
        const FitResult fit = fit_path(z_train, y_train);
        reached[f] = fit.size();
        for (Eigen::Index g = 0; g < static_cast<Eigen::Index>(fit.size()); ++g) {
            const Eigen::VectorXd pred = predict(z_valid, loss, fit.path[static_cast<std::size_t>(g)]);
            out.fold_loss(static_cast<Eigen::Index>(f), g) = validation_loss(loss, y_valid, pred);
            for (std::size_t r = 0; r < valid.size(); ++r) {
                out.oof_predictions(static_cast<Eigen::Index>(valid[r]), g) = pred[static_cast<Eigen::Index>(r)];
            }
        }
    });

    const std::size_t common = *std::min_element(reached.begin(), reached.end());
    if (common < grid.size()) {
        out.lambdas.resize(common);
        out.fold_loss.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(common));
        out.oof_predictions.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(common));
    }
    const double folds = static_cast<double>(opts.folds);
    out.mean_loss.resize(common);
    out.sd_loss.resize(common);
    for (Eigen::Index g = 0; g < static_cast<Eigen::Index>(common); ++g) {
        const auto col = out.fold_loss.col(g);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / (folds - 1.0);
        out.mean_loss[static_cast<std::size_t>(g)] = mean;
        out.sd_loss[static_cast<std::size_t>(g)] = std::sqrt(var);
    }
    out.best_index = 0;
    for (std::size_t g = 1; g < common; ++g) {
        if (out.mean_loss[g] < out.mean_loss[out.best_index]) out.best_index = g;
    }
    out.best_lambda = grid[out.best_index];
    return out;
}

} // namespace

FitResult fit_individual(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const PenaltySpec& spec, std::span<const double> lambda_grid, const SolverOptions& opts)
{
    const auto p = static_cast<std::size_t>(z.cols());
    return run_path(z, y, loss, Partition::singletons(p), make_block_penalty(spec, p), lambda_grid, opts);
}

FitResult fit_group(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const GroupPenaltySpec& spec, std::span<const double> lambda_grid,
    const SolverOptions& opts)
{
    return run_path(z, y, loss, groups, make_block_penalty(spec, groups), lambda_grid, opts);
}

FitResult fit_sparse_group(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, double alpha, std::span<const double> lambda_grid,
    const SolverOptions& opts, std::vector<double> group_weights)
{
    GroupPenaltySpec spec = GroupPenaltySpec::sgl(alpha);
    spec.group_weights = std::move(group_weights);
    return fit_group(z, y, loss, groups, spec, lambda_grid, opts);
}

Coefficients fit_sparse_group_at(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, double lambda1, double lambda2, const SolverOptions& opts,
    std::vector<double> group_weights)
{
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw Error(ErrorCode::InvalidSpec, "lambda1 and lambda2 must be nonnegative");
    GroupPenaltySpec spec = GroupPenaltySpec::sgl(0.5);
    spec.group_weights = std::move(group_weights);
    BlockPenalty pen = make_block_penalty(spec, groups);
    pen.group_scale = lambda1;
    pen.l1_scale = lambda2;
    BlockEngine engine(z, y, loss, groups, pen, opts);
    auto state = engine.null_state();
    engine.solve(1.0, state);
    return engine.to_coefficients(state, groups);
}

double lambda_max(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss, const PenaltySpec& spec)
{
    const auto p = static_cast<std::size_t>(z.cols());
    return BlockEngine(z, y, loss, Partition::singletons(p), make_block_penalty(spec, p), {}).lambda_max();
}

double lambda_max(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const GroupPenaltySpec& spec)
{
    return BlockEngine(z, y, loss, groups, make_block_penalty(spec, groups), {}).lambda_max();
}

Eigen::VectorXd predict(const Eigen::MatrixXd& z, LossKind loss, const Coefficients& coef)
{
    if (z.cols() != coef.beta.size()) throw Error(ErrorCode::DimensionMismatch, "coefficients do not match the design");
    Eigen::VectorXd eta = z * coef.beta;
    eta.array() += coef.intercept;
    if (loss == LossKind::Logistic) eta = eta.unaryExpr([](double e) { return sigmoid(e); });
    return eta;
}

double loss_value(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss, const Coefficients& coef)
{
    check_inputs(z, y, loss);
    Eigen::VectorXd eta = z * coef.beta;
    eta.array() += coef.intercept;
    const double n = static_cast<double>(y.size());
    if (loss == LossKind::SquaredError) return (y - eta).squaredNorm() / (2.0 * n);
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) total += logistic_term(eta[i], y[i]);
    return total / n;
}

Eigen::VectorXd loss_gradient(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss, const Coefficients& coef)
{
    const Eigen::VectorXd fitted = predict(z, loss, coef);
    return -z.transpose() * (y - fitted) / static_cast<double>(y.size());
}

double penalized_objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Coefficients& coef, const PenaltySpec& spec)
{
    double pen = 0.0;
    for (Eigen::Index j = 0; j < coef.beta.size(); ++j) pen += penalty_value(spec, coef.beta[j]);
    return loss_value(z, y, loss, coef) + pen;
}

double penalized_objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const Coefficients& coef, const GroupPenaltySpec& spec)
{
    spec.validate(groups.cluster_count());
    const auto w = spec.weights_for(groups);
    const auto members = groups.members();
    double pen = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
        double sq = 0.0, l1 = 0.0;
        for (auto j : members[k]) {
            const double b = coef.beta[static_cast<Eigen::Index>(j)];
            sq += b * b;
            l1 += std::abs(b);
        }
        const double norm = std::sqrt(sq);
        switch (spec.family) {
            case GroupFamily::GrLasso: pen += spec.lambda * w[k] * norm; break;
            case GroupFamily::GrSCAD: pen += penalty_value(PenaltySpec::scad(spec.lambda * w[k], spec.gamma), norm); break;
            case GroupFamily::GrMCP: pen += penalty_value(PenaltySpec::mcp(spec.lambda * w[k], spec.gamma), norm); break;
            case GroupFamily::SGL: pen += spec.alpha * spec.lambda * w[k] * norm + (1.0 - spec.alpha) * spec.lambda * l1; break;
        }
    }
    return loss_value(z, y, loss, coef) + pen;
}

double kkt_residual(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const Coefficients& coef, const GroupPenaltySpec& spec)
{
    spec.validate(groups.cluster_count());
    const auto w = spec.weights_for(groups);
    const Eigen::VectorXd fitted = predict(z, loss, coef);
    const Eigen::VectorXd resid = y - fitted;
    const Eigen::VectorXd grad = -z.transpose() * resid / static_cast<double>(y.size());

    double worst = std::abs(resid.mean());
    const auto members = groups.members();
    for (std::size_t k = 0; k < members.size(); ++k) {
        const auto& idx = members[k];
        Eigen::VectorXd gk(static_cast<Eigen::Index>(idx.size())), bk(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t t = 0; t < idx.size(); ++t) {
            gk[static_cast<Eigen::Index>(t)] = grad[static_cast<Eigen::Index>(idx[t])];
            bk[static_cast<Eigen::Index>(t)] = coef.beta[static_cast<Eigen::Index>(idx[t])];
        }
        const double nb = bk.norm();
        double violation = 0.0;
        if (spec.family == GroupFamily::SGL) {
            const double l1 = spec.alpha * spec.lambda * w[k];
            const double l2 = (1.0 - spec.alpha) * spec.lambda;
            if (nb == 0.0) {
                Eigen::VectorXd s = gk.unaryExpr([l2](double g) { return soft_threshold(g, l2); });
                violation = std::max(0.0, s.norm() - l1);
            } else {
                Eigen::VectorXd res(gk.size());
                for (Eigen::Index j = 0; j < gk.size(); ++j) {
                    if (bk[j] != 0.0) res[j] = gk[j] + l1 * bk[j] / nb + l2 * (bk[j] > 0.0 ? 1.0 : -1.0);
                    else res[j] = soft_threshold(gk[j], l2);
                }
                violation = res.norm();
            }
        } else {
            const double level = spec.lambda * w[k];
            if (nb == 0.0) {
                violation = std::max(0.0, gk.norm() - level);
            } else {
                PenaltySpec scalar{PenaltyFamily::Lasso, level, spec.gamma};
                if (spec.family == GroupFamily::GrSCAD) scalar.family = PenaltyFamily::SCAD;
                if (spec.family == GroupFamily::GrMCP) scalar.family = PenaltyFamily::MCP;
                const double d = penalty_derivative(scalar, nb);
                violation = (gk + d * bk / nb).norm();
            }
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

double kkt_residual(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Coefficients& coef, const PenaltySpec& spec)
{
    GroupPenaltySpec gspec;
    gspec.lambda = spec.lambda;
    gspec.gamma = spec.gamma;
    switch (spec.family) {
        case PenaltyFamily::Lasso: gspec.family = GroupFamily::GrLasso; break;
        case PenaltyFamily::SCAD: gspec.family = GroupFamily::GrSCAD; break;
        case PenaltyFamily::MCP: gspec.family = GroupFamily::GrMCP; break;
    }
    const auto p = static_cast<std::size_t>(z.cols());
    gspec.group_weights.assign(p, 1.0);
    const auto groups = Partition::singletons(p);
    Coefficients c = Coefficients::make(coef.intercept, coef.beta, groups);
    return kkt_residual(z, y, loss, groups, c, gspec);
}

double validation_loss(LossKind loss, const Eigen::VectorXd& y, const Eigen::VectorXd& prediction)
{
    if (y.size() != prediction.size()) throw Error(ErrorCode::SizeMismatch, "prediction length does not match the response");
    const double n = static_cast<double>(y.size());
    if (loss == LossKind::SquaredError) return std::sqrt((y - prediction).squaredNorm() / n);
    constexpr double eps = 1e-15;
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double p = std::clamp(prediction[i], eps, 1.0 - eps);
        total += y[i] > 0.5 ? -std::log(p) : -std::log(1.0 - p);
    }
    return 2.0 * total / n;
}

std::vector<int> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed)
{
    if (folds == 0) throw Error(ErrorCode::InvalidArgument, "fold count must be positive");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold_of(n);
    for (std::size_t r = 0; r < n; ++r) fold_of[order[r]] = static_cast<int>(r % folds);
    return fold_of;
}

CvResult cross_validate(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const Partition& groups, const GroupPenaltySpec& spec, std::span<const double> lambda_grid,
    const CvOptions& opts)
{
    spec.validate(groups.cluster_count());
    return cross_validate_impl(z, y, loss, lambda_grid, opts, [&](const Eigen::MatrixXd& zt, const Eigen::VectorXd& yt) {
        return fit_group(zt, yt, loss, groups, spec, lambda_grid, opts.solver);
    });
}

CvResult cross_validate(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, LossKind loss,
    const PenaltySpec& spec, std::span<const double> lambda_grid, const CvOptions& opts)
{
    spec.validate();
    return cross_validate_impl(z, y, loss, lambda_grid, opts, [&](const Eigen::MatrixXd& zt, const Eigen::VectorXd& yt) {
        return fit_individual(zt, yt, loss, spec, lambda_grid, opts.solver);
    });
}

} // namespace grpsel
