#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <grpsel/core_data.hpp>
#include <grpsel/error.hpp>
#include <grpsel/solvers.hpp>

#include "helpers.hpp"

using namespace grpsel;

namespace {

struct Problem
{
    Eigen::MatrixXd z;
    Eigen::VectorXd y;
};

Problem regression(Eigen::Index n, Eigen::Index p, std::uint64_t seed, double noise = 1.0)
{
    Problem pr;
    pr.z = standardize(testutil::quantitative_dataset(testutil::gaussian_matrix(n, p, seed))).z;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(p, 3); ++j) b[j] = 1.5 - 0.5 * static_cast<double>(j);
    pr.y = testutil::linear_response(pr.z, b, noise, seed + 1000);
    return pr;
}

Problem classification(Eigen::Index n, Eigen::Index p, std::uint64_t seed)
{
    Problem pr;
    pr.z = standardize(testutil::quantitative_dataset(testutil::gaussian_matrix(n, p, seed))).z;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    b[0] = 1.0;
    if (p > 1) b[1] = -0.8;
    pr.y = testutil::bernoulli_response(pr.z, b, seed + 2000);
    return pr;
}

Partition blocks(std::vector<int> sizes)
{
    std::vector<int> labels;
    for (std::size_t k = 0; k < sizes.size(); ++k) labels.insert(labels.end(), static_cast<std::size_t>(sizes[k]), static_cast<int>(k));
    return Partition(labels);
}

std::vector<double> grid_for(const Problem& pr, LossKind loss, const Partition& groups, const GroupPenaltySpec& spec,
    std::size_t count = 30)
{
    return make_lambda_grid(lambda_max(pr.z, pr.y, loss, groups, spec), count, 0.01);
}

} // namespace

TEST_SUITE("solvers") {

TEST_CASE("lambda above lambda_max gives the null model")
{
    const auto pr = regression(40, 6, 1);
    const double lmax = lambda_max(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::lasso(0));
    const std::vector<double> grid{2.0 * lmax, 1.001 * lmax};
    const auto fit = fit_individual(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::lasso(0), grid);
    for (const auto& c : fit.path) {
        CHECK(c.beta.isZero(0.0));
        CHECK(c.intercept == doctest::Approx(pr.y.mean()));
    }
    const auto pc = classification(60, 4, 2);
    const auto groups = blocks({2, 2});
    for (auto spec : {GroupPenaltySpec::gr_lasso(), GroupPenaltySpec::gr_scad(), GroupPenaltySpec::gr_mcp(), GroupPenaltySpec::sgl()}) {
        const double lm = lambda_max(pc.z, pc.y, LossKind::Logistic, groups, spec);
        const std::vector<double> g{1.001 * lm, 0.9 * lm};
        const auto f = fit_group(pc.z, pc.y, LossKind::Logistic, groups, spec, g);
        CHECK(f.df_path[0] == 0);
        CHECK(f.df_path[1] > 0);
    }
}

TEST_CASE("lambda = 0 reproduces least squares")
{
    const auto pr = regression(50, 5, 3);
    const std::vector<double> grid{0.0};
    const auto fit = fit_individual(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::lasso(0), grid);
    Eigen::MatrixXd design(50, 6);
    design.col(0).setOnes();
    design.rightCols(5) = pr.z;
    const Eigen::VectorXd ols = design.colPivHouseholderQr().solve(pr.y);
    CHECK(std::abs(fit.path[0].intercept - ols[0]) < 1e-6);
    CHECK((fit.path[0].beta - ols.tail(5)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(fit.converged[0] == 1);
}

TEST_CASE("lasso solution beats random perturbations")
{
    const auto pr = regression(20, 5, 4);
    const auto spec = PenaltySpec::lasso(0.1);
    const std::vector<double> grid{0.1};
    SolverOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 100000;
    const auto fit = fit_individual(pr.z, pr.y, LossKind::SquaredError, spec, grid, opts);
    const auto& sol = fit.path[0];
    const double best = penalized_objective(pr.z, pr.y, LossKind::SquaredError, sol, spec);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    int worse = 0;
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) {
        const double scale = std::pow(10.0, -1.0 - 4.0 * (t % 5) / 4.0);
        Coefficients c = sol;
        c.intercept += scale * nd(rng);
        for (Eigen::Index j = 0; j < c.beta.size(); ++j) c.beta[j] += scale * nd(rng);
        if (penalized_objective(pr.z, pr.y, LossKind::SquaredError, c, spec) >= best - 1e-13) ++worse;
    }
    CHECK(worse == draws);
}

TEST_CASE("group lasso with singleton groups is the lasso path")
{
    const auto pr = regression(40, 8, 5);
    const auto groups = Partition::singletons(8);
    const auto gspec = GroupPenaltySpec::gr_lasso();
    const auto grid = grid_for(pr, LossKind::SquaredError, groups, gspec);
    const auto a = fit_group(pr.z, pr.y, LossKind::SquaredError, groups, gspec, grid);
    const auto b = fit_individual(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::lasso(0), grid);
    REQUIRE(a.size() == b.size());
    for (std::size_t g = 0; g < a.size(); ++g) CHECK((a.path[g].beta - b.path[g].beta).cwiseAbs().maxCoeff() < 1e-8);
    // Same for individual and group MCP.
    const auto c = fit_group(pr.z, pr.y, LossKind::SquaredError, groups, GroupPenaltySpec::gr_mcp(), grid);
    const auto d = fit_individual(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::mcp(0), grid);
    for (std::size_t g = 0; g < c.size(); ++g) CHECK((c.path[g].beta - d.path[g].beta).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("a single group is selected all or nothing")
{
    const auto pr = regression(30, 5, 6);
    const auto groups = Partition::single_block(5);
    const auto spec = GroupPenaltySpec::gr_lasso();
    const auto grid = grid_for(pr, LossKind::SquaredError, groups, spec);
    const auto fit = fit_group(pr.z, pr.y, LossKind::SquaredError, groups, spec, grid);
    for (const auto& c : fit.path) {
        const auto nz = c.nonzero_count();
        CHECK((nz == 0 || nz == 5));
    }
    CHECK(fit.df_path.back() == 5);
}

TEST_CASE("group fits satisfy the KKT conditions")
{
    const auto groups = blocks({3, 3});
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        const auto pr = regression(30, 6, seed);
        const auto pc = classification(60, 6, seed);
        for (auto spec : {GroupPenaltySpec::gr_lasso(), GroupPenaltySpec::gr_scad(), GroupPenaltySpec::gr_mcp(), GroupPenaltySpec::sgl(0.3)}) {
            for (const auto* p : {&pr, &pc}) {
                const LossKind loss = p == &pr ? LossKind::SquaredError : LossKind::Logistic;
                const auto grid = grid_for(*p, loss, groups, spec, 20);
                const auto fit = fit_group(p->z, p->y, loss, groups, spec, grid);
                for (std::size_t g = 0; g < fit.size(); ++g) {
                    if (!fit.converged[g]) continue;
                    auto s = spec;
                    s.lambda = fit.lambdas[g];
                    CAPTURE(seed);
                    CAPTURE(g);
                    CHECK(kkt_residual(p->z, p->y, loss, groups, fit.path[g], s) < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("sparse group lasso reduces to lasso and group lasso")
{
    const auto pr = regression(40, 6, 21);
    const auto groups = blocks({2, 4});
    SolverOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 200000;
    for (double lam : {0.05, 0.2}) {
        const auto sgl_l1 = fit_sparse_group_at(pr.z, pr.y, LossKind::SquaredError, groups, 0.0, lam, opts);
        const std::vector<double> grid{lam};
        const auto lasso = fit_individual(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::lasso(0), grid, opts);
        CHECK((sgl_l1.beta - lasso.path[0].beta).cwiseAbs().maxCoeff() < 1e-8);

        const auto sgl_l2 = fit_sparse_group_at(pr.z, pr.y, LossKind::SquaredError, groups, lam, 0.0, opts, {1.0, 1.0});
        auto spec = GroupPenaltySpec::gr_lasso();
        spec.group_weights = {1.0, 1.0};
        const auto grl = fit_group(pr.z, pr.y, LossKind::SquaredError, groups, spec, grid, opts);
        CHECK((sgl_l2.beta - grl.path[0].beta).cwiseAbs().maxCoeff() < 1e-8);
    }
    const auto zero = fit_sparse_group_at(pr.z, pr.y, LossKind::SquaredError, groups, 1e6, 1e6);
    CHECK(zero.beta.isZero(0.0));
}

TEST_CASE("lambda_max identities")
{
    auto pr = regression(35, 7, 31);
    pr.y.array() -= pr.y.mean();
    const double lm = lambda_max(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::lasso(0));
    CHECK(lm == doctest::Approx((pr.z.transpose() * pr.y).cwiseAbs().maxCoeff() / 35.0).epsilon(1e-12));
    const Eigen::VectorXd y2 = 2.0 * pr.y;
    CHECK(lambda_max(pr.z, y2, LossKind::SquaredError, PenaltySpec::lasso(0)) == doctest::Approx(2.0 * lm).epsilon(1e-12));

    for (std::uint64_t seed = 40; seed < 45; ++seed) {
        const auto q = regression(30, 6, seed);
        const auto groups = blocks({1, 2, 3});
        for (auto spec : {GroupPenaltySpec::gr_lasso(), GroupPenaltySpec::gr_mcp(), GroupPenaltySpec::sgl(0.5)}) {
            const double l = lambda_max(q.z, q.y, LossKind::SquaredError, groups, spec);
            const std::vector<double> grid{1.001 * l, 0.9 * l};
            const auto fit = fit_group(q.z, q.y, LossKind::SquaredError, groups, spec, grid);
            CHECK(fit.df_path[0] == 0);
            CHECK(fit.df_path[1] > 0);
        }
    }
}

TEST_CASE("path invariants")
{
    const auto pr = regression(40, 6, 51);
    const auto groups = blocks({3, 3});
    const auto spec = GroupPenaltySpec::gr_lasso();
    const auto grid = grid_for(pr, LossKind::SquaredError, groups, spec);
    const auto fit = fit_group(pr.z, pr.y, LossKind::SquaredError, groups, spec, grid);
    for (std::size_t g = 1; g < fit.size(); ++g) CHECK(fit.lambdas[g] < fit.lambdas[g - 1]);
    CHECK(fit.df_path[0] == 0);
    CHECK(fit.path[0].beta.isZero(0.0));
    CHECK(fit.lambdas[0] == doctest::Approx(lambda_max(pr.z, pr.y, LossKind::SquaredError, groups, spec)));

    const auto lg = make_lambda_grid(2.0, 100, 0.001);
    CHECK(lg.size() == 100);
    CHECK(lg.front() == 2.0);
    CHECK(lg.back() == doctest::Approx(0.002));
    CHECK(default_min_ratio(100, 30) == 0.001);
    CHECK(default_min_ratio(100, 300) == 0.05);
}

TEST_CASE("penalized objective never increases across sweeps")
{
    const auto groups = blocks({2, 3, 3});
    const auto pr = regression(40, 8, 61);
    const auto pc = classification(80, 8, 62);
    for (auto spec : {GroupPenaltySpec::gr_lasso(), GroupPenaltySpec::gr_scad(), GroupPenaltySpec::gr_mcp(), GroupPenaltySpec::sgl(0.5)}) {
        const bool convex = spec.family == GroupFamily::GrLasso || spec.family == GroupFamily::SGL;
        for (const auto* p : {&pr, &pc}) {
            const LossKind loss = p == &pr ? LossKind::SquaredError : LossKind::Logistic;
            const double lm = lambda_max(p->z, p->y, loss, groups, spec);
            for (double frac : {0.5, 0.1, 0.02}) {
                std::vector<double> trace;
                SolverOptions opts;
                opts.objective_trace = &trace;
                const std::vector<double> grid{frac * lm};
                fit_group(p->z, p->y, loss, groups, spec, grid, opts);
                REQUIRE(!trace.empty());
                const double tol = convex ? 1e-10 : 1e-8;
                for (std::size_t t = 1; t < trace.size(); ++t) {
                    CAPTURE(t);
                    CHECK(trace[t] <= trace[t - 1] + tol);
                }
            }
        }
    }
    // Individual penalties too.
    for (auto spec : {PenaltySpec::lasso(0), PenaltySpec::scad(0), PenaltySpec::mcp(0)}) {
        std::vector<double> trace;
        SolverOptions opts;
        opts.objective_trace = &trace;
        const std::vector<double> grid{0.05};
        fit_individual(pc.z, pc.y, LossKind::Logistic, spec, grid, opts);
        for (std::size_t t = 1; t < trace.size(); ++t) CHECK(trace[t] <= trace[t - 1] + 1e-8);
    }
}

TEST_CASE("warm-started convex paths move continuously")
{
    const auto pr = regression(60, 8, 71);
    const auto groups = blocks({4, 4});
    for (auto spec : {GroupPenaltySpec::gr_lasso(), GroupPenaltySpec::sgl(0.5)}) {
        const double lm = lambda_max(pr.z, pr.y, LossKind::SquaredError, groups, spec);
        std::vector<double> grid;
        for (double l = lm; l > 0.01 * lm; l *= 0.995) grid.push_back(l);
        const auto fit = fit_group(pr.z, pr.y, LossKind::SquaredError, groups, spec, grid);
        double max_norm = 0.0;
        for (const auto& c : fit.path) max_norm = std::max(max_norm, c.beta.norm());
        for (std::size_t g = 1; g < fit.size(); ++g) {
            const double a = fit.path[g - 1].beta.norm();
            const double b = fit.path[g].beta.norm();
            CHECK((fit.path[g - 1].beta - fit.path[g].beta).norm() < 0.05 * max_norm);
            CHECK(std::abs(a - b) < 0.05 * max_norm);
        }
    }
    const auto lasso_grid = make_lambda_grid(lambda_max(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::lasso(0)), 400, 0.01);
    const auto lasso = fit_individual(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::lasso(0), lasso_grid);
    double max_norm = 0.0;
    for (const auto& c : lasso.path) max_norm = std::max(max_norm, c.beta.norm());
    for (std::size_t g = 1; g < lasso.size(); ++g) {
        CHECK((lasso.path[g - 1].beta - lasso.path[g].beta).norm() < 0.05 * max_norm);
    }
}

TEST_CASE("logistic gradient matches finite differences")
{
    for (std::uint64_t seed = 80; seed < 85; ++seed) {
        const auto pc = classification(30, 4, seed);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd;
        Eigen::VectorXd b(4);
        for (int j = 0; j < 4; ++j) b[j] = 0.5 * nd(rng);
        const auto groups = Partition::singletons(4);
        const auto c = Coefficients::make(0.3, b, groups);
        const Eigen::VectorXd g = loss_gradient(pc.z, pc.y, LossKind::Logistic, c);
        const double h = 1e-6;
        for (int j = 0; j < 4; ++j) {
            Eigen::VectorXd bp = b, bm = b;
            bp[j] += h;
            bm[j] -= h;
            const double fd = (loss_value(pc.z, pc.y, LossKind::Logistic, Coefficients::make(0.3, bp, groups)) -
                                  loss_value(pc.z, pc.y, LossKind::Logistic, Coefficients::make(0.3, bm, groups))) / (2 * h);
            CHECK(std::abs(fd - g[j]) < 1e-5);
        }
    }
}

TEST_CASE("permuting variables permutes the solution")
{
    const auto pr = regression(40, 6, 91);
    const auto groups = Partition({0, 0, 1, 1, 2, 2});
    const std::vector<int> perm{4, 2, 0, 5, 1, 3};
    Eigen::MatrixXd zp(40, 6);
    std::vector<int> labels(6);
    for (int c = 0; c < 6; ++c) {
        zp.col(c) = pr.z.col(perm[c]);
        labels[static_cast<std::size_t>(c)] = groups.label(static_cast<std::size_t>(perm[c]));
    }
    const Partition gp(labels);
    for (auto spec : {GroupPenaltySpec::gr_lasso(), GroupPenaltySpec::gr_mcp(), GroupPenaltySpec::sgl()}) {
        const std::vector<double> grid{0.2, 0.05};
        SolverOptions opts;
        opts.tol = 1e-11;
        opts.max_iter = 100000;
        const auto a = fit_group(pr.z, pr.y, LossKind::SquaredError, groups, spec, grid, opts);
        const auto b = fit_group(zp, pr.y, LossKind::SquaredError, gp, spec, grid, opts);
        for (std::size_t g = 0; g < grid.size(); ++g)
            for (int c = 0; c < 6; ++c) CHECK(std::abs(b.path[g].beta[c] - a.path[g].beta[perm[c]]) < 1e-8);
    }
}

TEST_CASE("cross-validation on a pure-noise response prefers sparse models")
{
    int sparse_side = 0;
    const int runs = 100;
    for (int s = 0; s < runs; ++s) {
        const Eigen::MatrixXd z = standardize(testutil::quantitative_dataset(testutil::gaussian_matrix(50, 8, 500 + s))).z;
        const Eigen::VectorXd y = testutil::gaussian_matrix(50, 1, 900 + s).col(0);
        const auto groups = blocks({2, 2, 2, 2});
        const auto spec = GroupPenaltySpec::gr_lasso();
        const auto grid = make_lambda_grid(lambda_max(z, y, LossKind::SquaredError, groups, spec), 20, 0.01);
        CvOptions opts;
        opts.seed = static_cast<std::uint64_t>(s);
        const auto cv = cross_validate(z, y, LossKind::SquaredError, groups, spec, grid, opts);
        if (cv.best_index < grid.size() / 4) ++sparse_side;
    }
    CHECK(sparse_side >= 80);
}

TEST_CASE("cross-validation loss is per observation")
{
    const auto pr = regression(40, 5, 101);
    Eigen::MatrixXd z2(80, 5);
    z2 << pr.z, pr.z;
    Eigen::VectorXd y2(80);
    y2 << pr.y, pr.y;
    const auto groups = Partition::singletons(5);
    const auto spec = GroupPenaltySpec::gr_lasso();
    const auto grid = make_lambda_grid(lambda_max(pr.z, pr.y, LossKind::SquaredError, groups, spec), 10, 0.01);
    const auto a = cross_validate(pr.z, pr.y, LossKind::SquaredError, groups, spec, grid);
    const auto b = cross_validate(z2, y2, LossKind::SquaredError, groups, spec, grid);
    CHECK(b.mean_loss[0] == doctest::Approx(a.mean_loss[0]).epsilon(0.25));
    CHECK(b.mean_loss[5] == doctest::Approx(a.mean_loss[5]).epsilon(0.25));
}

TEST_CASE("leave-one-out cross-validation matches an explicit loop")
{
    const auto pr = regression(12, 3, 111);
    const auto groups = Partition::singletons(3);
    const auto spec = GroupPenaltySpec::gr_lasso();
    const auto grid = make_lambda_grid(lambda_max(pr.z, pr.y, LossKind::SquaredError, groups, spec), 8, 0.01);
    CvOptions opts;
    opts.folds = 12;
    const auto cv = cross_validate(pr.z, pr.y, LossKind::SquaredError, groups, spec, grid, opts);
    REQUIRE(cv.mean_loss.size() == grid.size());
    std::vector<double> oracle(grid.size(), 0.0);
    for (int i = 0; i < 12; ++i) {
        Eigen::MatrixXd zt(11, 3);
        Eigen::VectorXd yt(11);
        for (int r = 0, k = 0; r < 12; ++r) {
            if (r == i) continue;
            zt.row(k) = pr.z.row(r);
            yt[k++] = pr.y[r];
        }
        const auto fit = fit_group(zt, yt, LossKind::SquaredError, groups, spec, grid);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const double pred = fit.path[g].intercept + pr.z.row(i).dot(fit.path[g].beta);
            oracle[g] += std::abs(pr.y[i] - pred) / 12.0;
        }
    }
    for (std::size_t g = 0; g < grid.size(); ++g) CHECK(std::abs(cv.mean_loss[g] - oracle[g]) < 1e-10);
    // Tie-breaking toward larger lambda: best is the first minimum.
    const auto m = std::min_element(cv.mean_loss.begin(), cv.mean_loss.end());
    CHECK(cv.best_index == static_cast<std::size_t>(m - cv.mean_loss.begin()));
}

TEST_CASE("fold assignment is seeded and balanced")
{
    const auto a = assign_folds(23, 5, 7);
    CHECK(a == assign_folds(23, 5, 7));
    CHECK(a != assign_folds(23, 5, 8));
    std::vector<int> counts(5, 0);
    for (int f : a) ++counts[static_cast<std::size_t>(f)];
    CHECK(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()) <= 1);
}

TEST_CASE("separable logistic data saturate the path")
{
    Eigen::MatrixXd x = testutil::gaussian_matrix(40, 3, 121);
    Eigen::VectorXd y(40);
    for (int i = 0; i < 40; ++i) y[i] = x(i, 0) > 0 ? 1.0 : 0.0;
    const Eigen::MatrixXd z = standardize(testutil::quantitative_dataset(x)).z;
    const auto groups = Partition::singletons(3);
    const auto spec = GroupPenaltySpec::gr_lasso();
    const auto grid = make_lambda_grid(lambda_max(z, y, LossKind::Logistic, groups, spec), 100, 0.0001);
    const auto fit = fit_group(z, y, LossKind::Logistic, groups, spec, grid);
    CHECK(fit.saturated);
    CHECK(fit.size() < grid.size());
    CHECK(fit.loss_path.back() < 0.01 * fit.loss_path.front());
    CvOptions opts;
    opts.folds = 5;
    const auto cv = cross_validate(z, y, LossKind::Logistic, groups, spec, grid, opts);
    CHECK(cv.lambdas.size() <= grid.size());
    CHECK(cv.mean_loss.size() == cv.lambdas.size());
    CHECK(cv.oof_predictions.cols() == static_cast<Eigen::Index>(cv.lambdas.size()));
}

TEST_CASE("solver input errors")
{
    const auto pr = regression(20, 4, 131);
    const Eigen::VectorXd short_y = pr.y.head(10);
    const std::vector<double> grid{0.1};
    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::NumericalFailure;
    };
    CHECK(code([&] { fit_individual(pr.z, short_y, LossKind::SquaredError, PenaltySpec::lasso(0), grid); }) == ErrorCode::DimensionMismatch);
    CHECK(code([&] { fit_individual(pr.z, pr.y, LossKind::Logistic, PenaltySpec::lasso(0), grid); }) == ErrorCode::NonBinaryResponse);
    CHECK(code([&] { fit_group(pr.z, pr.y, LossKind::SquaredError, Partition::singletons(3), GroupPenaltySpec::gr_lasso(), grid); }) ==
        ErrorCode::DimensionMismatch);
    const std::vector<double> bad{0.1, 0.2};
    CHECK(code([&] { fit_individual(pr.z, pr.y, LossKind::SquaredError, PenaltySpec::lasso(0), bad); }) == ErrorCode::InvalidArgument);
    CvOptions opts;
    opts.folds = 30;
    CHECK(code([&] { cross_validate(pr.z, pr.y, LossKind::SquaredError, Partition::singletons(4), GroupPenaltySpec::gr_lasso(), grid, opts); }) ==
        ErrorCode::TooFewObservations);
    auto spec = GroupPenaltySpec::gr_mcp(1.0);
    CHECK(code([&] { spec.validate(2); }) == ErrorCode::InvalidSpec);
}

} // TEST_SUITE
