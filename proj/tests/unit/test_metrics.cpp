#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <grpsel/error.hpp>
#include <grpsel/metrics.hpp>

#include "helpers.hpp"

using namespace grpsel;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

// All-pairs concordance, ties counted as one half.
double auc_oracle(const Eigen::VectorXd& y, const Eigen::VectorXd& s)
{
    double num = 0, den = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 1.0) continue;
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            if (y[j] != 0.0) continue;
            den += 1;
            num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    }
    return num / den;
}

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::NumericalFailure;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("rmse")
{
    const auto y = vec({1, 2, 3});
    CHECK(rmse(y, y) == 0.0);
    CHECK(rmse(vec({0, 0}), vec({3, 4})) == doctest::Approx(3.5355339059327378).epsilon(1e-15));
    const auto a = vec({1.5, -2, 7}), b = vec({0.5, 1, 6});
    CHECK(rmse((a.array() + 10).matrix(), (b.array() + 10).matrix()) == doctest::Approx(rmse(a, b)).epsilon(1e-14));
    CHECK(rmse(a, b) > 0.0);
    CHECK(code_of([&] { rmse(a, vec({1, 2})); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("selection metrics")
{
    const auto truth = SelectionTruth::from_active({0, 1, 2}, 5);
    CHECK(truth.inactive == std::vector<std::size_t>{3, 4});
    const std::vector<std::size_t> sel{0, 1, 3};
    auto m = selection_metrics(truth, sel);
    CHECK(m.sensitivity == doctest::Approx(2.0 / 3.0));
    CHECK(m.specificity == doctest::Approx(0.5));
    m = selection_metrics(truth, sel, true);
    CHECK(m.sensitivity == doctest::Approx(2.0 / 5.0));
    CHECK(m.specificity == doctest::Approx(1.0 / 5.0));

    const std::vector<std::size_t> perfect{0, 1, 2}, all{0, 1, 2, 3, 4};
    CHECK(selection_metrics(truth, perfect).sensitivity == 1.0);
    CHECK(selection_metrics(truth, perfect).specificity == 1.0);
    CHECK(selection_metrics(truth, all).sensitivity == 1.0);
    CHECK(selection_metrics(truth, all).specificity == 0.0);

    // Consistent relabeling leaves the values unchanged.
    const std::vector<std::size_t> perm{4, 2, 0, 1, 3};
    const auto relabeled = SelectionTruth::from_active({perm[0], perm[1], perm[2]}, 5);
    const std::vector<std::size_t> sel2{perm[0], perm[1], perm[3]};
    CHECK(selection_metrics(relabeled, sel2).sensitivity == doctest::Approx(2.0 / 3.0));
    CHECK(selection_metrics(relabeled, sel2).specificity == doctest::Approx(0.5));

    CHECK(code_of([&] { selection_metrics(SelectionTruth::from_active({}, 4), sel); }) == ErrorCode::EmptyActiveSet);
    const std::vector<std::size_t> bad{7};
    CHECK_THROWS_AS(selection_metrics(truth, bad), Error);
}

TEST_CASE("classification metrics")
{
    const auto y = vec({1, 0, 1, 1, 0, 0, 1, 0});
    const auto perfect = classification_metrics(y, y);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.sensitivity == 1.0);
    CHECK(perfect.specificity == 1.0);
    CHECK(perfect.auc == 1.0);
    CHECK(auc(y, Eigen::VectorXd::Constant(8, 0.5)) == doctest::Approx(0.5));

    const auto s = vec({0.9, 0.3, 0.6, 0.4, 0.4, 0.7, 0.2, 0.1});
    CHECK(auc(y, s) == doctest::Approx(auc_oracle(y, s)).epsilon(1e-15));
    const auto m = classification_metrics(y, s);
    // At 0.5: predicted positive = {0, 2, 5}.
    CHECK(m.accuracy == doctest::Approx(5.0 / 8.0));
    CHECK(m.sensitivity == doctest::Approx(2.0 / 4.0));
    CHECK(m.specificity == doctest::Approx(3.0 / 4.0));
    CHECK(classification_metrics(y, s, 0.35).sensitivity == doctest::Approx(3.0 / 4.0));

    // Invariance under strictly increasing transforms.
    const Eigen::VectorXd t = (s.array() * 3.0).exp();
    CHECK(auc(y, t) == doctest::Approx(auc(y, s)).epsilon(1e-15));

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coin(0, 1), tie(0, 4);
    for (int rep = 0; rep < 50; ++rep) {
        Eigen::VectorXd yy(20), ss(20);
        for (int i = 0; i < 20; ++i) {
            yy[i] = i < 2 ? i : coin(rng);
            ss[i] = 0.2 * tie(rng);
        }
        CHECK(auc(yy, ss) == doctest::Approx(auc_oracle(yy, ss)).epsilon(1e-14));
    }
    CHECK(code_of([&] { auc(Eigen::VectorXd::Ones(4), vec({0.1, 0.2, 0.3, 0.4})); }) == ErrorCode::OneClassOnly);
    CHECK(code_of([&] { auc(y, vec({0.1})); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("SMOTE count")
{
    CHECK(smote_count(24, 76, 1.0) == 52);
    CHECK(smote_count(10, 76, 0.5) == 28);
    CHECK(smote_count(10, 25, 0.5) == 3);
    CHECK(smote_count(50, 40, 1.0) == 0);
    CHECK_THROWS_AS(smote_count(10, 20, 0.0), Error);
}

TEST_CASE("SMOTE synthetics lie between minority neighbours")
{
    const Eigen::MatrixXd minority = testutil::gaussian_matrix(24, 3, 4);
    SmoteConfig cfg;
    cfg.seed = 11;
    const auto r = smote(minority, 76, cfg);
    REQUIRE(r.synthetic.rows() == 52);
    CHECK(24 + r.synthetic.rows() == 76);
    REQUIRE(r.base.size() == 52);
    for (Eigen::Index s = 0; s < r.synthetic.rows(); ++s) {
        const auto b = r.base[static_cast<std::size_t>(s)], nb = r.neighbor[static_cast<std::size_t>(s)];
        const double t = r.step[static_cast<std::size_t>(s)];
        CHECK(t > 0.0);
        CHECK(t < 1.0);
        CHECK(b != nb);
        const Eigen::RowVectorXd expected = minority.row(static_cast<Eigen::Index>(b)) +
            t * (minority.row(static_cast<Eigen::Index>(nb)) - minority.row(static_cast<Eigen::Index>(b)));
        CHECK((r.synthetic.row(s) - expected).cwiseAbs().maxCoeff() < 1e-12);

        // The neighbour is among the k nearest minority points of the base.
        std::vector<double> dist;
        for (Eigen::Index j = 0; j < minority.rows(); ++j)
            if (j != static_cast<Eigen::Index>(b)) dist.push_back((minority.row(j) - minority.row(static_cast<Eigen::Index>(b))).norm());
        std::sort(dist.begin(), dist.end());
        CHECK((minority.row(static_cast<Eigen::Index>(nb)) - minority.row(static_cast<Eigen::Index>(b))).norm() <= dist[cfg.k_neighbors - 1] + 1e-12);
    }
    const auto again = smote(minority, 76, cfg);
    CHECK(again.synthetic == r.synthetic);
    cfg.seed = 12;
    CHECK(!(smote(minority, 76, cfg).synthetic == r.synthetic));
}

TEST_CASE("SMOTE on identical points")
{
    Eigen::MatrixXd same(6, 2);
    same.rowwise() = Eigen::RowVector2d(1.5, -2.0);
    SmoteConfig cfg;
    cfg.k_neighbors = 3;
    const auto r = smote(same, 10, cfg);
    CHECK(r.synthetic.rows() == 4);
    for (Eigen::Index s = 0; s < r.synthetic.rows(); ++s) CHECK(r.synthetic.row(s) == same.row(0));
}

TEST_CASE("SMOTE input errors")
{
    const Eigen::MatrixXd few = testutil::gaussian_matrix(5, 2, 5);
    CHECK(code_of([&] { smote(few, 20); }) == ErrorCode::TooFewMinority);
    SmoteConfig cfg;
    cfg.k_neighbors = 0;
    CHECK_THROWS_AS(smote(testutil::gaussian_matrix(10, 2, 6), 20, cfg), Error);
}

} // TEST_SUITE
