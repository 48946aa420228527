#include <grpsel/screening.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <grpsel/parallel.hpp>

namespace grpsel {

std::string_view to_string(ScreeningMethod m) noexcept
{
    return m == ScreeningMethod::SIS ? "sis" : "dcsis";
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    if (x.size() != y.size()) throw Error(ErrorCode::SizeMismatch, "pearson inputs differ in length");
    if (x.size() < 2) throw Error(ErrorCode::TooFewObservations, "pearson needs at least 2 observations");
    const Eigen::ArrayXd xc = x.array() - x.mean();
    const Eigen::ArrayXd yc = y.array() - y.mean();
    const double sxx = xc.square().sum();
    const double syy = yc.square().sum();
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ConstantVector, "pearson correlation of a constant vector");
    return std::clamp((xc * yc).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

// Distance matrix summary: entries, row means, grand mean.
struct DistanceMatrix
{
    Eigen::MatrixXd a;
    Eigen::VectorXd row_mean;
    double grand_mean = 0.0;

    explicit DistanceMatrix(const Eigen::MatrixXd& x)
    {
        const Eigen::Index n = x.rows();
        a.resize(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            a(j, j) = 0.0;
            for (Eigen::Index i = j + 1; i < n; ++i) {
                const double d = (x.row(i) - x.row(j)).norm();
                a(i, j) = d;
                a(j, i) = d;
            }
        }
        row_mean = a.rowwise().mean();
        grand_mean = row_mean.mean();
    }
};

double dcov_from(const DistanceMatrix& a, const DistanceMatrix& b)
{
    const double s1 = (a.a.array() * b.a.array()).mean();
    const double s2 = a.grand_mean * b.grand_mean;
    const double s3 = (a.row_mean.array() * b.row_mean.array()).mean();
    return s1 + s2 - 2.0 * s3;
}

} // namespace

double distance_covariance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v)
{
    if (u.rows() != v.rows()) throw Error(ErrorCode::SizeMismatch, "distance covariance inputs differ in sample count");
    if (u.rows() < 2) throw Error(ErrorCode::TooFewObservations, "distance covariance needs at least 2 observations");
    return dcov_from(DistanceMatrix(u), DistanceMatrix(v));
}

double distance_correlation(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v)
{
    if (u.rows() != v.rows()) throw Error(ErrorCode::SizeMismatch, "distance correlation inputs differ in sample count");
    if (u.rows() < 2) throw Error(ErrorCode::TooFewObservations, "distance correlation needs at least 2 observations");
    const DistanceMatrix a(u), b(v);
    const double uu = dcov_from(a, a);
    const double vv = dcov_from(b, b);
    if (!(uu > 0.0) || !(vv > 0.0)) throw Error(ErrorCode::DegenerateMargin, "distance variance is zero");
    return std::clamp(dcov_from(a, b) / std::sqrt(uu * vv), 0.0, 1.0);
}

std::size_t screening_size(std::size_t n, std::size_t p, double k_factor)
{
    if (!(k_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "k_factor must be positive");
    if (n < 2) throw Error(ErrorCode::TooFewObservations, "screening needs at least 2 observations");
    const double nd = static_cast<double>(n);
    const auto d = static_cast<std::size_t>(std::ceil(k_factor * nd / std::log(nd)));
    return std::min(d, p);
}

ScreeningResult screen(const StandardizedMatrix& z, const Eigen::VectorXd& y, ScreeningMethod method,
    double k_factor, std::size_t jobs)
{
    if (z.z.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "design and response differ in row count");
    const std::size_t p = z.variables();
    const auto n = static_cast<std::size_t>(y.size());

    ScreeningResult out;
    out.method = method;
    out.d = screening_size(n, p, k_factor);
    out.scores.assign(p, 0.0);

    if (method == ScreeningMethod::SIS) {
        parallel_for(p, jobs, [&](std::size_t v) {
            const auto& r = z.column_map[v];
            double best = 0.0;
            for (std::size_t c = r.begin; c < r.end(); ++c) {
                best = std::max(best, std::abs(pearson(z.z.col(static_cast<Eigen::Index>(c)), y)));
            }
            out.scores[v] = best;
        });
    } else {
        const DistanceMatrix target(y);
        const double yy = dcov_from(target, target);
        if (!(yy > 0.0)) throw Error(ErrorCode::DegenerateMargin, "response has zero distance variance");
        parallel_for(p, jobs, [&](std::size_t v) {
            const auto& r = z.column_map[v];
            const DistanceMatrix a(z.z.middleCols(static_cast<Eigen::Index>(r.begin), static_cast<Eigen::Index>(r.size)));
            const double uu = dcov_from(a, a);
            if (!(uu > 0.0)) throw Error(ErrorCode::DegenerateMargin, "variable " + std::to_string(v) + " has zero distance variance");
            out.scores[v] = std::clamp(dcov_from(a, target) / std::sqrt(uu * yy), 0.0, 1.0);
        });
    }

    out.ranking.resize(p);
    std::iota(out.ranking.begin(), out.ranking.end(), std::size_t{0});
    std::stable_sort(out.ranking.begin(), out.ranking.end(),
        [&](std::size_t a, std::size_t b) { return out.scores[a] > out.scores[b]; });
    out.kept.assign(out.ranking.begin(), out.ranking.begin() + static_cast<std::ptrdiff_t>(out.d));
    return out;
}

} // namespace grpsel
