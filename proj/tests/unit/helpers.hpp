#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <grpsel/core_data.hpp>

namespace testutil {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index n, Eigen::Index p, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd m(n, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = nd(rng);
    return m;
}

inline grpsel::Dataset quantitative_dataset(const Eigen::MatrixXd& x)
{
    std::vector<grpsel::Column> cols;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        std::vector<double> v(x.col(j).data(), x.col(j).data() + x.rows());
        cols.push_back(grpsel::Column::quantitative("x" + std::to_string(j + 1), std::move(v)));
    }
    return grpsel::Dataset(std::move(cols));
}

inline grpsel::Dataset quantitative_dataset(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, grpsel::ResponseKind kind)
{
    return quantitative_dataset(x).with_response(y, kind);
}

// Linear response y = x b + noise.
inline Eigen::VectorXd linear_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& b, double noise, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd y = x * b;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise * nd(rng);
    return y;
}

inline Eigen::VectorXd bernoulli_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& b, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd y(x.rows());
    const Eigen::VectorXd eta = x * b;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = u(rng) < 1.0 / (1.0 + std::exp(-eta[i])) ? 1.0 : 0.0;
    return y;
}

// Columns share a factor within each block: x = sqrt(r) f_block + sqrt(1 - r) e.
inline Eigen::MatrixXd block_factor_matrix(Eigen::Index n, const std::vector<int>& sizes, double r, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::Index p = 0;
    for (int s : sizes) p += s;
    Eigen::MatrixXd x(n, p);
    Eigen::Index col = 0;
    for (int s : sizes) {
        Eigen::VectorXd f(n);
        for (Eigen::Index i = 0; i < n; ++i) f[i] = nd(rng);
        for (int k = 0; k < s; ++k, ++col)
            for (Eigen::Index i = 0; i < n; ++i) x(i, col) = std::sqrt(r) * f[i] + std::sqrt(1.0 - r) * nd(rng);
    }
    return x;
}

} // namespace testutil
