#pragma once

#include "wnet/graph.hpp"

#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace gen {

using wnet::Matrix;

inline wnet::CountryRegistry registry(std::size_t n) {
    std::vector<std::string> codes;
    for (std::size_t i = 0; i < n; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "C%03zu", i);
        codes.emplace_back(buf);
    }
    return wnet::CountryRegistry(std::move(codes));
}

/// Symmetric, zero-diagonal; each pair linked with probability p and a weight
/// drawn from (0, 1] (or exactly 1 when `binary`).
inline Matrix symmetric_weights(std::mt19937_64& rng, std::size_t n, double p, bool binary = false) {
    std::bernoulli_distribution link(p);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = i + 1; j < w.cols(); ++j)
            if (link(rng)) {
                double v = binary ? 1.0 : weight(rng);
                if (v == 0.0)
                    v = 0.5;
                w(i, j) = w(j, i) = v;
            }
    return w;
}

/// Ensures at least one link so the network can be normalized.
inline wnet::UndirectedNetwork random_network(std::mt19937_64& rng, std::size_t n, double p, bool binary = false) {
    Matrix w = symmetric_weights(rng, n, p, binary);
    if (w.maxCoeff() <= 0.0)
        w(0, 1) = w(1, 0) = binary ? 1.0 : 0.7;
    return wnet::UndirectedNetwork::from_symmetric(2000, registry(n), w);
}

/// Directed weights with independent entries, zero diagonal, at least one link.
inline Matrix directed_weights(std::mt19937_64& rng, std::size_t n, double p, double scale = 1.0) {
    std::bernoulli_distribution link(p);
    std::uniform_real_distribution<double> weight(0.0, scale);
    Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            if (i != j && link(rng)) {
                const double v = weight(rng);
                w(i, j) = v > 0.0 ? v : scale / 2;
            }
    if (w.maxCoeff() <= 0.0)
        w(0, 1) = scale / 3;
    return w;
}

inline Matrix from_edges(std::size_t n, const std::vector<std::tuple<int, int, double>>& edges) {
    Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& [i, j, v] : edges)
        w(i, j) = w(j, i) = v;
    return w;
}

inline wnet::UndirectedNetwork network(std::size_t n, const std::vector<std::tuple<int, int, double>>& edges) {
    return wnet::UndirectedNetwork::from_symmetric(2000, registry(n), from_edges(n, edges));
}

inline std::vector<double> pareto_sample(std::mt19937_64& rng, std::size_t n, double alpha, double x_min = 1.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out)
        v = x_min * std::pow(1.0 - u(rng), -1.0 / alpha);
    return out;
}

inline std::vector<double> lognormal_sample(std::mt19937_64& rng, std::size_t n, double mu, double sigma) {
    std::lognormal_distribution<double> d(mu, sigma);
    std::vector<double> out(n);
    for (auto& v : out)
        v = d(rng);
    return out;
}

} // namespace gen
