#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "qisomap/errors.hpp"
#include "qisomap/linalg.hpp"
#include "qisomap/rng.hpp"

namespace qisomap::dataset {

// Standard manifold-learning test sets, deterministic for a fixed seed.
// Parameter grids are evenly spaced (plus optional Gaussian jitter) so small-N
// neighborhood graphs stay connected.
inline Mat generate_dataset(const std::string& name, int n, double noise, std::uint64_t seed) {
    if (n < 1 || n > 64) throw UnknownGenerator("generate_dataset: n out of range [1,64]");
    auto rng = stage_rng(seed, "dataset:" + name);
    std::normal_distribution<double> jitter(0.0, noise > 0 ? noise : 1.0);
    auto nz = [&]() { return noise > 0 ? jitter(rng) : 0.0; };
    const double golden = 0.6180339887498949;

    Mat pts;
    if (name == "swiss_roll") {
        pts = Mat(n, 3);
        for (int i = 0; i < n; ++i) {
            double u = n > 1 ? double(i) / (n - 1) : 0.0;
            double t = 1.5 * M_PI * (1.0 + 2.0 * u);
            double h = 21.0 * std::fmod(i * golden, 1.0);
            pts(i, 0) = t * std::cos(t) + nz();
            pts(i, 1) = h + nz();
            pts(i, 2) = t * std::sin(t) + nz();
        }
    } else if (name == "s_curve") {
        pts = Mat(n, 3);
        for (int i = 0; i < n; ++i) {
            double u = n > 1 ? double(i) / (n - 1) : 0.0;
            double t = 3.0 * M_PI * (u - 0.5);
            double h = 2.0 * std::fmod(i * golden, 1.0);
            pts(i, 0) = std::sin(t) + nz();
            pts(i, 1) = h + nz();
            pts(i, 2) = (t >= 0 ? 1.0 : -1.0) * (std::cos(t) - 1.0) + nz();
        }
    } else if (name == "circle") {
        pts = Mat(n, 2);
        for (int i = 0; i < n; ++i) {
            double a = 2.0 * M_PI * i / n;
            pts(i, 0) = std::cos(a) + nz();
            pts(i, 1) = std::sin(a) + nz();
        }
    } else if (name == "blob") {
        pts = Mat(n, 3);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 3; ++c) pts(i, c) = g(rng) + nz();
    } else {
        throw UnknownGenerator("generate_dataset: unknown generator '" + name + "'");
    }
    return pts;
}

inline double euclidean(const Mat& pts, int a, int b) {
    double s = 0;
    for (int c = 0; c < pts.cols(); ++c) {
        double d = pts(a, c) - pts(b, c);
        s += d * d;
    }
    return std::sqrt(s);
}

// Euclidean k-NN graph, symmetrized by union; non-edges are +inf, diagonal 0.
inline Mat knn_adjacency(const Mat& pts, int k) {
    const int n = pts.rows();
    Mat adj(n, n, std::numeric_limits<double>::infinity());
    for (int i = 0; i < n; ++i) adj(i, i) = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<double, int>> nb;
        for (int j = 0; j < n; ++j)
            if (j != i) nb.emplace_back(euclidean(pts, i, j), j);
        std::sort(nb.begin(), nb.end());
        int kk = std::min<int>(k, static_cast<int>(nb.size()));
        for (int c = 0; c < kk; ++c) {
            adj(i, nb[c].second) = nb[c].first;
            adj(nb[c].second, i) = nb[c].first;
        }
    }
    return adj;
}

inline bool is_connected(const Mat& adj) {
    const int n = adj.rows();
    if (n == 0) return true;
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
        int i = q.front();
        q.pop();
        for (int j = 0; j < n; ++j)
            if (!seen[j] && std::isfinite(adj(i, j)) && i != j) {
                seen[j] = true;
                ++count;
                q.push(j);
            }
    }
    return count == n;
}

}  // namespace qisomap::dataset
