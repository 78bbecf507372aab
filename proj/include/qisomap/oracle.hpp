#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qisomap/errors.hpp"
#include "qisomap/linalg.hpp"

namespace qisomap::oracle {

struct GramMatrix {
    Mat k;  // n x n symmetric, double-centered
    int n() const { return k.rows(); }
};

struct EigenSystem {
    std::vector<double> values;  // descending
    Mat vectors;                 // columns, orthonormal, same order
};

struct EmbeddingResult {
    Mat z;                       // n x d
    std::vector<double> values;  // the d retained eigenvalues
    double explained_ratio = 0;  // eta = sum_{c<=d} lambda_c^2 / sum lambda_c^2
};

struct RowMeans {
    std::vector<double> row;   // d_i* of the (squared) distances
    std::vector<double> col;   // d_*j
    double grand = 0;          // d_**
};

inline RowMeans row_means(const Mat& d, bool square = true) {
    int n = d.rows();
    RowMeans m;
    m.row.assign(n, 0.0);
    m.col.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = square ? d(i, j) * d(i, j) : d(i, j);
            m.row[i] += v;
            m.col[j] += v;
            m.grand += v;
        }
    for (int i = 0; i < n; ++i) {
        m.row[i] /= n;
        m.col[i] /= n;
    }
    m.grand /= double(n) * n;
    return m;
}

// Double centering: k_ij = -1/2 (d^2_ij - d^2_i* - d^2_*j + d^2_**).
// Distances are squared first (set square=false to run on raw entries).
inline GramMatrix center_distances(const Mat& d, bool square = true) {
    int n = d.rows();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::fabs(d(i, j) - d(j, i)) > 1e-9)
                throw AsymmetricInput("center_distances: matrix not symmetric");
    RowMeans m = row_means(d, square);
    GramMatrix g;
    g.k = Mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = square ? d(i, j) * d(i, j) : d(i, j);
            g.k(i, j) = -0.5 * (v - m.row[i] - m.col[j] + m.grand);
        }
    return g;
}

// Cyclic Jacobi. Deterministic and accurate for the n <= 64 matrices this
// project handles.
inline EigenSystem eigendecompose(const GramMatrix& g) {
    int n = g.n();
    Mat a = g.k;
    Mat v = Mat::identity(n);
    const int max_sweeps = 100;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0, diag = 0;
        for (int p = 0; p < n; ++p) {
            diag += a(p, p) * a(p, p);
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        if (off <= 1e-28 * (diag + 1e-300)) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c, tau = s / (1.0 + c);
                double apq = a(p, q), app = a(p, p), aqq = a(q, q);
                a(p, q) = 0;
                a(q, p) = 0;
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                for (int r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        double arp = a(r, p), arq = a(r, q);
                        a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
                        a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
                    }
                    double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    if (sweep == max_sweeps) throw ConvergenceFailure("jacobi: sweep cap exceeded");

    EigenSystem es;
    es.values.resize(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        es.values[i] = a(i, i);
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return es.values[x] > es.values[y]; });
    EigenSystem out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (int c = 0; c < n; ++c) {
        int j = order[c];
        out.values[c] = es.values[j];
        // sign convention: largest-magnitude component nonnegative
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::fabs(v(i, j)) > std::fabs(v(imax, j))) imax = i;
        double sign = v(imax, j) < 0 ? -1.0 : 1.0;
        for (int i = 0; i < n; ++i) out.vectors(i, c) = sign * v(i, j);
    }
    return out;
}

// Z columns = v_c sqrt(lambda_c) for the d largest eigenvalues; negative
// eigenvalues are clamped to zero and never selected.
inline EmbeddingResult embed(const EigenSystem& es, int d) {
    int n = static_cast<int>(es.values.size());
    EmbeddingResult r;
    if (d == 0) {
        r.z = Mat(n, 0);
        return r;
    }
    int positive = 0;
    for (double l : es.values)
        if (l > 0) ++positive;
    if (d > positive)
        throw InsufficientPositiveSpectrum("embed: requested " + std::to_string(d) +
                                           " dims, only " + std::to_string(positive) +
                                           " positive eigenvalues");
    r.z = Mat(n, d);
    r.values.assign(es.values.begin(), es.values.begin() + d);
    double num = 0, den = 0;
    for (int c = 0; c < n; ++c) {
        double l = std::max(es.values[c], 0.0);
        den += l * l;
        if (c < d) num += l * l;
    }
    r.explained_ratio = den > 0 ? num / den : 0.0;
    for (int c = 0; c < d; ++c) {
        double s = std::sqrt(es.values[c]);
        for (int i = 0; i < n; ++i) r.z(i, c) = es.vectors(i, c) * s;
    }
    return r;
}

// Full classical Isomap on a geodesic distance matrix.
inline EmbeddingResult classical_isomap(const Mat& geodesics, int d, bool square = true) {
    return embed(eigendecompose(center_distances(geodesics, square)), d);
}

}  // namespace qisomap::oracle
