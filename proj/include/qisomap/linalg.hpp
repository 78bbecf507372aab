#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace qisomap {

// Minimal dense row-major matrix, sized for desk-scale problems (N <= 64,
// walk operators up to 4096 x 4096).
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0) : r_(rows), c_(cols), a_(std::size_t(rows) * cols, fill) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    double& operator()(int i, int j) { return a_[std::size_t(i) * c_ + j]; }
    double operator()(int i, int j) const { return a_[std::size_t(i) * c_ + j]; }

    Mat transpose() const {
        Mat t(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double frobenius() const {
        double s = 0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    Mat operator*(const Mat& b) const {
        Mat out(r_, b.c_);
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < c_; ++k) {
                double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.c_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    Mat operator-(const Mat& b) const {
        Mat out = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] -= b.a_[i];
        return out;
    }

    Mat operator+(const Mat& b) const {
        Mat out = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] += b.a_[i];
        return out;
    }

    Mat scaled(double s) const {
        Mat out = *this;
        for (double& v : out.a_) v *= s;
        return out;
    }

    std::vector<double> col(int j) const {
        std::vector<double> v(r_);
        for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
        return v;
    }

  private:
    int r_ = 0, c_ = 0;
    std::vector<double> a_;
};

inline std::vector<double> matvec(const Mat& m, const std::vector<double>& x) {
    std::vector<double> y(m.rows(), 0.0);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) y[i] += m(i, j) * x[j];
    return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct Svd {
    Mat u;                       // m x n, columns orthonormal
    std::vector<double> sigma;   // n, descending
    Mat v;                       // n x n orthogonal
};

// One-sided Jacobi SVD for small matrices (used by Procrustes alignment).
// Rotates column pairs of A until mutually orthogonal; V accumulates the
// rotations, U comes from normalizing the columns.
inline Svd svd_small(Mat a) {
    int m = a.rows(), n = a.cols();
    Mat v = Mat::identity(n);
    const double eps = 1e-14;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double app = 0, aqq = 0, apq = 0;
                for (int i = 0; i < m; ++i) {
                    app += a(i, p) * a(i, p);
                    aqq += a(i, q) * a(i, q);
                    apq += a(i, p) * a(i, q);
                }
                off = std::max(off, std::fabs(apq) / (std::sqrt(app * aqq) + 1e-300));
                if (std::fabs(apq) < eps * std::sqrt(app * aqq) + 1e-300) continue;
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
                for (int i = 0; i < m; ++i) {
                    double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
        if (off < eps) break;
    }
    Svd out;
    out.sigma.resize(n);
    out.u = Mat(m, n);
    std::vector<int> order(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < m; ++i) s += a(i, j) * a(i, j);
        out.sigma[j] = std::sqrt(s);
        order[j] = j;
    }
    std::sort(order.begin(), order.end(), [&](int x, int y) { return out.sigma[x] > out.sigma[y]; });
    Svd sorted;
    sorted.sigma.resize(n);
    sorted.u = Mat(m, n);
    sorted.v = Mat(n, n);
    for (int jj = 0; jj < n; ++jj) {
        int j = order[jj];
        sorted.sigma[jj] = out.sigma[j];
        for (int i = 0; i < n; ++i) sorted.v(i, jj) = v(i, j);
        if (out.sigma[j] > 1e-300) {
            for (int i = 0; i < m; ++i) sorted.u(i, jj) = a(i, j) / out.sigma[j];
        } else {
            // zero singular value: any unit column orthogonal to the rest works;
            // pick a coordinate axis and Gram-Schmidt it.
            std::vector<double> e(m, 0.0);
            for (int axis = 0; axis < m; ++axis) {
                std::fill(e.begin(), e.end(), 0.0);
                e[axis] = 1.0;
                for (int k = 0; k < jj; ++k) {
                    double d = 0;
                    for (int i = 0; i < m; ++i) d += e[i] * sorted.u(i, k);
                    for (int i = 0; i < m; ++i) e[i] -= d * sorted.u(i, k);
                }
                double nn = norm2(e);
                if (nn > 1e-6) {
                    for (int i = 0; i < m; ++i) sorted.u(i, jj) = e[i] / nn;
                    break;
                }
            }
        }
    }
    return sorted;
}

}  // namespace qisomap
