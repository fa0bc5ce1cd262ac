#pragma once

// Small dense kernels used throughout: determinants and solves by
// column-pivoted elimination, and a cyclic Jacobi eigensolver for symmetric
// matrices. Everything is templated so the same elimination runs on doubles
// and on jets (pivoting always looks at the value part).

#include <cmath>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"

namespace affinv {

template <class T>
class Mat {
public:
    Mat() : r_(0), c_(0) {}
    Mat(int rows, int cols) : r_(rows), c_(cols), d_(static_cast<size_t>(rows) * cols) {}
    Mat(int rows, int cols, const T& fill)
        : r_(rows), c_(cols), d_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return r_; }
    int cols() const { return c_; }
    T& operator()(int i, int j) { return d_[static_cast<size_t>(i) * c_ + j]; }
    const T& operator()(int i, int j) const { return d_[static_cast<size_t>(i) * c_ + j]; }
    std::vector<T>& data() { return d_; }
    const std::vector<T>& data() const { return d_; }

private:
    int r_, c_;
    std::vector<T> d_;
};

template <class T>
class Ten3 {
public:
    Ten3() : n_(0) {}
    explicit Ten3(int n) : n_(n), d_(static_cast<size_t>(n) * n * n) {}
    Ten3(int n, const T& fill) : n_(n), d_(static_cast<size_t>(n) * n * n, fill) {}
    int dim() const { return n_; }
    T& operator()(int i, int j, int k) { return d_[(static_cast<size_t>(i) * n_ + j) * n_ + k]; }
    const T& operator()(int i, int j, int k) const {
        return d_[(static_cast<size_t>(i) * n_ + j) * n_ + k];
    }
    std::vector<T>& data() { return d_; }
    const std::vector<T>& data() const { return d_; }

private:
    int n_;
    std::vector<T> d_;
};

template <class T>
class Ten4 {
public:
    Ten4() : n_(0) {}
    explicit Ten4(int n) : n_(n), d_(static_cast<size_t>(n) * n * n * n) {}
    int dim() const { return n_; }
    T& operator()(int i, int j, int k, int l) {
        return d_[((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    const T& operator()(int i, int j, int k, int l) const {
        return d_[((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    std::vector<T>& data() { return d_; }
    const std::vector<T>& data() const { return d_; }

private:
    int n_;
    std::vector<T> d_;
};

using MatD = Mat<double>;
using Ten3D = Ten3<double>;
using Ten4D = Ten4<double>;
using VecD = std::vector<double>;

inline double pivot_mag(double x) { return std::fabs(x); }
inline double pivot_mag(const Jet4& x) { return std::fabs(x.value()); }

template <class T>
T det(Mat<T> m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("det of non-square matrix");
    const int n = m.rows();
    if (n == 0) throw DimensionMismatch("det of empty matrix");
    double sign = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (pivot_mag(m(i, k)) > pivot_mag(m(piv, k))) piv = i;
        if (pivot_mag(m(piv, k)) == 0.0) return m(0, 0) * 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            T f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    T d = m(0, 0);
    for (int k = 1; k < n; ++k) d = d * m(k, k);
    return d * sign;
}

// Solve m * x = b for several right-hand sides (columns of b), partial pivoting.
template <class T>
Mat<T> solve(Mat<T> m, Mat<T> b) {
    if (m.rows() != m.cols() || m.rows() != b.rows())
        throw DimensionMismatch("solve: shape mismatch");
    const int n = m.rows();
    const int nb = b.cols();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (pivot_mag(m(i, k)) > pivot_mag(m(piv, k))) piv = i;
        if (pivot_mag(m(piv, k)) == 0.0) throw SingularFrame("singular linear system");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            for (int j = 0; j < nb; ++j) std::swap(b(k, j), b(piv, j));
        }
        for (int i = k + 1; i < n; ++i) {
            T f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            for (int j = 0; j < nb; ++j) b(i, j) -= f * b(k, j);
        }
    }
    Mat<T> x(n, nb);
    for (int j = 0; j < nb; ++j) {
        for (int i = n - 1; i >= 0; --i) {
            T acc = b(i, j);
            for (int k = i + 1; k < n; ++k) acc -= m(i, k) * x(k, j);
            x(i, j) = acc / m(i, i);
        }
    }
    return x;
}

template <class T>
Mat<T> inverse(const Mat<T>& m) {
    const int n = m.rows();
    Mat<T> id(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if constexpr (std::is_same_v<T, double>) {
                id(i, j) = (i == j) ? 1.0 : 0.0;
            } else {
                id(i, j) = (i == j) ? Jet4::constant(1.0, m(0, 0).dim())
                                    : Jet4(m(0, 0).dim());
            }
        }
    return solve(m, id);
}

// Eigenvalues (and optionally eigenvectors as columns) of a symmetric matrix
// by cyclic Jacobi. Small n only.
inline VecD sym_eigenvalues(MatD a, MatD* vecs = nullptr) {
    const int n = a.rows();
    MatD v(n, n, 0.0);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    VecD ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    if (vecs) *vecs = v;
    return ev;
}

enum class Definiteness { PositiveDefinite, NegativeDefinite, Indefinite, Degenerate };

inline Definiteness classify_definite(const MatD& m, double tol = 1e-12) {
    VecD ev = sym_eigenvalues(m);
    double scale = 0.0;
    for (double e : ev) scale = std::max(scale, std::fabs(e));
    if (scale == 0.0) return Definiteness::Degenerate;
    bool pos = true, neg = true, degen = false;
    for (double e : ev) {
        if (std::fabs(e) <= tol * scale) degen = true;
        if (e < 0) pos = false;
        if (e > 0) neg = false;
    }
    if (degen) return Definiteness::Degenerate;
    if (pos) return Definiteness::PositiveDefinite;
    if (neg) return Definiteness::NegativeDefinite;
    return Definiteness::Indefinite;
}

// Rank by eigenvalue magnitude of the (symmetric) Gram matrix.
inline int sym_rank(const MatD& m, double rel_tol = 1e-8) {
    VecD ev = sym_eigenvalues(m);
    double scale = 0.0;
    for (double e : ev) scale = std::max(scale, std::fabs(e));
    if (scale == 0.0) return 0;
    int r = 0;
    for (double e : ev)
        if (std::fabs(e) > rel_tol * scale) ++r;
    return r;
}

inline double max_abs(const VecD& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}
inline double max_abs(const MatD& m) { return max_abs(m.data()); }
inline double max_abs(const Ten3D& t) { return max_abs(t.data()); }
inline double max_abs(const Ten4D& t) { return max_abs(t.data()); }

} // namespace affinv
