#pragma once

// Order-4 truncated multivariate Taylor arithmetic. A Jet4 over m variables
// carries one coefficient per multi-index of total order <= 4, with the
// convention f(u0 + d) = sum_mu coeff[mu] * d^mu, so that the partial
// derivative at u0 is mu! * coeff[mu].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "errors.hpp"

namespace affinv {

inline constexpr int kJetOrder = 4;

using MultiIndex = std::vector<int>;

inline int order_of(const MultiIndex& mu) {
    int s = 0;
    for (int e : mu) s += e;
    return s;
}

// Per-dimension lookup tables: graded enumeration of the multi-indices of
// order <= 4, the sparse multiplication pair list, derivative index shifts
// and factorials. Built once per dimension and shared by every jet.
class JetTable {
public:
    explicit JetTable(int dim) : dim_(dim) {
        if (dim < 1) throw InvalidParameter("jet dimension must be >= 1");
        MultiIndex mu(dim, 0);
        enumerate(mu, 0, kJetOrder);
        for (int i = 0; i < static_cast<int>(exps_.size()); ++i)
            index_[exps_[i]] = i;
        const int n = size();
        factorial_.resize(n);
        order_.resize(n);
        for (int i = 0; i < n; ++i) {
            double f = 1.0;
            int o = 0;
            for (int e : exps_[i]) {
                for (int k = 2; k <= e; ++k) f *= k;
                o += e;
            }
            factorial_[i] = f;
            order_[i] = o;
        }
        deriv_.assign(static_cast<size_t>(n) * dim, -1);
        for (int i = 0; i < n; ++i) {
            if (order_[i] == kJetOrder) continue;
            for (int v = 0; v < dim; ++v) {
                MultiIndex up = exps_[i];
                up[v] += 1;
                deriv_[static_cast<size_t>(i) * dim + v] = index_.at(up);
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (order_[i] + order_[j] > kJetOrder) continue;
                MultiIndex sum(dim);
                for (int v = 0; v < dim; ++v) sum[v] = exps_[i][v] + exps_[j][v];
                mul_.push_back({i, j, index_.at(sum)});
            }
        }
    }

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(exps_.size()); }
    const MultiIndex& exponents(int idx) const { return exps_[idx]; }
    int order(int idx) const { return order_[idx]; }
    double factorial(int idx) const { return factorial_[idx]; }

    int index(const MultiIndex& mu) const {
        auto it = index_.find(mu);
        if (it == index_.end())
            throw OrderOverflow("multi-index of order > 4 or wrong dimension");
        return it->second;
    }

    // Index of mu + e_var, or -1 when that would exceed order 4.
    int shift_up(int idx, int var) const {
        return deriv_[static_cast<size_t>(idx) * dim_ + var];
    }

    struct MulTriple {
        int a, b, out;
    };
    const std::vector<MulTriple>& mul_triples() const { return mul_; }

    static const JetTable& get(int dim) {
        static std::mutex mtx;
        static std::map<int, std::unique_ptr<JetTable>> cache;
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(dim);
        if (it == cache.end())
            it = cache.emplace(dim, std::make_unique<JetTable>(dim)).first;
        return *it->second;
    }

private:
    void enumerate(MultiIndex& mu, int pos, int budget) {
        if (pos == dim_) {
            exps_.push_back(mu);
            return;
        }
        for (int e = 0; e <= budget; ++e) {
            mu[pos] = e;
            enumerate(mu, pos + 1, budget - e);
        }
        mu[pos] = 0;
    }

    int dim_;
    std::vector<MultiIndex> exps_;
    std::map<MultiIndex, int> index_;
    std::vector<double> factorial_;
    std::vector<int> order_;
    std::vector<int> deriv_;
    std::vector<MulTriple> mul_;
};

class Jet4 {
public:
    Jet4() : tab_(nullptr) {}

    explicit Jet4(int dim) : tab_(&JetTable::get(dim)), c_(tab_->size(), 0.0) {}

    static Jet4 constant(double v, int dim) {
        Jet4 j(dim);
        j.c_[0] = v;
        return j;
    }

    // Jet of the coordinate function u^i seeded at u0.
    static Jet4 variable(int i, double u0, int dim) {
        if (i < 0 || i >= dim) throw IndexError("jet variable index out of range");
        Jet4 j(dim);
        j.c_[0] = u0;
        MultiIndex mu(dim, 0);
        mu[i] = 1;
        j.c_[j.tab_->index(mu)] = 1.0;
        return j;
    }

    int dim() const { return tab_ ? tab_->dim() : 0; }
    double value() const { return c_[0]; }
    const std::vector<double>& coeffs() const { return c_; }
    std::vector<double>& coeffs() { return c_; }
    const JetTable& table() const { return *tab_; }

    double coeff(const MultiIndex& mu) const { return c_[tab_->index(mu)]; }

    // mu! * coeff[mu], the partial derivative at the expansion point.
    double partial(const MultiIndex& mu) const {
        int idx = tab_->index(mu);
        return tab_->factorial(idx) * c_[idx];
    }

    Jet4& operator+=(const Jet4& o) {
        check(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet4& operator-=(const Jet4& o) {
        check(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet4& operator*=(double s) {
        for (double& x : c_) x *= s;
        return *this;
    }
    Jet4& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    friend Jet4 operator+(Jet4 a, const Jet4& b) { return a += b; }
    friend Jet4 operator-(Jet4 a, const Jet4& b) { return a -= b; }
    friend Jet4 operator*(Jet4 a, double s) { return a *= s; }
    friend Jet4 operator*(double s, Jet4 a) { return a *= s; }
    friend Jet4 operator+(Jet4 a, double s) { return a += s; }
    friend Jet4 operator+(double s, Jet4 a) { return a += s; }
    friend Jet4 operator-(Jet4 a, double s) {
        a.c_[0] -= s;
        return a;
    }
    friend Jet4 operator-(double s, const Jet4& a) {
        Jet4 r = -a;
        r.c_[0] += s;
        return r;
    }
    Jet4 operator-() const {
        Jet4 r = *this;
        for (double& x : r.c_) x = -x;
        return r;
    }

    friend Jet4 operator*(const Jet4& a, const Jet4& b) {
        a.check(b);
        Jet4 r(a.dim());
        for (const auto& t : a.tab_->mul_triples())
            r.c_[t.out] += a.c_[t.a] * b.c_[t.b];
        return r;
    }
    Jet4& operator*=(const Jet4& o) { return *this = *this * o; }

    friend Jet4 operator/(const Jet4& a, const Jet4& b) { return a * reciprocal(b); }
    friend Jet4 operator/(Jet4 a, double s) { return a *= 1.0 / s; }
    friend Jet4 operator/(double s, const Jet4& b) { return s * reciprocal(b); }

    // Composition with a univariate outer function given by its Taylor
    // coefficients c0..c4 at the value part: result = sum ck * w^k with
    // w = j - value(j).
    friend Jet4 compose_univariate(const Jet4& j, const std::array<double, kJetOrder + 1>& outer) {
        Jet4 w = j;
        w.c_[0] = 0.0;
        Jet4 r = Jet4::constant(outer[kJetOrder], j.dim());
        for (int k = kJetOrder - 1; k >= 0; --k) {
            r = r * w;
            r.c_[0] += outer[k];
        }
        return r;
    }

    friend Jet4 reciprocal(const Jet4& j) {
        double v = j.value();
        if (v == 0.0) throw DivisionByZero("reciprocal of jet with zero value part");
        std::array<double, kJetOrder + 1> outer;
        double p = 1.0 / v;
        for (int k = 0; k <= kJetOrder; ++k) {
            outer[k] = p;
            p *= -1.0 / v;
        }
        return compose_univariate(j, outer);
    }

    friend Jet4 exp(const Jet4& j) {
        double ev = std::exp(j.value());
        std::array<double, kJetOrder + 1> outer;
        double f = 1.0;
        for (int k = 0; k <= kJetOrder; ++k) {
            outer[k] = ev / f;
            f *= (k + 1);
        }
        return compose_univariate(j, outer);
    }

    friend Jet4 log(const Jet4& j) {
        double v = j.value();
        if (v <= 0.0) throw NonpositiveArgument("log of jet with nonpositive value part");
        std::array<double, kJetOrder + 1> outer;
        outer[0] = std::log(v);
        double p = 1.0 / v;
        for (int k = 1; k <= kJetOrder; ++k) {
            outer[k] = (k % 2 ? p : -p) / k;
            p /= v;
        }
        return compose_univariate(j, outer);
    }

    friend Jet4 pow(const Jet4& j, double e) {
        double v = j.value();
        if (e == std::floor(e) && e >= 0) {
            // nonnegative integer powers need no positivity
            Jet4 r = Jet4::constant(1.0, j.dim());
            for (int k = 0; k < static_cast<int>(e); ++k) r = r * j;
            return r;
        }
        if (v <= 0.0) throw NonpositiveArgument("pow of jet with nonpositive value part");
        std::array<double, kJetOrder + 1> outer;
        double coef = std::pow(v, e);
        double f = 1.0;
        double fall = 1.0;
        for (int k = 0; k <= kJetOrder; ++k) {
            outer[k] = fall * coef / f;
            coef /= v;
            fall *= (e - k);
            f *= (k + 1);
        }
        return compose_univariate(j, outer);
    }

    friend Jet4 sqrt(const Jet4& j) { return pow(j, 0.5); }

    // Taylor shift: the jet of df/du^var, exact up to order 3 (the order-4
    // coefficients of the result are set to zero).
    friend Jet4 derivative(const Jet4& j, int var) {
        if (var < 0 || var >= j.dim()) throw IndexError("derivative index out of range");
        Jet4 r(j.dim());
        const JetTable& t = *j.tab_;
        for (int i = 0; i < t.size(); ++i) {
            int up = t.shift_up(i, var);
            if (up < 0) continue;
            r.c_[i] = (t.exponents(i)[var] + 1) * j.c_[up];
        }
        return r;
    }

    // Re-seat a jet over a sub-block of a larger variable space: variable v
    // of the source becomes variable offset+v of the target.
    friend Jet4 embed(const Jet4& j, int offset, int target_dim) {
        if (offset < 0 || offset + j.dim() > target_dim)
            throw DimensionMismatch("jet embedding does not fit target dimension");
        Jet4 r(target_dim);
        const JetTable& src = *j.tab_;
        MultiIndex mu(target_dim, 0);
        for (int i = 0; i < src.size(); ++i) {
            std::fill(mu.begin(), mu.end(), 0);
            const MultiIndex& e = src.exponents(i);
            for (int v = 0; v < j.dim(); ++v) mu[offset + v] = e[v];
            r.c_[r.tab_->index(mu)] = j.c_[i];
        }
        return r;
    }

private:
    void check(const Jet4& o) const {
        if (tab_ != o.tab_) throw DimensionMismatch("jet dimension mismatch");
    }

    const JetTable* tab_;
    std::vector<double> c_;
};

inline double extract_partial(const Jet4& j, const MultiIndex& mu) {
    return j.partial(mu);
}

} // namespace affinv
