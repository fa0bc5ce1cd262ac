#pragma once

// Built-in hyperbolic affine hypersphere factors with known ground truth:
// the flat hypersphere x^1...x^{n0+1} = C0 (parametrized by warping
// exponentials) and the hyperboloid quadric branch.

#include <cmath>
#include <optional>
#include <sstream>

#include "immersion.hpp"

namespace affinv {

struct CatalogEntry {
    enum class Kind { Flat, Quadric } kind;
    int dim;
    double c0; // flat only
};

inline std::vector<CatalogEntry> catalog_entries() {
    return {
        {CatalogEntry::Kind::Flat, 1, 1.0},
        {CatalogEntry::Kind::Flat, 2, 1.0},
        {CatalogEntry::Kind::Flat, 3, 1.0},
        {CatalogEntry::Kind::Flat, 4, 1.0},
        {CatalogEntry::Kind::Quadric, 1, 0.0},
        {CatalogEntry::Kind::Quadric, 2, 0.0},
        {CatalogEntry::Kind::Quadric, 3, 0.0},
    };
}

class FlatHypersphere final : public Immersion {
public:
    FlatHypersphere(int n0, double c0) : n0_(n0), c0_(c0) {
        if (n0 < 1) throw InvalidParameter("flat hypersphere needs dim >= 1");
        if (!(c0 > 0.0)) throw InvalidParameter("flat hypersphere needs C0 > 0");
    }

    int dim() const override { return n0_; }
    double c0() const { return c0_; }
    bool in_chart(const VecD&) const override { return true; }
    std::string describe() const override {
        std::ostringstream os;
        os << "flat(" << n0_ << ", " << c0_ << ")";
        return os.str();
    }

    VecD values(const VecD& point) const override {
        require_chart(point);
        return formula(point);
    }
    std::vector<Jet4> jets(const std::vector<Jet4>& vars) const override {
        return formula(vars);
    }

private:
    // Composition of n0+1 points: component a is c_a * exp(-t_{a-1} +
    // sum_{b>=a} t_b / b), with c = (1,...,1,C0). The product of all
    // components telescopes to C0.
    template <class S>
    std::vector<S> formula(const std::vector<S>& t) const {
        using std::exp;
        const int K = n0_ + 1;
        std::vector<S> out;
        out.reserve(K);
        for (int a = 1; a <= K; ++a) {
            S ex = t[0] * 0.0;
            if (a >= 2) ex -= t[a - 2];
            for (int b = a; b <= K - 1; ++b) ex += t[b - 1] * (1.0 / b);
            S e = exp(ex);
            out.push_back(a == K ? e * c0_ : e);
        }
        return out;
    }

    int n0_;
    double c0_;
};

// Closed forms of the flat hypersphere: diagonal metric, affine mean
// curvature, cubic form and Pick invariant.
struct FlatClosedForms {
    MatD g;
    double L1;
    Ten3D A;
    std::optional<double> J; // absent for n0 = 1
};

inline FlatClosedForms flat_closed_forms(int n0, double c0) {
    if (n0 < 1 || !(c0 > 0.0)) throw InvalidParameter("flat_closed_forms: bad parameters");
    const double s0 = std::pow(c0 * c0 / (n0 + 1), 1.0 / (n0 + 2));
    FlatClosedForms out;
    out.g = MatD(n0, n0, 0.0);
    for (int l = 1; l <= n0; ++l) out.g(l - 1, l - 1) = (l + 1.0) / l * s0;
    out.L1 = -std::pow(n0 + 1.0, -(n0 + 1.0) / (n0 + 2.0)) * std::pow(c0, -2.0 / (n0 + 2.0));
    out.A = Ten3D(n0, 0.0);
    auto set_sym = [&](int i, int j, int k, double v) {
        out.A(i, j, k) = out.A(i, k, j) = out.A(j, i, k) = v;
        out.A(j, k, i) = out.A(k, i, j) = out.A(k, j, i) = v;
    };
    for (int l = 1; l <= n0; ++l) {
        set_sym(l - 1, l - 1, l - 1, -((double)l * l - 1.0) / (l * (double)l) * s0);
        for (int nu = l + 1; nu <= n0; ++nu)
            set_sym(l - 1, l - 1, nu - 1, (l + 1.0) / ((double)l * nu) * s0);
    }
    if (n0 >= 2) out.J = -out.L1;
    return out;
}

class QuadricHypersphere final : public Immersion {
public:
    explicit QuadricHypersphere(int n) : n_(n) {
        if (n < 1) throw InvalidParameter("quadric hypersphere needs dim >= 1");
    }

    int dim() const override { return n_; }
    bool in_chart(const VecD&) const override { return true; }
    std::string describe() const override {
        return "quadric(" + std::to_string(n_) + ")";
    }

    // The hyperboloid branch has xi = x, so it is a proper hyperbolic affine
    // sphere with affine center the origin and L1 = -1 in every dimension.
    static constexpr double kL1 = -1.0;

    VecD values(const VecD& point) const override {
        require_chart(point);
        return formula(point);
    }
    std::vector<Jet4> jets(const std::vector<Jet4>& vars) const override {
        return formula(vars);
    }

private:
    template <class S>
    std::vector<S> formula(const std::vector<S>& u) const {
        using std::sqrt;
        std::vector<S> out(u);
        S q = u[0] * 0.0 + 1.0;
        for (const S& ui : u) q += ui * ui;
        out.push_back(sqrt(q));
        return out;
    }

    int n_;
};

inline ImmersionPtr flat_hypersphere(int n0, double c0) {
    return std::make_shared<FlatHypersphere>(n0, c0);
}
inline ImmersionPtr quadric_hypersphere(int n) {
    return std::make_shared<QuadricHypersphere>(n);
}

} // namespace affinv
