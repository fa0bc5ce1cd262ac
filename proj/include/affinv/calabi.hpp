#pragma once

// Calabi composition of r points and s hyperbolic affine hyperspheres with
// common affine center at the origin: warped products of exponentials in the
// t-coordinates with the factor immersions, plus the closed-form invariant
// tables of the composed hypersurface.

#include <cmath>
#include <sstream>
#include <utility>

#include "geometry.hpp"
#include "immersion.hpp"

namespace affinv {

struct FactorSpec {
    ImmersionPtr immersion; // hyperbolic affine sphere, affine center at 0
    int dim = 0;            // n_alpha >= 1
    double L1 = 0.0;        // affine mean curvature, < 0
};

struct CompositionSpec {
    int r = 0; // point factors
    std::vector<FactorSpec> factors;
    VecD constants; // K = r + s positive weights

    int s() const { return static_cast<int>(factors.size()); }
    int K() const { return r + s(); }
    int total_dim() const {
        int n = K() - 1;
        for (const FactorSpec& f : factors) n += f.dim;
        return n;
    }

    void validate() const {
        if (r < 0) throw InvalidParameter("composition: r must be nonnegative");
        if (K() < 2) throw InvalidParameter("composition: needs at least two slots");
        if (static_cast<int>(constants.size()) != K())
            throw InvalidParameter("composition: one positive constant per slot required");
        for (double c : constants)
            if (!(c > 0.0)) throw InvalidParameter("composition: constants must be positive");
        for (const FactorSpec& f : factors) {
            if (!f.immersion) throw InvalidParameter("composition: missing factor immersion");
            if (f.dim < 1) throw InvalidParameter("composition: factor dimension must be >= 1");
            if (f.immersion->dim() != f.dim)
                throw InvalidParameter("composition: factor dimension mismatch");
            if (!(f.L1 < 0.0))
                throw InvalidParameter("composition: factor mean curvature must be negative");
        }
    }
};

// Slot bookkeeping: f_a = a for point slots, f_a = sum of earlier factor
// dims + a for sphere slots; offsets locate each factor block inside the
// product chart (t_1..t_{K-1}, factor coordinates).
struct FTable {
    int K = 0, n = 0;
    std::vector<int> f;        // f[a-1] = f_a, a = 1..K
    std::vector<int> slot_dim; // 0 for points, n_alpha for factor slots
    std::vector<int> offset;   // per factor, start in the chart coordinates
};

inline FTable f_table(const CompositionSpec& spec) {
    spec.validate();
    FTable ft;
    ft.K = spec.K();
    ft.n = spec.total_dim();
    ft.f.resize(ft.K);
    ft.slot_dim.assign(ft.K, 0);
    int dim_sum = 0;
    for (int a = 1; a <= ft.K; ++a) {
        if (a <= spec.r) {
            ft.f[a - 1] = a;
        } else {
            int na = spec.factors[a - spec.r - 1].dim;
            ft.slot_dim[a - 1] = na;
            dim_sum += na;
            ft.f[a - 1] = dim_sum + a;
        }
    }
    ft.offset.resize(spec.s());
    int off = ft.K - 1;
    for (int i = 0; i < spec.s(); ++i) {
        ft.offset[i] = off;
        off += spec.factors[i].dim;
    }
    return ft;
}

class CalabiComposition final : public Immersion {
public:
    explicit CalabiComposition(CompositionSpec spec)
        : spec_(std::move(spec)), ft_(f_table(spec_)) {}

    const CompositionSpec& spec() const { return spec_; }
    const FTable& table() const { return ft_; }

    int dim() const override { return ft_.n; }

    bool in_chart(const VecD& p) const override {
        for (int i = 0; i < spec_.s(); ++i) {
            VecD sub(p.begin() + ft_.offset[i], p.begin() + ft_.offset[i] + spec_.factors[i].dim);
            if (!spec_.factors[i].immersion->in_chart(sub)) return false;
        }
        return true;
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "calabi(r=" << spec_.r;
        for (const FactorSpec& f : spec_.factors) os << ", " << f.immersion->describe();
        os << ")";
        return os.str();
    }

    VecD values(const VecD& p) const override {
        require_chart(p);
        VecD out;
        out.reserve(ft_.n + 1);
        for (int a = 1; a <= spec_.r; ++a)
            out.push_back(spec_.constants[a - 1] * slot_exp(a, p));
        for (int i = 0; i < spec_.s(); ++i) {
            int a = spec_.r + 1 + i;
            double ce = spec_.constants[a - 1] * slot_exp(a, p);
            VecD sub(p.begin() + ft_.offset[i], p.begin() + ft_.offset[i] + spec_.factors[i].dim);
            for (double v : spec_.factors[i].immersion->values(sub)) out.push_back(ce * v);
        }
        return out;
    }

    std::vector<Jet4> jets(const std::vector<Jet4>& vars) const override {
        std::vector<Jet4> out;
        out.reserve(ft_.n + 1);
        for (int a = 1; a <= spec_.r; ++a)
            out.push_back(slot_exp(a, vars) * spec_.constants[a - 1]);
        for (int i = 0; i < spec_.s(); ++i) {
            int a = spec_.r + 1 + i;
            Jet4 ce = slot_exp(a, vars) * spec_.constants[a - 1];
            std::vector<Jet4> sub(vars.begin() + ft_.offset[i],
                                  vars.begin() + ft_.offset[i] + spec_.factors[i].dim);
            for (const Jet4& v : spec_.factors[i].immersion->jets(sub)) out.push_back(ce * v);
        }
        return out;
    }

private:
    // e_a = exp(-t_{a-1}/(n_a+1) + sum_{b=a}^{K-1} t_b/f_b); the t block is
    // the leading K-1 chart coordinates.
    template <class S>
    S slot_exp(int a, const std::vector<S>& v) const {
        using std::exp;
        S ex = v[0] * 0.0;
        if (a >= 2) ex -= v[a - 2] * (1.0 / (ft_.slot_dim[a - 1] + 1));
        for (int b = a; b <= ft_.K - 1; ++b) ex += v[b - 1] * (1.0 / ft_.f[b - 1]);
        return exp(ex);
    }

    CompositionSpec spec_;
    FTable ft_;
};

inline ImmersionPtr compose(const CompositionSpec& spec) {
    return std::make_shared<CalabiComposition>(spec);
}

struct CompositionConstants {
    double C = 0.0, L1 = 0.0;
};

inline CompositionConstants composition_constants(const CompositionSpec& spec) {
    spec.validate();
    const int n = spec.total_dim();
    double prod = 1.0 / (n + 1);
    for (int a = 1; a <= spec.r; ++a) prod *= spec.constants[a - 1] * spec.constants[a - 1];
    for (int i = 0; i < spec.s(); ++i) {
        const FactorSpec& f = spec.factors[i];
        double c = spec.constants[spec.r + i];
        prod *= std::pow(c, 2.0 * (f.dim + 1)) /
                (std::pow(f.dim + 1.0, f.dim + 1.0) * std::pow(-f.L1, f.dim + 2.0));
    }
    CompositionConstants cc;
    cc.C = std::pow(prod, 1.0 / (n + 2));
    cc.L1 = -1.0 / ((n + 1) * cc.C);
    return cc;
}

// Closed-form tables of the composed hypersurface at one product point. The
// factor metric and cubic form are taken from the factor's own jet pipeline,
// keeping this table independent of the composed pipeline it checks.
struct ClosedFormInvariants {
    double C = 0.0, L1 = 0.0;
    MatD g_lambda;         // (K-1) x (K-1) flat block
    VecD factor_conformal; // per factor: (n_alpha+1)(-L1_alpha)C
    MatD g;                // full n x n metric
    Ten3D A;               // full symmetric cubic form
    MatD H;                // s x (K-1): mean transversals in the t-frame
};

inline ClosedFormInvariants closed_form_invariants(const CompositionSpec& spec,
                                                   const VecD& point) {
    const FTable ft = f_table(spec);
    const CompositionConstants cc = composition_constants(spec);
    const int K = ft.K, n = ft.n, r = spec.r, s = spec.s();
    if (static_cast<int>(point.size()) != n)
        throw DimensionMismatch("closed_form_invariants: point dimension");

    ClosedFormInvariants cf;
    cf.C = cc.C;
    cf.L1 = cc.L1;
    cf.g_lambda = MatD(K - 1, K - 1, 0.0);
    cf.factor_conformal.resize(s);
    cf.g = MatD(n, n, 0.0);
    cf.A = Ten3D(n, 0.0);
    cf.H = MatD(s, K - 1, 0.0);

    auto set_sym = [&](int i, int j, int k, double v) {
        cf.A(i, j, k) = cf.A(i, k, j) = cf.A(j, i, k) = v;
        cf.A(j, k, i) = cf.A(k, i, j) = cf.A(k, j, i) = v;
    };

    // t-block metric and cubic components
    for (int lam = 1; lam <= K - 1; ++lam) {
        int dnext = ft.slot_dim[lam]; // slot lam+1
        double glam = ft.f[lam] * cc.C / (ft.f[lam - 1] * (dnext + 1.0));
        cf.g_lambda(lam - 1, lam - 1) = glam;
        cf.g(lam - 1, lam - 1) = glam;
        set_sym(lam - 1, lam - 1, lam - 1, glam * (1.0 / ft.f[lam - 1] - 1.0 / (dnext + 1.0)));
        for (int mu = lam + 1; mu <= K - 1; ++mu)
            set_sym(lam - 1, lam - 1, mu - 1, glam / ft.f[mu - 1]);
    }

    // factor blocks
    for (int fi = 0; fi < s; ++fi) {
        const FactorSpec& fac = spec.factors[fi];
        const int na = fac.dim, o = ft.offset[fi];
        const int atld = r + 1 + fi; // slot index of this factor
        VecD sub(point.begin() + o, point.begin() + o + na);
        PointInvariants pin = point_invariants(*fac.immersion, sub);
        double sigma = (na + 1.0) * (-fac.L1) * cc.C;
        cf.factor_conformal[fi] = sigma;
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < na; ++j) cf.g(o + i, o + j) = sigma * pin.g(i, j);
        for (int i = 0; i < na; ++i)
            for (int j = i; j < na; ++j) {
                // equals -(1/(n_alpha+1)) g_{ij} of the composed metric
                if (atld - 1 >= 1)
                    set_sym(o + i, o + j, atld - 2, fac.L1 * cc.C * pin.g(i, j));
                for (int b = fi; b <= s - 2; ++b) {
                    int col = r + b; // t-index of slot beta >= alpha, still <= K-1
                    set_sym(o + i, o + j, col, sigma * pin.g(i, j) / ft.f[col]);
                }
            }
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < na; ++j)
                for (int k = 0; k < na; ++k)
                    cf.A(o + i, o + j, o + k) = sigma * pin.A(i, j, k);
    }

    // mean transversals
    for (int fi = 0; fi < s; ++fi) {
        const int atld = r + 1 + fi;
        if (atld - 1 >= 1)
            cf.H(fi, atld - 2) = -static_cast<double>(ft.f[atld - 2]) / (ft.f[atld - 1] * cc.C);
        for (int b = fi; b < s - 1; ++b) {
            int btld = r + 1 + b;
            cf.H(fi, btld - 1) = (spec.factors[b + 1].dim + 1.0) / (cc.C * ft.f[btld]);
        }
    }
    return cf;
}

// Gram matrix of the closed-form mean transversals under the flat block.
inline MatD closed_form_H_gram(const ClosedFormInvariants& cf) {
    const int s = cf.H.rows(), q = cf.H.cols();
    MatD gram(s, s, 0.0);
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
            double v = 0.0;
            for (int l = 0; l < q; ++l)
                for (int m = 0; m < q; ++m) v += cf.H(a, l) * cf.g_lambda(l, m) * cf.H(b, m);
            gram(a, b) = v;
        }
    return gram;
}

} // namespace affinv
