#pragma once

// Equiaffine invariants of a locally strongly convex immersion at a point,
// computed entirely in order-4 jet arithmetic so that the affine normal and
// the shape operator come out of exact truncated Taylor data. The
// identities of the structure equations are evaluated as residuals.

#include <map>
#include <optional>
#include <string>

#include "immersion.hpp"
#include "linalg.hpp"

namespace affinv {

struct TaylorData {
    int n = 0;
    VecD point;
    std::vector<Jet4> x; // n+1 component jets over n variables
};

struct BlaschkeData {
    Mat<Jet4> h_jets, g_jets, ginv_jets;
    Jet4 detD, detg;
    MatD h, g, g_inv;
    double detH = 0.0;
};

struct ShapeData {
    VecD xi;
    std::vector<Jet4> xi_jets;
    MatD B; // mixed indices, B(k,i) = B^k_i
    double L1 = 0.0;
    double weingarten_tangency = 0.0;
};

struct CubicData {
    Ten3D gamma_induced, gamma_lc; // Gamma^k_ij stored as (k,i,j)
    Ten3<Jet4> gamma_lc_jets;
    Ten3<Jet4> A_jets; // lowered, symmetrized
    Ten3D A;
    MatD h_gauss; // coefficient of xi in the Gauss formula
    double h_equals_g = 0.0;
    double symmetry_A = 0.0;
};

struct CurvatureData {
    Ten4D R; // lowered, R(i,j,k,l) = g(R(e_i,e_j)e_k, e_l)
    std::optional<double> chi, J;
};

struct PointInvariants {
    int n = 0;
    MatD h;
    double detH = 0.0;
    MatD g, g_inv;
    VecD xi;
    Ten3D gamma_induced, gamma_lc;
    Ten3D A;
    MatD B;
    double L1 = 0.0;
    Ten4D R;
    std::optional<double> chi, J;
    std::map<std::string, double> residuals;
};

inline TaylorData taylor4(const Immersion& spec, const VecD& point) {
    TaylorData td;
    td.n = spec.dim();
    td.point = point;
    td.x = spec.jets(spec.seed(point));
    if (static_cast<int>(td.x.size()) != td.n + 1)
        throw DimensionMismatch("immersion must produce n+1 ambient components");
    // rank check on the differential via its Gram matrix
    const int n = td.n;
    MatD gram(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int A = 0; A <= n; ++A) {
                MultiIndex mi(n, 0), mj(n, 0);
                mi[i] = 1;
                mj[j] = 1;
                gram(i, j) += td.x[A].coeff(mi) * td.x[A].coeff(mj);
            }
    VecD ev = sym_eigenvalues(gram);
    double lo = ev[0], hi = ev[0];
    for (double e : ev) {
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (!(lo > 1e-12 * std::max(hi, 1.0)))
        throw DegenerateImmersion("differential of " + spec.describe() + " is rank deficient");
    return td;
}

namespace detail {

struct JetDerivs {
    std::vector<std::vector<Jet4>> dx;               // [i][A]
    std::vector<std::vector<std::vector<Jet4>>> ddx; // [i][j][A]
};

inline JetDerivs jet_derivs(const TaylorData& td) {
    const int n = td.n;
    JetDerivs d;
    d.dx.resize(n);
    for (int i = 0; i < n; ++i) {
        d.dx[i].reserve(n + 1);
        for (int A = 0; A <= n; ++A) d.dx[i].push_back(derivative(td.x[A], i));
    }
    d.ddx.assign(n, std::vector<std::vector<Jet4>>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            std::vector<Jet4> col;
            col.reserve(n + 1);
            for (int A = 0; A <= n; ++A) col.push_back(derivative(d.dx[i][A], j));
            d.ddx[i][j] = col;
            if (j != i) d.ddx[j][i] = col;
        }
    return d;
}

// Signed minors of the (n+1) x n matrix of first derivatives: appending a
// column v gives det = sum_A v[A] * K[A].
inline std::vector<Jet4> frame_cofactors(const JetDerivs& d, int n) {
    std::vector<Jet4> K;
    K.reserve(n + 1);
    for (int A = 0; A <= n; ++A) {
        Mat<Jet4> m(n, n);
        int row = 0;
        for (int B = 0; B <= n; ++B) {
            if (B == A) continue;
            for (int i = 0; i < n; ++i) m(row, i) = d.dx[i][B];
            ++row;
        }
        Jet4 minor = (n > 0) ? det(m) : Jet4();
        double sign = ((A + n) % 2 == 0) ? 1.0 : -1.0;
        K.push_back(minor * sign);
    }
    return K;
}

} // namespace detail

inline BlaschkeData blaschke_metric(const TaylorData& td) {
    const int n = td.n;
    detail::JetDerivs d = detail::jet_derivs(td);
    std::vector<Jet4> K = detail::frame_cofactors(d, n);

    BlaschkeData bl;
    bl.h_jets = Mat<Jet4>(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            Jet4 hij(n);
            for (int A = 0; A <= n; ++A) hij += d.ddx[i][j][A] * K[A];
            bl.h_jets(i, j) = hij;
            if (j != i) bl.h_jets(j, i) = hij;
        }

    MatD hval(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) hval(i, j) = bl.h_jets(i, j).value();
    switch (classify_definite(hval)) {
    case Definiteness::PositiveDefinite:
        break;
    case Definiteness::NegativeDefinite:
        // reorient the frame
        for (auto& j : bl.h_jets.data()) j *= -1.0;
        break;
    case Definiteness::Indefinite:
        throw NotLocallyConvex("second-derivative form is indefinite");
    case Definiteness::Degenerate:
        throw DegenerateHessian("second-derivative form is degenerate");
    }

    bl.detD = det(bl.h_jets);
    if (!(bl.detD.value() > 0.0))
        throw DegenerateHessian("det of second-derivative form vanishes");
    bl.detH = bl.detD.value();

    Jet4 scale = pow(bl.detD, -1.0 / (n + 2));
    bl.g_jets = Mat<Jet4>(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) bl.g_jets(i, j) = scale * bl.h_jets(i, j);
    bl.detg = det(bl.g_jets);
    bl.ginv_jets = inverse(bl.g_jets);

    bl.h = MatD(n, n);
    bl.g = MatD(n, n);
    bl.g_inv = MatD(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            bl.h(i, j) = bl.h_jets(i, j).value();
            bl.g(i, j) = bl.g_jets(i, j).value();
            bl.g_inv(i, j) = bl.ginv_jets(i, j).value();
        }
    return bl;
}

inline ShapeData affine_normal_shape(const TaylorData& td, const BlaschkeData& bl) {
    const int n = td.n;
    detail::JetDerivs d = detail::jet_derivs(td);

    Jet4 sqrtdetg = sqrt(bl.detg);
    Jet4 inv_sqrtdetg = reciprocal(sqrtdetg);

    ShapeData sh;
    sh.xi_jets.reserve(n + 1);
    for (int A = 0; A <= n; ++A) {
        Jet4 acc(n);
        for (int i = 0; i < n; ++i) {
            Jet4 flux(n);
            for (int j = 0; j < n; ++j) flux += bl.ginv_jets(i, j) * d.dx[j][A];
            acc += derivative(sqrtdetg * flux, i);
        }
        sh.xi_jets.push_back(inv_sqrtdetg * acc * (1.0 / n));
    }
    sh.xi.resize(n + 1);
    for (int A = 0; A <= n; ++A) sh.xi[A] = sh.xi_jets[A].value();

    // frame [x_1 ... x_n xi]; Weingarten: d_i xi = -x_*(B e_i) + (tangency) xi
    MatD F(n + 1, n + 1);
    for (int A = 0; A <= n; ++A) {
        for (int i = 0; i < n; ++i) F(A, i) = d.dx[i][A].value();
        F(A, n) = sh.xi[A];
    }
    MatD rhs(n + 1, n);
    for (int A = 0; A <= n; ++A)
        for (int i = 0; i < n; ++i) rhs(A, i) = derivative(sh.xi_jets[A], i).value();
    MatD coef = solve(F, rhs);

    sh.B = MatD(n, n);
    sh.weingarten_tangency = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) sh.B(k, i) = -coef(k, i);
        sh.weingarten_tangency = std::max(sh.weingarten_tangency, std::fabs(coef(n, i)));
    }
    double tr = 0.0;
    for (int k = 0; k < n; ++k) tr += sh.B(k, k);
    sh.L1 = tr / n;
    return sh;
}

inline CubicData connections_cubic(const TaylorData& td, const BlaschkeData& bl,
                                   const ShapeData& sh) {
    const int n = td.n;
    detail::JetDerivs d = detail::jet_derivs(td);

    // Gauss formula x_ij = Gamma^k_ij x_k + h_ij xi, solved in jets so the
    // cubic form keeps first-order validity.
    Mat<Jet4> F(n + 1, n + 1);
    for (int A = 0; A <= n; ++A) {
        for (int i = 0; i < n; ++i) F(A, i) = d.dx[i][A];
        F(A, n) = sh.xi_jets[A];
    }
    Mat<Jet4> rhs(n + 1, n * n);
    for (int A = 0; A <= n; ++A)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) rhs(A, i * n + j) = d.ddx[i][j][A];
    Mat<Jet4> coef = solve(F, rhs);

    CubicData cu;
    cu.gamma_induced = Ten3D(n, 0.0);
    cu.h_gauss = MatD(n, n);
    Ten3<Jet4> gamma_ind_jets(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                gamma_ind_jets(k, i, j) = coef(k, i * n + j);
                cu.gamma_induced(k, i, j) = coef(k, i * n + j).value();
            }
            cu.h_gauss(i, j) = coef(n, i * n + j).value();
        }
    cu.h_equals_g = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cu.h_equals_g = std::max(cu.h_equals_g, std::fabs(cu.h_gauss(i, j) - bl.g(i, j)));

    // Levi-Civita connection of g from the metric jets
    cu.gamma_lc_jets = Ten3<Jet4>(n);
    cu.gamma_lc = Ten3D(n, 0.0);
    std::vector<std::vector<Mat<Jet4>>> dg(n); // dg[k] = partial_k g
    for (int k = 0; k < n; ++k) {
        Mat<Jet4> m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = derivative(bl.g_jets(i, j), k);
        dg[k].push_back(m);
    }
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Jet4 acc(n);
                for (int k = 0; k < n; ++k)
                    acc += bl.ginv_jets(l, k) *
                           (dg[i][0](j, k) + dg[j][0](i, k) - dg[k][0](i, j));
                acc *= 0.5;
                cu.gamma_lc_jets(l, i, j) = acc;
                cu.gamma_lc(l, i, j) = acc.value();
            }

    // A_ijk = g_kl (Gamma^l_ij - hat Gamma^l_ij), then symmetrize
    Ten3<Jet4> Araw(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Jet4 acc(n);
                for (int l = 0; l < n; ++l)
                    acc += bl.g_jets(k, l) * (gamma_ind_jets(l, i, j) - cu.gamma_lc_jets(l, i, j));
                Araw(i, j, k) = acc;
            }
    cu.A_jets = Ten3<Jet4>(n);
    cu.A = Ten3D(n, 0.0);
    cu.symmetry_A = 0.0;
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                int idx[3] = {i, j, k};
                Jet4 acc(n);
                for (const auto& p : perms)
                    acc += Araw(idx[p[0]], idx[p[1]], idx[p[2]]);
                acc *= 1.0 / 6.0;
                cu.A_jets(i, j, k) = acc;
                cu.A(i, j, k) = acc.value();
                cu.symmetry_A =
                    std::max(cu.symmetry_A, std::fabs(Araw(i, j, k).value() - acc.value()));
            }
    return cu;
}

inline CurvatureData curvature_scalars(const TaylorData& td, const BlaschkeData& bl,
                                       const CubicData& cu) {
    const int n = td.n;
    CurvatureData cv;
    cv.R = Ten4D(n);
    for (auto& x : cv.R.data()) x = 0.0;
    // R(e_i,e_j)e_k = (d_i hatGamma^l_jk - d_j hatGamma^l_ik + hatGamma hatGamma) e_l
    Ten4D Rmixed(n); // (l, i, j, k)
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = derivative(cu.gamma_lc_jets(l, j, k), i).value() -
                               derivative(cu.gamma_lc_jets(l, i, k), j).value();
                    for (int m = 0; m < n; ++m)
                        v += cu.gamma_lc(l, i, m) * cu.gamma_lc(m, j, k) -
                             cu.gamma_lc(l, j, m) * cu.gamma_lc(m, i, k);
                    Rmixed(l, i, j, k) = v;
                }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = 0.0;
                    for (int m = 0; m < n; ++m) v += bl.g(l, m) * Rmixed(m, i, j, k);
                    cv.R(i, j, k, l) = v;
                }
    if (n >= 2) {
        double chi = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        chi += bl.g_inv(i, l) * bl.g_inv(j, k) * cv.R(i, j, k, l);
        cv.chi = chi / (n * (n - 1.0));
        double J = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q)
                            for (int r = 0; r < n; ++r)
                                J += cu.A(i, j, k) * cu.A(p, q, r) * bl.g_inv(i, p) *
                                     bl.g_inv(j, q) * bl.g_inv(k, r);
        cv.J = J / (n * (n - 1.0));
    }
    return cv;
}

namespace detail {

// g([A(e_i),A(e_j)]e_k, e_l) for a lowered cubic form
inline Ten4D cubic_commutator(const MatD& g_inv, const Ten3D& A) {
    const int n = A.dim();
    Ten3D Araised(n, 0.0); // A^m_{ij} stored (m,i,j)
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = 0.0;
                for (int p = 0; p < n; ++p) v += g_inv(m, p) * A(p, i, j);
                Araised(m, i, j) = v;
            }
    Ten4D C(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = 0.0;
                    for (int m = 0; m < n; ++m)
                        v += Araised(m, j, k) * A(i, m, l) - Araised(m, i, k) * A(j, m, l);
                    C(i, j, k, l) = v;
                }
    return C;
}

} // namespace detail

// Covariant derivative A_{ijk,l} of the symmetrized cubic form.
inline Ten4D cubic_covariant_derivative(const CubicData& cu) {
    const int n = cu.A.dim();
    Ten4D dA(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = derivative(cu.A_jets(i, j, k), l).value();
                    for (int m = 0; m < n; ++m)
                        v -= cu.gamma_lc(m, l, i) * cu.A(m, j, k) +
                             cu.gamma_lc(m, l, j) * cu.A(i, m, k) +
                             cu.gamma_lc(m, l, k) * cu.A(i, j, m);
                    dA(i, j, k, l) = v;
                }
    return dA;
}

inline std::map<std::string, double> residual_suite(const BlaschkeData& bl, const ShapeData& sh,
                                                    const CubicData& cu, const CurvatureData& cv) {
    const int n = bl.g.rows();
    std::map<std::string, double> res;

    double apol = 0.0;
    for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) v += bl.g_inv(i, j) * cu.A(i, j, k);
        apol = std::max(apol, std::fabs(v));
    }
    res["apolarity"] = apol;

    // lowered shape forms
    MatD Blow(n, n, 0.0), Bsphere(n, n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            double v = 0.0;
            for (int m = 0; m < n; ++m) v += bl.g(i, m) * sh.B(m, l);
            Blow(i, l) = v;
            Bsphere(i, l) = sh.L1 * bl.g(i, l);
        }

    Ten4D C = detail::cubic_commutator(bl.g_inv, cu.A);
    auto gauss_res = [&](const MatD& Bl) {
        double r = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double rhs = 0.5 * (bl.g(j, k) * Bl(i, l) + Bl(j, k) * bl.g(i, l) -
                                            bl.g(i, k) * Bl(j, l) - Bl(i, k) * bl.g(j, l)) -
                                     C(i, j, k, l);
                        r = std::max(r, std::fabs(cv.R(i, j, k, l) - rhs));
                    }
        return r;
    };
    res["gauss_general"] = gauss_res(Blow);
    res["gauss_sphere"] = gauss_res(Bsphere);

    Ten4D dA = cubic_covariant_derivative(cu);
    double cod = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double rhs = 0.5 * (bl.g(i, k) * Blow(j, l) + bl.g(j, k) * Blow(i, l) -
                                        bl.g(i, l) * Blow(j, k) - bl.g(j, l) * Blow(i, k));
                    cod = std::max(cod, std::fabs(dA(i, j, k, l) - dA(i, j, l, k) - rhs));
                }
    res["codazzi_basic3"] = cod;

    double trc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double lhs = 0.0;
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) lhs += bl.g_inv(l, m) * dA(m, i, j, l);
            double rhs = 0.5 * n * (sh.L1 * bl.g(i, j) - Blow(i, j));
            trc = std::max(trc, std::fabs(lhs - rhs));
        }
    res["trace_codazzi"] = trc;

    double gmf = 0.0;
    if (cv.chi && cv.J) {
        MatD T(n, n, 0.0); // contracted covariant derivative of A
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                double v = 0.0;
                for (int m = 0; m < n; ++m)
                    for (int p = 0; p < n; ++p) v += bl.g_inv(m, p) * dA(j, l, p, m);
                T(j, l) = v;
            }
        Ten3D Araised(n, 0.0);
        for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    double v = 0.0;
                    for (int p = 0; p < n; ++p) v += bl.g_inv(m, p) * cu.A(p, i, k);
                    Araised(m, i, k) = v;
                }
        double cJ = *cv.chi - *cv.J;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        double rhs = (dA(i, j, k, l) - dA(i, j, l, k)) +
                                     cJ * (bl.g(i, l) * bl.g(j, k) - bl.g(i, k) * bl.g(j, l)) +
                                     (2.0 / n) * (bl.g(i, k) * T(j, l) - bl.g(i, l) * T(j, k));
                        for (int m = 0; m < n; ++m)
                            rhs += Araised(m, i, k) * cu.A(j, l, m) -
                                   Araised(m, i, l) * cu.A(j, k, m);
                        gmf = std::max(gmf, std::fabs(cv.R(i, j, k, l) - rhs));
                    }
    }
    res["gauss_metric_form"] = gmf;

    res["weingarten_tangency"] = sh.weingarten_tangency;
    res["h_equals_g"] = cu.h_equals_g;
    res["symmetry_A"] = cu.symmetry_A;
    return res;
}

inline PointInvariants point_invariants(const Immersion& spec, const VecD& point) {
    TaylorData td = taylor4(spec, point);
    BlaschkeData bl = blaschke_metric(td);
    ShapeData sh = affine_normal_shape(td, bl);
    CubicData cu = connections_cubic(td, bl, sh);
    CurvatureData cv = curvature_scalars(td, bl, cu);

    PointInvariants inv;
    inv.n = td.n;
    inv.h = bl.h;
    inv.detH = bl.detH;
    inv.g = bl.g;
    inv.g_inv = bl.g_inv;
    inv.xi = sh.xi;
    inv.gamma_induced = cu.gamma_induced;
    inv.gamma_lc = cu.gamma_lc;
    inv.A = cu.A;
    inv.B = sh.B;
    inv.L1 = sh.L1;
    inv.R = cv.R;
    inv.chi = cv.chi;
    inv.J = cv.J;
    inv.residuals = residual_suite(bl, sh, cu, cv);
    return inv;
}

// Membership in the sets of cubic data satisfying the affine Gauss equation
// at constant c (and, for S, apolarity).
struct SMembershipReport {
    double symmetry = 0.0;
    double gauss = 0.0;
    double apolarity = 0.0;
    bool symmetry_ok = false, gauss_ok = false, apolarity_ok = false;
    bool with_apolarity = true;
    bool member() const {
        return symmetry_ok && gauss_ok && (!with_apolarity || apolarity_ok);
    }
};

inline SMembershipReport check_S_membership(const MatD& g, const Ten3D& A, const Ten4D& R,
                                            double c, bool with_apolarity, double tol = 1e-7) {
    const int n = g.rows();
    if (A.dim() != n || R.dim() != n) throw DimensionMismatch("S-membership: dimension mismatch");
    SMembershipReport rep;
    rep.with_apolarity = with_apolarity;

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double m = (A(i, j, k) + A(i, k, j) + A(j, i, k) + A(j, k, i) + A(k, i, j) +
                            A(k, j, i)) /
                           6.0;
                rep.symmetry = std::max(rep.symmetry, std::fabs(A(i, j, k) - m));
            }

    MatD g_inv = inverse(g);
    Ten4D C = detail::cubic_commutator(g_inv, A);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double rhs = c * (g(j, k) * g(i, l) - g(i, k) * g(j, l)) - C(i, j, k, l);
                    rep.gauss = std::max(rep.gauss, std::fabs(R(i, j, k, l) - rhs));
                }

    for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) v += g_inv(i, j) * A(i, j, k);
        rep.apolarity = std::max(rep.apolarity, std::fabs(v));
    }

    double Anorm = max_abs(A), Rnorm = max_abs(R);
    rep.symmetry_ok = rep.symmetry <= tol * (1.0 + Anorm);
    rep.gauss_ok = rep.gauss <= tol * (1.0 + Rnorm + std::fabs(c) * max_abs(g) * max_abs(g));
    rep.apolarity_ok = rep.apolarity <= tol * (1.0 + Anorm);
    return rep;
}

// Fold over samples: worst residual per condition.
inline SMembershipReport check_S_membership(const std::vector<MatD>& gs,
                                            const std::vector<Ten3D>& As,
                                            const std::vector<Ten4D>& Rs, double c,
                                            bool with_apolarity, double tol = 1e-7) {
    if (gs.size() != As.size() || gs.size() != Rs.size())
        throw DimensionMismatch("S-membership: sample count mismatch");
    SMembershipReport out;
    out.with_apolarity = with_apolarity;
    out.symmetry_ok = out.gauss_ok = out.apolarity_ok = true;
    for (size_t i = 0; i < gs.size(); ++i) {
        SMembershipReport r = check_S_membership(gs[i], As[i], Rs[i], c, with_apolarity, tol);
        out.symmetry = std::max(out.symmetry, r.symmetry);
        out.gauss = std::max(out.gauss, r.gauss);
        out.apolarity = std::max(out.apolarity, r.apolarity);
        out.symmetry_ok = out.symmetry_ok && r.symmetry_ok;
        out.gauss_ok = out.gauss_ok && r.gauss_ok;
        out.apolarity_ok = out.apolarity_ok && r.apolarity_ok;
    }
    return out;
}

} // namespace affinv
