#pragma once

// Decision procedure on decomposed tangent-bundle block data: given a flat
// center block R^q and s factor blocks with metrics, the full cubic form and
// factor curvatures, decide whether the data is consistent with a warped
// composition of q+1-s points and s hyperbolic affine hyperspheres, and
// reconstruct the factor parameters.
//
// The cubic-form cube is stored without symmetrization on purpose: each check
// reads one fixed slot order, so a perturbation planted at a single entry
// flips exactly the check that consumes it.
//   - factor isotropy reads A(t, i~, j~)
//   - mixed projection reads A(i~, t, j~)
//   - curvature isotropy reads A(i~, j~, t)
//   - the center identity reads the t-block
// The mean transversals share the factor-isotropy orientation.

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "calabi.hpp"
#include "geometry.hpp"
#include "linalg.hpp"

namespace affinv {

struct BlockSample {
    MatD g0;                  // q x q center metric
    std::vector<MatD> g_fac;  // factor metrics, n_alpha x n_alpha
    Ten3D A;                  // full n x n x n cube, center block first
    std::vector<Ten4D> R_fac; // factor curvature tensors, lowered
    std::vector<MatD> g_ref;  // optional reference factor metrics (gauge)
};

struct DecompositionData {
    int q = 0, s = 0;
    std::vector<int> dims; // n_1..n_s
    double L1 = 0.0;
    std::vector<BlockSample> samples;

    int total_dim() const {
        int n = q;
        for (int d : dims) n += d;
        return n;
    }
    int offset(int a) const { // start of factor a block, a = 0..s-1
        int o = q;
        for (int b = 0; b < a; ++b) o += dims[b];
        return o;
    }

    void validate() const {
        if (q < 0 || s < 0) throw InvalidParameter("decomposition: negative block counts");
        if (q + s < 2) throw InvalidParameter("decomposition: q + s must be at least 2");
        if (static_cast<int>(dims.size()) != s)
            throw InvalidParameter("decomposition: one dimension per factor required");
        for (int d : dims)
            if (d < 1) throw InvalidParameter("decomposition: factor dimensions must be >= 1");
        if (!(L1 < 0.0)) throw InvalidParameter("decomposition: mean curvature must be negative");
        if (samples.empty()) throw InvalidParameter("decomposition: at least one sample required");
        const int n = total_dim();
        for (const BlockSample& sm : samples) {
            if (sm.g0.rows() != q || sm.g0.cols() != q)
                throw PartitionMismatch("decomposition: center metric shape");
            if (static_cast<int>(sm.g_fac.size()) != s ||
                static_cast<int>(sm.R_fac.size()) != s)
                throw PartitionMismatch("decomposition: factor block count");
            for (int a = 0; a < s; ++a) {
                if (sm.g_fac[a].rows() != dims[a] || sm.g_fac[a].cols() != dims[a])
                    throw PartitionMismatch("decomposition: factor metric shape");
                if (sm.R_fac[a].dim() != dims[a])
                    throw PartitionMismatch("decomposition: factor curvature shape");
            }
            if (sm.A.dim() != n) throw PartitionMismatch("decomposition: cubic form shape");
        }
        // the center metric is a fixed flat metric: identical across samples
        double scale = 1.0 + max_abs(samples[0].g0);
        for (const BlockSample& sm : samples)
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j)
                    if (std::fabs(sm.g0(i, j) - samples[0].g0(i, j)) > 1e-8 * scale)
                        throw PartitionMismatch("decomposition: center metric varies");
    }
};

// Extract block data from a composed immersion at explicit product points.
inline DecompositionData sample_blocks(const CompositionSpec& spec,
                                       const std::vector<VecD>& points) {
    const FTable ft = f_table(spec);
    ImmersionPtr comp = compose(spec);
    DecompositionData dd;
    dd.q = ft.K - 1;
    dd.s = spec.s();
    for (const FactorSpec& f : spec.factors) dd.dims.push_back(f.dim);
    dd.L1 = composition_constants(spec).L1;
    const int n = ft.n;

    for (const VecD& p : points) {
        PointInvariants inv = point_invariants(*comp, p);
        double gscale = max_abs(inv.g);
        // partition must be metric-orthogonal
        auto block_of = [&](int i) {
            if (i < dd.q) return 0;
            for (int a = 0; a < dd.s; ++a)
                if (i < dd.offset(a) + dd.dims[a]) return a + 1;
            return dd.s;
        };
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (block_of(i) != block_of(j) && std::fabs(inv.g(i, j)) > 1e-8 * gscale)
                    throw PartitionMismatch("sample_blocks: metric has cross-factor entries");

        BlockSample sm;
        sm.g0 = MatD(dd.q, dd.q);
        for (int i = 0; i < dd.q; ++i)
            for (int j = 0; j < dd.q; ++j) sm.g0(i, j) = inv.g(i, j);
        sm.A = inv.A;
        for (int a = 0; a < dd.s; ++a) {
            const int na = dd.dims[a], o = dd.offset(a);
            MatD ga(na, na);
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < na; ++j) ga(i, j) = inv.g(o + i, o + j);
            sm.g_fac.push_back(ga);

            // factor curvature from the factor's own pipeline, rescaled by the
            // conformal ratio between the extracted block and the factor metric
            VecD sub(p.begin() + o, p.begin() + o + na);
            PointInvariants pin = point_invariants(*spec.factors[a].immersion, sub);
            double num = 0.0, den = 0.0;
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < na; ++j) {
                    num += ga(i, j) * pin.g(i, j);
                    den += pin.g(i, j) * pin.g(i, j);
                }
            double ratio = num / den;
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < na; ++j)
                    if (std::fabs(ga(i, j) - ratio * pin.g(i, j)) >
                        1e-6 * (1.0 + std::fabs(ratio) * max_abs(pin.g)))
                        throw PartitionMismatch("sample_blocks: factor metric not conformal");
            Ten4D R(na);
            for (auto& v : R.data()) v = 0.0;
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < na; ++j)
                    for (int k = 0; k < na; ++k)
                        for (int l = 0; l < na; ++l) R(i, j, k, l) = ratio * pin.R(i, j, k, l);
            sm.R_fac.push_back(R);
            sm.g_ref.push_back(pin.g);
        }
        dd.samples.push_back(std::move(sm));
    }
    dd.validate();
    return dd;
}

// Seeded uniform product points in a box.
inline DecompositionData sample_blocks(const CompositionSpec& spec, int count, uint64_t seed,
                                       double box = 0.8) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-box, box);
    const int n = spec.total_dim();
    std::vector<VecD> pts(count, VecD(n));
    for (VecD& p : pts)
        for (double& v : p) v = u(rng);
    return sample_blocks(spec, pts);
}

// Largest |A| entry whose block labels are not an allowed pattern: the only
// allowed label multisets are {0,0,0}, {0,a,a} and {a,a,a}.
inline double check_condition2(const DecompositionData& dd) {
    const int n = dd.total_dim();
    auto block_of = [&](int i) {
        if (i < dd.q) return 0;
        for (int a = 0; a < dd.s; ++a)
            if (i < dd.offset(a) + dd.dims[a]) return a + 1;
        return dd.s;
    };
    double res = 0.0;
    for (const BlockSample& sm : dd.samples)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    int b[3] = {block_of(i), block_of(j), block_of(k)};
                    int nz = (b[0] != 0) + (b[1] != 0) + (b[2] != 0);
                    bool ok;
                    if (nz == 0) {
                        ok = true; // pure center block
                    } else if (nz == 1) {
                        ok = false; // one factor leg against two center legs
                    } else {
                        int f = b[0] != 0 ? b[0] : b[1];
                        ok = true;
                        for (int t : b)
                            if (t != 0 && t != f) ok = false; // mixed factors
                    }
                    if (!ok) res = std::max(res, std::fabs(sm.A(i, j, k)));
                }
    return res;
}

// Factor curvature must act trivially on the center-valued second fundamental
// form of the factor: A0(R(X,Y)Z, W) + A0(Z, R(X,Y)W) = 0 over basis tuples.
inline double check_condition3(const DecompositionData& dd) {
    double res = 0.0;
    for (const BlockSample& sm : dd.samples)
        for (int a = 0; a < dd.s; ++a) {
            const int na = dd.dims[a], o = dd.offset(a);
            MatD ginv = inverse(sm.g_fac[a]);
            Ten4D Rm(na); // (R(e_i,e_j)e_k)^m stored (m,i,j,k)
            for (auto& v : Rm.data()) v = 0.0;
            for (int m = 0; m < na; ++m)
                for (int i = 0; i < na; ++i)
                    for (int j = 0; j < na; ++j)
                        for (int k = 0; k < na; ++k) {
                            double v = 0.0;
                            for (int l = 0; l < na; ++l)
                                v += ginv(m, l) * sm.R_fac[a](i, j, k, l);
                            Rm(m, i, j, k) = v;
                        }
            for (int z = 0; z < dd.q; ++z)
                for (int i = 0; i < na; ++i)
                    for (int j = 0; j < na; ++j)
                        for (int k = 0; k < na; ++k)
                            for (int l = 0; l < na; ++l) {
                                double v = 0.0;
                                for (int m = 0; m < na; ++m)
                                    v += Rm(m, i, j, k) * sm.A(o + m, o + l, z) +
                                         Rm(m, i, j, l) * sm.A(o + k, o + m, z);
                                res = std::max(res, std::fabs(v));
                            }
        }
    return res;
}

struct TransversalData {
    MatD H;        // s x q, raised components in the center block
    VecD cbar;     // |H_alpha|
    MatD gram;     // s x s, g0(H_alpha, H_beta)
    int dimH = 0;  // rank of the gram matrix
    int r_hat = 0; // reconstructed number of point factors
};

inline TransversalData mean_transversals(const DecompositionData& dd, double rank_tol = 1e-8) {
    if (dd.s < 1) throw InvalidParameter("mean_transversals: no factor blocks");
    const BlockSample& sm = dd.samples.front();
    MatD g0inv = inverse(sm.g0);
    TransversalData tr;
    tr.H = MatD(dd.s, dd.q, 0.0);
    tr.cbar.resize(dd.s);
    for (int a = 0; a < dd.s; ++a) {
        const int na = dd.dims[a], o = dd.offset(a);
        MatD ginv = inverse(sm.g_fac[a]);
        VecD low(dd.q, 0.0);
        for (int z = 0; z < dd.q; ++z) {
            double v = 0.0;
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < na; ++j) v += ginv(i, j) * sm.A(z, o + i, o + j);
            low[z] = v / na;
        }
        for (int z = 0; z < dd.q; ++z) {
            double v = 0.0;
            for (int m = 0; m < dd.q; ++m) v += g0inv(z, m) * low[m];
            tr.H(a, z) = v;
        }
    }
    tr.gram = MatD(dd.s, dd.s, 0.0);
    for (int a = 0; a < dd.s; ++a)
        for (int b = 0; b < dd.s; ++b) {
            double v = 0.0;
            for (int z = 0; z < dd.q; ++z)
                for (int m = 0; m < dd.q; ++m) v += tr.H(a, z) * sm.g0(z, m) * tr.H(b, m);
            tr.gram(a, b) = v;
        }
    for (int a = 0; a < dd.s; ++a) tr.cbar[a] = std::sqrt(std::max(tr.gram(a, a), 0.0));
    tr.dimH = sym_rank(tr.gram, rank_tol);
    if (tr.dimH < dd.s - 1)
        throw RankContradiction("mean transversals have rank below s - 1");
    tr.r_hat = (tr.dimH == dd.s - 1) ? 0 : dd.q - dd.s + 1;
    return tr;
}

// Determinant of the gram submatrix (rows 1..s-1, columns 1..s-2 and s) used
// in the rank argument; equals L1 * prod (cbar_g^2 - L1) and must be negative.
inline double transversal_rank_minor(const MatD& gram) {
    const int s = gram.rows();
    if (s < 2) throw InvalidParameter("rank minor needs s >= 2");
    MatD m(s - 1, s - 1);
    for (int i = 0; i < s - 1; ++i) {
        for (int j = 0; j < s - 2; ++j) m(i, j) = gram(i, j);
        m(i, s - 2) = gram(i, s - 1);
    }
    return det(m);
}

// Residuals of the block identities tying the cubic form to the transversals.
inline std::map<std::string, double> identity_checks(const DecompositionData& dd,
                                                      const TransversalData& tr) {
    const int q = dd.q, s = dd.s, n = dd.total_dim();
    std::map<std::string, double> res;
    double iso = 0.0, mix = 0.0, cen = 0.0, claim = 0.0;
    const MatD& g0 = dd.samples.front().g0;
    // g0-lowered transversals
    MatD Hlow(s, q, 0.0);
    for (int a = 0; a < s; ++a)
        for (int z = 0; z < q; ++z)
            for (int m = 0; m < q; ++m) Hlow(a, z) += g0(z, m) * tr.H(a, m);

    for (const BlockSample& sm : dd.samples) {
        for (int a = 0; a < s; ++a) {
            const int na = dd.dims[a], o = dd.offset(a);
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < na; ++j)
                    for (int z = 0; z < q; ++z) {
                        double want = sm.g_fac[a](i, j) * Hlow(a, z);
                        iso = std::max(iso, std::fabs(sm.A(z, o + i, o + j) - want));
                        mix = std::max(mix, std::fabs(sm.A(o + i, z, o + j) - want));
                    }
        }
        // A0(Z, H_a) = g0(Z, H_a) H_a + L1 Z on the center block
        for (int a = 0; a < s; ++a)
            for (int z = 0; z < q; ++z)
                for (int rho = 0; rho < q; ++rho) {
                    double lhs = 0.0;
                    for (int mu = 0; mu < q; ++mu) lhs += tr.H(a, mu) * sm.A(z, mu, rho);
                    double want = Hlow(a, z) * Hlow(a, rho) + dd.L1 * g0(z, rho);
                    cen = std::max(cen, std::fabs(lhs - want));
                }
    }
    for (int a = 0; a < s; ++a) {
        double want = (n - dd.dims[a]) / (dd.dims[a] + 1.0) * (-dd.L1);
        claim = std::max(claim, std::fabs(tr.cbar[a] * tr.cbar[a] - want));
    }
    res["factor_isotropy"] = iso;
    res["mixed_projection"] = mix;
    res["center_transversal"] = cen;
    res["norm_claim"] = claim;

    // inverse-gram identities, defined whenever the gram matrix is invertible
    if (tr.dimH == s && tr.r_hat >= 1) {
        MatD hinv = inverse(tr.gram);
        double rowsum = 0.0, h0 = 0.0;
        VecD H0a(q, 0.0), H0b(q, 0.0);
        for (int a = 0; a < s; ++a) {
            double rs = 0.0;
            for (int b = 0; b < s; ++b) rs += hinv(a, b);
            rowsum = std::max(rowsum, std::fabs(rs + (dd.dims[a] + 1.0) / (tr.r_hat * dd.L1)));
            for (int z = 0; z < q; ++z) {
                H0a[z] += dd.L1 * rs * tr.H(a, z);
                H0b[z] -= (dd.dims[a] + 1.0) / tr.r_hat * tr.H(a, z);
            }
        }
        for (int z = 0; z < q; ++z) h0 = std::max(h0, std::fabs(H0a[z] - H0b[z]));
        res["gram_row_sum"] = rowsum;
        res["center_mean_identity"] = h0;
    }
    return res;
}

struct CenterBlockReport {
    bool applicable = false;
    VecD H0;                   // - sum (n_a + 1) H_a / r_hat
    double cbar0 = 0.0;        // |H0|
    double span_residual = 0.0;     // projection of A0(X,Y) onto span(H) vs g(X,Y) H0
    double trace_residual = 0.0;    // trace of the complement block
    double pick_J = 0.0;            // Pick invariant of the complement block
    double pick_residual = 0.0;     // |J + (n+1) L1 / r_hat|, r_hat >= 3 only
    SMembershipReport membership;   // complement block at constant (n+1) L1 / r_hat
};

inline CenterBlockReport split_center_block(const DecompositionData& dd,
                                            const TransversalData& tr) {
    const int q = dd.q, s = dd.s, n = dd.total_dim();
    CenterBlockReport rep;
    if (tr.r_hat >= 1) {
        rep.H0.assign(q, 0.0);
        for (int a = 0; a < s; ++a)
            for (int z = 0; z < q; ++z)
                rep.H0[z] -= (dd.dims[a] + 1.0) / tr.r_hat * tr.H(a, z);
        const MatD& g0 = dd.samples.front().g0;
        double c2 = 0.0;
        for (int z = 0; z < q; ++z)
            for (int m = 0; m < q; ++m) c2 += rep.H0[z] * g0(z, m) * rep.H0[m];
        rep.cbar0 = std::sqrt(std::max(c2, 0.0));
    }
    if (tr.r_hat < 2) return rep; // no transversal complement to split off
    rep.applicable = true;

    const MatD& g0 = dd.samples.front().g0;
    auto dot = [&](const VecD& u, const VecD& v) {
        double acc = 0.0;
        for (int z = 0; z < q; ++z)
            for (int m = 0; m < q; ++m) acc += u[z] * g0(z, m) * v[m];
        return acc;
    };
    // g0-orthonormal basis of span(H), then of its complement
    std::vector<VecD> span, comp;
    auto orthogonalize = [&](VecD v, const std::vector<VecD>& against) {
        for (const VecD& b : against) {
            double c = dot(v, b);
            for (int z = 0; z < q; ++z) v[z] -= c * b[z];
        }
        return v;
    };
    for (int a = 0; a < s; ++a) {
        VecD v(q);
        for (int z = 0; z < q; ++z) v[z] = tr.H(a, z);
        v = orthogonalize(std::move(v), span);
        double nrm = std::sqrt(std::max(dot(v, v), 0.0));
        if (nrm > 1e-10) {
            for (double& x : v) x /= nrm;
            span.push_back(std::move(v));
        }
    }
    for (int e = 0; e < q && static_cast<int>(comp.size()) < tr.r_hat - 1; ++e) {
        VecD v(q, 0.0);
        v[e] = 1.0;
        v = orthogonalize(std::move(v), span);
        v = orthogonalize(std::move(v), comp);
        double nrm = std::sqrt(std::max(dot(v, v), 0.0));
        if (nrm > 1e-10) {
            for (double& x : v) x /= nrm;
            comp.push_back(std::move(v));
        }
    }
    if (static_cast<int>(span.size()) + static_cast<int>(comp.size()) != q ||
        static_cast<int>(comp.size()) != tr.r_hat - 1)
        throw RankContradiction("center split dimensions are inconsistent");

    const int m = tr.r_hat - 1;
    double cblk = (n + 1.0) * dd.L1 / tr.r_hat;
    std::vector<MatD> gs;
    std::vector<Ten3D> Ts;
    std::vector<Ten4D> Rs;
    for (const BlockSample& sm : dd.samples) {
        // center cubic form as a vector-valued bilinear map in the complement
        MatD g0inv = inverse(sm.g0);
        Ten3D T(m, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                VecD vlow(q, 0.0); // g0-lowered A0(u_i, u_j)
                for (int rho = 0; rho < q; ++rho) {
                    double acc = 0.0;
                    for (int z = 0; z < q; ++z)
                        for (int mu = 0; mu < q; ++mu)
                            acc += comp[i][z] * comp[j][mu] * sm.A(z, mu, rho);
                    vlow[rho] = acc;
                }
                VecD v(q, 0.0); // raised
                for (int z = 0; z < q; ++z)
                    for (int rho = 0; rho < q; ++rho) v[z] += g0inv(z, rho) * vlow[rho];
                // span(H) part must equal g(u_i,u_j) H0
                VecD proj(q, 0.0);
                for (const VecD& b : span) {
                    double c = dot(v, b);
                    for (int z = 0; z < q; ++z) proj[z] += c * b[z];
                }
                double want = (i == j) ? 1.0 : 0.0;
                for (int z = 0; z < q; ++z)
                    rep.span_residual = std::max(rep.span_residual,
                                                 std::fabs(proj[z] - want * rep.H0[z]));
                for (int k = 0; k < m; ++k) T(i, j, k) = dot(v, comp[k]);
            }
        double tracer = 0.0;
        for (int k = 0; k < m; ++k) {
            double trv = 0.0;
            for (int i = 0; i < m; ++i) trv += T(i, i, k);
            tracer = std::max(tracer, std::fabs(trv));
        }
        rep.trace_residual = std::max(rep.trace_residual, tracer);
        if (m >= 2) {
            double nrm2 = 0.0;
            for (double v : T.data()) nrm2 += v * v;
            rep.pick_J = nrm2 / (m * (m - 1.0));
            rep.pick_residual = std::fabs(rep.pick_J + cblk);
        }
        MatD id(m, m, 0.0);
        for (int i = 0; i < m; ++i) id(i, i) = 1.0;
        Ten4D Rz(m);
        for (auto& v : Rz.data()) v = 0.0;
        gs.push_back(id);
        Ts.push_back(std::move(T));
        Rs.push_back(std::move(Rz));
    }
    rep.membership = check_S_membership(gs, Ts, Rs, cblk, true);
    return rep;
}

struct FactorReconstruction {
    double gauss_constant = 0.0;   // L1 - cbar^2, the membership constant
    double claim_residual = 0.0;   // |(n_a+1)(L1 - cbar^2) / ((n+1) L1) - 1|
    double L1_factor = 0.0;        // recovered factor mean curvature
    double metric_scale = 0.0;     // g_fac = scale * reference gauge metric
    bool gauge_from_reference = false;
    SMembershipReport membership;  // factor block at the gauss constant
};

struct Reconstruction {
    double C = 0.0; // composition constant from L1 = -1/((n+1) C)
    int point_factors = 0;
    std::vector<FactorReconstruction> factors;
};

inline Reconstruction reconstruct_factors(const DecompositionData& dd,
                                          const TransversalData& tr) {
    const int n = dd.total_dim();
    Reconstruction rec;
    rec.C = -1.0 / ((n + 1) * dd.L1);
    rec.point_factors = tr.r_hat;
    for (int a = 0; a < dd.s; ++a) {
        const int na = dd.dims[a], o = dd.offset(a);
        FactorReconstruction fr;
        fr.gauss_constant = dd.L1 - tr.cbar[a] * tr.cbar[a];
        fr.claim_residual =
            std::fabs((na + 1.0) * fr.gauss_constant / ((n + 1.0) * dd.L1) - 1.0);
        std::vector<MatD> gs;
        std::vector<Ten3D> As;
        std::vector<Ten4D> Rs;
        bool has_ref = !dd.samples.front().g_ref.empty();
        double scale_acc = 0.0;
        for (const BlockSample& sm : dd.samples) {
            Ten3D Ablk(na, 0.0);
            for (int i = 0; i < na; ++i)
                for (int j = 0; j < na; ++j)
                    for (int k = 0; k < na; ++k) Ablk(i, j, k) = sm.A(o + i, o + j, o + k);
            gs.push_back(sm.g_fac[a]);
            As.push_back(std::move(Ablk));
            Rs.push_back(sm.R_fac[a]);
            if (has_ref) {
                double num = 0.0, den = 0.0;
                for (int i = 0; i < na; ++i)
                    for (int j = 0; j < na; ++j) {
                        num += sm.g_fac[a](i, j) * sm.g_ref[a](i, j);
                        den += sm.g_ref[a](i, j) * sm.g_ref[a](i, j);
                    }
                scale_acc += num / den;
            }
        }
        fr.membership = check_S_membership(gs, As, Rs, fr.gauss_constant, true);
        if (has_ref) {
            // conformal ratio to the reference gauge pins down the factor's
            // own mean curvature: scale = (n_a + 1)(-L1_a) C
            fr.gauge_from_reference = true;
            fr.metric_scale = scale_acc / dd.samples.size();
            fr.L1_factor = -fr.metric_scale / ((na + 1.0) * rec.C);
        } else {
            // without a reference gauge the scale is free; take the data
            // metric itself, whose gauss constant is the mean curvature
            fr.metric_scale = 1.0;
            fr.L1_factor = fr.gauss_constant;
        }
        rec.factors.push_back(std::move(fr));
    }
    return rec;
}

struct CharacterizeOptions {
    double tol = 1e-6;
    double rank_tol = 1e-8;
};

struct CharacterizationReport {
    double condition2_residual = 0.0;
    double condition3_residual = 0.0;
    TransversalData transversals;
    std::map<std::string, double> identity_residuals;
    CenterBlockReport center;
    Reconstruction reconstruction;
    bool accepted = false;
    std::vector<std::string> reject_reasons;
};

inline CharacterizationReport characterize(const DecompositionData& dd,
                                           const CharacterizeOptions& opt = {}) {
    dd.validate();
    CharacterizationReport rep;
    auto fail = [&](const std::string& why) { rep.reject_reasons.push_back(why); };
    if (dd.s == 0) {
        fail("no_factors");
        return rep;
    }

    rep.condition2_residual = check_condition2(dd);
    if (rep.condition2_residual > opt.tol) fail("condition2");
    rep.condition3_residual = check_condition3(dd);
    if (rep.condition3_residual > opt.tol) fail("condition3");

    try {
        rep.transversals = mean_transversals(dd, opt.rank_tol);
    } catch (const RankContradiction&) {
        fail("transversal_rank");
        return rep;
    }
    const TransversalData& tr = rep.transversals;

    double offres = 0.0;
    for (int a = 0; a < dd.s; ++a)
        for (int b = 0; b < dd.s; ++b)
            if (a != b) offres = std::max(offres, std::fabs(tr.gram(a, b) - dd.L1));
    rep.identity_residuals["gram_off_diagonal"] = offres;
    if (offres > opt.tol) fail("gram_off_diagonal");
    if (dd.s >= 2 && !(transversal_rank_minor(tr.gram) < 0.0)) fail("rank_minor_sign");

    auto lem = identity_checks(dd, tr);
    for (const auto& [name, v] : lem) {
        rep.identity_residuals[name] = v;
        if (v > opt.tol) fail(name);
    }

    try {
        rep.center = split_center_block(dd, tr);
    } catch (const RankContradiction&) {
        fail("center_split_rank");
        return rep;
    }
    if (rep.center.applicable) {
        if (rep.center.span_residual > opt.tol) fail("center_span");
        if (rep.center.trace_residual > opt.tol) fail("center_trace");
        if (!rep.center.membership.member()) fail("center_membership");
        if (tr.r_hat >= 3 && rep.center.pick_residual > opt.tol) fail("center_pick");
    }

    rep.reconstruction = reconstruct_factors(dd, tr);
    for (size_t a = 0; a < rep.reconstruction.factors.size(); ++a) {
        const FactorReconstruction& fr = rep.reconstruction.factors[a];
        if (fr.claim_residual > opt.tol)
            fail("factor_claim_" + std::to_string(a + 1));
        if (!fr.membership.member())
            fail("factor_membership_" + std::to_string(a + 1));
    }

    rep.accepted = rep.reject_reasons.empty();
    return rep;
}

} // namespace affinv
