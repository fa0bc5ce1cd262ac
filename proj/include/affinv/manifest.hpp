#pragma once

// Manifest and report plumbing for the command line: JSON descriptions of
// built-in surfaces and compositions, evaluation point selection, and
// serializers for every report payload. Nested compositions are allowed as
// factors since a composition is itself a hyperbolic affine hypersphere.

#include <optional>
#include <random>
#include <string>

#include <json.hpp>

#include "calabi.hpp"
#include "catalog.hpp"
#include "characterize.hpp"
#include "geometry.hpp"

namespace affinv {

using nlohmann::json;

inline json to_json(const MatD& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const Ten3D& t) {
    json out = json::array();
    for (int i = 0; i < t.dim(); ++i) {
        json plane = json::array();
        for (int j = 0; j < t.dim(); ++j) {
            json row = json::array();
            for (int k = 0; k < t.dim(); ++k) row.push_back(t(i, j, k));
            plane.push_back(std::move(row));
        }
        out.push_back(std::move(plane));
    }
    return out;
}

inline json to_json(const Ten4D& t) {
    json out = json::array();
    for (int i = 0; i < t.dim(); ++i) {
        json cube = json::array();
        for (int j = 0; j < t.dim(); ++j) {
            json plane = json::array();
            for (int k = 0; k < t.dim(); ++k) {
                json row = json::array();
                for (int l = 0; l < t.dim(); ++l) row.push_back(t(i, j, k, l));
                plane.push_back(std::move(row));
            }
            cube.push_back(std::move(plane));
        }
        out.push_back(std::move(cube));
    }
    return out;
}

inline MatD mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw InvalidParameter("manifest: matrix must be a 2d array");
    int r = static_cast<int>(j.size());
    int c = static_cast<int>(j[0].size());
    MatD m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(j[i].size()) != c)
            throw InvalidParameter("manifest: ragged matrix");
        for (int k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

inline Ten3D ten3_from_json(const json& j) {
    int n = static_cast<int>(j.size());
    Ten3D t(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) t(i, k, l) = j[i][k][l].get<double>();
    return t;
}

inline Ten4D ten4_from_json(const json& j) {
    int n = static_cast<int>(j.size());
    Ten4D t(n);
    for (auto& v : t.data()) v = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) t(i, k, l, m) = j[i][k][l][m].get<double>();
    return t;
}

// One surface described by a manifest spec node.
struct ParsedSpec {
    ImmersionPtr immersion;
    int dim = 0;
    double L1 = 0.0; // mean curvature of the surface itself
    std::optional<CompositionSpec> composition;
};

inline ParsedSpec parse_spec(const json& node) {
    if (!node.is_object() || !node.contains("type"))
        throw InvalidParameter("manifest: spec node needs a type");
    std::string type = node.at("type").get<std::string>();
    ParsedSpec ps;
    if (type == "flat") {
        int dim = node.at("dim").get<int>();
        double c0 = node.value("c0", 1.0);
        ps.immersion = flat_hypersphere(dim, c0);
        ps.dim = dim;
        ps.L1 = flat_closed_forms(dim, c0).L1;
    } else if (type == "quadric") {
        int dim = node.at("dim").get<int>();
        ps.immersion = quadric_hypersphere(dim);
        ps.dim = dim;
        ps.L1 = QuadricHypersphere::kL1;
    } else if (type == "composition") {
        CompositionSpec cs;
        cs.r = node.value("points", 0);
        if (!node.contains("constants") || !node.at("constants").is_array())
            throw InvalidParameter("manifest: composition needs a constants array");
        for (const json& c : node.at("constants")) cs.constants.push_back(c.get<double>());
        if (node.contains("factors"))
            for (const json& f : node.at("factors")) {
                ParsedSpec sub = parse_spec(f);
                cs.factors.push_back({sub.immersion, sub.dim, sub.L1});
            }
        cs.validate();
        ps.immersion = compose(cs);
        ps.dim = cs.total_dim();
        ps.L1 = composition_constants(cs).L1;
        ps.composition = std::move(cs);
    } else {
        throw InvalidParameter("manifest: unknown spec type '" + type + "'");
    }
    return ps;
}

struct Manifest {
    int version = 1;
    json spec_json;
    ParsedSpec spec;
    // evaluation
    std::vector<VecD> explicit_points;
    bool use_sampler = false;
    int sample_count = 0;
    uint64_t seed = 0;
    double box = 1.0;
    std::map<std::string, double> tolerances;
};

inline Manifest parse_manifest(const json& j) {
    Manifest m;
    if (!j.is_object()) throw InvalidParameter("manifest: root must be an object");
    m.version = j.value("version", 1);
    if (m.version != 1) throw InvalidParameter("manifest: unsupported version");
    if (!j.contains("spec")) throw InvalidParameter("manifest: missing spec");
    m.spec_json = j.at("spec");
    m.spec = parse_spec(m.spec_json);
    if (j.contains("evaluation")) {
        const json& ev = j.at("evaluation");
        if (ev.contains("points")) {
            for (const json& p : ev.at("points")) {
                VecD v;
                for (const json& x : p) v.push_back(x.get<double>());
                if (static_cast<int>(v.size()) != m.spec.dim)
                    throw InvalidParameter("manifest: evaluation point dimension mismatch");
                m.explicit_points.push_back(std::move(v));
            }
        } else if (ev.contains("sampler")) {
            const json& sp = ev.at("sampler");
            m.use_sampler = true;
            m.sample_count = sp.value("count", 5);
            if (!sp.contains("seed"))
                throw InvalidParameter("manifest: sampler requires an explicit seed");
            m.seed = sp.at("seed").get<uint64_t>();
            m.box = sp.value("box", 1.0);
        } else {
            throw InvalidParameter("manifest: evaluation needs points or sampler");
        }
    }
    if (j.contains("tolerances"))
        for (const auto& [k, v] : j.at("tolerances").items())
            m.tolerances[k] = v.get<double>();
    return m;
}

inline std::vector<VecD> resolve_points(const Manifest& m, int fallback_count = 5,
                                        uint64_t fallback_seed = 1) {
    if (!m.explicit_points.empty()) return m.explicit_points;
    int count = m.use_sampler ? m.sample_count : fallback_count;
    uint64_t seed = m.use_sampler ? m.seed : fallback_seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-m.box, m.box);
    std::vector<VecD> pts(count, VecD(m.spec.dim));
    for (VecD& p : pts)
        for (double& v : p) v = u(rng);
    return pts;
}

inline json to_json(const PointInvariants& inv) {
    json out;
    out["n"] = inv.n;
    out["g"] = to_json(inv.g);
    out["g_inv"] = to_json(inv.g_inv);
    out["xi"] = inv.xi;
    out["A"] = to_json(inv.A);
    out["B"] = to_json(inv.B);
    out["L1"] = inv.L1;
    if (inv.chi) out["chi"] = *inv.chi;
    if (inv.J) out["J"] = *inv.J;
    out["residuals"] = inv.residuals;
    return out;
}

inline json to_json(const ClosedFormInvariants& cf) {
    json out;
    out["C"] = cf.C;
    out["L1"] = cf.L1;
    out["g_center"] = to_json(cf.g_lambda);
    out["factor_conformal"] = cf.factor_conformal;
    out["g"] = to_json(cf.g);
    out["A"] = to_json(cf.A);
    out["H"] = to_json(cf.H);
    return out;
}

inline ClosedFormInvariants closed_form_from_json(const json& j) {
    ClosedFormInvariants cf;
    cf.C = j.at("C").get<double>();
    cf.L1 = j.at("L1").get<double>();
    cf.g_lambda = mat_from_json(j.at("g_center"));
    cf.factor_conformal = j.at("factor_conformal").get<VecD>();
    cf.g = mat_from_json(j.at("g"));
    cf.A = ten3_from_json(j.at("A"));
    cf.H = mat_from_json(j.at("H"));
    return cf;
}

inline json to_json(const SMembershipReport& r) {
    json out;
    out["symmetry"] = r.symmetry;
    out["gauss"] = r.gauss;
    out["apolarity"] = r.apolarity;
    out["member"] = r.member();
    return out;
}

inline json to_json(const CharacterizationReport& rep) {
    json out;
    out["condition2_residual"] = rep.condition2_residual;
    out["condition3_residual"] = rep.condition3_residual;
    out["H"] = to_json(rep.transversals.H);
    out["cbar"] = rep.transversals.cbar;
    out["gram"] = to_json(rep.transversals.gram);
    out["dimH"] = rep.transversals.dimH;
    out["r_hat"] = rep.transversals.r_hat;
    out["identity_residuals"] = rep.identity_residuals;
    json cb;
    cb["applicable"] = rep.center.applicable;
    if (!rep.center.H0.empty()) {
        cb["H0"] = rep.center.H0;
        cb["cbar0"] = rep.center.cbar0;
    }
    if (rep.center.applicable) {
        cb["span_residual"] = rep.center.span_residual;
        cb["trace_residual"] = rep.center.trace_residual;
        cb["pick_J"] = rep.center.pick_J;
        cb["membership"] = to_json(rep.center.membership);
    }
    out["center_block"] = cb;
    json rec;
    rec["C"] = rep.reconstruction.C;
    rec["point_factors"] = rep.reconstruction.point_factors;
    rec["factors"] = json::array();
    for (const FactorReconstruction& fr : rep.reconstruction.factors) {
        json f;
        f["gauss_constant"] = fr.gauss_constant;
        f["claim_residual"] = fr.claim_residual;
        f["L1_factor"] = fr.L1_factor;
        f["metric_scale"] = fr.metric_scale;
        f["gauge_from_reference"] = fr.gauge_from_reference;
        f["membership"] = to_json(fr.membership);
        rec["factors"].push_back(std::move(f));
    }
    out["reconstruction"] = rec;
    out["verdict"] = rep.accepted ? "ACCEPT" : "REJECT";
    out["reject_reasons"] = rep.reject_reasons;
    return out;
}

inline json to_json(const DecompositionData& dd) {
    json out;
    out["q"] = dd.q;
    out["s"] = dd.s;
    out["dims"] = dd.dims;
    out["L1"] = dd.L1;
    out["samples"] = json::array();
    for (const BlockSample& sm : dd.samples) {
        json s;
        s["g0"] = to_json(sm.g0);
        s["g_fac"] = json::array();
        for (const MatD& g : sm.g_fac) s["g_fac"].push_back(to_json(g));
        s["A"] = to_json(sm.A);
        s["R_fac"] = json::array();
        for (const Ten4D& R : sm.R_fac) s["R_fac"].push_back(to_json(R));
        if (!sm.g_ref.empty()) {
            s["g_ref"] = json::array();
            for (const MatD& g : sm.g_ref) s["g_ref"].push_back(to_json(g));
        }
        out["samples"].push_back(std::move(s));
    }
    return out;
}

inline DecompositionData decomposition_from_json(const json& j) {
    DecompositionData dd;
    dd.q = j.at("q").get<int>();
    dd.s = j.at("s").get<int>();
    dd.dims = j.at("dims").get<std::vector<int>>();
    dd.L1 = j.at("L1").get<double>();
    for (const json& s : j.at("samples")) {
        BlockSample sm;
        sm.g0 = dd.q > 0 ? mat_from_json(s.at("g0")) : MatD(0, 0);
        for (const json& g : s.at("g_fac")) sm.g_fac.push_back(mat_from_json(g));
        sm.A = ten3_from_json(s.at("A"));
        for (const json& R : s.at("R_fac")) sm.R_fac.push_back(ten4_from_json(R));
        if (s.contains("g_ref"))
            for (const json& g : s.at("g_ref")) sm.g_ref.push_back(mat_from_json(g));
        dd.samples.push_back(std::move(sm));
    }
    dd.validate();
    return dd;
}

} // namespace affinv
