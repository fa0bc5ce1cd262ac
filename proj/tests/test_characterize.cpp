#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <affinv/calabi.hpp>
#include <affinv/catalog.hpp>
#include <affinv/characterize.hpp>

using namespace affinv;

namespace {

FactorSpec flat_factor(int n0, double c0) {
    return {flat_hypersphere(n0, c0), n0, flat_closed_forms(n0, c0).L1};
}
FactorSpec quadric_factor(int n) {
    return {quadric_hypersphere(n), n, QuadricHypersphere::kL1};
}

std::vector<CompositionSpec> test_grid() {
    std::vector<CompositionSpec> grid;
    grid.push_back({0, {flat_factor(1, 1.5), quadric_factor(2)}, {0.8, 1.7}});
    grid.push_back({1, {quadric_factor(2)}, {1.3, 0.7}});
    grid.push_back({2, {flat_factor(2, 1.0)}, {1.0, 0.5, 1.2}});
    grid.push_back({2, {flat_factor(1, 1.5), flat_factor(1, 1.0)}, {0.9, 1.1, 0.6, 1.4}});
    return grid;
}

// plant a perturbation at one cube entry in every sample
DecompositionData planted(DecompositionData dd, int i, int j, int k, double eps) {
    for (BlockSample& sm : dd.samples) sm.A(i, j, k) += eps;
    return dd;
}

void check_clean_except(const CharacterizationReport& rep, const std::string& family) {
    if (family != "condition2") CHECK(rep.condition2_residual < 1e-6);
    if (family != "condition3") CHECK(rep.condition3_residual < 1e-6);
    for (const auto& [name, v] : rep.identity_residuals) {
        if (name == family) continue;
        INFO(name);
        CHECK(v < 1e-6);
    }
}

} // namespace

TEST_CASE("accepts block data of every composed spec") {
    uint64_t seed = 11;
    for (const CompositionSpec& spec : test_grid()) {
        DecompositionData dd = sample_blocks(spec, 2, seed++);
        INFO(compose(spec)->describe());
        CHECK(dd.q == spec.K() - 1);
        CHECK(dd.s == spec.s());
        CharacterizationReport rep = characterize(dd);
        for (const std::string& r : rep.reject_reasons) { INFO(r); CHECK(false); }
        REQUIRE(rep.accepted);
        CHECK(rep.condition2_residual < 1e-8);
        CHECK(rep.condition3_residual < 1e-7);
        const TransversalData& tr = rep.transversals;
        const int n = dd.total_dim();
        for (int a = 0; a < dd.s; ++a) {
            double want = (n - dd.dims[a]) / (dd.dims[a] + 1.0) * (-dd.L1);
            CHECK(tr.cbar[a] * tr.cbar[a] == doctest::Approx(want).epsilon(1e-7));
            for (int b = 0; b < dd.s; ++b)
                if (b != a) CHECK(tr.gram(a, b) == doctest::Approx(dd.L1).epsilon(1e-7));
        }
        // recovered factor curvatures round-trip through the conformal gauge
        for (int a = 0; a < dd.s; ++a)
            CHECK(rep.reconstruction.factors[a].L1_factor ==
                  doctest::Approx(spec.factors[a].L1).epsilon(1e-6));
        // expected point-factor count
        CHECK(tr.r_hat == spec.r);
    }
}

TEST_CASE("gram rank minor matches its closed form and is negative") {
    uint64_t seed = 23;
    for (const CompositionSpec& spec : test_grid()) {
        if (spec.s() < 2) continue;
        DecompositionData dd = sample_blocks(spec, 1, seed++);
        TransversalData tr = mean_transversals(dd);
        double minor = transversal_rank_minor(tr.gram);
        double want = dd.L1;
        for (int g = 0; g + 2 < dd.s; ++g) want *= tr.cbar[g] * tr.cbar[g] - dd.L1;
        INFO(compose(spec)->describe());
        CHECK(minor == doctest::Approx(want).epsilon(1e-6));
        CHECK(minor < 0.0);
    }
}

TEST_CASE("inverse-gram row sums contract back to one") {
    uint64_t seed = 29;
    for (const CompositionSpec& spec : test_grid()) {
        if (spec.r == 0) continue; // gram singular when there are no point slots
        DecompositionData dd = sample_blocks(spec, 1, seed++);
        TransversalData tr = mean_transversals(dd);
        REQUIRE(tr.dimH == dd.s);
        MatD hinv = inverse(tr.gram);
        for (int g = 0; g < dd.s; ++g) {
            double acc = 0.0;
            for (int a = 0; a < dd.s; ++a) {
                double rs = 0.0;
                for (int b = 0; b < dd.s; ++b) rs += hinv(a, b);
                CHECK(rs == doctest::Approx(-(dd.dims[a] + 1.0) / (tr.r_hat * dd.L1))
                                .epsilon(1e-7));
                acc += rs * tr.gram(a, g);
            }
            CHECK(acc == doctest::Approx(1.0).epsilon(1e-7));
        }
    }
}

TEST_CASE("plant: forbidden cross-factor block trips only condition 2") {
    CompositionSpec spec{2, {flat_factor(1, 1.5), flat_factor(1, 1.0)}, {0.9, 1.1, 0.6, 1.4}};
    DecompositionData dd = sample_blocks(spec, 2, 41);
    // factor 1 occupies index 3, factor 2 index 4 (center block is 0..2)
    DecompositionData bad = planted(dd, 3, 4, 0, 1e-2);
    CharacterizationReport rep = characterize(bad);
    CHECK_FALSE(rep.accepted);
    REQUIRE(rep.reject_reasons == std::vector<std::string>{"condition2"});
    CHECK(rep.condition2_residual > 1e-3);
    CHECK(rep.condition2_residual < 1e-1);
    check_clean_except(rep, "condition2");
}

TEST_CASE("plant: anisotropic factor block on a curved factor trips only condition 3") {
    CompositionSpec spec{1, {quadric_factor(2)}, {1.3, 0.7}};
    DecompositionData dd = sample_blocks(spec, 2, 43);
    // orientation (factor, factor, center) feeds the curvature check only
    DecompositionData bad = planted(dd, 1, 2, 0, 1e-2);
    CharacterizationReport rep = characterize(bad);
    CHECK_FALSE(rep.accepted);
    REQUIRE(rep.reject_reasons == std::vector<std::string>{"condition3"});
    CHECK(rep.condition3_residual > 1e-3);
    CHECK(rep.condition3_residual < 1e-1);
    check_clean_except(rep, "condition3");
}

TEST_CASE("plant: trace-free isotropy violation trips only the isotropy identity") {
    CompositionSpec spec{1, {quadric_factor(2)}, {1.3, 0.7}};
    DecompositionData dd = sample_blocks(spec, 2, 47);
    const double eps = 1e-2;
    // orientation (center, factor, factor); the compensated diagonal keeps the
    // g-trace, hence the transversal, unchanged
    for (BlockSample& sm : dd.samples) {
        MatD ginv = inverse(sm.g_fac[0]);
        sm.A(0, 1, 1) += eps;
        sm.A(0, 2, 2) -= eps * ginv(0, 0) / ginv(1, 1);
    }
    CharacterizationReport rep = characterize(dd);
    CHECK_FALSE(rep.accepted);
    REQUIRE(rep.reject_reasons == std::vector<std::string>{"factor_isotropy"});
    CHECK(rep.identity_residuals.at("factor_isotropy") > 1e-3);
    CHECK(rep.identity_residuals.at("factor_isotropy") < 1e-1);
    check_clean_except(rep, "factor_isotropy");
}

TEST_CASE("plant: mixed projection violation trips only that identity") {
    CompositionSpec spec{1, {quadric_factor(2)}, {1.3, 0.7}};
    DecompositionData dd = sample_blocks(spec, 2, 53);
    // orientation (factor, center, factor)
    DecompositionData bad = planted(dd, 1, 0, 2, 1e-2);
    CharacterizationReport rep = characterize(bad);
    CHECK_FALSE(rep.accepted);
    REQUIRE(rep.reject_reasons == std::vector<std::string>{"mixed_projection"});
    CHECK(rep.identity_residuals.at("mixed_projection") > 1e-3);
    CHECK(rep.identity_residuals.at("mixed_projection") < 1e-1);
    check_clean_except(rep, "mixed_projection");
}

TEST_CASE("plant: center block violation trips only the center identity") {
    CompositionSpec spec{1, {quadric_factor(2)}, {1.3, 0.7}};
    DecompositionData dd = sample_blocks(spec, 2, 59);
    DecompositionData bad = planted(dd, 0, 0, 0, 1e-2); // pure center entry, q = 1
    CharacterizationReport rep = characterize(bad);
    CHECK_FALSE(rep.accepted);
    REQUIRE(rep.reject_reasons == std::vector<std::string>{"center_transversal"});
    CHECK(rep.identity_residuals.at("center_transversal") > 1e-3);
    CHECK(rep.identity_residuals.at("center_transversal") < 1e-1);
    check_clean_except(rep, "center_transversal");
}

TEST_CASE("center block fingerprint for three point factors") {
    CompositionSpec spec{3, {quadric_factor(2)}, {1.0, 0.8, 1.2, 0.9}};
    DecompositionData dd = sample_blocks(spec, 2, 61);
    CharacterizationReport rep = characterize(dd);
    REQUIRE(rep.accepted);
    REQUIRE(rep.transversals.r_hat == 3);
    const CenterBlockReport& cb = rep.center;
    REQUIRE(cb.applicable);
    const int n = dd.total_dim();
    CHECK(cb.trace_residual < 1e-8);
    CHECK(cb.span_residual < 1e-7);
    CHECK(cb.membership.member());
    CHECK(cb.pick_J == doctest::Approx(-(n + 1.0) * dd.L1 / 3.0).epsilon(1e-6));
    CHECK(cb.pick_residual < 1e-6);
}

TEST_CASE("reconstruction round trip through a fresh composition") {
    CompositionSpec spec{1, {quadric_factor(2)}, {1.3, 0.7}};
    DecompositionData dd = sample_blocks(spec, 2, 67);
    CharacterizationReport rep = characterize(dd);
    REQUIRE(rep.accepted);
    const Reconstruction& rec = rep.reconstruction;
    REQUIRE(rec.point_factors == 1);
    CHECK(rec.factors[0].L1_factor == doctest::Approx(-1.0).epsilon(1e-6));

    // rebuild with the recovered parameters, choosing uniform constants that
    // reproduce the recovered composition constant
    CompositionSpec re{rec.point_factors, {quadric_factor(2)}, {}};
    re.factors[0].L1 = rec.factors[0].L1_factor;
    re.constants = VecD(re.K(), 1.0);
    double C1 = composition_constants(re).C;
    const int n = re.total_dim();
    double c = std::pow(rec.C / C1, (n + 2.0) / (2.0 * (n + 1)));
    re.constants = VecD(re.K(), c);

    CHECK(composition_constants(re).L1 == doctest::Approx(dd.L1).epsilon(1e-9));
    DecompositionData dd2 = sample_blocks(re, 2, 71);
    CharacterizationReport rep2 = characterize(dd2);
    REQUIRE(rep2.accepted);
    for (int a = 0; a < dd.s; ++a) {
        CHECK(rep2.transversals.cbar[a] == doctest::Approx(rep.transversals.cbar[a])
                                               .epsilon(1e-6));
        CHECK(rep2.reconstruction.factors[a].L1_factor ==
              doctest::Approx(rec.factors[a].L1_factor).epsilon(1e-6));
    }
}

TEST_CASE("degenerate data is rejected or refused") {
    // q + s < 2 refused at validation
    DecompositionData tiny;
    tiny.q = 0;
    tiny.s = 1;
    tiny.dims = {2};
    tiny.L1 = -1.0;
    tiny.samples.resize(1);
    tiny.samples[0].g0 = MatD(0, 0);
    tiny.samples[0].g_fac = {MatD(2, 2, 0.0)};
    tiny.samples[0].R_fac = {Ten4D(2)};
    tiny.samples[0].A = Ten3D(2, 0.0);
    CHECK_THROWS_AS(characterize(tiny), InvalidParameter);

    // no factor content
    DecompositionData flat;
    flat.q = 2;
    flat.s = 0;
    flat.L1 = -1.0;
    flat.samples.resize(1);
    flat.samples[0].g0 = MatD(2, 2, 0.0);
    flat.samples[0].g0(0, 0) = flat.samples[0].g0(1, 1) = 1.0;
    flat.samples[0].A = Ten3D(2, 0.0);
    CharacterizationReport rep = characterize(flat);
    CHECK_FALSE(rep.accepted);
    CHECK(rep.reject_reasons == std::vector<std::string>{"no_factors"});

    // vanishing transversals contradict the rank bound
    DecompositionData low;
    low.q = 1;
    low.s = 2;
    low.dims = {1, 1};
    low.L1 = -0.5;
    low.samples.resize(1);
    low.samples[0].g0 = MatD(1, 1, 1.0);
    low.samples[0].g_fac = {MatD(1, 1, 1.0), MatD(1, 1, 1.0)};
    low.samples[0].R_fac = {Ten4D(1), Ten4D(1)};
    for (auto& R : low.samples[0].R_fac)
        for (auto& v : R.data()) v = 0.0;
    low.samples[0].A = Ten3D(3, 0.0);
    CharacterizationReport rep2 = characterize(low);
    CHECK_FALSE(rep2.accepted);
    CHECK(rep2.reject_reasons == std::vector<std::string>{"transversal_rank"});

    // center metric drifting across samples
    DecompositionData drift = low;
    drift.samples.push_back(drift.samples[0]);
    drift.samples[1].g0(0, 0) = 2.0;
    CHECK_THROWS_AS(characterize(drift), PartitionMismatch);
}

TEST_CASE("seeded sampling is deterministic") {
    CompositionSpec spec{1, {quadric_factor(2)}, {1.3, 0.7}};
    DecompositionData a = sample_blocks(spec, 3, 97);
    DecompositionData b = sample_blocks(spec, 3, 97);
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i)
        for (size_t k = 0; k < a.samples[i].A.data().size(); ++k)
            CHECK(a.samples[i].A.data()[k] == b.samples[i].A.data()[k]);
}
