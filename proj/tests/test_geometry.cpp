#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include <affinv/catalog.hpp>
#include <affinv/geometry.hpp>

#include "invariant_oracle.hpp"

using namespace affinv;

namespace {

class GraphSurface final : public Immersion {
public:
    explicit GraphSurface(std::function<Jet4(const std::vector<Jet4>&)> f,
                          std::function<double(const VecD&)> fv, int n, std::string name)
        : f_(std::move(f)), fv_(std::move(fv)), n_(n), name_(std::move(name)) {}
    int dim() const override { return n_; }
    bool in_chart(const VecD&) const override { return true; }
    std::string describe() const override { return name_; }
    VecD values(const VecD& p) const override {
        VecD out(p);
        out.push_back(fv_(p));
        return out;
    }
    std::vector<Jet4> jets(const std::vector<Jet4>& vars) const override {
        std::vector<Jet4> out(vars);
        out.push_back(f_(vars));
        return out;
    }

private:
    std::function<Jet4(const std::vector<Jet4>&)> f_;
    std::function<double(const VecD&)> fv_;
    int n_;
    std::string name_;
};

constexpr double kS0 = 0.7598356856515925;  // (1/3)^{1/4}
constexpr double kL1Flat2 = -0.4386913376508308; // -3^{-3/4}

} // namespace

TEST_CASE("flat hypersphere n=2: frozen invariant values") {
    FlatHypersphere imm(2, 1.0);
    for (VecD p : {VecD{0.0, 0.0}, VecD{0.4, -0.7}, VecD{-1.2, 0.3}}) {
        PointInvariants inv = point_invariants(imm, p);
        CHECK(inv.g(0, 0) == doctest::Approx(2.0 * kS0).epsilon(1e-9));
        CHECK(inv.g(1, 1) == doctest::Approx(1.5 * kS0).epsilon(1e-9));
        CHECK(std::fabs(inv.g(0, 1)) < 1e-9);
        CHECK(inv.L1 == doctest::Approx(kL1Flat2).epsilon(1e-9));
        CHECK(std::fabs(inv.A(0, 0, 0)) < 1e-9);
        CHECK(inv.A(0, 0, 1) == doctest::Approx(kS0).epsilon(1e-9));
        CHECK(inv.A(1, 1, 1) == doctest::Approx(-0.75 * kS0).epsilon(1e-9));
        CHECK(std::fabs(inv.A(0, 1, 1)) < 1e-9);
        REQUIRE(inv.J.has_value());
        CHECK(*inv.J == doctest::Approx(-kL1Flat2).epsilon(1e-8));
        REQUIRE(inv.chi.has_value());
        CHECK(std::fabs(*inv.chi) < 1e-8); // flat metric
        // affine sphere: B = L1 * Id
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                CHECK(inv.B(k, i) == doctest::Approx(i == k ? inv.L1 : 0.0).epsilon(1e-8));
        for (const auto& [name, r] : inv.residuals) {
            INFO(name);
            CHECK(r < 1e-7);
        }
    }
}

TEST_CASE("quadric hyperboloid: vanishing cubic form, xi = x") {
    for (int n : {1, 2, 3}) {
        QuadricHypersphere imm(n);
        VecD p(n);
        for (int i = 0; i < n; ++i) p[i] = 0.3 - 0.15 * i;
        PointInvariants inv = point_invariants(imm, p);
        CHECK(inv.L1 == doctest::Approx(QuadricHypersphere::kL1).epsilon(1e-9));
        CHECK(max_abs(inv.A) < 1e-9);
        if (n >= 2) {
            REQUIRE(inv.J.has_value());
            CHECK(*inv.J < 1e-9);
            CHECK(*inv.chi == doctest::Approx(-1.0).epsilon(1e-8));
        }
        VecD x = imm.values(p);
        for (int A = 0; A <= n; ++A) CHECK(inv.xi[A] == doctest::Approx(x[A]).epsilon(1e-9));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                CHECK(inv.B(k, i) == doctest::Approx(i == k ? -1.0 : 0.0).epsilon(1e-8));
        for (const auto& [name, r] : inv.residuals) {
            INFO(name);
            CHECK(r < 1e-7);
        }
    }
}

TEST_CASE("plane graph is rejected as degenerate") {
    GraphSurface plane(
        [](const std::vector<Jet4>& v) { return v[0] + v[1] * 2.0 + 1.0; },
        [](const VecD& p) { return p[0] + 2.0 * p[1] + 1.0; }, 2, "plane");
    CHECK_THROWS_AS(point_invariants(plane, {0.1, 0.2}), DegenerateHessian);
}

TEST_CASE("saddle graph is rejected as not locally convex") {
    GraphSurface saddle(
        [](const std::vector<Jet4>& v) { return v[0] * v[0] - v[1] * v[1]; },
        [](const VecD& p) { return p[0] * p[0] - p[1] * p[1]; }, 2, "saddle");
    CHECK_THROWS_AS(point_invariants(saddle, {0.1, 0.2}), NotLocallyConvex);
}

TEST_CASE("pipeline matches finite-difference route") {
    FlatHypersphere flat(2, 1.0);
    QuadricHypersphere quad(2);
    struct Case {
        const Immersion* imm;
        VecD p;
    } cases[] = {{&flat, {0.2, -0.1}}, {&quad, {0.3, 0.1}}};
    for (const auto& c : cases) {
        INFO(c.imm->describe());
        PointInvariants inv = point_invariants(*c.imm, c.p);
        const int n = 2;

        fdcheck::Grid g = fdcheck::oracle_metric(*c.imm, c.p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(inv.g(i, j) == doctest::Approx(g[i][j]).epsilon(1e-3).scale(1.0));

        std::vector<double> xi = fdcheck::oracle_xi(*c.imm, c.p);
        for (int A = 0; A <= n; ++A)
            CHECK(inv.xi[A] == doctest::Approx(xi[A]).epsilon(1e-3).scale(1.0));

        double L1 = 0.0;
        fdcheck::Grid B = fdcheck::oracle_B(*c.imm, c.p, &L1);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                CHECK(inv.B(k, i) == doctest::Approx(B[k][i]).epsilon(1e-3).scale(1.0));
        CHECK(inv.L1 == doctest::Approx(L1).epsilon(1e-3));

        std::vector<fdcheck::Grid> A = fdcheck::oracle_A(*c.imm, c.p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    CHECK(inv.A(i, j, k) == doctest::Approx(A[i][j][k]).epsilon(1e-3).scale(1.0));
    }
}

TEST_CASE("membership check flags corrupted cubic data") {
    FlatHypersphere imm(2, 1.0);
    PointInvariants inv = point_invariants(imm, {0.1, 0.4});
    SMembershipReport good = check_S_membership(inv.g, inv.A, inv.R, inv.L1, true);
    CHECK(good.member());

    Ten3D bad = inv.A;
    bad(0, 0, 1) += 0.1;
    bad(0, 1, 0) += 0.1;
    bad(1, 0, 0) += 0.1;
    SMembershipReport rep = check_S_membership(inv.g, bad, inv.R, inv.L1, true);
    CHECK(rep.apolarity > 1e-3);
    CHECK(rep.gauss > 1e-3);
    CHECK_FALSE(rep.member());
}

TEST_CASE("membership check is sensitive to the constant") {
    QuadricHypersphere imm(2);
    PointInvariants inv = point_invariants(imm, {0.2, -0.3});
    CHECK(check_S_membership(inv.g, inv.A, inv.R, inv.L1, true).member());
    SMembershipReport off = check_S_membership(inv.g, inv.A, inv.R, inv.L1 + 0.1, true);
    CHECK_FALSE(off.member());
    CHECK(off.gauss > 0.05); // ~ 0.1 * |g^g| entries
}
