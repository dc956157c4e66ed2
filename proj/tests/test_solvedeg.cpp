#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pesto/solvedeg.hpp"

using namespace pesto;

// Random system of degree-deg polynomials vanishing at a planted root.
static PolySystem planted_system(const FieldRef& f, std::uint32_t n, std::uint32_t m,
                                 std::uint32_t deg, const FVec& root, Rng& rng) {
    MonomialBasis basis(n, deg);
    PolySystem sys(f, n);
    for (std::uint32_t i = 0; i < m; ++i) {
        Poly p(f, n);
        for (std::size_t j = 1; j < basis.size(); ++j)
            p.set_coeff(basis.monomial(j), std::uint32_t(rng.below(f->order())));
        p.set_coeff(Monomial(n, 0), f->neg(p.eval(root)));
        sys.push_back(std::move(p));
    }
    return sys;
}

TEST_CASE("linear systems have witness degree 1") {
    auto f = FieldSpec::prime(5);
    Rng rng(1);
    FVec root{2, 4, 1};
    PolySystem sys = planted_system(f, 3, 3, 1, root, rng);
    auto est = xl_witness_degree(sys, 4);
    CHECK(est.witness_degree == 1);
    CHECK(est.termination == "witness");
    CHECK(est.solution == root);
}

TEST_CASE("planted quadratic systems are solved and verified") {
    auto f = FieldSpec::binary(6);
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        Rng rng(seed);
        FVec root = random_vector(4, *f, rng);
        PolySystem sys = planted_system(f, 4, 6, 2, root, rng);
        auto est = xl_witness_degree(sys, 6);
        CHECK(est.witness_degree >= 2);
        for (const auto& p : sys.polys) CHECK(p.eval(est.solution) == 0);
        // rank profile is monotone in the degree
        std::size_t prev = 0;
        for (const auto& [d, r] : est.rank_profile) {
            CHECK(r >= prev);
            prev = r;
        }
    }
}

TEST_CASE("quotient-ring mode agrees at q = 5") {
    auto f = FieldSpec::prime(5);
    Rng rng(3);
    FVec root = random_vector(3, *f, rng);
    PolySystem sys = planted_system(f, 3, 5, 2, root, rng);
    auto plain = xl_witness_degree(sys, 6, 1u << 21, false);
    auto quot = xl_witness_degree(sys, 6, 1u << 21, true);
    for (const auto& p : sys.polys) {
        CHECK(p.eval(plain.solution) == 0);
        CHECK(p.eval(quot.solution) == 0);
    }
    CHECK(quot.witness_degree <= plain.witness_degree);
}

TEST_CASE("degree cap and column budget guards") {
    auto f = FieldSpec::prime(5);
    Rng rng(4);
    FVec root = random_vector(4, *f, rng);
    PolySystem sys = planted_system(f, 4, 2, 2, root, rng);  // underdetermined: many roots
    CHECK_THROWS_AS(xl_witness_degree(sys, 3), NoSolutionFound);
    PolySystem one = planted_system(f, 4, 4, 2, root, rng);
    CHECK_THROWS_AS(xl_witness_degree(one, 6, 10), BudgetExceeded);
    CHECK_THROWS_AS(detail::build_macaulay(PolySystem(FieldSpec::prime(521), 2), 2, 1u << 21, false),
                    ParamRange);
}

TEST_CASE("specialized public-system target") {
    PestoParams p(FieldSpec::binary(6), 7, 5, 2, 2);
    Rng rng(9);
    auto kp = keygen(p, rng);
    FVec z = random_vector(7, *p.field, rng);
    FVec w = kp.pk.g_pub.eval(z);
    PolySystem sys = specialized_target(kp.pk, w, z, 5);
    CHECK(sys.nvars == 5);
    CHECK(sys.size() == 5);
    FVec head(z.begin(), z.begin() + 5);
    for (const auto& poly : sys.polys) CHECK(poly.eval(head) == 0);
}

TEST_CASE("mutant reinforcement never raises the witness degree") {
    PestoParams p(FieldSpec::binary(6), 7, 5, 2, 2);
    Rng rng(12);
    auto kp = keygen(p, rng);
    FVec z = random_vector(7, *p.field, rng);
    FVec w = kp.pk.g_pub.eval(z);
    PolySystem sys = specialized_target(kp.pk, w, z, 4);
    auto plain = xl_witness_degree(sys, 9);
    auto mutant = xl_witness_degree(sys, 9, 1u << 21, false, true);
    CHECK(mutant.witness_degree <= plain.witness_degree);
    for (const auto& poly : sys.polys) {
        CHECK(poly.eval(plain.solution) == 0);
        CHECK(poly.eval(mutant.solution) == 0);
    }
}

TEST_CASE("witness-degree probe at the small working scale") {
    PestoParams p(FieldSpec::binary(6), 7, 5, 2, 2);
    ProbeRecord rec = probe_witness_degree(p, 1);
    CHECK(rec.witness_degree >= 5);
    CHECK(rec.witness_degree <= 7);
    CHECK(rec.q == 64);
    std::string csv = to_csv(rec);
    CHECK(csv.rfind("64,7,5,2,2,1,", 0) == 0);
    CHECK(probe_csv_header() == "q,n,m,t,s,seed,witness_degree,max_rank_degree,runtime_ms");
}

TEST_CASE("elimination-complexity bound arithmetic") {
    SUBCASE("small exact values") {
        auto b = gb_complexity_bound(4, 2, 2.5);
        REQUIRE(b.binomial_limbs.size() == 1);
        CHECK(b.binomial_limbs[0] == 15);  // C(6,2)
        CHECK(b.binomial_decimal() == "15");
        CHECK(b.log2_bound == doctest::Approx(2.5 * std::log2(15.0)));
    }
    SUBCASE("sd = 1 collapses to n + 1") {
        auto b = gb_complexity_bound(27, 1, 2.3);
        CHECK(b.binomial_decimal() == "28");
    }
    SUBCASE("large case against a lgamma oracle") {
        auto b = gb_complexity_bound(27, 33, 2.3);
        const double lg = (std::lgamma(61.0) - std::lgamma(28.0) - std::lgamma(34.0)) / std::log(2.0);
        CHECK(b.log2_binomial == doctest::Approx(lg).epsilon(1e-9));
        CHECK(b.log2_bound == doctest::Approx(2.3 * lg).epsilon(1e-9));
    }
    SUBCASE("monotone in the solving degree") {
        double prev = 0;
        for (std::uint32_t sd = 1; sd < 20; ++sd) {
            auto b = gb_complexity_bound(10, sd, 2.5);
            CHECK(b.log2_bound > prev);
            prev = b.log2_bound;
        }
    }
    SUBCASE("parameter guards") {
        CHECK_THROWS_AS(gb_complexity_bound(5, 0, 2.5), ParamRange);
        CHECK_THROWS_AS(gb_complexity_bound(5, 3, 3.5), ParamRange);
    }
}
