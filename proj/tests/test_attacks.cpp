#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pesto/attacks.hpp"
#include "pesto/toy.hpp"

using namespace pesto;

static Poly random_quadratic(const FieldRef& f, std::uint32_t nvars, Rng& rng) {
    MonomialBasis basis(nvars, 2);
    Poly p(f, nvars);
    for (std::size_t i = 0; i < basis.size(); ++i)
        p.set_coeff(basis.monomial(i), std::uint32_t(rng.below(f->order())));
    return p;
}

static bool is_structure_oracle(const Poly& f, const FVec& a) {
    const FieldSpec& fs = f.field();
    const std::uint64_t q = fs.order();
    FVec x(f.nvars(), 0);
    bool first = true;
    std::uint32_t ref = 0;
    do {
        FVec xa(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) xa[i] = fs.add(x[i], a[i]);
        const std::uint32_t d = fs.sub(f.eval(xa), f.eval(x));
        if (first) {
            ref = d;
            first = false;
        } else if (d != ref) {
            return false;
        }
    } while (next_point(x, q));
    return true;
}

TEST_CASE("quadratic component isolation") {
    SUBCASE("high-degree monomial count at n = 5") {
        MonomialBasis basis(5, 4);
        CHECK(basis.size() - basis.prefix(2) == 105);  // 126 - 21
    }
    SUBCASE("fixture key has component dimension t = 2") {
        auto kp = toy::keypair();
        ComponentSpace cs = isolate_quadratic(kp.pk);
        CHECK(cs.dimension() == 2);
        // every basis combination really is a degree-<=2 component
        for (const auto& lambda : cs.basis) CHECK(component(lambda, kp.pk.g_pub).degree() <= 2);
        FVec mix(4, 0);
        for (std::uint32_t j = 0; j < 4; ++j)
            for (const auto& lambda : cs.basis) mix[j] = kp.pk.params.field->add(mix[j], lambda[j]);
        CHECK(component(mix, kp.pk.g_pub).degree() <= 2);
    }
    SUBCASE("honest keys at working scale have dimension exactly t") {
        PestoParams p(FieldSpec::binary(6), 10, 8, 3, 2);
        for (int k = 0; k < 10; ++k) {
            Rng rng(500 + k);
            auto kp = keygen(p, rng);
            CHECK(isolate_quadratic(kp.pk).dimension() == 3);
        }
    }
    SUBCASE("all-quadratic public system has dimension m") {
        auto p = detail::make_params_unchecked(FieldSpec::prime(7), 5, 3, 3, 0);
        Rng rng(1);
        auto kp = keygen(p, rng);
        CHECK(isolate_quadratic(kp.pk).dimension() == 3);
    }
}

TEST_CASE("linear structures of a single polynomial") {
    auto f = FieldSpec::prime(5);
    SUBCASE("x1 + y1^2 has structure space span{(1,0)}") {
        Poly p(f, 2);
        p.set_coeff({1, 0}, 1);
        p.set_coeff({0, 2}, 1);
        for (auto method : {StructureMethod::linear_algebra, StructureMethod::brute_force}) {
            auto space = linear_structures(p, method);
            REQUIRE(space.dimension() == 1);
            CHECK(space.contains({1, 0}));
            CHECK(!space.contains({0, 1}));
        }
    }
    SUBCASE("methods agree on random quadratics at q = 5, n = 4") {
        Rng rng(3);
        for (int it = 0; it < 25; ++it) {
            Poly p = random_quadratic(f, 4, rng);
            auto la = linear_structures(p, StructureMethod::linear_algebra);
            auto bf = linear_structures(p, StructureMethod::brute_force);
            CHECK(la.dimension() == bf.dimension());
            for (const auto& v : bf.basis) CHECK(la.contains(v));
        }
    }
    SUBCASE("returned space matches the derivative oracle exactly") {
        Rng rng(8);
        for (int it = 0; it < 5; ++it) {
            Poly p = random_quadratic(f, 3, rng);
            auto space = linear_structures(p, StructureMethod::brute_force);
            FVec a(3, 0);
            do {
                CHECK(space.contains(a) == is_structure_oracle(p, a));
            } while (next_point(a, 5));
        }
    }
    SUBCASE("degree guard and budget guard") {
        Poly cubic(f, 1);
        cubic.set_coeff({3}, 1);
        CHECK_THROWS_AS(linear_structures(cubic, StructureMethod::linear_algebra), DegreeTooHigh);
        Poly big(FieldSpec::binary(8), 3);
        CHECK_THROWS_AS(linear_structures(big, StructureMethod::brute_force), BudgetExceeded);
    }
}

TEST_CASE("structures of twist-quadratic components contain the full x block") {
    auto f = FieldSpec::prime(5);
    PolySystem g = build_twisted(toy::central_map(f));
    Rng rng(6);
    for (int it = 0; it < 10; ++it) {
        FVec lambda(4, 0);
        lambda[0] = std::uint32_t(rng.below(5));
        lambda[1] = std::uint32_t(rng.below(5));
        if (!lambda[0] && !lambda[1]) lambda[0] = 1;
        auto space = linear_structures(component(lambda, g), StructureMethod::linear_algebra);
        for (std::uint32_t a1 = 0; a1 < 5; ++a1)
            for (std::uint32_t a2 = 0; a2 < 5; ++a2) CHECK(space.contains({a1, a2, 0, 0, 0}));
    }
}

TEST_CASE("common linear structures") {
    auto f = FieldSpec::prime(5);
    SUBCASE("single component is its own space") {
        Rng rng(10);
        Poly p = random_quadratic(f, 3, rng);
        auto one = common_linear_structures({p});
        auto direct = linear_structures(p, StructureMethod::linear_algebra);
        CHECK(one.dimension() == direct.dimension());
        for (const auto& v : direct.basis) CHECK(one.contains(v));
    }
    SUBCASE("disjoint structures intersect to zero") {
        Poly p1(f, 2), p2(f, 2);
        p1.set_coeff({2, 0}, 1);
        p2.set_coeff({0, 2}, 1);
        CHECK(common_linear_structures({p1, p2}).dimension() == 0);
    }
    SUBCASE("white-box partial input-transformation recovery on the fixture key") {
        auto kp = toy::keypair();
        ComponentSpace cs = isolate_quadratic(kp.pk);
        REQUIRE(cs.dimension() == 2);
        std::vector<Poly> comps;
        for (const auto& lambda : cs.basis) comps.push_back(component(lambda, kp.pk.g_pub));
        auto V = common_linear_structures(comps);
        CHECK(V.dimension() == 2);
        // L2(V) should be GF(q)^t x {0}
        for (const auto& v : V.basis) {
            FVec img = kp.sk.a2.linear().apply(v);
            for (std::uint32_t i = 2; i < 5; ++i) CHECK(img[i] == 0);
        }
        std::vector<FVec> imgs;
        for (const auto& v : V.basis) imgs.push_back(kp.sk.a2.linear().apply(v));
        CHECK(rank(Matrix::from_rows(f, imgs)) == 2);
    }
    SUBCASE("white-box recovery on working-scale keys") {
        PestoParams p(FieldSpec::binary(6), 10, 8, 3, 2);
        for (int k = 0; k < 5; ++k) {
            Rng rng(900 + k);
            auto kp = keygen(p, rng);
            ComponentSpace cs = isolate_quadratic(kp.pk);
            REQUIRE(cs.dimension() == 3);
            std::vector<Poly> comps;
            for (const auto& lambda : cs.basis) comps.push_back(component(lambda, kp.pk.g_pub));
            auto V = common_linear_structures(comps);
            CHECK(V.dimension() >= 3);
            std::vector<FVec> imgs;
            for (const auto& v : V.basis) imgs.push_back(kp.sk.a2.linear().apply(v));
            for (const auto& img : imgs)
                for (std::uint32_t i = 3; i < 10; ++i) CHECK(img[i] == 0);
        }
    }
}

TEST_CASE("structure-count multiset") {
    auto f = FieldSpec::prime(5);
    SUBCASE("linear system: every component has q^n structures") {
        PolySystem sys(f, 2);
        sys.push_back(Poly::variable(f, 2, 0));
        sys.push_back(Poly::variable(f, 2, 1));
        auto ms = structure_count_multiset(sys);
        CHECK(ms.size() == 24);
        for (auto c : ms) CHECK(c == 25);
    }
    SUBCASE("invariant between the twisted system and its public composition") {
        PestoParams p(f, 4, 3, 1, 1);
        Rng rng(77);
        auto kp = keygen(p, rng, /*reduced_a1=*/false);
        PolySystem g = build_twisted(kp.sk.central);
        auto ms_g = structure_count_multiset(g);
        auto ms_pub = structure_count_multiset(kp.pk.g_pub);
        CHECK(ms_g == ms_pub);
    }
    SUBCASE("structure correspondence a <-> L2(a) between matched components") {
        PestoParams p(f, 4, 3, 1, 1);
        Rng rng(78);
        auto kp = keygen(p, rng, /*reduced_a1=*/false);
        PolySystem g = build_twisted(kp.sk.central);
        // lambda . G_pub corresponds to (L1^T lambda) . G up to affine input change
        FVec lambda{1, 2, 0};
        FVec mu = kp.sk.a1.linear().transpose().apply(lambda);
        Poly f_pub = component(lambda, kp.pk.g_pub);
        Poly f_g = component(mu, g);
        Rng r2(5);
        for (int it = 0; it < 200; ++it) {
            FVec a = random_vector(4, *f, r2);
            FVec l2a = kp.sk.a2.linear().apply(a);
            CHECK(is_structure_oracle(f_pub, a) == is_structure_oracle(f_g, l2a));
        }
    }
}

TEST_CASE("linearization attack") {
    auto f = FieldSpec::binary(6);
    SUBCASE("succeeds on s = 0 keys") {
        auto p = detail::make_params_unchecked(f, 8, 8, 1, 0);
        Rng rng(42);
        auto kp = keygen(p, rng);
        int success = 0;
        for (int it = 0; it < 5; ++it) {
            FVec z = random_vector(8, *f, rng);
            FVec target = kp.pk.g_pub.eval(z);
            auto report = linearization_attack(kp.pk, target, rng);
            if (report.success) {
                ++success;
                for (const auto& cand : report.candidates)
                    CHECK(kp.pk.g_pub.eval(cand) == target);
            }
        }
        CHECK(success >= 4);
    }
    SUBCASE("reports failure on honest s >= 1 keys") {
        PestoParams p(f, 8, 6, 2, 2);
        Rng rng(43);
        auto kp = keygen(p, rng);
        FVec z = random_vector(8, *f, rng);
        auto report = linearization_attack(kp.pk, kp.pk.g_pub.eval(z), rng);
        CHECK(!report.success);
        CHECK(report.stats.at("relation_dim") == 0);
    }
    SUBCASE("forges every target of an affine public map") {
        Rng rng(44);
        PolySystem affine(f, 4);
        for (int i = 0; i < 4; ++i) {
            Poly p(f, 4);
            for (std::uint32_t j = 0; j < 4; ++j) {
                Monomial e(4, 0);
                e[j] = 1;
                p.set_coeff(e, std::uint32_t(rng.below(64)));
            }
            p.set_coeff(Monomial(4, 0), std::uint32_t(rng.below(64)));
            affine.push_back(std::move(p));
        }
        for (int it = 0; it < 5; ++it) {
            FVec z = random_vector(4, *f, rng);
            FVec target = affine.eval(z);
            auto report = linearization_attack(affine, target, rng);
            CHECK(report.success);
        }
    }
    SUBCASE("undersized sample budget is rejected") {
        Rng rng(45);
        PolySystem tiny(f, 2);
        tiny.push_back(Poly::variable(f, 2, 0));
        CHECK_THROWS_AS(linearization_attack(tiny, FVec{1}, rng, 3), InsufficientSamples);
    }
}

TEST_CASE("forgery with known input transformation") {
    auto kp = toy::keypair();
    auto f = kp.pk.params.field;
    Rng rng(11);
    SUBCASE("true transformation yields verified preimages") {
        for (int it = 0; it < 20; ++it) {
            FVec z = random_vector(5, *f, rng);
            FVec c = encrypt(kp.pk, z);
            FVec pre = forge_with_known_a2(kp.pk, kp.sk.a2, c);
            CHECK(encrypt(kp.pk, pre) == c);
        }
    }
    SUBCASE("wrong transformation fails loudly or produces no verified preimage") {
        int failures = 0;
        for (int it = 0; it < 10; ++it) {
            auto wrong = random_affine_bijection(5, f, rng);
            FVec z = random_vector(5, *f, rng);
            FVec c = encrypt(kp.pk, z);
            try {
                FVec pre = forge_with_known_a2(kp.pk, wrong, c);
                if (encrypt(kp.pk, pre) != c) ++failures;
            } catch (const IsolationAmbiguous&) {
                ++failures;
            } catch (const Error&) {
                ++failures;
            }
        }
        CHECK(failures >= 9);
    }
    SUBCASE("s = 0 keys need no quadratic enumeration") {
        auto p = detail::make_params_unchecked(FieldSpec::binary(6), 6, 5, 2, 0);
        Rng r2(12);
        auto kp0 = keygen(p, r2);
        for (int it = 0; it < 5; ++it) {
            FVec z = random_vector(6, *FieldSpec::binary(6), r2);
            FVec c = encrypt(kp0.pk, z);
            FVec pre = forge_with_known_a2(kp0.pk, kp0.sk.a2, c);
            CHECK(encrypt(kp0.pk, pre) == c);
        }
    }
}
