#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "pesto/mpoly.hpp"
#include "pesto/toy.hpp"
#include "pesto/twist.hpp"

using namespace pesto;

static Poly random_poly(const FieldRef& f, std::uint32_t nvars, std::uint32_t maxdeg, Rng& rng) {
    MonomialBasis basis(nvars, maxdeg);
    Poly p(f, nvars);
    for (std::size_t i = 0; i < basis.size(); ++i)
        p.set_coeff(basis.monomial(i), std::uint32_t(rng.below(f->order())));
    return p;
}

TEST_CASE("evaluation of the fixture quadratic") {
    auto f = FieldSpec::prime(5);
    const Poly q1 = toy::qmap(f).polys[0];
    CHECK(q1.eval({0, 0, 0}) == 4);  // constant term
    CHECK(q1.eval({1, 0, 0}) == 0);  // 1 + 4 over GF(5)
    Poly zero(f, 3);
    CHECK(zero.eval({3, 1, 4}) == 0);
}

TEST_CASE("poly_mul") {
    auto f = FieldSpec::prime(5);
    Rng rng(5);
    SUBCASE("multiplicative identity") {
        Poly p = random_poly(f, 2, 3, rng);
        CHECK(p * Poly::constant(f, 2, 1) == p);
    }
    SUBCASE("field equation folds y^5 to y") {
        Poly a(f, 1), b(f, 1);
        a.set_coeff({2}, 1);
        b.set_coeff({3}, 1);
        Poly prod = a * b;
        CHECK(prod.coeff({1}) == 1);
        CHECK(prod.degree() == 1);
    }
    SUBCASE("difference of squares") {
        Poly p1(f, 1), p2(f, 1);
        p1.set_coeff({1}, 1);
        p1.set_coeff({0}, 1);
        p2.set_coeff({1}, 1);
        p2.set_coeff({0}, 4);
        Poly prod = p1 * p2;
        CHECK(prod.coeff({2}) == 1);
        CHECK(prod.coeff({0}) == 4);
        CHECK(prod.coeff({1}) == 0);
    }
}

TEST_CASE("substitute") {
    auto f = FieldSpec::prime(5);
    SUBCASE("identity substitution") {
        Rng rng(9);
        Poly p = random_poly(f, 3, 2, rng);
        PolySystem id(f, 3);
        for (std::uint32_t i = 0; i < 3; ++i) id.push_back(Poly::variable(f, 3, i));
        CHECK(substitute(p, id) == p);
    }
    SUBCASE("binomial expansion") {
        Poly p(f, 1);
        p.set_coeff({2}, 1);  // x^2
        PolySystem subs(f, 2);
        Poly img = Poly::variable(f, 2, 0) + Poly::variable(f, 2, 1);
        subs.push_back(img);
        Poly r = substitute(p, subs);
        CHECK(r.coeff({2, 0}) == 1);
        CHECK(r.coeff({1, 1}) == 2);
        CHECK(r.coeff({0, 2}) == 1);
    }
    SUBCASE("degree bound: quadratic into quadratic stays within 4") {
        Rng rng(10);
        Poly p = random_poly(f, 2, 2, rng);
        PolySystem subs(f, 3);
        subs.push_back(random_poly(f, 3, 2, rng));
        subs.push_back(random_poly(f, 3, 2, rng));
        CHECK(substitute(p, subs).degree() <= 4);
    }
    SUBCASE("substitute then eval equals eval then eval") {
        Rng rng(12);
        for (int it = 0; it < 25; ++it) {
            Poly p = random_poly(f, 2, 2, rng);
            PolySystem subs(f, 2);
            subs.push_back(random_poly(f, 2, 2, rng));
            subs.push_back(random_poly(f, 2, 2, rng));
            Poly comp = substitute(p, subs);
            FVec z = random_vector(2, *f, rng);
            CHECK(comp.eval(z) == p.eval(subs.eval(z)));
        }
    }
}

TEST_CASE("component") {
    auto f = FieldSpec::prime(5);
    PolySystem sys(f, 1);
    sys.push_back(Poly::variable(f, 1, 0));
    sys.push_back(Poly::variable(f, 1, 0));
    CHECK(component({1, 0}, sys) == sys.polys[0]);
    CHECK(component({0, 0}, sys).is_zero());
    CHECK(component({1, 4}, sys).is_zero());  // x + 4x = 0 over GF(5)
}

TEST_CASE("degree") {
    auto f = FieldSpec::prime(5);
    Poly p(f, 3);
    p.set_coeff({1, 1, 1}, 2);
    CHECK(p.degree() == 3);
    CHECK(toy::expected_g(f).polys[2].degree() == 4);
    Poly r(f, 1);
    r.add_term({5}, 1);
    CHECK(r.degree() == 1);
}

TEST_CASE("eval distributes over multiplication") {
    auto f = FieldSpec::binary(6);
    Rng rng(14);
    for (int it = 0; it < 25; ++it) {
        Poly p1 = random_poly(f, 2, 2, rng);
        Poly p2 = random_poly(f, 2, 2, rng);
        FVec z = random_vector(2, *f, rng);
        CHECK((p1 * p2).eval(z) == f->mul(p1.eval(z), p2.eval(z)));
    }
}

TEST_CASE("representation uniqueness at q = 5") {
    auto f = FieldSpec::prime(5);
    Rng rng(21);
    for (int it = 0; it < 20; ++it) {
        Poly p1 = random_poly(f, 2, 3, rng);
        Poly p2 = random_poly(f, 2, 3, rng);
        bool same_map = p1 == p2;
        bool same_fn = true;
        for (std::uint32_t a = 0; a < 5 && same_fn; ++a)
            for (std::uint32_t b = 0; b < 5; ++b)
                if (p1.eval({a, b}) != p2.eval({a, b})) {
                    same_fn = false;
                    break;
                }
        CHECK(same_map == same_fn);
    }
}

TEST_CASE("compose_affine") {
    auto f = FieldSpec::prime(5);
    Rng rng(31);
    PolySystem sys(f, 3);
    for (int i = 0; i < 2; ++i) sys.push_back(random_poly(f, 3, 4, rng));

    SUBCASE("identity leaves the system unchanged") {
        AffineBijection id(Matrix::identity(f, 3), FVec(3, 0));
        PolySystem r = compose_affine(sys, id, ComposeSide::input);
        for (std::size_t i = 0; i < sys.size(); ++i) CHECK(r.polys[i] == sys.polys[i]);
        AffineBijection idm(Matrix::identity(f, 2), FVec(2, 0));
        PolySystem ro = compose_affine(sys, idm, ComposeSide::output);
        for (std::size_t i = 0; i < sys.size(); ++i) CHECK(ro.polys[i] == sys.polys[i]);
    }
    SUBCASE("input composition never raises degree") {
        auto b = random_affine_bijection(3, f, rng);
        PolySystem r = compose_affine(sys, b, ComposeSide::input);
        for (std::size_t i = 0; i < sys.size(); ++i)
            CHECK(r.polys[i].degree() <= sys.polys[i].degree());
    }
    SUBCASE("pointwise agreement with the evaluation oracle") {
        auto b = random_affine_bijection(3, f, rng);
        PolySystem r = compose_affine(sys, b, ComposeSide::input);
        for (int it = 0; it < 20; ++it) {
            FVec z = random_vector(3, *f, rng);
            CHECK(r.eval(z) == sys.eval(b.forward(z)));
        }
    }
    SUBCASE("fixture composition matches pointwise A1(G(A2(.)))") {
        auto g = toy::expected_g(f);
        auto a1 = toy::a1(f);
        auto a2 = toy::a2(f);
        PolySystem gp = compose_affine(compose_affine(g, a2, ComposeSide::input), a1, ComposeSide::output);
        for (int it = 0; it < 20; ++it) {
            FVec z = random_vector(5, *f, rng);
            CHECK(gp.eval(z) == a1.forward(g.eval(a2.forward(z))));
        }
    }
    SUBCASE("component degree census is invariant under bijective input composition") {
        PolySystem small(f, 2);
        Rng r2(77);
        small.push_back(random_poly(f, 2, 3, r2));
        small.push_back(random_poly(f, 2, 2, r2));
        auto b = random_affine_bijection(2, f, r2);
        PolySystem comp = compose_affine(small, b, ComposeSide::input);
        std::map<std::uint32_t, int> before, after;
        FVec lambda(2, 0);
        do {
            before[component(lambda, small).degree()]++;
            after[component(lambda, comp).degree()]++;
        } while (next_point(lambda, 5));
        CHECK(before == after);
    }
}

TEST_CASE("dense evaluation agrees with sparse evaluation and counts exactly") {
    auto f = FieldSpec::binary(6);
    Rng rng(55);
    const std::uint32_t n = 6;
    MonomialBasis basis(n, 4);
    Poly p = random_poly(f, n, 4, rng);
    for (int it = 0; it < 10; ++it) {
        FVec z = random_vector(n, *f, rng);
        MultCounter mc;
        CHECK(dense_eval(p, z, basis, &mc) == p.eval(z));
        CHECK(mc.mults == 2 * basis.size() - n - 2);
    }
}
