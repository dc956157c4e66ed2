#pragma once

#include <initializer_list>

#include "pesto/scheme.hpp"

// Fixed worked example over GF(5) with (n, m, t, s) = (5, 4, 2, 1), used as
// a cross-implementation regression fixture: the central map, both affine
// bijections, and the expected twisted system G, coefficient by coefficient.
namespace pesto::toy {

struct Term {
    std::uint32_t c;
    std::initializer_list<std::uint16_t> e;
};

inline Poly make_poly(const FieldRef& f, std::uint32_t nvars, std::initializer_list<Term> terms) {
    Poly p(f, nvars);
    for (const auto& t : terms) p.set_coeff(Monomial(t.e), t.c);
    return p;
}

inline PestoParams params() { return PestoParams(FieldSpec::prime(5), 5, 4, 2, 1); }

// q : GF(5)^3 -> GF(5)^2 in the y-variables (y1, y2, y3)
inline PolySystem qmap(const FieldRef& f) {
    PolySystem q(f, 3);
    q.push_back(make_poly(f, 3,
                          {{1, {2, 0, 0}},
                           {2, {1, 1, 0}},
                           {4, {0, 2, 0}},
                           {3, {0, 1, 1}},
                           {1, {0, 1, 0}},
                           {3, {0, 0, 2}},
                           {4, {0, 0, 0}}}));
    q.push_back(make_poly(f, 3,
                          {{3, {2, 0, 0}},
                           {3, {1, 1, 0}},
                           {2, {1, 0, 1}},
                           {2, {0, 1, 1}},
                           {2, {0, 1, 0}},
                           {1, {0, 0, 2}},
                           {2, {0, 0, 1}}}));
    return q;
}

// U : 2 OV equations in (x1, x2, y1, y2, y3); vinegar x1, x2, y1; oil y2, y3
inline PolySystem umap(const FieldRef& f) {
    PolySystem u(f, 5);
    u.push_back(make_poly(f, 5,
                          {{1, {2, 0, 0, 0, 0}}, {2, {1, 1, 0, 0, 0}}, {3, {1, 0, 1, 0, 0}},
                           {1, {1, 0, 0, 1, 0}}, {4, {1, 0, 0, 0, 1}}, {2, {1, 0, 0, 0, 0}},
                           {1, {0, 2, 0, 0, 0}}, {1, {0, 1, 1, 0, 0}}, {1, {0, 1, 0, 1, 0}},
                           {3, {0, 1, 0, 0, 1}}, {3, {0, 1, 0, 0, 0}}, {2, {0, 0, 2, 0, 0}},
                           {2, {0, 0, 1, 1, 0}}, {2, {0, 0, 1, 0, 1}}, {1, {0, 0, 1, 0, 0}},
                           {4, {0, 0, 0, 1, 0}}, {1, {0, 0, 0, 0, 1}}}));
    u.push_back(make_poly(f, 5,
                          {{1, {1, 1, 0, 0, 0}}, {1, {1, 0, 0, 0, 0}}, {4, {0, 2, 0, 0, 0}},
                           {2, {0, 1, 0, 1, 0}}, {3, {0, 1, 0, 0, 1}}, {3, {0, 1, 0, 0, 0}},
                           {2, {0, 0, 1, 0, 1}}, {3, {0, 0, 1, 0, 0}}, {3, {0, 0, 0, 0, 1}},
                           {1, {0, 0, 0, 0, 0}}}));
    return u;
}

inline CentralMap central_map(const FieldRef& f) {
    CentralMap cm;
    cm.field = f;
    cm.n = 5;
    cm.m = 4;
    cm.t = 2;
    cm.s = 1;
    cm.qmap = qmap(f);
    cm.U = umap(f);
    cm.validate();
    return cm;
}

inline AffineBijection a2(const FieldRef& f) {
    Matrix l = Matrix::from_rows(f, {{1, 4, 3, 2, 1},
                                     {2, 0, 1, 1, 4},
                                     {3, 2, 2, 0, 2},
                                     {1, 2, 2, 2, 3},
                                     {2, 3, 4, 4, 2}});
    return AffineBijection(std::move(l), {2, 1, 3, 2, 2});
}

inline AffineBijection a1(const FieldRef& f) {
    Matrix l = Matrix::from_rows(f, {{2, 3, 2, 1}, {4, 2, 3, 1}, {1, 2, 1, 3}, {1, 4, 3, 1}});
    return AffineBijection(std::move(l), {1, 0, 0, 4});
}

// The expected twisted system G = (x - q(y), U(x - q(y), y)).
inline PolySystem expected_g(const FieldRef& f) {
    PolySystem g(f, 5);
    g.push_back(make_poly(f, 5,
                          {{1, {1, 0, 0, 0, 0}}, {4, {0, 0, 2, 0, 0}}, {3, {0, 0, 1, 1, 0}},
                           {1, {0, 0, 0, 2, 0}}, {2, {0, 0, 0, 1, 1}}, {4, {0, 0, 0, 1, 0}},
                           {2, {0, 0, 0, 0, 2}}, {1, {0, 0, 0, 0, 0}}}));
    g.push_back(make_poly(f, 5,
                          {{1, {0, 1, 0, 0, 0}}, {2, {0, 0, 2, 0, 0}}, {2, {0, 0, 1, 1, 0}},
                           {3, {0, 0, 1, 0, 1}}, {3, {0, 0, 0, 1, 1}}, {3, {0, 0, 0, 1, 0}},
                           {4, {0, 0, 0, 0, 2}}, {3, {0, 0, 0, 0, 1}}}));
    g.push_back(make_poly(
        f, 5,
        {{1, {2, 0, 0, 0, 0}}, {2, {1, 1, 0, 0, 0}}, {2, {1, 0, 2, 0, 0}}, {1, {1, 0, 1, 0, 1}},
         {3, {1, 0, 1, 0, 0}}, {2, {1, 0, 0, 2, 0}}, {2, {1, 0, 0, 0, 2}}, {4, {1, 0, 0, 0, 0}},
         {1, {0, 2, 0, 0, 0}}, {2, {0, 1, 2, 0, 0}}, {1, {0, 1, 1, 0, 1}}, {1, {0, 1, 1, 0, 0}},
         {2, {0, 1, 0, 2, 0}}, {2, {0, 1, 0, 0, 2}}, {4, {0, 1, 0, 0, 1}}, {1, {0, 0, 4, 0, 0}},
         {1, {0, 0, 3, 0, 1}}, {4, {0, 0, 3, 0, 0}}, {2, {0, 0, 2, 2, 0}}, {1, {0, 0, 2, 1, 0}},
         {1, {0, 0, 2, 0, 2}}, {1, {0, 0, 2, 0, 1}}, {3, {0, 0, 2, 0, 0}}, {1, {0, 0, 1, 2, 1}},
         {3, {0, 0, 1, 2, 0}}, {2, {0, 0, 1, 1, 1}}, {4, {0, 0, 1, 1, 0}}, {1, {0, 0, 1, 0, 3}},
         {2, {0, 0, 1, 0, 2}}, {4, {0, 0, 1, 0, 0}}, {1, {0, 0, 0, 4, 0}}, {2, {0, 0, 0, 2, 2}},
         {2, {0, 0, 0, 1, 2}}, {3, {0, 0, 0, 1, 1}}, {1, {0, 0, 0, 1, 0}}, {1, {0, 0, 0, 0, 4}},
         {1, {0, 0, 0, 0, 3}}, {1, {0, 0, 0, 0, 2}}, {3, {0, 0, 0, 0, 0}}}));
    g.push_back(make_poly(
        f, 5,
        {{1, {1, 1, 0, 0, 0}}, {2, {1, 0, 2, 0, 0}}, {2, {1, 0, 1, 1, 0}}, {3, {1, 0, 1, 0, 1}},
         {3, {1, 0, 0, 1, 1}}, {3, {1, 0, 0, 1, 0}}, {4, {1, 0, 0, 0, 2}}, {3, {1, 0, 0, 0, 1}},
         {1, {1, 0, 0, 0, 0}}, {4, {0, 2, 0, 0, 0}}, {4, {0, 1, 1, 1, 0}}, {4, {0, 1, 1, 0, 1}},
         {1, {0, 1, 0, 2, 0}}, {1, {0, 1, 0, 1, 1}}, {4, {0, 1, 0, 0, 2}}, {2, {0, 1, 0, 0, 1}},
         {4, {0, 1, 0, 0, 0}}, {4, {0, 0, 4, 0, 0}}, {1, {0, 0, 3, 1, 0}}, {4, {0, 0, 2, 2, 0}},
         {1, {0, 0, 2, 1, 1}}, {2, {0, 0, 2, 1, 0}}, {1, {0, 0, 2, 0, 1}}, {2, {0, 0, 2, 0, 0}},
         {2, {0, 0, 1, 3, 0}}, {4, {0, 0, 1, 2, 1}}, {4, {0, 0, 1, 2, 0}}, {3, {0, 0, 1, 1, 2}},
         {3, {0, 0, 1, 1, 1}}, {1, {0, 0, 1, 1, 0}}, {2, {0, 0, 1, 0, 3}}, {1, {0, 0, 1, 0, 2}},
         {4, {0, 0, 1, 0, 1}}, {3, {0, 0, 1, 0, 0}}, {3, {0, 0, 0, 3, 1}}, {3, {0, 0, 0, 3, 0}},
         {1, {0, 0, 0, 2, 2}}, {4, {0, 0, 0, 2, 1}}, {3, {0, 0, 0, 1, 2}}, {3, {0, 0, 0, 1, 1}},
         {1, {0, 0, 0, 1, 0}}, {2, {0, 0, 0, 0, 4}}, {4, {0, 0, 0, 0, 3}}, {3, {0, 0, 0, 0, 2}},
         {2, {0, 0, 0, 0, 0}}}));
    return g;
}

inline PestoKeyPair keypair() {
    PestoParams p = params();
    return assemble_keypair(p, a1(p.field), a2(p.field), central_map(p.field), /*reduced_a1=*/false);
}

}  // namespace pesto::toy
