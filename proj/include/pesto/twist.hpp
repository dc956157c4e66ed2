#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pesto/errors.hpp"
#include "pesto/mpoly.hpp"

namespace pesto {

// F(x,y) = (T(x,y), U(x,y)) with T(x,y) = x + q(y): the t quadratics of
// qmap live in the n-t y-variables, U is an OV system in all n variables
// with vinegar {x_1..x_t, y_1..y_s} and oil {y_{s+1}..y_{n-t}}.
struct CentralMap {
    FieldRef field;
    std::uint32_t n = 0, m = 0, t = 0, s = 0;
    PolySystem qmap;  // t polys in n-t variables
    PolySystem U;     // m-t polys in n variables

    void validate() const {
        if (t > n || t > m) throw ParamRange("t must be <= min(n, m)");
        if (s > n - t) throw ParamRange("s must be <= n - t");
        if (qmap.size() != t || qmap.nvars != n - t) throw DimensionMismatch("qmap shape");
        if (U.size() != m - t || U.nvars != n) throw DimensionMismatch("U shape");
        if (qmap.degree() > 2) throw ParamRange("qmap must be quadratic");
        if (U.degree() > 2) throw ParamRange("U must be quadratic");
        // no monomial with two oil variables (oil = ambient indices t+s..n-1)
        for (const auto& p : U.polys)
            for (const auto& [e, c] : p.terms()) {
                std::uint32_t oil = 0;
                for (std::uint32_t i = t + s; i < n; ++i) oil += e[i];
                if (oil > 1) throw ParamRange("U contains an oil-by-oil term");
            }
    }
};

// Twisted system G(x,y) = (x - q(y), U(x - q(y), y)): m coordinates in the
// n ambient variables, degree at most 4.
inline PolySystem build_twisted(const CentralMap& cm) {
    cm.validate();
    const FieldSpec& f = *cm.field;
    const std::uint32_t n = cm.n, t = cm.t;
    // lift q_i into the ambient n variables (y_j at index t+j)
    auto lift_q = [&](const Poly& q) {
        Poly r(cm.field, n);
        for (const auto& [e, c] : q.terms()) {
            Monomial le(n, 0);
            for (std::uint32_t j = 0; j < n - t; ++j) le[t + j] = e[j];
            r.add_term(std::move(le), c);
        }
        return r;
    };
    PolySystem g(cm.field, n);
    PolySystem subs(cm.field, n);  // x_i -> x_i - q_i(y), y_j -> y_j
    for (std::uint32_t i = 0; i < t; ++i) {
        Poly coord = Poly::variable(cm.field, n, i) - lift_q(cm.qmap.polys[i]);
        subs.push_back(coord);
        g.push_back(std::move(coord));
    }
    for (std::uint32_t j = t; j < n; ++j) subs.push_back(Poly::variable(cm.field, n, j));
    for (const auto& u : cm.U.polys) g.push_back(substitute(u, subs));
    (void)f;
    return g;
}

// Block permutation swapping the first t input coordinates with the first
// t output coordinates of a graph point.
struct TwistMatrix {
    std::uint32_t t = 0, n = 0, m = 0;
    std::vector<std::uint32_t> perm;  // row i has its single 1 at column perm[i]

    std::size_t dimension() const { return n + m; }

    bool is_involution() const {
        for (std::uint32_t i = 0; i < perm.size(); ++i)
            if (perm[perm[i]] != i) return false;
        return true;
    }

    Matrix materialize(FieldRef field) const {
        Matrix mt(std::move(field), dimension(), dimension());
        for (std::uint32_t i = 0; i < perm.size(); ++i) mt.at(i, perm[i]) = 1;
        return mt;
    }

    FVec apply(const FVec& v) const {
        if (v.size() != dimension()) throw DimensionMismatch("twist point length");
        FVec r(v.size());
        for (std::uint32_t i = 0; i < perm.size(); ++i) r[i] = v[perm[i]];
        return r;
    }
};

inline TwistMatrix mt_matrix(std::uint32_t t, std::uint32_t n, std::uint32_t m) {
    if (t > n || t > m) throw ParamRange("t must be <= min(n, m)");
    TwistMatrix mt{t, n, m, {}};
    mt.perm.resize(n + m);
    for (std::uint32_t i = 0; i < n + m; ++i) mt.perm[i] = i;
    for (std::uint32_t i = 0; i < t; ++i) std::swap(mt.perm[i], mt.perm[n + i]);
    return mt;
}

constexpr std::uint64_t kGraphBudget = 1ull << 20;

// Odometer over GF(q)^n in ascending canonical order.
inline bool next_point(FVec& v, std::uint64_t q) {
    for (std::size_t i = v.size(); i-- > 0;) {
        if (++v[i] < q) return true;
        v[i] = 0;
    }
    return false;
}

inline std::vector<std::pair<FVec, FVec>> graph_of(const PolySystem& sys, const FieldSpec& spec) {
    const std::uint64_t q = spec.order();
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < sys.nvars; ++i) {
        count *= q;
        if (count > kGraphBudget) throw BudgetExceeded("graph enumeration needs q^n <= 2^20");
    }
    std::vector<std::pair<FVec, FVec>> g;
    g.reserve(count);
    FVec v(sys.nvars, 0);
    do {
        g.emplace_back(v, sys.eval(v));
    } while (next_point(v, q));
    return g;
}

struct CczCheckResult {
    bool equivalent = false;
    std::string diagnostic;
};

// Applies M_t to every graph point of F and compares the image set with the
// graph of G. Reports when the image is not a graph at all (duplicate first
// coordinates, i.e. T_y not bijective).
inline CczCheckResult ccz_check_via_twist(const PolySystem& F, const PolySystem& G, std::uint32_t t) {
    if (F.nvars != G.nvars || F.size() != G.size())
        throw DimensionMismatch("F and G must share input and output dimensions");
    const FieldSpec& spec = *F.field;
    const TwistMatrix mt = mt_matrix(t, F.nvars, std::uint32_t(F.size()));
    std::map<FVec, FVec> image;
    for (const auto& [v, w] : graph_of(F, spec)) {
        FVec point = v;
        point.insert(point.end(), w.begin(), w.end());
        FVec twisted = mt.apply(point);
        FVec in(twisted.begin(), twisted.begin() + F.nvars);
        FVec out(twisted.begin() + F.nvars, twisted.end());
        auto [it, inserted] = image.emplace(std::move(in), std::move(out));
        if (!inserted)
            return {false, "M_t image is not a graph: duplicate input point (T_y not bijective)"};
    }
    for (const auto& [v, w] : graph_of(G, spec)) {
        auto it = image.find(v);
        if (it == image.end() || it->second != w)
            return {false, "M_t image differs from the graph of G"};
    }
    return {true, ""};
}

}  // namespace pesto
