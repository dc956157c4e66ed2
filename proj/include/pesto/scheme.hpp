#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pesto/errors.hpp"
#include "pesto/mpoly.hpp"
#include "pesto/rng.hpp"
#include "pesto/twist.hpp"

namespace pesto {

inline std::uint64_t binom(std::uint64_t a, std::uint64_t b) {
    if (b > a) return 0;
    if (b > a - b) b = a - b;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

struct PestoParams {
    FieldRef field;
    std::uint32_t n = 0, m = 0, t = 0, s = 0;

    PestoParams() = default;
    PestoParams(FieldRef f, std::uint32_t n_, std::uint32_t m_, std::uint32_t t_, std::uint32_t s_,
                bool allow_zero_s = false)
        : field(std::move(f)), n(n_), m(m_), t(t_), s(s_) {
        validate(allow_zero_s);
    }

    void validate(bool allow_zero_s = false) const {
        if (!field) throw ParamRange("missing field");
        if (field->order() < 5) throw ParamRange("field order must be >= 5");
        if (n < 1 || m < 1) throw ParamRange("n and m must be positive");
        if (t < 1 || t > n || t > m) throw ParamRange("require 1 <= t <= min(n, m)");
        if (!allow_zero_s && s < 1) throw ParamRange("require s >= 1");
        if (s > n - t) throw ParamRange("require s <= n - t");
    }

    // Non-fatal guidance checks.
    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        const double target = double(n) / 3.0;
        if (std::abs(double(t) - target) > 0.2 * target)
            w.push_back("t deviates from n/3 by more than 20% (keep x - q(y) unbalanced)");
        if (n >= m && s != n - m)
            w.push_back("s != n - m: the oil system is not square");
        return w;
    }

    std::uint32_t oil_count() const { return n - t - s; }
    std::uint32_t vinegar_count() const { return t + s; }
};

// In test-only contexts (s = 0 linearization studies) the s >= 1 guard is
// bypassed through this hook.
namespace detail {
inline PestoParams make_params_unchecked(FieldRef f, std::uint32_t n, std::uint32_t m, std::uint32_t t,
                                         std::uint32_t s) {
    return PestoParams(std::move(f), n, m, t, s, /*allow_zero_s=*/true);
}
}  // namespace detail

struct PestoSecretKey {
    PestoParams params;
    AffineBijection a1, a2;
    CentralMap central;
    bool reduced_a1 = false;
    // Measured dimension of the quadratic-component space of U(x-q(y),y);
    // expected 0, reported but never enforced.
    std::uint32_t uq_quadratic_dim = 0;
};

struct PestoPublicKey {
    PestoParams params;
    PolySystem g_pub;
    bool reduced_a1 = false;

    const MonomialBasis& quartic_basis() const {
        if (!basis_) basis_ = std::make_shared<MonomialBasis>(params.n, 4);
        return *basis_;
    }

private:
    mutable std::shared_ptr<MonomialBasis> basis_;
};

struct PestoKeyPair {
    PestoSecretKey sk;
    PestoPublicKey pk;
};

namespace detail {

// Dimension of { mu : deg(mu . sys) <= 2 } for a list of polynomials.
inline std::uint32_t quadratic_combo_dim(const std::vector<Poly>& polys, const FieldRef& field) {
    std::set<Monomial, CanonicalLess> high;
    for (const auto& p : polys)
        for (const auto& [e, c] : p.terms())
            if (total_degree(e) >= 3) high.insert(e);
    if (high.empty()) return std::uint32_t(polys.size());
    Matrix m(field, polys.size(), high.size());
    std::size_t col = 0;
    for (const auto& e : high) {
        for (std::size_t i = 0; i < polys.size(); ++i) m.at(i, col) = polys[i].coeff(e);
        ++col;
    }
    return std::uint32_t(polys.size() - rank(std::move(m)));
}

}  // namespace detail

// Test hook and keygen back end: compose an explicitly given central map
// and transformations into a key pair.
inline PestoKeyPair assemble_keypair(const PestoParams& params, AffineBijection a1, AffineBijection a2,
                                     CentralMap central, bool reduced_a1) {
    if (a1.dimension() != params.m || a2.dimension() != params.n)
        throw DimensionMismatch("affine bijection dimensions");
    PolySystem g = build_twisted(central);
    std::vector<Poly> upart(g.polys.begin() + params.t, g.polys.end());
    const std::uint32_t uq_dim = detail::quadratic_combo_dim(upart, params.field);
    PolySystem g_pub = compose_affine(compose_affine(g, a2, ComposeSide::input), a1, ComposeSide::output);
    PestoKeyPair kp;
    kp.sk = PestoSecretKey{params, std::move(a1), std::move(a2), std::move(central), reduced_a1, uq_dim};
    kp.pk.params = params;
    kp.pk.g_pub = std::move(g_pub);
    kp.pk.reduced_a1 = reduced_a1;
    return kp;
}

inline CentralMap random_central_map(const PestoParams& params, Rng& rng) {
    const FieldSpec& f = *params.field;
    const std::uint32_t n = params.n, m = params.m, t = params.t, s = params.s;
    CentralMap cm;
    cm.field = params.field;
    cm.n = n;
    cm.m = m;
    cm.t = t;
    cm.s = s;
    cm.qmap = PolySystem(params.field, n - t);
    MonomialBasis quad(n - t, 2);
    for (std::uint32_t i = 0; i < t; ++i) {
        Poly p(params.field, n - t);
        for (std::size_t j = 0; j < quad.size(); ++j)
            p.set_coeff(quad.monomial(j), std::uint32_t(rng.below(f.order())));
        cm.qmap.push_back(std::move(p));
    }
    // OV shape: vinegar = {0..t+s-1}, oil = {t+s..n-1}; no oil-by-oil terms.
    cm.U = PolySystem(params.field, n);
    const std::uint32_t v = t + s;
    for (std::uint32_t i = 0; i < m - t; ++i) {
        Poly p(params.field, n);
        Monomial e(n, 0);
        auto draw = [&] { return std::uint32_t(rng.below(f.order())); };
        for (std::uint32_t j = 0; j < v; ++j)
            for (std::uint32_t k = j; k < v; ++k) {
                e[j]++;
                e[k]++;
                p.set_coeff(e, draw());
                e[j]--;
                e[k]--;
            }
        for (std::uint32_t j = 0; j < v; ++j)
            for (std::uint32_t k = v; k < n; ++k) {
                e[j]++;
                e[k]++;
                p.set_coeff(e, draw());
                e[j]--;
                e[k]--;
            }
        for (std::uint32_t j = 0; j < n; ++j) {
            e[j]++;
            p.set_coeff(e, draw());
            e[j]--;
        }
        p.set_coeff(e, draw());
        cm.U.push_back(std::move(p));
    }
    return cm;
}

inline PestoKeyPair keygen(const PestoParams& params, Rng& rng, bool reduced_a1 = true) {
    params.validate(params.s == 0);
    CentralMap cm = random_central_map(params, rng);
    AffineBijection a1 = reduced_a1 && params.t < params.m
                             ? block_affine_bijection(params.m, params.t, params.field, rng)
                             : random_affine_bijection(params.m, params.field, rng);
    AffineBijection a2 = random_affine_bijection(params.n, params.field, rng);
    return assemble_keypair(params, std::move(a1), std::move(a2), std::move(cm), reduced_a1);
}

namespace detail {

// Linear system in the oil variables obtained from U after substituting
// x and the vinegar y's. Returns (matrix, rhs-shift) with rhs_i = -const_i.
inline std::pair<Matrix, FVec> oil_system(const PestoSecretKey& sk, const FVec& x_vals,
                                          const FVec& vinegar_vals) {
    const PestoParams& pp = sk.params;
    const FieldSpec& f = *pp.field;
    const std::uint32_t oil = pp.oil_count();
    std::vector<std::int64_t> assign(pp.n, -1);
    for (std::uint32_t i = 0; i < pp.t; ++i) assign[i] = x_vals[i];
    for (std::uint32_t i = 0; i < pp.s; ++i) assign[pp.t + i] = vinegar_vals[i];
    Matrix mat(pp.field, pp.m - pp.t, oil);
    FVec shift(pp.m - pp.t, 0);
    Monomial unit(pp.n, 0);
    for (std::uint32_t i = 0; i < pp.m - pp.t; ++i) {
        Poly lin = sk.central.U.polys[i].eval_partial(assign);
        if (lin.degree() > 1) throw Error("oil system is not linear; central map violates OV shape");
        for (std::uint32_t j = 0; j < oil; ++j) {
            unit[pp.t + pp.s + j] = 1;
            mat.at(i, j) = lin.coeff(unit);
            unit[pp.t + pp.s + j] = 0;
        }
        shift[i] = f.neg(lin.coeff(unit));
    }
    return {std::move(mat), std::move(shift)};
}

inline FVec concat(const FVec& a, const FVec& b) {
    FVec r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

}  // namespace detail

constexpr int kVinegarRetryCap = 256;

// Signing; the optional out-parameter reports how many vinegar draws were
// consumed (1 = first attempt succeeded).
inline FVec sign(const PestoSecretKey& sk, const FVec& w, Rng& rng, int* retries_out = nullptr) {
    const PestoParams& pp = sk.params;
    if (w.size() != pp.m) throw DimensionMismatch("digest length");
    const FieldSpec& f = *pp.field;
    FVec wprime = sk.a1.backward(w);
    FVec w_t(wprime.begin(), wprime.begin() + pp.t);
    FVec w_u(wprime.begin() + pp.t, wprime.end());
    for (int attempt = 1; attempt <= kVinegarRetryCap; ++attempt) {
        FVec vinegar = random_vector(pp.s, f, rng);
        auto [mat, shift] = detail::oil_system(sk, w_t, vinegar);
        FVec rhs(pp.m - pp.t);
        for (std::uint32_t i = 0; i < rhs.size(); ++i) rhs[i] = f.add(w_u[i], shift[i]);
        auto sol = solve_linear(mat, rhs);
        if (!sol) continue;
        // uniform over the affine solution set
        FVec oil = sol->particular;
        for (const auto& bvec : sol->basis) {
            const std::uint32_t c = std::uint32_t(rng.below(f.order()));
            if (!c) continue;
            for (std::size_t j = 0; j < oil.size(); ++j) oil[j] = f.add(oil[j], f.mul(c, bvec[j]));
        }
        FVec y = detail::concat(vinegar, oil);
        FVec qy = sk.central.qmap.eval(y);
        FVec x(pp.t);
        for (std::uint32_t i = 0; i < pp.t; ++i) x[i] = f.add(w_t[i], qy[i]);
        if (retries_out) *retries_out = attempt;
        return sk.a2.backward(detail::concat(x, y));
    }
    throw SigningFailed();
}

inline bool verify(const PestoPublicKey& pk, const FVec& w, const FVec& sig,
                   MultCounter* counter = nullptr) {
    const PestoParams& pp = pk.params;
    if (w.size() != pp.m || sig.size() != pp.n) throw DimensionMismatch("verify input lengths");
    const MonomialBasis& basis = pk.quartic_basis();
    bool ok = true;
    for (std::uint32_t i = 0; i < pp.m; ++i) {
        // every coordinate goes through the full dense quartic path so the
        // multiplication count matches the m*(2*C(n+4,4)-n-2) accounting
        if (dense_eval(pk.g_pub.polys[i], sig, basis, counter) != w[i]) ok = false;
    }
    return ok;
}

inline FVec encrypt(const PestoPublicKey& pk, const FVec& z) {
    if (z.size() != pk.params.n) throw DimensionMismatch("plaintext length");
    return pk.g_pub.eval(z);
}

// All preimages of c, via q^s vinegar enumeration plus oil solving; every
// returned value re-encrypts to c.
inline std::vector<FVec> decrypt(const PestoSecretKey& sk, const FVec& c) {
    const PestoParams& pp = sk.params;
    if (c.size() != pp.m) throw DimensionMismatch("ciphertext length");
    const FieldSpec& f = *pp.field;
    const std::uint64_t q = f.order();
    std::uint64_t combos = 1;
    for (std::uint32_t i = 0; i < pp.s; ++i) {
        combos *= q;
        if (combos > kGraphBudget) throw BudgetExceeded("decrypt needs q^s <= 2^20");
    }
    FVec cprime = sk.a1.backward(c);
    FVec c_t(cprime.begin(), cprime.begin() + pp.t);
    FVec c_u(cprime.begin() + pp.t, cprime.end());
    std::vector<FVec> out;
    FVec vinegar(pp.s, 0);
    do {
        auto [mat, shift] = detail::oil_system(sk, c_t, vinegar);
        FVec rhs(pp.m - pp.t);
        for (std::uint32_t i = 0; i < rhs.size(); ++i) rhs[i] = f.add(c_u[i], shift[i]);
        auto sol = solve_linear(mat, rhs);
        if (!sol) continue;
        std::uint64_t cells = 1;
        for (std::size_t i = 0; i < sol->basis.size(); ++i) {
            cells *= q;
            if (cells > kGraphBudget || out.size() + cells > kGraphBudget)
                throw BudgetExceeded("decrypt solution set exceeds enumeration budget");
        }
        FVec coeffs(sol->basis.size(), 0);
        do {
            FVec oil = sol->particular;
            for (std::size_t b = 0; b < coeffs.size(); ++b) {
                if (!coeffs[b]) continue;
                for (std::size_t j = 0; j < oil.size(); ++j)
                    oil[j] = f.add(oil[j], f.mul(coeffs[b], sol->basis[b][j]));
            }
            FVec y = detail::concat(vinegar, oil);
            FVec qy = sk.central.qmap.eval(y);
            FVec x(pp.t);
            for (std::uint32_t i = 0; i < pp.t; ++i) x[i] = f.add(c_t[i], qy[i]);
            out.push_back(sk.a2.backward(detail::concat(x, y)));
        } while (next_point(coeffs, q));
    } while (next_point(vinegar, q));
    std::set<FVec> seen;
    std::vector<FVec> unique;
    for (auto& z : out)
        if (seen.insert(z).second) unique.push_back(std::move(z));
    return unique;
}

// Serialized coefficient counts: (public, secret).
inline std::pair<std::uint64_t, std::uint64_t> key_counts(const PestoParams& p, bool reduced) {
    const std::uint64_t n = p.n, m = p.m, t = p.t, s = p.s;
    std::uint64_t pk = reduced ? (m - t) * binom(n + 4, 4) + t * binom(n + 2, 2)
                               : m * binom(n + 4, 4);
    std::uint64_t sk = m * m + m + n * n + n + t * binom(n - t + 2, 2) +
                       (m - t) * binom(t + s + 2, 2) + (m - t) * (n - t - s) * (t + s + 1);
    if (reduced) sk -= t * (m - t);
    return {pk, sk};
}

// Field multiplication counts: (verify, sign). Linear-system cost uses
// the upper-bound convention M(r,k) = r*k*min(r,k).
inline std::pair<std::uint64_t, std::uint64_t> mult_cost(const PestoParams& p) {
    const std::uint64_t n = p.n, m = p.m, t = p.t, s = p.s;
    const std::uint64_t verify = m * (2 * binom(n + 4, 4) - n - 2);
    const std::uint64_t r = m - t, k = n - t - s;
    const std::uint64_t solve = r * k * std::min(r, k);
    const std::uint64_t sig =
        m * m + t * (n - t) * (n - t + 2) + n * n + (m - t) * (t * (t + 2) + s * (s + 2)) + solve;
    return {verify, sig};
}

}  // namespace pesto
