#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "pesto/errors.hpp"
#include "pesto/field.hpp"
#include "pesto/linalg.hpp"

namespace pesto {

// Exponent vector; all exponents < q (field-equation reduced form).
using Monomial = std::vector<std::uint16_t>;

inline std::uint32_t total_degree(const Monomial& e) {
    std::uint32_t d = 0;
    for (auto x : e) d += x;
    return d;
}

// Canonical term order: ascending total degree, then ascending lexicographic
// exponent vector.
struct CanonicalLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        const std::uint32_t da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

// x^q = x, repeatedly, until the exponent is < q.
inline std::uint16_t reduce_exponent(std::uint32_t e, std::uint64_t q) {
    if (e < q) return std::uint16_t(e);
    return std::uint16_t((e - 1) % (q - 1) + 1);
}

// Dense multivariate polynomial in reduced-coefficient-map form. Zero
// coefficients are never stored, so equal maps mean equal functions.
class Poly {
public:
    using CoeffMap = std::map<Monomial, std::uint32_t, CanonicalLess>;

    Poly() = default;
    Poly(FieldRef field, std::uint32_t nvars) : field_(std::move(field)), nvars_(nvars) {}

    static Poly constant(FieldRef field, std::uint32_t nvars, std::uint32_t c) {
        Poly p(std::move(field), nvars);
        p.add_term(Monomial(nvars, 0), c);
        return p;
    }

    static Poly variable(FieldRef field, std::uint32_t nvars, std::uint32_t idx) {
        Poly p(std::move(field), nvars);
        Monomial e(nvars, 0);
        e[idx] = 1;
        p.add_term(e, 1);
        return p;
    }

    const FieldSpec& field() const { return *field_; }
    FieldRef field_ref() const { return field_; }
    std::uint32_t nvars() const { return nvars_; }
    const CoeffMap& terms() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    std::uint32_t coeff(const Monomial& e) const {
        auto it = coeffs_.find(e);
        return it == coeffs_.end() ? 0 : it->second;
    }

    void set_coeff(const Monomial& e, std::uint32_t c) {
        if (e.size() != nvars_) throw DimensionMismatch("monomial arity");
        if (c == 0)
            coeffs_.erase(e);
        else
            coeffs_[e] = c;
    }

    void add_term(Monomial e, std::uint32_t c) {
        if (e.size() != nvars_) throw DimensionMismatch("monomial arity");
        if (c == 0) return;
        const std::uint64_t q = field_->order();
        for (auto& x : e) x = reduce_exponent(x, q);
        auto [it, inserted] = coeffs_.emplace(std::move(e), c);
        if (!inserted) {
            it->second = field_->add(it->second, c);
            if (it->second == 0) coeffs_.erase(it);
        }
    }

    // 0 for constants and the zero polynomial.
    std::uint32_t degree() const {
        std::uint32_t d = 0;
        for (const auto& [e, c] : coeffs_) d = std::max(d, total_degree(e));
        return d;
    }

    Poly operator+(const Poly& o) const {
        Poly r = *this;
        for (const auto& [e, c] : o.coeffs_) r.add_term(e, c);
        return r;
    }

    Poly operator-(const Poly& o) const {
        Poly r = *this;
        for (const auto& [e, c] : o.coeffs_) r.add_term(e, field_->neg(c));
        return r;
    }

    Poly scaled(std::uint32_t c) const {
        Poly r(field_, nvars_);
        if (c == 0) return r;
        for (const auto& [e, v] : coeffs_) r.coeffs_[e] = field_->mul(v, c);
        return r;
    }

    Poly operator*(const Poly& o) const {
        if (nvars_ != o.nvars_) throw DimensionMismatch("polynomial product arity");
        const FieldSpec& f = *field_;
        Poly r(field_, nvars_);
        for (const auto& [ea, ca] : coeffs_)
            for (const auto& [eb, cb] : o.coeffs_) {
                Monomial e(nvars_);
                for (std::uint32_t i = 0; i < nvars_; ++i)
                    e[i] = std::uint16_t(std::uint32_t(ea[i]) + eb[i]);
                r.add_term(std::move(e), f.mul(ca, cb));
            }
        return r;
    }

    std::uint32_t eval(const FVec& point) const {
        if (point.size() != nvars_) throw DimensionMismatch("evaluation point length");
        const FieldSpec& f = *field_;
        std::uint32_t acc = 0;
        for (const auto& [e, c] : coeffs_) {
            std::uint32_t v = c;
            for (std::uint32_t i = 0; i < nvars_ && v; ++i)
                if (e[i]) v = f.mul(v, f.pow(point[i], e[i]));
            acc = f.add(acc, v);
        }
        return acc;
    }

    // Substitute a constant for some variables, keep the rest symbolic.
    // assignment[i] < 0 means variable i stays.
    Poly eval_partial(const std::vector<std::int64_t>& assignment) const {
        if (assignment.size() != nvars_) throw DimensionMismatch("assignment length");
        const FieldSpec& f = *field_;
        Poly r(field_, nvars_);
        for (const auto& [e, c] : coeffs_) {
            std::uint32_t v = c;
            Monomial rest(nvars_, 0);
            for (std::uint32_t i = 0; i < nvars_; ++i) {
                if (assignment[i] >= 0)
                    v = f.mul(v, f.pow(std::uint32_t(assignment[i]), e[i]));
                else
                    rest[i] = e[i];
            }
            r.add_term(std::move(rest), v);
        }
        return r;
    }

    bool operator==(const Poly& o) const {
        return nvars_ == o.nvars_ && coeffs_ == o.coeffs_ && field_->same(*o.field_);
    }

private:
    FieldRef field_;
    std::uint32_t nvars_ = 0;
    CoeffMap coeffs_;
};

// Ordered system over a shared variable set.
struct PolySystem {
    FieldRef field;
    std::uint32_t nvars = 0;
    std::vector<Poly> polys;

    PolySystem() = default;
    PolySystem(FieldRef f, std::uint32_t n) : field(std::move(f)), nvars(n) {}

    std::size_t size() const { return polys.size(); }

    void push_back(Poly p) {
        if (p.nvars() != nvars) throw DimensionMismatch("system arity");
        polys.push_back(std::move(p));
    }

    FVec eval(const FVec& point) const {
        FVec out(polys.size());
        for (std::size_t i = 0; i < polys.size(); ++i) out[i] = polys[i].eval(point);
        return out;
    }

    std::uint32_t degree() const {
        std::uint32_t d = 0;
        for (const auto& p : polys) d = std::max(d, p.degree());
        return d;
    }
};

// lambda . F = sum lambda_i f_i
inline Poly component(const FVec& lambda, const PolySystem& sys) {
    if (lambda.size() != sys.size()) throw DimensionMismatch("component weight length");
    Poly r(sys.field, sys.nvars);
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (lambda[i]) r = r + sys.polys[i].scaled(lambda[i]);
    return r;
}

// Algebraic substitution: one replacement polynomial per variable of p;
// result lives in the replacement ambient. Powers of the replacements are
// cached per variable.
inline Poly substitute(const Poly& p, const PolySystem& subs) {
    if (subs.size() != p.nvars()) throw DimensionMismatch("one substitution per variable required");
    const FieldSpec& f = p.field();
    std::vector<std::vector<Poly>> powers(p.nvars());  // powers[i][j] = subs_i^j
    auto power = [&](std::uint32_t i, std::uint32_t e) -> const Poly& {
        auto& cache = powers[i];
        if (cache.empty()) {
            cache.push_back(Poly::constant(subs.field, subs.nvars, 1));
            cache.push_back(subs.polys[i]);
        }
        while (cache.size() <= e) cache.push_back(cache.back() * subs.polys[i]);
        return cache[e];
    };
    (void)f;
    Poly r(subs.field, subs.nvars);
    for (const auto& [e, c] : p.terms()) {
        Poly term = Poly::constant(subs.field, subs.nvars, c);
        for (std::uint32_t i = 0; i < p.nvars(); ++i)
            if (e[i]) term = term * power(i, e[i]);
        r = r + term;
    }
    return r;
}

inline std::uint32_t first_var(const Monomial& e) {
    for (std::uint32_t v = 0; v < e.size(); ++v)
        if (e[v]) return v;
    throw ParamRange("constant monomial has no variable");
}

// Canonical enumeration of monomials of total degree <= maxdeg (optionally
// capped per exponent), with index lookup and shared structure for dense
// evaluation and serialization.
class MonomialBasis {
public:
    MonomialBasis(std::uint32_t nvars, std::uint32_t maxdeg, std::uint32_t exp_cap = 0xFFFF)
        : nvars_(nvars), maxdeg_(maxdeg), exp_cap_(exp_cap) {
        offsets_.push_back(0);
        Monomial e(nvars, 0);
        for (std::uint32_t d = 0; d <= maxdeg; ++d) {
            enumerate(e, 0, d);
            offsets_.push_back(monomials_.size());
        }
        for (std::size_t i = 0; i < monomials_.size(); ++i) index_[monomials_[i]] = i;
        build_parents();
        build_times_var();
    }

    std::uint32_t nvars() const { return nvars_; }
    std::uint32_t maxdeg() const { return maxdeg_; }
    std::size_t size() const { return monomials_.size(); }
    const Monomial& monomial(std::size_t i) const { return monomials_[i]; }
    // Index of the first monomial with degree > d.
    std::size_t prefix(std::uint32_t d) const { return offsets_[std::min<std::size_t>(d + 1, offsets_.size() - 1)]; }

    std::size_t index_of(const Monomial& e) const {
        auto it = index_.find(e);
        if (it == index_.end()) throw ParamRange("monomial outside basis");
        return it->second;
    }

    // For dense evaluation: monomial i (degree >= 2) = monomial parent_[i] * var_[i].
    std::size_t parent(std::size_t i) const { return parent_[i]; }
    std::uint32_t parent_var(std::size_t i) const { return var_[i]; }

    // Index of monomial i times variable v. Requires degree(i) < maxdeg.
    // When the incremented exponent exceeds exp_cap (only possible with
    // exp_cap = q-1), the field equation folds it back to exponent 1.
    std::size_t times_var(std::size_t i, std::uint32_t v) const { return times_var_[i * nvars_ + v]; }

private:
    void enumerate(Monomial& e, std::uint32_t pos, std::uint32_t remaining) {
        if (pos == nvars_) {
            if (remaining == 0) monomials_.push_back(e);
            return;
        }
        const std::uint32_t top = std::min(remaining, exp_cap_);
        for (std::uint32_t v = 0; v <= top; ++v) {
            e[pos] = std::uint16_t(v);
            enumerate(e, pos + 1, remaining - v);
        }
        e[pos] = 0;
    }

    void build_parents() {
        parent_.assign(monomials_.size(), 0);
        var_.assign(monomials_.size(), 0);
        for (std::size_t i = 0; i < monomials_.size(); ++i) {
            const Monomial& e = monomials_[i];
            if (total_degree(e) < 2) continue;
            Monomial p = e;
            for (std::uint32_t v = 0; v < nvars_; ++v) {
                if (p[v]) {
                    p[v]--;
                    parent_[i] = index_.at(p);
                    var_[i] = v;
                    break;
                }
            }
        }
    }

    void build_times_var() {
        times_var_.assign(monomials_.size() * nvars_, SIZE_MAX);
        for (std::size_t i = 0; i < monomials_.size(); ++i) {
            if (total_degree(monomials_[i]) >= maxdeg_) continue;
            for (std::uint32_t v = 0; v < nvars_; ++v) {
                Monomial e = monomials_[i];
                if (std::uint32_t(e[v]) + 1 > exp_cap_)
                    e[v] = 1;
                else
                    e[v]++;
                times_var_[i * nvars_ + v] = index_.at(e);
            }
        }
    }

    std::uint32_t nvars_, maxdeg_, exp_cap_;
    std::vector<Monomial> monomials_;
    std::vector<std::size_t> offsets_;
    std::map<Monomial, std::size_t, CanonicalLess> index_;
    std::vector<std::size_t> parent_;
    std::vector<std::uint32_t> var_;
    std::vector<std::size_t> times_var_;
};

struct MultCounter {
    std::uint64_t mults = 0;
};

// Direct dense evaluation over the full degree-<=maxdeg monomial list.
// Exactly 2*|basis| - n - 2 multiplications per call: one per monomial of
// degree >= 2 to build its value, one per non-constant monomial for the
// coefficient product (zero coefficients included).
inline std::uint32_t dense_eval(const Poly& p, const FVec& point, const MonomialBasis& basis,
                                MultCounter* counter = nullptr) {
    if (point.size() != p.nvars() || basis.nvars() != p.nvars())
        throw DimensionMismatch("dense evaluation arity");
    const FieldSpec& f = p.field();
    std::vector<std::uint32_t> value(basis.size());
    value[0] = 1;
    std::uint64_t mults = 0;
    const std::size_t deg1_end = basis.prefix(1);
    for (std::size_t i = 1; i < deg1_end; ++i) value[i] = point[first_var(basis.monomial(i))];
    for (std::size_t i = deg1_end; i < basis.size(); ++i) {
        value[i] = f.mul(value[basis.parent(i)], point[basis.parent_var(i)]);
        ++mults;
    }
    std::uint32_t acc = p.coeff(basis.monomial(0));
    for (std::size_t i = 1; i < basis.size(); ++i) {
        acc = f.add(acc, f.mul(p.coeff(basis.monomial(i)), value[i]));
        ++mults;
    }
    if (counter) counter->mults += mults;
    return acc;
}

namespace detail {

// Dense composition of a degree<=4 system with an input-side affine map.
// Each source monomial is expanded as a product of affine forms over the
// canonical index space, degree prefix by degree prefix.
inline Poly compose_affine_dense(const Poly& p, const AffineBijection& b, const MonomialBasis& basis) {
    const FieldSpec& f = p.field();
    const std::uint32_t n = p.nvars();
    std::vector<std::uint32_t> out(basis.size(), 0);
    // times-var index table, built lazily per call on the shared basis
    std::vector<std::uint32_t> acc, next;
    for (const auto& [e, c] : p.terms()) {
        acc.assign(basis.size(), 0);
        acc[0] = c;
        std::uint32_t dcur = 0;
        for (std::uint32_t v = 0; v < n; ++v) {
            for (std::uint16_t rep = 0; rep < e[v]; ++rep) {
                next.assign(basis.prefix(dcur + 1), 0);
                const std::size_t lim = basis.prefix(dcur);
                for (std::size_t i = 0; i < lim; ++i) {
                    const std::uint32_t a = acc[i];
                    if (!a) continue;
                    // constant part of the affine image of variable v
                    const std::uint32_t c0 = b.translation()[v];
                    if (c0) next[i] = f.add(next[i], f.mul(a, c0));
                    for (std::uint32_t w = 0; w < n; ++w) {
                        const std::uint32_t lw = b.linear().at(v, w);
                        if (!lw) continue;
                        const std::size_t j = basis.times_var(i, w);
                        next[j] = f.add(next[j], f.mul(a, lw));
                    }
                }
                acc.swap(next);
                acc.resize(basis.size(), 0);
                ++dcur;
            }
        }
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (acc[i]) out[i] = f.add(out[i], acc[i]);
    }
    Poly r(p.field_ref(), n);
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (out[i]) r.set_coeff(basis.monomial(i), out[i]);
    return r;
}

}  // namespace detail

enum class ComposeSide { input, output };

// input side: sys o B; output side: B o sys. Degrees never increase.
inline PolySystem compose_affine(const PolySystem& sys, const AffineBijection& b, ComposeSide side) {
    const FieldSpec& f = *sys.field;
    if (side == ComposeSide::output) {
        if (b.dimension() != sys.size()) throw DimensionMismatch("output composition dimension");
        PolySystem out(sys.field, sys.nvars);
        for (std::size_t i = 0; i < sys.size(); ++i) {
            Poly r(sys.field, sys.nvars);
            for (std::size_t j = 0; j < sys.size(); ++j) {
                const std::uint32_t l = b.linear().at(i, j);
                if (l) r = r + sys.polys[j].scaled(l);
            }
            r.add_term(Monomial(sys.nvars, 0), b.translation()[i]);
            out.push_back(std::move(r));
        }
        return out;
    }
    if (b.dimension() != sys.nvars) throw DimensionMismatch("input composition dimension");
    PolySystem out(sys.field, sys.nvars);
    const std::uint32_t d = sys.degree();
    if (d <= 4 && f.order() > d) {
        MonomialBasis basis(sys.nvars, d);
        for (const auto& p : sys.polys) out.push_back(detail::compose_affine_dense(p, b, basis));
        return out;
    }
    // generic path: substitution by the affine images
    PolySystem subs(sys.field, sys.nvars);
    for (std::uint32_t v = 0; v < sys.nvars; ++v) {
        Poly img(sys.field, sys.nvars);
        for (std::uint32_t w = 0; w < sys.nvars; ++w) {
            Monomial e(sys.nvars, 0);
            e[w] = 1;
            img.add_term(std::move(e), b.linear().at(v, w));
        }
        img.add_term(Monomial(sys.nvars, 0), b.translation()[v]);
        subs.push_back(std::move(img));
    }
    for (const auto& p : sys.polys) out.push_back(substitute(p, subs));
    return out;
}

}  // namespace pesto
