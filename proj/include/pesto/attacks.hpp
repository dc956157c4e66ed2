#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pesto/errors.hpp"
#include "pesto/scheme.hpp"

namespace pesto {

// Basis of output weights lambda whose components of a quartic system have
// degree <= 2.
struct ComponentSpace {
    FieldRef field;
    std::vector<FVec> basis;  // vectors in GF(q)^m

    std::size_t dimension() const { return basis.size(); }
};

// Basis of directions a with D_a f := f(x + a) - f(x) constant.
struct LinearStructureSpace {
    FieldRef field;
    std::vector<FVec> basis;  // vectors in GF(q)^n

    std::size_t dimension() const { return basis.size(); }

    // Full span enumeration; budget-guarded.
    std::vector<FVec> span() const {
        const std::uint64_t q = field->order();
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < basis.size(); ++i) {
            count *= q;
            if (count > kGraphBudget) throw BudgetExceeded("span enumeration");
        }
        std::vector<FVec> out;
        if (basis.empty()) return out;
        const std::size_t n = basis[0].size();
        FVec coeffs(basis.size(), 0);
        do {
            FVec v(n, 0);
            for (std::size_t b = 0; b < basis.size(); ++b) {
                if (!coeffs[b]) continue;
                for (std::size_t j = 0; j < n; ++j)
                    v[j] = field->add(v[j], field->mul(coeffs[b], basis[b][j]));
            }
            out.push_back(std::move(v));
        } while (next_point(coeffs, q));
        return out;
    }

    bool contains(const FVec& v) const {
        std::vector<FVec> rows = basis;
        rows.push_back(v);
        Matrix with = Matrix::from_rows(field, rows);
        Matrix without = basis.empty() ? Matrix(field, 1, v.size()) : Matrix::from_rows(field, basis);
        return rank(std::move(with)) == rank(std::move(without));
    }
};

struct AttackReport {
    std::string attack;
    bool success = false;
    double wall_ms = 0.0;
    std::map<std::string, std::uint64_t> stats;
    std::vector<std::string> notes;
    std::vector<FVec> candidates;

    std::string to_text() const {
        std::ostringstream os;
        os << "attack: " << attack << "\n";
        os << "success: " << (success ? "yes" : "no") << "\n";
        os << "wall_ms: " << wall_ms << "\n";
        for (const auto& [k, v] : stats) os << k << ": " << v << "\n";
        for (const auto& n : notes) os << "note: " << n << "\n";
        os << "candidates: " << candidates.size() << "\n";
        return os.str();
    }
};

namespace detail {

class StopWatch {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

// Row-reduce a vector list to a basis of its span.
inline std::vector<FVec> span_basis(const FieldRef& f, std::vector<FVec> rows) {
    if (rows.empty()) return rows;
    Matrix m = Matrix::from_rows(f, rows);
    rref(m);
    std::vector<FVec> out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        FVec r(m.cols());
        bool nonzero = false;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            r[j] = m.at(i, j);
            nonzero = nonzero || r[j];
        }
        if (nonzero) out.push_back(std::move(r));
    }
    return out;
}

}  // namespace detail

// Left-nullspace of the m x |Delta| matrix of degree-3/4 coefficients,
// Delta = monomials of total degree 3..4 in n variables.
inline ComponentSpace isolate_quadratic(const PolySystem& sys) {
    const FieldRef f = sys.field;
    MonomialBasis basis(sys.nvars, 4);
    const std::size_t lo = basis.prefix(2), hi = basis.size();
    Matrix m(f, hi - lo, sys.size());  // transposed: columns indexed by polynomials
    for (std::size_t i = 0; i < sys.size(); ++i)
        for (std::size_t j = lo; j < hi; ++j) m.at(j - lo, i) = sys.polys[i].coeff(basis.monomial(j));
    return ComponentSpace{f, nullspace(std::move(m))};
}

inline ComponentSpace isolate_quadratic(const PestoPublicKey& pk) { return isolate_quadratic(pk.g_pub); }

enum class StructureMethod { linear_algebra, brute_force };

namespace detail {

// Symmetrized quadratic coefficient matrix Q + Q^T of f (diagonal 2*Q_ii).
inline Matrix structure_constraints(const Poly& f) {
    const std::uint32_t n = f.nvars();
    Matrix q(f.field_ref(), n, n);
    for (const auto& [e, c] : f.terms()) {
        if (total_degree(e) != 2) continue;
        std::uint32_t i = n, j = n;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (e[v] == 2) i = j = v;
            if (e[v] == 1) (i == n ? i : j) = v;
        }
        q.at(i, j) = f.field().add(q.at(i, j), c);
        q.at(j, i) = f.field().add(q.at(j, i), c);
    }
    return q;
}

inline std::uint64_t pow_checked(std::uint64_t q, std::uint32_t n, std::uint64_t cap,
                                 const char* what) {
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        r *= q;
        if (r > cap) throw BudgetExceeded(what);
    }
    return r;
}

// Value table of sys over all q^n points in odometer (ascending canonical)
// index order.
inline std::vector<FVec> value_table(const PolySystem& sys) {
    const std::uint64_t q = sys.field->order();
    const std::uint64_t count = pow_checked(q, sys.nvars, 1u << 16, "value table needs q^n <= 2^16");
    std::vector<FVec> vals;
    vals.reserve(count);
    FVec v(sys.nvars, 0);
    do {
        vals.push_back(sys.eval(v));
    } while (next_point(v, q));
    return vals;
}

// index(x + a) table for one shift a over the odometer index space.
inline std::vector<std::uint32_t> shift_index_table(const FieldSpec& f, const FVec& a) {
    const std::uint64_t q = f.order();
    const std::uint32_t n = std::uint32_t(a.size());
    const std::uint64_t count = pow_checked(q, n, 1u << 16, "shift table needs q^n <= 2^16");
    std::vector<std::uint32_t> idx(count);
    FVec x(n, 0);
    std::uint64_t i = 0;
    do {
        std::uint64_t j = 0;
        for (std::uint32_t d = 0; d < n; ++d) j = j * q + f.add(x[d], a[d]);
        idx[i++] = std::uint32_t(j);
    } while (next_point(x, q));
    return idx;
}

// Count of structures of a scalar value table by exhaustive shift testing.
inline std::uint64_t count_structures_brute(const FieldSpec& f, std::uint32_t n,
                                            const std::vector<std::uint32_t>& vals) {
    const std::uint64_t q = f.order();
    std::uint64_t count = 0;
    FVec a(n, 0);
    do {
        const auto idx = shift_index_table(f, a);
        const std::uint32_t ref = f.sub(vals[idx[0]], vals[0]);
        bool constant = true;
        for (std::size_t x = 1; x < vals.size(); ++x)
            if (f.sub(vals[idx[x]], vals[x]) != ref) {
                constant = false;
                break;
            }
        if (constant) ++count;
    } while (next_point(a, q));
    return count;
}

}  // namespace detail

inline LinearStructureSpace linear_structures(const Poly& f, StructureMethod method) {
    const FieldRef fr = f.field_ref();
    if (method == StructureMethod::linear_algebra) {
        if (f.degree() > 2) throw DegreeTooHigh("linear-algebra structure search needs degree <= 2");
        return LinearStructureSpace{fr, nullspace(detail::structure_constraints(f))};
    }
    // brute force over all q^n shifts
    const std::uint64_t q = fr->order();
    const std::uint32_t n = f.nvars();
    detail::pow_checked(q, n, 1u << 16, "brute-force structure search needs q^n <= 2^16");
    std::vector<std::uint32_t> vals;
    {
        FVec v(n, 0);
        do {
            vals.push_back(f.eval(v));
        } while (next_point(v, q));
    }
    std::vector<FVec> found;
    FVec a(n, 0);
    do {
        const auto idx = detail::shift_index_table(*fr, a);
        const std::uint32_t ref = fr->sub(vals[idx[0]], vals[0]);
        bool constant = true;
        for (std::size_t x = 1; x < vals.size(); ++x)
            if (fr->sub(vals[idx[x]], vals[x]) != ref) {
                constant = false;
                break;
            }
        if (constant) found.push_back(a);
    } while (next_point(a, q));
    return LinearStructureSpace{fr, detail::span_basis(fr, std::move(found))};
}

// Intersection of the structure spaces of several degree-<=2 components:
// nullspace of the stacked constraint matrices.
inline LinearStructureSpace common_linear_structures(const std::vector<Poly>& components) {
    if (components.empty()) throw ParamRange("no components given");
    const FieldRef f = components[0].field_ref();
    const std::uint32_t n = components[0].nvars();
    Matrix stacked(f, components.size() * n, n);
    for (std::size_t k = 0; k < components.size(); ++k) {
        if (components[k].degree() > 2) throw DegreeTooHigh("structure intersection needs degree <= 2");
        Matrix q = detail::structure_constraints(components[k]);
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = 0; j < n; ++j) stacked.at(k * n + i, j) = q.at(i, j);
    }
    return LinearStructureSpace{f, nullspace(std::move(stacked))};
}

// For every nonzero output weight lambda, the number of linear structures of
// lambda . sys, as a multiset. Invariant under affine bijections on both
// sides, so it matches between a system and its public composition.
inline std::multiset<std::uint64_t> structure_count_multiset(const PolySystem& sys) {
    const FieldRef f = sys.field;
    const std::uint64_t q = f->order();
    detail::pow_checked(q, std::uint32_t(sys.size()), 1u << 16, "multiset needs q^m <= 2^16");
    const auto vals = detail::value_table(sys);
    std::multiset<std::uint64_t> out;
    FVec lambda(sys.size(), 0);
    while (next_point(lambda, q)) {
        std::vector<std::uint32_t> sval(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::uint32_t acc = 0;
            for (std::size_t j = 0; j < lambda.size(); ++j)
                acc = f->add(acc, f->mul(lambda[j], vals[i][j]));
            sval[i] = acc;
        }
        out.insert(detail::count_structures_brute(*f, sys.nvars, sval));
    }
    return out;
}

// Patarin-style two-phase attack. Phase 1 learns all relations
// B(i, o) = 0 with terms {i_j*o_k, o_j*o_k, i_j, o_j, 1} from sampled
// input/output pairs; phase 2 substitutes the target output, solves the
// linear system in the input, and verifies candidates by evaluation.
inline AttackReport linearization_attack(const PolySystem& g_pub, const FVec& target, Rng& rng,
                                         std::size_t sample_budget = 0) {
    detail::StopWatch watch;
    const FieldRef f = g_pub.field;
    const std::uint32_t n = g_pub.nvars, m = std::uint32_t(g_pub.size());
    if (target.size() != m) throw DimensionMismatch("target length");
    const std::size_t terms = std::size_t(n) * m + std::size_t(m) * (m + 1) / 2 + n + m + 1;
    if (sample_budget == 0) sample_budget = 3 * terms;
    if (sample_budget <= terms) throw InsufficientSamples("sample budget below relation-term count");

    auto term_row = [&](const FVec& z, const FVec& w) {
        FVec row;
        row.reserve(terms);
        for (std::uint32_t j = 0; j < n; ++j)
            for (std::uint32_t k = 0; k < m; ++k) row.push_back(f->mul(z[j], w[k]));
        for (std::uint32_t j = 0; j < m; ++j)
            for (std::uint32_t k = j; k < m; ++k) row.push_back(f->mul(w[j], w[k]));
        for (std::uint32_t j = 0; j < n; ++j) row.push_back(z[j]);
        for (std::uint32_t k = 0; k < m; ++k) row.push_back(w[k]);
        row.push_back(1);
        return row;
    };

    Matrix samples(f, sample_budget, terms);
    const std::size_t half = sample_budget / 2;
    std::vector<FVec> relations_half;
    for (std::size_t i = 0; i < sample_budget; ++i) {
        FVec z = random_vector(n, *f, rng);
        FVec row = term_row(z, g_pub.eval(z));
        for (std::size_t j = 0; j < terms; ++j) samples.at(i, j) = row[j];
        if (i + 1 == half) {
            Matrix head(f, half, terms);
            for (std::size_t r = 0; r < half; ++r)
                for (std::size_t c = 0; c < terms; ++c) head.at(r, c) = samples.at(r, c);
            relations_half = nullspace(std::move(head));
        }
    }
    std::vector<FVec> relations = nullspace(std::move(samples));
    if (relations.size() != relations_half.size())
        throw InsufficientSamples("relation space still shrinking as samples grow");

    AttackReport report;
    report.attack = "linearization";
    report.stats["relation_dim"] = relations.size();
    report.stats["samples"] = sample_budget;
    if (relations.empty()) {
        report.notes.push_back("no input-linear relation exists; attack not applicable");
        report.wall_ms = watch.ms();
        return report;
    }

    // Phase 2: substitute the target output into every relation.
    Matrix lin(f, relations.size(), n);
    FVec rhs(relations.size());
    for (std::size_t r = 0; r < relations.size(); ++r) {
        const FVec& rel = relations[r];
        std::size_t pos = 0;
        for (std::uint32_t j = 0; j < n; ++j) {
            std::uint32_t cj = 0;
            for (std::uint32_t k = 0; k < m; ++k) cj = f->add(cj, f->mul(rel[pos++], target[k]));
            lin.at(r, j) = cj;
        }
        std::uint32_t c0 = 0;
        for (std::uint32_t j = 0; j < m; ++j)
            for (std::uint32_t k = j; k < m; ++k)
                c0 = f->add(c0, f->mul(rel[pos++], f->mul(target[j], target[k])));
        for (std::uint32_t j = 0; j < n; ++j) lin.at(r, j) = f->add(lin.at(r, j), rel[pos++]);
        for (std::uint32_t k = 0; k < m; ++k) c0 = f->add(c0, f->mul(rel[pos++], target[k]));
        c0 = f->add(c0, rel[pos]);
        rhs[r] = f->neg(c0);
    }
    auto sol = solve_linear(lin, rhs);
    if (!sol) {
        report.notes.push_back("target inconsistent with the learned relations");
        report.wall_ms = watch.ms();
        return report;
    }
    report.stats["solution_dim"] = sol->basis.size();
    std::uint64_t cells = 1;
    for (std::size_t i = 0; i < sol->basis.size(); ++i) {
        cells *= f->order();
        if (cells > (1u << 12)) {
            report.notes.push_back("relation system leaves too many input candidates");
            report.wall_ms = watch.ms();
            return report;
        }
    }
    FVec coeffs(sol->basis.size(), 0);
    do {
        FVec z = sol->particular;
        for (std::size_t b = 0; b < coeffs.size(); ++b) {
            if (!coeffs[b]) continue;
            for (std::size_t j = 0; j < z.size(); ++j)
                z[j] = f->add(z[j], f->mul(coeffs[b], sol->basis[b][j]));
        }
        if (g_pub.eval(z) == target) report.candidates.push_back(std::move(z));
    } while (next_point(coeffs, f->order()));
    report.success = !report.candidates.empty();
    report.stats["verified"] = report.candidates.size();
    report.wall_ms = watch.ms();
    return report;
}

inline AttackReport linearization_attack(const PestoPublicKey& pk, const FVec& target, Rng& rng,
                                         std::size_t sample_budget = 0) {
    return linearization_attack(pk.g_pub, target, rng, sample_budget);
}

// Forgery given the true input transformation: peel A2 off, isolate the t
// quadratic coordinates x_i - q_i(y), eliminate x, brute-force the variables
// that remain quadratic, and solve the residual linear system.
inline FVec forge_with_known_a2(const PestoPublicKey& pk, const AffineBijection& a2, const FVec& c) {
    const PestoParams& pp = pk.params;
    const FieldRef f = pp.field;
    if (c.size() != pp.m) throw DimensionMismatch("ciphertext length");
    if (a2.dimension() != pp.n) throw DimensionMismatch("input transformation dimension");
    PolySystem gbar = compose_affine(pk.g_pub, a2.inverse(), ComposeSide::input);

    ComponentSpace cs = isolate_quadratic(gbar);
    if (cs.dimension() != pp.t)
        throw IsolationAmbiguous("quadratic component dimension " + std::to_string(cs.dimension()) +
                                 " != t = " + std::to_string(pp.t));
    const std::uint32_t t = pp.t, n = pp.n;
    std::vector<Poly> comps;
    FVec targets(t);
    for (std::uint32_t k = 0; k < t; ++k) {
        comps.push_back(component(cs.basis[k], gbar));
        std::uint32_t v = 0;
        for (std::uint32_t j = 0; j < pp.m; ++j) v = f->add(v, f->mul(cs.basis[k][j], c[j]));
        targets[k] = v;
    }
    // each component must be x-linear: no monomial of degree >= 2 touching x
    Matrix xmat(f, t, t);
    std::vector<Poly> ypart;
    for (std::uint32_t k = 0; k < t; ++k) {
        Poly rest(f, n);
        for (const auto& [e, coef] : comps[k].terms()) {
            std::uint32_t xdeg = 0;
            for (std::uint32_t i = 0; i < t; ++i) xdeg += e[i];
            if (xdeg == 0) {
                rest.set_coeff(e, coef);
            } else if (xdeg == 1 && total_degree(e) == 1) {
                xmat.at(k, first_var(e)) = coef;
            } else {
                throw IsolationAmbiguous("quadratic component mixes x nonlinearly (wrong A2?)");
            }
        }
        ypart.push_back(std::move(rest));
    }
    auto inv = Matrix::identity(f, t);
    {
        // invert xmat by solving t unit systems
        Matrix work = xmat;
        auto piv = rref(work);
        if (piv.size() != t) throw IsolationAmbiguous("x-coefficient matrix is singular");
        for (std::uint32_t col = 0; col < t; ++col) {
            FVec unit(t, 0);
            unit[col] = 1;
            auto s = solve_linear(xmat, unit);
            if (!s) throw IsolationAmbiguous("x-coefficient matrix is singular");
            for (std::uint32_t r = 0; r < t; ++r) inv.at(r, col) = s->particular[r];
        }
    }
    // x_i(y) = sum_k inv[i][k] * (targets[k] - ypart_k(y))
    PolySystem subs(f, n);
    for (std::uint32_t i = 0; i < t; ++i) {
        Poly xi = Poly::constant(f, n, 0);
        for (std::uint32_t k = 0; k < t; ++k) {
            const std::uint32_t w = inv.at(i, k);
            if (!w) continue;
            Poly termp = Poly::constant(f, n, targets[k]) - ypart[k];
            xi = xi + termp.scaled(w);
        }
        subs.push_back(std::move(xi));
    }
    for (std::uint32_t j = t; j < n; ++j) subs.push_back(Poly::variable(f, n, j));
    PolySystem residual(f, n);
    for (const auto& p : gbar.polys) residual.push_back(substitute(p, subs));

    // Greedily assign the smallest variable set whose substitution makes the
    // system linear (for an honest key: the s vinegar variables).
    std::vector<std::uint32_t> qv;
    {
        std::set<Monomial, CanonicalLess> nonlinear;
        for (const auto& p : residual.polys)
            for (const auto& [e, coef] : p.terms())
                if (total_degree(e) >= 2) nonlinear.insert(e);
        while (!nonlinear.empty()) {
            std::vector<std::uint32_t> hits(n, 0);
            for (const auto& e : nonlinear)
                for (std::uint32_t v = 0; v < n; ++v)
                    if (e[v]) ++hits[v];
            const std::uint32_t pick = std::uint32_t(
                std::max_element(hits.begin(), hits.end()) - hits.begin());
            qv.push_back(pick);
            std::set<Monomial, CanonicalLess> rest;
            for (Monomial e : nonlinear) {
                e[pick] = 0;
                if (total_degree(e) >= 2) rest.insert(std::move(e));
            }
            nonlinear.swap(rest);
            detail::pow_checked(f->order(), std::uint32_t(qv.size()), kGraphBudget,
                                "too many quadratic variables to enumerate");
        }
        std::sort(qv.begin(), qv.end());
    }
    std::set<std::uint32_t> qvset(qv.begin(), qv.end());
    std::vector<std::uint32_t> lv;
    for (std::uint32_t v = t; v < n; ++v)
        if (!qvset.count(v)) lv.push_back(v);

    FVec assign_q(qv.size(), 0);
    do {
        std::vector<std::int64_t> assign(n, -1);
        for (std::uint32_t i = 0; i < t; ++i) assign[i] = 0;  // x vars eliminated already
        for (std::size_t i = 0; i < qv.size(); ++i) assign[qv[i]] = assign_q[i];
        Matrix lin(f, residual.size(), lv.size());
        FVec rhs(residual.size());
        bool linear_ok = true;
        for (std::size_t r = 0; r < residual.size(); ++r) {
            Poly p = residual.polys[r].eval_partial(assign);
            if (p.degree() > 1) {
                linear_ok = false;
                break;
            }
            Monomial unit(n, 0);
            for (std::size_t j = 0; j < lv.size(); ++j) {
                unit[lv[j]] = 1;
                lin.at(r, j) = p.coeff(unit);
                unit[lv[j]] = 0;
            }
            rhs[r] = f->sub(c[r], p.coeff(unit));
        }
        if (!linear_ok) continue;
        auto sol = solve_linear(lin, rhs);
        if (!sol) continue;
        FVec y(n, 0);
        for (std::size_t i = 0; i < qv.size(); ++i) y[qv[i]] = assign_q[i];
        for (std::size_t j = 0; j < lv.size(); ++j) y[lv[j]] = sol->particular[j];
        FVec v = y;
        for (std::uint32_t i = 0; i < t; ++i) v[i] = subs.polys[i].eval(y);
        if (gbar.eval(v) == c) return a2.backward(v);
    } while (next_point(assign_q, f->order()));
    throw Error("no preimage found with the given transformation");
}

}  // namespace pesto
