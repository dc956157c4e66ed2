#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pesto/attacks.hpp"
#include "pesto/errors.hpp"
#include "pesto/scheme.hpp"

namespace pesto {

// Macaulay/XL matrix at a fixed target degree: one row per (multiplier
// monomial, source polynomial) pair, columns indexed by all monomials of
// degree <= d in descending canonical order (constant column last).
struct MacaulayMatrix {
    std::uint32_t degree = 0;
    std::uint32_t nvars = 0;
    std::size_t columns = 0;
    std::vector<std::pair<std::size_t, std::size_t>> row_labels;  // (multiplier index, poly index)
    std::vector<std::vector<std::uint8_t>> rows;
};

struct SolveDegreeEstimate {
    std::uint32_t witness_degree = 0;
    std::map<std::uint32_t, std::size_t> rank_profile;  // degree -> Macaulay rank
    std::string termination;
    FVec solution;  // common root of the probed system
    double runtime_ms = 0.0;
};

namespace detail {

// Build the degree-d matrix. When quotient_ring is set, exponents are folded
// by the field equations x^q = x (columns capped at exponent q - 1).
inline MacaulayMatrix build_macaulay(const PolySystem& sys, std::uint32_t d,
                                     std::size_t column_budget, bool quotient_ring) {
    const FieldSpec& f = *sys.field;
    if (f.order() > 256) throw ParamRange("elimination storage requires q <= 256");
    const std::uint32_t cap = quotient_ring ? std::uint32_t(f.order() - 1) : 0xFFFF;
    MonomialBasis basis(sys.nvars, d, cap);
    if (basis.size() > column_budget) throw BudgetExceeded("Macaulay column budget");
    const std::size_t cols = basis.size();
    auto col_of = [&](const Monomial& e) { return cols - 1 - basis.index_of(e); };

    MacaulayMatrix mm;
    mm.degree = d;
    mm.nvars = sys.nvars;
    mm.columns = cols;
    for (std::size_t pi = 0; pi < sys.size(); ++pi) {
        const Poly& p = sys.polys[pi];
        const std::uint32_t pd = p.degree();
        if (pd > d) continue;
        const std::size_t mult_end = basis.prefix(d - pd);
        for (std::size_t ui = 0; ui < mult_end; ++ui) {
            const Monomial& u = basis.monomial(ui);
            std::vector<std::uint8_t> row(cols, 0);
            for (const auto& [e, c] : p.terms()) {
                Monomial prod(sys.nvars);
                for (std::uint32_t v = 0; v < sys.nvars; ++v) {
                    std::uint32_t exp = std::uint32_t(e[v]) + u[v];
                    prod[v] = quotient_ring ? reduce_exponent(exp, f.order()) : std::uint16_t(exp);
                }
                const std::size_t j = col_of(prod);
                row[j] = std::uint8_t(f.add(row[j], c));
            }
            mm.row_labels.emplace_back(ui, pi);
            mm.rows.push_back(std::move(row));
        }
    }
    return mm;
}

// Forward elimination to row-echelon form; returns the rank. Rows end up
// sorted so that row i's leading column is strictly increasing.
inline std::size_t eliminate(const FieldSpec& f, std::vector<std::vector<std::uint8_t>>& rows) {
    if (rows.empty()) return 0;
    const std::size_t cols = rows[0].size();
    const bool char2 = f.characteristic() == 2;
    std::vector<std::uint8_t> tab(256);
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t pr = r;
        while (pr < rows.size() && rows[pr][c] == 0) ++pr;
        if (pr == rows.size()) continue;
        std::swap(rows[pr], rows[r]);
        const std::uint32_t lead = rows[r][c];
        if (lead != 1) {
            f.fill_scale_table(f.inv(lead), tab.data());
            auto& row = rows[r];
            for (std::size_t j = c; j < cols; ++j) row[j] = tab[row[j]];
        }
        const auto& prow = rows[r];
        for (std::size_t i = r + 1; i < rows.size(); ++i) {
            const std::uint32_t v = rows[i][c];
            if (!v) continue;
            auto& row = rows[i];
            if (char2) {
                f.fill_scale_table(v, tab.data());
                for (std::size_t j = c; j < cols; ++j) row[j] ^= tab[prow[j]];
            } else {
                for (std::uint64_t x = 0; x < f.order(); ++x)
                    tab[x] = std::uint8_t(f.neg(f.mul(v, std::uint32_t(x))));
                for (std::size_t j = c; j < cols; ++j)
                    row[j] = std::uint8_t(f.add(row[j], tab[prow[j]]));
            }
        }
        ++r;
    }
    return r;
}

}  // namespace detail

namespace detail {

// Candidate-enumeration cap for the affine back-substitution stage.
constexpr std::uint64_t kAffineEnumBudget = 1u << 12;

// Try to recover a verified common root of sys from the affine rows of an
// eliminated Macaulay matrix.
inline bool affine_back_substitution(const PolySystem& sys, const MacaulayMatrix& mm,
                                     const MonomialBasis& basis, FVec& out) {
    const FieldSpec& f = *sys.field;
    const std::uint32_t n = sys.nvars;
    const std::size_t affine_start = mm.columns - basis.prefix(1);
    std::vector<FVec> arows;
    FVec arhs;
    for (const auto& row : mm.rows) {
        std::size_t lead = mm.columns;
        for (std::size_t j = 0; j < mm.columns; ++j)
            if (row[j]) {
                lead = j;
                break;
            }
        if (lead == mm.columns || lead < affine_start) continue;
        if (lead == mm.columns - 1) throw Error("system is inconsistent: 1 = 0 derived");
        FVec lin(n, 0);
        for (std::size_t j = affine_start; j + 1 < mm.columns; ++j) {
            if (!row[j]) continue;
            lin[first_var(basis.monomial(mm.columns - 1 - j))] = row[j];
        }
        arows.push_back(std::move(lin));
        arhs.push_back(f.neg(row[mm.columns - 1]));
    }
    if (arows.empty()) return false;
    Matrix a = Matrix::from_rows(sys.field, arows);
    auto sol = solve_linear(a, arhs);
    if (!sol) return false;
    std::uint64_t cells = 1;
    for (std::size_t i = 0; i < sol->basis.size(); ++i) {
        cells *= f.order();
        if (cells > kAffineEnumBudget) return false;
    }
    FVec coeffs(sol->basis.size(), 0);
    do {
        FVec z = sol->particular;
        for (std::size_t b = 0; b < coeffs.size(); ++b) {
            if (!coeffs[b]) continue;
            for (std::size_t j = 0; j < n; ++j)
                z[j] = f.add(z[j], f.mul(coeffs[b], sol->basis[b][j]));
        }
        bool root = true;
        for (const auto& p : sys.polys)
            if (p.eval(z) != 0) {
                root = false;
                break;
            }
        if (root) {
            out = std::move(z);
            return true;
        }
    } while (next_point(coeffs, f.order()));
    return false;
}

}  // namespace detail

// XL probe: raise the target degree until the affine rows of the eliminated
// Macaulay matrix yield a verified common root (enumerating a small residual
// solution space if the affine rows do not pin the root uniquely). With
// reinforce_mutants set, eliminated rows of lower degree ("mutants") are
// additionally appended as new generators and the degree retried until no new
// information appears; this usually lowers the reported witness degree.
inline SolveDegreeEstimate xl_witness_degree(const PolySystem& sys, std::uint32_t d_max,
                                             std::size_t column_budget = 1u << 21,
                                             bool quotient_ring = false,
                                             bool reinforce_mutants = false) {
    detail::StopWatch watch;
    const FieldSpec& f = *sys.field;
    const std::uint32_t n = sys.nvars;
    SolveDegreeEstimate est;
    PolySystem working = sys;
    std::set<Monomial, CanonicalLess> known_leads;
    const std::uint32_t d0 = std::max<std::uint32_t>(sys.degree(), 1);
    for (std::uint32_t d = d0; d <= d_max; ++d) {
        MonomialBasis basis(n, d, quotient_ring ? std::uint32_t(f.order() - 1) : 0xFFFF);
        std::size_t prev_rank = 0;
        for (int pass = 0; pass < 16; ++pass) {
            MacaulayMatrix mm = detail::build_macaulay(working, d, column_budget, quotient_ring);
            const std::size_t rank = detail::eliminate(f, mm.rows);
            est.rank_profile[d] = rank;
            FVec root;
            if (detail::affine_back_substitution(sys, mm, basis, root)) {
                est.witness_degree = d;
                est.termination = "witness";
                est.solution = std::move(root);
                est.runtime_ms = watch.ms();
                return est;
            }
            if (!reinforce_mutants) break;
            // harvest degree falls as new generators
            std::size_t added = 0;
            for (const auto& row : mm.rows) {
                std::size_t lead = mm.columns;
                for (std::size_t j = 0; j < mm.columns; ++j)
                    if (row[j]) {
                        lead = j;
                        break;
                    }
                if (lead == mm.columns) continue;
                const Monomial& lm = basis.monomial(mm.columns - 1 - lead);
                const std::uint32_t rd = total_degree(lm);
                if (rd >= d || rd < 1) continue;
                if (known_leads.count(lm)) continue;
                Poly p(sys.field, n);
                for (std::size_t j = lead; j < mm.columns; ++j)
                    if (row[j]) p.set_coeff(basis.monomial(mm.columns - 1 - j), row[j]);
                if (p.degree() < working.degree()) {
                    known_leads.insert(lm);
                    working.push_back(std::move(p));
                    ++added;
                }
            }
            if (added == 0 || rank == prev_rank) break;
            prev_rank = rank;
        }
    }
    throw NoSolutionFound(d_max);
}

// Target system G_pub(z) = w with the trailing n - keep variables pinned to
// hint values, rewritten in the leading keep variables.
inline PolySystem specialized_target(const PestoPublicKey& pk, const FVec& w, const FVec& hint,
                                     std::uint32_t keep) {
    const PestoParams& pp = pk.params;
    if (w.size() != pp.m || hint.size() != pp.n) throw DimensionMismatch("target/hint lengths");
    if (keep > pp.n) throw ParamRange("keep exceeds variable count");
    std::vector<std::int64_t> assign(pp.n, -1);
    for (std::uint32_t v = keep; v < pp.n; ++v) assign[v] = hint[v];
    PolySystem out(pp.field, keep);
    for (std::uint32_t i = 0; i < pp.m; ++i) {
        Poly full = pk.g_pub.polys[i].eval_partial(assign);
        full.add_term(Monomial(pp.n, 0), pp.field->neg(w[i]));
        Poly shrunk(pp.field, keep);
        for (const auto& [e, c] : full.terms())
            shrunk.set_coeff(Monomial(e.begin(), e.begin() + keep), c);
        out.push_back(std::move(shrunk));
    }
    return out;
}

struct ProbeRecord {
    std::uint64_t q = 0;
    std::uint32_t n = 0, m = 0, t = 0, s = 0;
    std::uint64_t seed = 0;
    std::uint32_t witness_degree = 0;
    std::uint32_t max_rank_degree = 0;
    double runtime_ms = 0.0;
};

inline std::string probe_csv_header() {
    return "q,n,m,t,s,seed,witness_degree,max_rank_degree,runtime_ms";
}

inline std::string to_csv(const ProbeRecord& r) {
    std::ostringstream os;
    os << r.q << ',' << r.n << ',' << r.m << ',' << r.t << ',' << r.s << ',' << r.seed << ','
       << r.witness_degree << ',' << r.max_rank_degree << ',' << r.runtime_ms;
    return os.str();
}

// End-to-end probe: keygen at the given seed, pick a target in the image,
// specialize down to m - 1 unknowns (overdetermined by one equation, so the
// planted preimage is generically the only closure point left and affine rows
// can surface), and measure the XL witness degree. The recovered full
// preimage is re-verified against the public map.
inline ProbeRecord probe_witness_degree(const PestoParams& params, std::uint64_t seed,
                                        std::uint32_t d_max = 9,
                                        std::size_t column_budget = 1u << 21) {
    Rng rng(seed);
    auto kp = keygen(params, rng);
    FVec z = random_vector(params.n, *params.field, rng);
    FVec w = kp.pk.g_pub.eval(z);
    const std::uint32_t keep = params.m - 1;
    PolySystem sys = specialized_target(kp.pk, w, z, keep);
    SolveDegreeEstimate est = xl_witness_degree(sys, d_max, column_budget);
    FVec full = est.solution;
    full.insert(full.end(), z.begin() + keep, z.end());
    if (kp.pk.g_pub.eval(full) != w) throw Error("witness does not satisfy the public system");
    ProbeRecord rec;
    rec.q = params.field->order();
    rec.n = params.n;
    rec.m = params.m;
    rec.t = params.t;
    rec.s = params.s;
    rec.seed = seed;
    rec.witness_degree = est.witness_degree;
    rec.max_rank_degree = est.rank_profile.empty() ? 0 : est.rank_profile.rbegin()->first;
    rec.runtime_ms = est.runtime_ms;
    return rec;
}

// Extended-precision C(n+sd, n)^omega estimate, reported via log2.
struct ComplexityBound {
    std::vector<std::uint32_t> binomial_limbs;  // little-endian base 2^32
    double log2_binomial = 0.0;
    double omega = 0.0;
    double log2_bound = 0.0;

    std::string binomial_decimal() const {
        std::vector<std::uint32_t> limbs = binomial_limbs;
        std::string out;
        while (!limbs.empty()) {
            std::uint64_t rem = 0;
            for (std::size_t i = limbs.size(); i-- > 0;) {
                const std::uint64_t cur = (rem << 32) | limbs[i];
                limbs[i] = std::uint32_t(cur / 10);
                rem = cur % 10;
            }
            out.push_back(char('0' + rem));
            while (!limbs.empty() && limbs.back() == 0) limbs.pop_back();
        }
        if (out.empty()) out = "0";
        return std::string(out.rbegin(), out.rend());
    }
};

namespace detail {

inline void limbs_mul_small(std::vector<std::uint32_t>& limbs, std::uint64_t x) {
    std::uint64_t carry = 0;
    for (auto& l : limbs) {
        const std::uint64_t cur = std::uint64_t(l) * x + carry;
        l = std::uint32_t(cur);
        carry = cur >> 32;
    }
    while (carry) {
        limbs.push_back(std::uint32_t(carry));
        carry >>= 32;
    }
}

// Exact division (the binomial product formula keeps intermediates integral).
inline void limbs_div_small(std::vector<std::uint32_t>& limbs, std::uint64_t x) {
    std::uint64_t rem = 0;
    for (std::size_t i = limbs.size(); i-- > 0;) {
        const std::uint64_t cur = (rem << 32) | limbs[i];
        limbs[i] = std::uint32_t(cur / x);
        rem = cur % x;
    }
    while (!limbs.empty() && limbs.back() == 0) limbs.pop_back();
}

inline double limbs_log2(const std::vector<std::uint32_t>& limbs) {
    if (limbs.empty()) return -std::numeric_limits<double>::infinity();
    const std::size_t top = limbs.size() - 1;
    double head = limbs[top];
    if (top >= 1) head = head * 4294967296.0 + limbs[top - 1];
    const std::size_t used = top >= 1 ? top - 1 : top;
    return std::log2(head) + 32.0 * double(used);
}

}  // namespace detail

inline ComplexityBound gb_complexity_bound(std::uint32_t n, std::uint32_t sd, double omega) {
    if (sd < 1) throw ParamRange("solving degree must be >= 1");
    if (!(omega > 2.0 && omega < 3.0)) throw ParamRange("omega must lie in (2, 3)");
    std::vector<std::uint32_t> limbs{1};
    for (std::uint32_t i = 1; i <= sd; ++i) {
        detail::limbs_mul_small(limbs, n + i);
        detail::limbs_div_small(limbs, i);
    }
    ComplexityBound b;
    b.binomial_limbs = limbs;
    b.log2_binomial = detail::limbs_log2(limbs);
    b.omega = omega;
    b.log2_bound = omega * b.log2_binomial;
    return b;
}

}  // namespace pesto
