#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pesto/errors.hpp"

namespace pesto {

// GF(p^k). Prime fields use residues mod p; binary extensions (p = 2, k > 1)
// use the coefficient-vector encoding of the residue polynomial, with
// multiplication served by log/antilog tables for q <= 2^16.
class FieldSpec {
public:
    static std::shared_ptr<const FieldSpec> prime(std::uint32_t p) {
        return std::shared_ptr<const FieldSpec>(new FieldSpec(p, 1, 0));
    }

    // modulus = 0 picks the fixed per-degree default polynomial.
    static std::shared_ptr<const FieldSpec> binary(std::uint32_t k, std::uint32_t modulus = 0) {
        if (modulus == 0) modulus = default_binary_modulus(k);
        return std::shared_ptr<const FieldSpec>(new FieldSpec(2, k, modulus));
    }

    static std::shared_ptr<const FieldSpec> make(std::uint32_t p, std::uint32_t k, std::uint32_t modulus) {
        if (k == 1) return prime(p);
        if (p != 2) throw ParamRange("extension fields supported only for p = 2");
        return binary(k, modulus);
    }

    std::uint32_t characteristic() const { return p_; }
    std::uint32_t extension_degree() const { return k_; }
    std::uint32_t modulus_bits() const { return modulus_; }
    std::uint64_t order() const { return q_; }

    bool same(const FieldSpec& o) const { return p_ == o.p_ && k_ == o.k_ && modulus_ == o.modulus_; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        if (k_ > 1) return a ^ b;
        std::uint64_t s = std::uint64_t(a) + b;
        return std::uint32_t(s >= q_ ? s - q_ : s);
    }

    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
        if (k_ > 1) return a ^ b;
        return a >= b ? a - b : std::uint32_t(a + q_ - b);
    }

    std::uint32_t neg(std::uint32_t a) const {
        if (k_ > 1) return a;
        return a == 0 ? 0 : std::uint32_t(q_ - a);
    }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        if (a == 0 || b == 0) return 0;
        if (k_ == 1) return std::uint32_t(std::uint64_t(a) * b % q_);
        if (!log_.empty()) {
            std::uint32_t s = log_[a] + log_[b];
            const std::uint32_t span = std::uint32_t(q_ - 1);
            if (s >= span) s -= span;
            return exp_[s];
        }
        return clmul_reduce(a, b);
    }

    std::uint32_t inv(std::uint32_t a) const {
        if (a == 0) throw DivisionByZero();
        if (k_ > 1) {
            if (!log_.empty()) return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
            return pow(a, q_ - 2);
        }
        return pow(a, q_ - 2);
    }

    std::uint32_t div(std::uint32_t a, std::uint32_t b) const { return mul(a, inv(b)); }

    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const {
        std::uint32_t r = 1, base = a;
        while (e) {
            if (e & 1) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    }

    // Scale-by-constant byte table, the workhorse of dense elimination.
    // Only meaningful for q <= 256.
    void fill_scale_table(std::uint32_t c, std::uint8_t* table) const {
        for (std::uint64_t v = 0; v < q_; ++v) table[v] = std::uint8_t(mul(c, std::uint32_t(v)));
    }

    static std::uint32_t default_binary_modulus(std::uint32_t k) {
        // Fixed per degree; GF(2^6) = x^6+x+1, GF(2^8) = x^8+x^4+x^3+x+1.
        static const std::uint32_t table[17] = {0,      0x3,    0x7,    0xB,   0x13,   0x25,
                                               0x43,   0x83,   0x11B,  0x211, 0x409,  0x805,
                                               0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};
        if (k < 1 || k > 16) throw ParamRange("binary extension degree must be in [1,16]");
        return table[k];
    }

private:
    FieldSpec(std::uint32_t p, std::uint32_t k, std::uint32_t modulus)
        : p_(p), k_(k), modulus_(modulus) {
        if (p < 2 || p >= (1u << 30)) throw ParamRange("characteristic must be a prime < 2^30");
        if (!is_prime(p)) throw ParamRange("characteristic is not prime");
        if (k < 1) throw ParamRange("extension degree must be >= 1");
        std::uint64_t q = 1;
        for (std::uint32_t i = 0; i < k; ++i) {
            q *= p;
            if (q > (1ull << 32)) throw ParamRange("field order exceeds 2^32");
        }
        q_ = q;
        if (k > 1) {
            if (p != 2) throw ParamRange("extension fields supported only for p = 2");
            if (k > 16) throw ParamRange("binary extension degree must be <= 16");
            validate_irreducible();
            build_tables();
        }
    }

    static bool is_prime(std::uint32_t n) {
        if (n < 2) return false;
        for (std::uint32_t d = 2; std::uint64_t(d) * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    }

    static std::uint32_t poly_deg(std::uint64_t f) {
        std::uint32_t d = 0;
        while (f > 1) {
            f >>= 1;
            ++d;
        }
        return d;
    }

    // Remainder of binary polynomial division.
    static std::uint64_t poly_mod(std::uint64_t a, std::uint64_t b) {
        const std::uint32_t db = poly_deg(b);
        while (a >= (1ull << db)) {
            std::uint32_t da = poly_deg(a);
            a ^= b << (da - db);
        }
        return a;
    }

    void validate_irreducible() const {
        if (poly_deg(modulus_) != k_) throw ParamRange("modulus degree does not equal the extension degree");
        if ((modulus_ & 1) == 0) throw ParamRange("modulus is reducible (divisible by x)");
        // Brute-force factor search over GF(2): trial division by every
        // polynomial of degree 1..k/2.
        for (std::uint64_t d = 1; 2 * d <= k_; ++d) {
            for (std::uint64_t f = (1ull << d); f < (1ull << (d + 1)); ++f) {
                if (poly_mod(modulus_, f) == 0) throw ParamRange("modulus polynomial is reducible");
            }
        }
    }

    std::uint32_t clmul_reduce(std::uint32_t a, std::uint32_t b) const {
        std::uint64_t acc = 0, aa = a;
        while (b) {
            if (b & 1) acc ^= aa;
            aa <<= 1;
            b >>= 1;
        }
        return std::uint32_t(poly_mod(acc, modulus_));
    }

    void build_tables() {
        if (q_ > (1ull << 16)) return;
        const std::uint32_t span = std::uint32_t(q_ - 1);
        std::vector<std::uint16_t> exp(span), log(q_, 0);
        for (std::uint32_t g = 2; g < q_; ++g) {
            std::uint32_t v = 1;
            bool primitive = true;
            for (std::uint32_t i = 0; i < span; ++i) {
                exp[i] = std::uint16_t(v);
                v = clmul_reduce(v, g);
                if (v == 1 && i + 1 < span) {
                    primitive = false;
                    break;
                }
            }
            if (primitive) {
                for (std::uint32_t i = 0; i < span; ++i) log[exp[i]] = std::uint16_t(i);
                exp_ = std::move(exp);
                log_ = std::move(log);
                return;
            }
        }
        throw Error("no primitive element found; modulus is not irreducible");
    }

    std::uint32_t p_;
    std::uint32_t k_;
    std::uint32_t modulus_;
    std::uint64_t q_ = 0;
    std::vector<std::uint16_t> exp_;
    std::vector<std::uint16_t> log_;
};

using FieldRef = std::shared_ptr<const FieldSpec>;

// Canonical element of a specific field. Arithmetic between elements of
// different specs is rejected.
struct FieldElement {
    const FieldSpec* spec = nullptr;
    std::uint32_t v = 0;

    FieldElement() = default;
    FieldElement(const FieldSpec& s, std::uint32_t value) : spec(&s), v(value) {
        if (value >= s.order()) throw ParamRange("field element value out of range");
    }

    bool is_zero() const { return v == 0; }
};

inline const FieldSpec& check_same(const FieldElement& a, const FieldElement& b) {
    if (!a.spec || !b.spec || !a.spec->same(*b.spec)) throw SpecMismatch();
    return *a.spec;
}

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    const FieldSpec& f = check_same(a, b);
    return FieldElement(f, f.add(a.v, b.v));
}
inline FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    const FieldSpec& f = check_same(a, b);
    return FieldElement(f, f.sub(a.v, b.v));
}
inline FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    const FieldSpec& f = check_same(a, b);
    return FieldElement(f, f.mul(a.v, b.v));
}
inline FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    const FieldSpec& f = check_same(a, b);
    return FieldElement(f, f.div(a.v, b.v));
}
inline bool operator==(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    return a.v == b.v;
}

}  // namespace pesto
