#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "pesto/errors.hpp"
#include "pesto/scheme.hpp"

namespace pesto {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::array<std::uint8_t, 5> kKeyMagic{'P', 'S', 'T', 'O', '1'};
inline constexpr std::uint8_t kKindPublic = 0x01;
inline constexpr std::uint8_t kKindSecret = 0x02;
inline constexpr std::uint8_t kFlagReducedA1 = 0x01;
inline constexpr std::uint8_t kFlagPacked = 0x02;

struct KeyFileHeader {
    std::uint8_t kind = 0;
    std::uint32_t p = 0;       // field characteristic
    std::uint8_t k = 0;        // extension degree
    std::uint32_t modulus = 0; // modulus bits (binary fields), 0 for prime fields
    std::uint16_t n = 0, m = 0, t = 0, s = 0;
    std::uint8_t flags = 0;

    bool reduced_a1() const { return flags & kFlagReducedA1; }
    bool packed() const { return flags & kFlagPacked; }
};

// Byte width of one field element in the byte-aligned stream.
inline std::uint32_t element_width(const FieldSpec& f) {
    if (f.order() <= 256) return 1;
    if (f.order() < 65536) return 2;
    throw ParamRange("field order too large for serialization");
}

// Bit width of one field element in the packed stream.
inline std::uint32_t element_bits(const FieldSpec& f) {
    std::uint32_t bits = 0;
    std::uint64_t v = f.order() - 1;
    while (v) {
        ++bits;
        v >>= 1;
    }
    return bits;
}

namespace detail {

struct ByteWriter {
    Bytes out;

    void u8(std::uint8_t v) { out.push_back(v); }
    void u16le(std::uint16_t v) {
        out.push_back(std::uint8_t(v));
        out.push_back(std::uint8_t(v >> 8));
    }
    void u32le(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
    }
};

struct ByteReader {
    const Bytes& in;
    std::size_t pos = 0;

    explicit ByteReader(const Bytes& b) : in(b) {}

    void need(std::size_t k) const {
        if (pos + k > in.size()) throw TruncatedStream();
    }
    std::uint8_t u8() {
        need(1);
        return in[pos++];
    }
    std::uint16_t u16le() {
        need(2);
        std::uint16_t v = std::uint16_t(in[pos]) | std::uint16_t(in[pos + 1]) << 8;
        pos += 2;
        return v;
    }
    std::uint32_t u32le() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    bool exhausted() const { return pos == in.size(); }
};

// Field-element stream on top of the byte stream; optionally bit-packed.
struct ElemWriter {
    ByteWriter& bw;
    std::uint32_t width;   // bytes per element when not packed
    std::uint32_t bits;    // bits per element when packed
    bool packed;
    std::uint64_t acc = 0;
    std::uint32_t filled = 0;

    ElemWriter(ByteWriter& w, const FieldSpec& f, bool pk)
        : bw(w), width(element_width(f)), bits(element_bits(f)), packed(pk) {}

    void put(std::uint32_t v) {
        if (!packed) {
            bw.u8(std::uint8_t(v));
            if (width == 2) bw.u8(std::uint8_t(v >> 8));
            return;
        }
        acc |= std::uint64_t(v) << filled;
        filled += bits;
        while (filled >= 8) {
            bw.u8(std::uint8_t(acc));
            acc >>= 8;
            filled -= 8;
        }
    }
    void finish() {
        if (packed && filled > 0) {
            bw.u8(std::uint8_t(acc));
            acc = 0;
            filled = 0;
        }
    }
};

struct ElemReader {
    ByteReader& br;
    const FieldSpec& f;
    std::uint32_t width;
    std::uint32_t bits;
    bool packed;
    std::uint64_t acc = 0;
    std::uint32_t filled = 0;

    ElemReader(ByteReader& r, const FieldSpec& fld, bool pk)
        : br(r), f(fld), width(element_width(fld)), bits(element_bits(fld)), packed(pk) {}

    std::uint32_t get() {
        std::uint32_t v;
        if (!packed) {
            v = br.u8();
            if (width == 2) v |= std::uint32_t(br.u8()) << 8;
        } else {
            while (filled < bits) {
                acc |= std::uint64_t(br.u8()) << filled;
                filled += 8;
            }
            v = std::uint32_t(acc & ((1u << bits) - 1));
            acc >>= bits;
            filled -= bits;
        }
        if (v >= f.order()) throw ParamSanity("field element out of range");
        return v;
    }
    void finish() {
        if (packed) {
            if (acc != 0) throw ParamSanity("nonzero padding bits in packed stream");
            acc = 0;
            filled = 0;
        }
    }
};

inline void write_header(ByteWriter& bw, const KeyFileHeader& h) {
    for (std::uint8_t c : kKeyMagic) bw.u8(c);
    bw.u8(h.kind);
    bw.u32le(h.p);
    bw.u8(h.k);
    bw.u32le(h.modulus);
    bw.u16le(h.n);
    bw.u16le(h.m);
    bw.u16le(h.t);
    bw.u16le(h.s);
    bw.u8(h.flags);
}

inline KeyFileHeader read_header(ByteReader& br) {
    for (std::uint8_t c : kKeyMagic)
        if (br.u8() != c) throw BadMagic();
    KeyFileHeader h;
    h.kind = br.u8();
    if (h.kind != kKindPublic && h.kind != kKindSecret) throw BadMagic();
    h.p = br.u32le();
    h.k = br.u8();
    h.modulus = br.u32le();
    h.n = br.u16le();
    h.m = br.u16le();
    h.t = br.u16le();
    h.s = br.u16le();
    h.flags = br.u8();
    if (h.flags & ~(kFlagReducedA1 | kFlagPacked)) throw ParamSanity("unknown flag bits");
    return h;
}

inline KeyFileHeader make_header(const PestoParams& p, std::uint8_t kind, bool reduced, bool packed) {
    KeyFileHeader h;
    h.kind = kind;
    h.p = p.field->characteristic();
    h.k = std::uint8_t(p.field->extension_degree());
    h.modulus = p.field->extension_degree() > 1 ? p.field->modulus_bits() : 0;
    h.n = std::uint16_t(p.n);
    h.m = std::uint16_t(p.m);
    h.t = std::uint16_t(p.t);
    h.s = std::uint16_t(p.s);
    h.flags = (reduced ? kFlagReducedA1 : 0) | (packed ? kFlagPacked : 0);
    return h;
}

inline PestoParams params_from_header(const KeyFileHeader& h) {
    FieldRef f;
    if (h.k == 1)
        f = FieldSpec::prime(h.p);
    else if (h.p == 2)
        f = FieldSpec::binary(h.k, h.modulus);
    else
        throw ParamSanity("unsupported field descriptor");
    try {
        return PestoParams(std::move(f), h.n, h.m, h.t, h.s);
    } catch (const ParamRange& e) {
        throw ParamSanity(e.what());
    }
}

// Dense canonical emission of one polynomial over all monomials of total
// degree <= deg in nv variables; rejects support outside that window.
inline void write_poly_dense(ElemWriter& ew, const Poly& p, std::uint32_t nv, std::uint32_t deg) {
    if (p.degree() > deg) throw ParamSanity("polynomial degree exceeds its stream window");
    MonomialBasis basis(nv, deg);
    for (std::size_t j = 0; j < basis.size(); ++j) ew.put(p.coeff(basis.monomial(j)));
}

inline Poly read_poly_dense(ElemReader& er, const FieldRef& f, std::uint32_t nv, std::uint32_t deg) {
    MonomialBasis basis(nv, deg);
    Poly p(f, nv);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const std::uint32_t c = er.get();
        if (c) p.set_coeff(basis.monomial(j), c);
    }
    return p;
}

inline void write_matrix(ElemWriter& ew, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) ew.put(m.at(i, j));
}

inline void write_vector(ElemWriter& ew, const FVec& v) {
    for (std::uint32_t x : v) ew.put(x);
}

inline FVec read_vector(ElemReader& er, std::size_t len) {
    FVec v(len);
    for (auto& x : v) x = er.get();
    return v;
}

// Support pattern for the oil-and-vinegar polynomials of the central map:
// all monomials of degree <= 2 in the first v variables, then per oil
// variable the v vinegar-times-oil products and the pure linear term.
inline std::vector<Monomial> uo_support(std::uint32_t n, std::uint32_t v) {
    std::vector<Monomial> out;
    MonomialBasis vin(v, 2);
    for (std::size_t j = 0; j < vin.size(); ++j) {
        Monomial e(n, 0);
        const Monomial& src = vin.monomial(j);
        for (std::uint32_t i = 0; i < v; ++i) e[i] = src[i];
        out.push_back(e);
    }
    for (std::uint32_t o = v; o < n; ++o) {
        for (std::uint32_t j = 0; j < v; ++j) {
            Monomial e(n, 0);
            e[j] = 1;
            e[o] = 1;
            out.push_back(e);
        }
        Monomial e(n, 0);
        e[o] = 1;
        out.push_back(e);
    }
    return out;
}

}  // namespace detail

inline Bytes encode_key(const PestoPublicKey& pk, bool packed = false) {
    const PestoParams& p = pk.params;
    detail::ByteWriter bw;
    detail::write_header(bw, detail::make_header(p, kKindPublic, pk.reduced_a1, packed));
    detail::ElemWriter ew(bw, *p.field, packed);
    for (std::uint32_t i = 0; i < p.m; ++i) {
        const bool quad_head = pk.reduced_a1 && i < p.t;
        detail::write_poly_dense(ew, pk.g_pub.polys[i], p.n, quad_head ? 2 : 4);
    }
    ew.finish();
    return std::move(bw.out);
}

inline Bytes encode_key(const PestoSecretKey& sk, bool packed = false) {
    const PestoParams& p = sk.params;
    detail::ByteWriter bw;
    detail::write_header(bw, detail::make_header(p, kKindSecret, sk.reduced_a1, packed));
    detail::ElemWriter ew(bw, *p.field, packed);
    // A1: with a reduced A1 the zero block in rows < t, columns >= t is elided
    const Matrix& l1 = sk.a1.linear();
    for (std::uint32_t i = 0; i < p.m; ++i) {
        const std::uint32_t cols = sk.reduced_a1 && i < p.t ? p.t : p.m;
        for (std::uint32_t j = 0; j < cols; ++j) ew.put(l1.at(i, j));
        if (sk.reduced_a1 && i < p.t)
            for (std::uint32_t j = p.t; j < p.m; ++j)
                if (l1.at(i, j)) throw ParamSanity("reduced flag set but A1 block is not zero");
    }
    detail::write_vector(ew, sk.a1.translation());
    detail::write_matrix(ew, sk.a2.linear());
    detail::write_vector(ew, sk.a2.translation());
    for (const auto& q : sk.central.qmap.polys) detail::write_poly_dense(ew, q, p.n - p.t, 2);
    const auto support = detail::uo_support(p.n, p.t + p.s);
    for (const auto& u : sk.central.U.polys) {
        std::size_t emitted = 0;
        for (const auto& e : support) {
            const std::uint32_t c = u.coeff(e);
            if (c) ++emitted;
            ew.put(c);
        }
        if (emitted != u.terms().size()) throw ParamSanity("unexpected central-map support");
    }
    ew.finish();
    return std::move(bw.out);
}

inline PestoPublicKey decode_public_key(const Bytes& bytes) {
    detail::ByteReader br(bytes);
    KeyFileHeader h = detail::read_header(br);
    if (h.kind != kKindPublic) throw ParamSanity("expected a public-key stream");
    PestoParams p = detail::params_from_header(h);
    detail::ElemReader er(br, *p.field, h.packed());
    PestoPublicKey pk;
    pk.params = p;
    pk.reduced_a1 = h.reduced_a1();
    pk.g_pub = PolySystem(p.field, p.n);
    for (std::uint32_t i = 0; i < p.m; ++i) {
        const bool quad_head = pk.reduced_a1 && i < p.t;
        pk.g_pub.push_back(detail::read_poly_dense(er, p.field, p.n, quad_head ? 2 : 4));
    }
    er.finish();
    if (!br.exhausted()) throw ParamSanity("trailing bytes after key payload");
    return pk;
}

inline PestoSecretKey decode_secret_key(const Bytes& bytes) {
    detail::ByteReader br(bytes);
    KeyFileHeader h = detail::read_header(br);
    if (h.kind != kKindSecret) throw ParamSanity("expected a secret-key stream");
    PestoParams p = detail::params_from_header(h);
    detail::ElemReader er(br, *p.field, h.packed());
    const bool reduced = h.reduced_a1();
    Matrix l1(p.field, p.m, p.m);
    for (std::uint32_t i = 0; i < p.m; ++i) {
        const std::uint32_t cols = reduced && i < p.t ? p.t : p.m;
        for (std::uint32_t j = 0; j < cols; ++j) l1.at(i, j) = er.get();
    }
    FVec c1 = detail::read_vector(er, p.m);
    Matrix l2(p.field, p.n, p.n);
    for (std::uint32_t i = 0; i < p.n; ++i)
        for (std::uint32_t j = 0; j < p.n; ++j) l2.at(i, j) = er.get();
    FVec c2 = detail::read_vector(er, p.n);
    CentralMap cm;
    cm.field = p.field;
    cm.n = p.n;
    cm.m = p.m;
    cm.t = p.t;
    cm.s = p.s;
    cm.qmap = PolySystem(p.field, p.n - p.t);
    for (std::uint32_t i = 0; i < p.t; ++i)
        cm.qmap.push_back(detail::read_poly_dense(er, p.field, p.n - p.t, 2));
    const auto support = detail::uo_support(p.n, p.t + p.s);
    cm.U = PolySystem(p.field, p.n);
    for (std::uint32_t i = 0; i < p.m - p.t; ++i) {
        Poly u(p.field, p.n);
        for (const auto& e : support) {
            const std::uint32_t c = er.get();
            if (c) u.set_coeff(e, c);
        }
        cm.U.push_back(std::move(u));
    }
    er.finish();
    if (!br.exhausted()) throw ParamSanity("trailing bytes after key payload");
    PestoSecretKey sk;
    sk.params = p;
    try {
        sk.a1 = AffineBijection(std::move(l1), std::move(c1));
        sk.a2 = AffineBijection(std::move(l2), std::move(c2));
    } catch (const Error& e) {
        throw ParamSanity(e.what());
    }
    sk.central = std::move(cm);
    sk.reduced_a1 = reduced;
    sk.central.validate();
    return sk;
}

// Predicted byte size of an encoded key, header included.
inline std::uint64_t encoded_key_size(const PestoParams& p, bool secret, bool reduced, bool packed) {
    auto [pk_count, sk_count] = key_counts(p, reduced);
    const std::uint64_t count = secret ? sk_count : pk_count;
    constexpr std::uint64_t header = 5 + 1 + 4 + 1 + 4 + 8 + 1;
    if (!packed) return header + count * element_width(*p.field);
    const std::uint64_t bits = count * element_bits(*p.field);
    return header + (bits + 7) / 8;
}

// Message/signature files: u32 little-endian element count, then the
// elements byte-aligned in stream order.
inline Bytes encode_vector(const FVec& v, const FieldSpec& f) {
    detail::ByteWriter bw;
    bw.u32le(std::uint32_t(v.size()));
    detail::ElemWriter ew(bw, f, false);
    for (std::uint32_t x : v) {
        if (x >= f.order()) throw ParamSanity("field element out of range");
        ew.put(x);
    }
    return std::move(bw.out);
}

inline FVec decode_vector(const Bytes& bytes, const FieldSpec& f) {
    detail::ByteReader br(bytes);
    const std::uint32_t len = br.u32le();
    detail::ElemReader er(br, f, false);
    FVec v = detail::read_vector(er, len);
    if (!br.exhausted()) throw ParamSanity("trailing bytes after vector payload");
    return v;
}

}  // namespace pesto
