#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pesto/errors.hpp"
#include "pesto/field.hpp"
#include "pesto/rng.hpp"

namespace pesto {

// Raw canonical values; the ambient field travels alongside (in a Matrix,
// a key, or an explicit FieldSpec argument).
using FVec = std::vector<std::uint32_t>;

class Matrix {
public:
    Matrix() = default;
    Matrix(FieldRef field, std::size_t rows, std::size_t cols)
        : field_(std::move(field)), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

    static Matrix identity(FieldRef field, std::size_t d) {
        Matrix m(std::move(field), d, d);
        for (std::size_t i = 0; i < d; ++i) m.at(i, i) = 1;
        return m;
    }

    static Matrix from_rows(FieldRef field, const std::vector<FVec>& rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r ? rows[0].size() : 0;
        Matrix m(std::move(field), r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) throw DimensionMismatch("ragged rows");
            for (std::size_t j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }

    const FieldSpec& field() const { return *field_; }
    FieldRef field_ref() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::uint32_t& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    std::uint32_t at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    FieldElement fe(std::size_t i, std::size_t j) const { return FieldElement(*field_, at(i, j)); }

    FVec row(std::size_t i) const { return FVec(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_); }

    Matrix transpose() const {
        Matrix t(field_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw DimensionMismatch("matrix product");
        const FieldSpec& f = *field_;
        Matrix r(field_, rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const std::uint32_t v = at(i, k);
                if (!v) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    r.at(i, j) = f.add(r.at(i, j), f.mul(v, o.at(k, j)));
            }
        return r;
    }

    FVec apply(const FVec& v) const {
        if (v.size() != cols_) throw DimensionMismatch("matrix-vector product");
        const FieldSpec& f = *field_;
        FVec r(rows_, 0);
        for (std::size_t i = 0; i < rows_; ++i) {
            std::uint32_t acc = 0;
            for (std::size_t j = 0; j < cols_; ++j) acc = f.add(acc, f.mul(at(i, j), v[j]));
            r[i] = acc;
        }
        return r;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_ && field_->same(*o.field_);
    }

private:
    FieldRef field_;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::uint32_t> a_;
};

// In-place reduced row echelon form; partial pivoting by first nonzero entry
// in deterministic row order. Returns pivot column indices.
inline std::vector<std::size_t> rref(Matrix& m) {
    const FieldSpec& f = m.field();
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t pr = r;
        while (pr < m.rows() && m.at(pr, c) == 0) ++pr;
        if (pr == m.rows()) continue;
        if (pr != r)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(pr, j), m.at(r, j));
        const std::uint32_t inv = f.inv(m.at(r, c));
        for (std::size_t j = c; j < m.cols(); ++j) m.at(r, j) = f.mul(inv, m.at(r, j));
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r) continue;
            const std::uint32_t v = m.at(i, c);
            if (!v) continue;
            for (std::size_t j = c; j < m.cols(); ++j)
                m.at(i, j) = f.sub(m.at(i, j), f.mul(v, m.at(r, j)));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(Matrix m) { return rref(m).size(); }

// Right-nullspace basis: vectors v with M*v = 0. Deterministic: one basis
// vector per free column, unit in that column.
inline std::vector<FVec> nullspace(Matrix m) {
    const FieldSpec& f = m.field();
    const std::vector<std::size_t> pivots = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : pivots) is_pivot[c] = true;
    std::vector<FVec> basis;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (is_pivot[c]) continue;
        FVec v(m.cols(), 0);
        v[c] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = f.neg(m.at(i, c));
        basis.push_back(std::move(v));
    }
    return basis;
}

struct LinearSolution {
    FVec particular;
    std::vector<FVec> basis;  // full solution set = particular + span(basis)
};

// Solve M*v = b. Empty optional means no solution.
inline std::optional<LinearSolution> solve_linear(const Matrix& m, const FVec& b) {
    if (b.size() != m.rows()) throw DimensionMismatch("rhs length");
    const FieldSpec& f = m.field();
    Matrix aug(m.field_ref(), m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, m.cols()) = b[i];
    }
    const std::vector<std::size_t> pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == m.cols()) return std::nullopt;  // inconsistent
    LinearSolution sol;
    sol.particular.assign(m.cols(), 0);
    for (std::size_t i = 0; i < pivots.size(); ++i) sol.particular[pivots[i]] = aug.at(i, m.cols());
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : pivots) is_pivot[c] = true;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        if (is_pivot[c]) continue;
        FVec v(m.cols(), 0);
        v[c] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = f.neg(aug.at(i, c));
        sol.basis.push_back(std::move(v));
    }
    return sol;
}

// Invertible matrix plus translation, with the inverse linear part cached.
class AffineBijection {
public:
    AffineBijection() = default;
    AffineBijection(Matrix linear, FVec translation)
        : l_(std::move(linear)), c_(std::move(translation)) {
        if (l_.rows() != l_.cols()) throw DimensionMismatch("linear part must be square");
        if (c_.size() != l_.rows()) throw DimensionMismatch("translation length");
        linv_ = invert(l_);
    }

    std::size_t dimension() const { return l_.rows(); }
    const Matrix& linear() const { return l_; }
    const Matrix& linear_inverse() const { return linv_; }
    const FVec& translation() const { return c_; }
    const FieldSpec& field() const { return l_.field(); }

    FVec forward(const FVec& v) const {
        FVec r = l_.apply(v);
        const FieldSpec& f = l_.field();
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = f.add(r[i], c_[i]);
        return r;
    }

    FVec backward(const FVec& v) const {
        if (v.size() != c_.size()) throw DimensionMismatch("vector length");
        const FieldSpec& f = l_.field();
        FVec shifted(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) shifted[i] = f.sub(v[i], c_[i]);
        return linv_.apply(shifted);
    }

    AffineBijection inverse() const {
        // (Lv + c)^-1 : v -> Linv v - Linv c
        const FieldSpec& f = l_.field();
        FVec ci = linv_.apply(c_);
        for (auto& x : ci) x = f.neg(x);
        return AffineBijection(linv_, std::move(ci));
    }

    static Matrix invert(const Matrix& m) {
        const std::size_t d = m.rows();
        Matrix aug(m.field_ref(), d, 2 * d);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) aug.at(i, j) = m.at(i, j);
            aug.at(i, d + i) = 1;
        }
        if (rref(aug).size() != d) throw Error("matrix is singular");
        Matrix inv(m.field_ref(), d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) inv.at(i, j) = aug.at(i, d + j);
        return inv;
    }

private:
    Matrix l_;
    FVec c_;
    Matrix linv_;
};

inline FVec random_vector(std::size_t d, const FieldSpec& f, Rng& rng) {
    FVec v(d);
    for (auto& x : v) x = std::uint32_t(rng.below(f.order()));
    return v;
}

namespace detail {
inline Matrix random_invertible(std::size_t d, const FieldRef& field, Rng& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Matrix m(field, d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m.at(i, j) = std::uint32_t(rng.below(field->order()));
        if (rank(m) == d) return m;
    }
    throw RngExhausted();
}
}  // namespace detail

// Uniform over invertible matrices (rejection sampling), uniform translation.
inline AffineBijection random_affine_bijection(std::size_t d, const FieldRef& field, Rng& rng) {
    if (d < 1) throw ParamRange("dimension must be >= 1");
    Matrix l = detail::random_invertible(d, field, rng);
    return AffineBijection(std::move(l), random_vector(d, *field, rng));
}

// Linear part carries an exactly-zero t x (d-t) block in rows 1..t,
// columns t+1..d; both diagonal blocks invertible.
inline AffineBijection block_affine_bijection(std::size_t d, std::size_t t, const FieldRef& field, Rng& rng) {
    if (t < 1 || t > d) throw ParamRange("block size must satisfy 1 <= t <= d");
    if (t == d) return random_affine_bijection(d, field, rng);
    Matrix top = detail::random_invertible(t, field, rng);
    Matrix bot = detail::random_invertible(d - t, field, rng);
    Matrix l(field, d, d);
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < t; ++j) l.at(i, j) = top.at(i, j);
    for (std::size_t i = 0; i < d - t; ++i) {
        for (std::size_t j = 0; j < t; ++j) l.at(t + i, j) = std::uint32_t(rng.below(field->order()));
        for (std::size_t j = 0; j < d - t; ++j) l.at(t + i, t + j) = bot.at(i, j);
    }
    return AffineBijection(std::move(l), random_vector(d, *field, rng));
}

}  // namespace pesto
