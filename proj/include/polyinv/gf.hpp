#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "polyinv/errors.hpp"
#include "polyinv/rational.hpp"

namespace polyinv {

// Arithmetic in the residue field F_{p^{f'}}, realised as F_p[y]/(g) for a
// monic irreducible g. Elements are coefficient vectors of length f'.
using GFElem = std::vector<Int>;

class GFContext {
public:
    GFContext() = default;
    GFContext(Int p, std::vector<Int> poly) : p_(std::move(p)), poly_(std::move(poly)) {
        deg_ = poly_.size() - 1;
        for (auto& c : poly_) c = mod_p(c);
    }

    const Int& p() const { return p_; }
    std::size_t degree() const { return deg_; }

    Int mod_p(const Int& a) const {
        Int r = a % p_;
        if (r < 0) r += p_;
        return r;
    }

    GFElem zero() const { return GFElem(deg_, Int(0)); }
    GFElem one() const {
        GFElem e = zero();
        if (deg_ > 0) e[0] = 1;
        return e;
    }
    GFElem from_int(const Int& a) const {
        GFElem e = zero();
        if (deg_ > 0) e[0] = mod_p(a);
        return e;
    }

    bool is_zero(const GFElem& a) const {
        return std::all_of(a.begin(), a.end(), [](const Int& c) { return c == 0; });
    }

    GFElem add(const GFElem& a, const GFElem& b) const {
        GFElem r(deg_);
        for (std::size_t i = 0; i < deg_; ++i) r[i] = mod_p(a[i] + b[i]);
        return r;
    }
    GFElem sub(const GFElem& a, const GFElem& b) const {
        GFElem r(deg_);
        for (std::size_t i = 0; i < deg_; ++i) r[i] = mod_p(a[i] - b[i]);
        return r;
    }
    GFElem neg(const GFElem& a) const {
        GFElem r(deg_);
        for (std::size_t i = 0; i < deg_; ++i) r[i] = mod_p(-a[i]);
        return r;
    }

    GFElem mul(const GFElem& a, const GFElem& b) const {
        std::vector<Int> prod(2 * deg_ > 0 ? 2 * deg_ - 1 : 0, Int(0));
        for (std::size_t i = 0; i < deg_; ++i) {
            if (a[i] == 0) continue;
            for (std::size_t j = 0; j < deg_; ++j)
                if (b[j] != 0) prod[i + j] = mod_p(prod[i + j] + a[i] * b[j]);
        }
        return reduce(prod);
    }

    GFElem pow(GFElem base, Int e) const {
        GFElem r = one();
        while (e > 0) {
            if ((e & 1) != 0) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    }

    // Inverse via Fermat: a^(q-2). Throws on zero.
    GFElem inv(const GFElem& a) const {
        if (is_zero(a)) throw Error("inverse of zero in residue field");
        Int q = 1;
        for (std::size_t i = 0; i < deg_; ++i) q *= p_;
        return pow(a, q - 2);
    }

private:
    GFElem reduce(std::vector<Int> prod) const {
        // reduce mod the monic poly_ of degree deg_
        for (std::size_t k = prod.size(); k-- > deg_;) {
            Int c = prod[k];
            if (c == 0) continue;
            prod[k] = 0;
            for (std::size_t j = 0; j < deg_; ++j)
                prod[k - deg_ + j] = mod_p(prod[k - deg_ + j] - c * poly_[j]);
        }
        prod.resize(deg_, Int(0));
        return prod;
    }

    Int p_ = 2;
    std::vector<Int> poly_;  // monic, length deg_+1
    std::size_t deg_ = 1;
};

// Dense matrix over F_{p^{f'}} with just the eliminations the invariants
// need: rank, kernel dimensions, and quotient actions.
class GFMatrix {
public:
    GFMatrix() = default;
    GFMatrix(const GFContext* ctx, std::size_t rows, std::size_t cols)
        : ctx_(ctx), rows_(rows), cols_(cols), e_(rows * cols, ctx->zero()) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const GFContext& ctx() const { return *ctx_; }

    GFElem& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const GFElem& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    static GFMatrix identity(const GFContext* ctx, std::size_t n) {
        GFMatrix m(ctx, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = ctx->one();
        return m;
    }

    GFMatrix mul(const GFMatrix& o) const {
        GFMatrix r(ctx_, rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                if (ctx_->is_zero(at(i, k))) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    r.at(i, j) = ctx_->add(r.at(i, j), ctx_->mul(at(i, k), o.at(k, j)));
            }
        return r;
    }

    bool is_zero() const {
        for (const auto& x : e_)
            if (!ctx_->is_zero(x)) return false;
        return true;
    }

    std::size_t rank() const { return GFMatrix(*this).rref_in_place(); }

    GFMatrix transpose() const {
        GFMatrix t(ctx_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    // In-place row reduction; returns the rank.
    std::size_t rref_in_place() {
        std::size_t pr = 0;
        for (std::size_t pc = 0; pc < cols_ && pr < rows_; ++pc) {
            std::size_t piv = rows_;
            for (std::size_t i = pr; i < rows_; ++i)
                if (!ctx_->is_zero(at(i, pc))) {
                    piv = i;
                    break;
                }
            if (piv == rows_) continue;
            if (piv != pr)
                for (std::size_t j = 0; j < cols_; ++j) std::swap(at(piv, j), at(pr, j));
            GFElem inv = ctx_->inv(at(pr, pc));
            for (std::size_t j = 0; j < cols_; ++j) at(pr, j) = ctx_->mul(at(pr, j), inv);
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == pr || ctx_->is_zero(at(i, pc))) continue;
                GFElem f = at(i, pc);
                for (std::size_t j = 0; j < cols_; ++j)
                    at(i, j) = ctx_->sub(at(i, j), ctx_->mul(f, at(pr, j)));
            }
            ++pr;
        }
        return pr;
    }

private:
    const GFContext* ctx_ = nullptr;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<GFElem> e_;
};

// Action induced on the quotient k^m / span(image) by a matrix commuting
// with the subspace. Returns the matrix on a complement basis of standard
// vectors (the non-pivot coordinates of the column echelon of the image).
struct QuotientSpace {
    std::vector<std::size_t> complement;  // indices of standard basis vectors
    GFMatrix action;                      // size complement x complement
};

inline QuotientSpace quotient_action(const GFMatrix& image_cols, const GFMatrix& op) {
    const GFContext& ctx = image_cols.ctx();
    std::size_t m = image_cols.rows();
    // column echelon of the image: row-reduce the transpose
    GFMatrix t = image_cols.transpose();
    std::size_t r = t.rref_in_place();
    std::vector<std::size_t> pivots;
    {
        std::size_t j = 0;
        for (std::size_t i = 0; i < r; ++i) {
            while (j < m && ctx.is_zero(t.at(i, j))) ++j;
            pivots.push_back(j);
        }
    }
    std::vector<bool> is_pivot(m, false);
    for (auto jp : pivots) is_pivot[jp] = true;
    QuotientSpace q;
    for (std::size_t j = 0; j < m; ++j)
        if (!is_pivot[j]) q.complement.push_back(j);
    std::size_t qd = q.complement.size();
    q.action = GFMatrix(&ctx, qd, qd);
    for (std::size_t c = 0; c < qd; ++c) {
        // image of the c-th complement vector under op, reduced mod the span
        std::vector<GFElem> v(m);
        for (std::size_t i = 0; i < m; ++i) v[i] = op.at(i, q.complement[c]);
        for (std::size_t i = 0; i < r; ++i) {
            GFElem f = v[pivots[i]];
            if (ctx.is_zero(f)) continue;
            for (std::size_t j = 0; j < m; ++j) v[j] = ctx.sub(v[j], ctx.mul(f, t.at(i, j)));
        }
        for (std::size_t rr = 0; rr < qd; ++rr) q.action.at(rr, c) = v[q.complement[rr]];
    }
    return q;
}

}  // namespace polyinv
