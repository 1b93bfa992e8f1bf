#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "polyinv/errors.hpp"
#include "polyinv/gf.hpp"
#include "polyinv/polygon.hpp"
#include "polyinv/rational.hpp"
#include "polyinv/ring.hpp"

namespace polyinv {

// Dense matrix over one model ring.
class ModelMatrix {
public:
    ModelMatrix() = default;
    ModelMatrix(ParamsPtr params, std::size_t rows, std::size_t cols)
        : params_(std::move(params)), rows_(rows), cols_(cols),
          e_(rows * cols, params_->zero()) {}

    const ParamsPtr& params() const { return params_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    RingElem& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const RingElem& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    static ModelMatrix identity(const ParamsPtr& params, std::size_t n) {
        ModelMatrix m(params, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = params->one();
        return m;
    }

    ModelMatrix mul(const ModelMatrix& o) const {
        ModelMatrix r(params_, rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                if (at(i, k).is_bottom() && at(i, k).prec() >= params_->max_uprec()) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    r.at(i, j) = r.at(i, j) + at(i, k) * o.at(k, j);
            }
        return r;
    }

    ModelMatrix sub(const ModelMatrix& o) const {
        ModelMatrix r(params_, rows_, cols_);
        for (std::size_t i = 0; i < rows_ * cols_; ++i) r.e_[i] = e_[i] - o.e_[i];
        return r;
    }

    ModelMatrix scale(const RingElem& c) const {
        ModelMatrix r(params_, rows_, cols_);
        for (std::size_t i = 0; i < rows_ * cols_; ++i) r.e_[i] = e_[i] * c;
        return r;
    }

    ModelMatrix frobenius_entrywise(int times = 1) const {
        int k = times % params_->residue_degree();
        if (k < 0) k += params_->residue_degree();
        ModelMatrix r = *this;
        for (int t = 0; t < k; ++t)
            for (auto& x : r.e_) x = x.frobenius();
        return r;
    }

    bool is_sigma_fixed() const {
        for (const auto& x : e_)
            if (!x.is_sigma_fixed()) return false;
        return true;
    }

    bool is_zero_at_precision() const {
        for (const auto& x : e_)
            if (!x.is_bottom()) return false;
        return true;
    }

    GFMatrix residue_matrix() const {
        GFMatrix m(&params_->gf(), rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m.at(i, j) = at(i, j).residue();
        return m;
    }

    ModelMatrix reembed(const ParamsPtr& target) const {
        ModelMatrix r(target, rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j).reembed(target);
        return r;
    }

private:
    ParamsPtr params_;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<RingElem> e_;
};

// Valuations of the diagonal Smith form over the valuation ring, sorted
// nonincreasing. rank_deficit counts diagonal positions that could not be
// distinguished from zero at working precision.
struct ElementaryDivisors {
    std::vector<Rational> vals;
    int rank_deficit = 0;
};

inline ElementaryDivisors smith_valuations(const ModelMatrix& A) {
    std::size_t r = A.rows(), c = A.cols();
    std::size_t m = std::min(r, c);
    ModelMatrix w = A;
    std::vector<Rational> vals;
    int deficit = 0;
    int N = r && c ? A.params()->ram_index() : 1;
    for (std::size_t t = 0; t < m; ++t) {
        std::optional<int> best;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < r; ++i)
            for (std::size_t j = t; j < c; ++j) {
                auto v = w.at(i, j).u_valuation();
                if (v && (!best || *v < *best)) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (!best) {
            deficit = static_cast<int>(m - t);
            break;
        }
        if (bi != t)
            for (std::size_t j = t; j < c; ++j) std::swap(w.at(t, j), w.at(bi, j));
        if (bj != t)
            for (std::size_t i = t; i < r; ++i) std::swap(w.at(i, t), w.at(i, bj));
        const RingElem pivot = w.at(t, t);
        try {
            for (std::size_t i = t + 1; i < r; ++i) {
                if (w.at(i, t).is_bottom()) continue;
                RingElem q = ring_div(w.at(i, t), pivot);
                for (std::size_t j = t; j < c; ++j)
                    w.at(i, j) = w.at(i, j) - q * w.at(t, j);
            }
            for (std::size_t j = t + 1; j < c; ++j) {
                if (w.at(t, j).is_bottom()) continue;
                RingElem q = ring_div(w.at(t, j), pivot);
                for (std::size_t i = t; i < r; ++i)
                    w.at(i, j) = w.at(i, j) - q * w.at(i, t);
            }
        } catch (const PrecisionExhausted& e) {
            throw PrecisionExhausted(std::string(e.what()) + " (pivot at row " +
                                     std::to_string(t) + ", col " + std::to_string(t) + ")");
        }
        vals.emplace_back(*best, N);
    }
    std::sort(vals.begin(), vals.end(), std::greater<Rational>());
    return {std::move(vals), deficit};
}

// v(Fitt_i) for i = 0..min(rows,cols): suffix sums of the divisor
// valuations; Fitting ideals beyond the divisor list have valuation 0.
inline std::vector<Rational> fitting_valuations(const ModelMatrix& A) {
    ElementaryDivisors ed = smith_valuations(A);
    if (ed.rank_deficit > 0)
        throw PrecisionExhausted("Fitting valuations undetectable: matrix has " +
                                 std::to_string(ed.rank_deficit) +
                                 " divisors indistinguishable from zero");
    std::size_t m = std::min(A.rows(), A.cols());
    std::vector<Rational> out(m + 1, Rational(0));
    for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t j = i; j < ed.vals.size(); ++j) out[i] += ed.vals[j];
    return out;
}

namespace detail {

inline RingElem det_cofactor(const ModelMatrix& A, std::vector<std::size_t> rows,
                             std::vector<std::size_t> cols) {
    const auto& P = A.params();
    if (rows.empty()) return P->one();
    if (rows.size() == 1) return A.at(rows[0], cols[0]);
    RingElem acc = P->zero();
    std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        std::vector<std::size_t> sub_cols;
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (j != k) sub_cols.push_back(cols[j]);
        RingElem term = A.at(rows[0], cols[k]) * det_cofactor(A, sub_rows, sub_cols);
        acc = (k % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

inline void subsets_of_size(std::size_t n, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        std::size_t i = k;
        while (i-- > 0) {
            if (idx[i] + (k - i) < n) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
        if (k == 0) return;
    }
}

}  // namespace detail

// Independent oracle for fitting_valuations: v(Fitt_i) as the minimum
// valuation over all (min(r,c)-i)-minors, by exact cofactor expansion.
inline std::vector<Rational> minor_fitting_oracle(const ModelMatrix& A) {
    std::size_t r = A.rows(), c = A.cols();
    if (r > 5 || c > 5) throw TooLarge("minor oracle limited to 5x5");
    std::size_t m = std::min(r, c);
    std::vector<Rational> out;
    for (std::size_t i = 0; i <= m; ++i) {
        std::size_t k = m - i;
        if (k == 0) {
            out.emplace_back(0);
            continue;
        }
        std::optional<Rational> best;
        std::optional<Rational> best_bottom_prec;
        detail::subsets_of_size(r, k, [&](const std::vector<std::size_t>& rows) {
            detail::subsets_of_size(c, k, [&](const std::vector<std::size_t>& cols) {
                RingElem d = detail::det_cofactor(A, rows, cols);
                auto v = d.valuation();
                if (v) {
                    if (!best || *v < *best) best = *v;
                } else {
                    Rational pb(d.prec(), A.params()->ram_index());
                    if (!best_bottom_prec || pb < *best_bottom_prec) best_bottom_prec = pb;
                }
            });
        });
        if (!best) throw PrecisionExhausted("all minors of size " + std::to_string(k) +
                                            " vanish at precision");
        if (best_bottom_prec && *best > *best_bottom_prec)
            throw PrecisionExhausted("minor valuation not decidable at precision");
        out.push_back(*best);
    }
    return out;
}

// Graded pi-torsion dimensions g_j = dim ker(Nbar^j) - dim ker(Nbar^(j-1))
// for j = 1..e over the residue field; requires Nbar^e = 0.
inline std::vector<int> kernel_rank_chain(const GFMatrix& Nbar, int e) {
    if (Nbar.rows() != Nbar.cols()) throw InputError("kernel_rank_chain requires a square matrix");
    std::size_t m = Nbar.rows();
    std::vector<int> g;
    GFMatrix power = GFMatrix::identity(&Nbar.ctx(), m);
    std::size_t prev_rank = m;
    for (int j = 1; j <= e; ++j) {
        power = power.mul(Nbar);
        std::size_t rk = power.rank();
        g.push_back(static_cast<int>(prev_rank - rk));
        prev_rank = rk;
    }
    if (prev_rank != 0) throw NotNilpotentAtE("matrix is not nilpotent at exponent e");
    return g;
}

// Matrix of phi^m where phi = A * sigma: A sigma(A) ... sigma^(m-1)(A).
inline ModelMatrix semilinear_power(const ModelMatrix& A, int m) {
    if (m < 1) throw InputError("semilinear power requires m >= 1");
    ModelMatrix B = A;
    ModelMatrix cur = A;
    for (int k = 1; k < m; ++k) {
        cur = cur.frobenius_entrywise();
        B = B.mul(cur);
    }
    return B;
}

namespace detail {

// Samuelson-Berkowitz division-free characteristic polynomial; returns the
// n+1 coefficients of det(lambda*I - A) from the leading 1 downwards.
inline std::vector<RingElem> berkowitz_charpoly(const ModelMatrix& A) {
    const auto& P = A.params();
    std::size_t n = A.rows();
    if (n != A.cols()) throw InputError("characteristic polynomial of a non-square matrix");
    std::vector<RingElem> V = {P->one()};
    if (n == 0) return V;
    V.push_back(-A.at(0, 0));
    for (std::size_t r = 1; r < n; ++r) {
        // S_k = Row_r * B^k * Col_r over the leading r x r block B
        std::vector<RingElem> S;
        std::vector<RingElem> w(r);
        for (std::size_t i = 0; i < r; ++i) w[i] = A.at(i, r);
        for (std::size_t k = 0; k < r; ++k) {
            RingElem s = P->zero();
            for (std::size_t j = 0; j < r; ++j) s = s + A.at(r, j) * w[j];
            S.push_back(s);
            if (k + 1 < r) {
                std::vector<RingElem> w2(r, P->zero());
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < r; ++j) w2[i] = w2[i] + A.at(i, j) * w[j];
                w = std::move(w2);
            }
        }
        std::vector<RingElem> t;  // first column of the Toeplitz operator
        t.push_back(P->one());
        t.push_back(-A.at(r, r));
        for (std::size_t k = 0; k < r; ++k) t.push_back(-S[k]);
        std::vector<RingElem> Vn(r + 2, P->zero());
        for (std::size_t i = 0; i < Vn.size(); ++i)
            for (std::size_t j = 0; j < V.size() && j <= i; ++j)
                if (i - j < t.size()) Vn[i] = Vn[i] + t[i - j] * V[j];
        V = std::move(Vn);
    }
    return V;
}

// Lower convex hull slopes of the points (i, vals[i]), each repeated by its
// horizontal run, returned nonincreasing. Missing (bottom) values carry a
// precision bound that the hull must stay below.
inline std::vector<Rational> newton_polygon_slopes(
    const std::vector<MaybeRational>& vals, const std::vector<Rational>& bottom_bounds) {
    std::size_t n = vals.size() - 1;
    std::vector<std::pair<Rational, Rational>> pts;
    for (std::size_t i = 0; i <= n; ++i)
        if (vals[i]) pts.emplace_back(Rational(static_cast<long>(i)), *vals[i]);
    if (!vals[0] || !vals[n])
        throw PrecisionExhausted("leading or constant coefficient vanishes at precision");
    // lower convex hull (monotone chain)
    std::vector<std::pair<Rational, Rational>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& [x0, y0] = hull[hull.size() - 2];
            const auto& [x1, y1] = hull[hull.size() - 1];
            if ((y1 - y0) * (pt.first - x1) >= (pt.second - y1) * (x1 - x0))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    // the hull must be certain: at every bottom index its value must not
    // exceed the precision bound of the unknown coefficient
    auto hull_value = [&](const Rational& x) -> Rational {
        for (std::size_t i = 1; i < hull.size(); ++i)
            if (x <= hull[i].first) {
                const auto& [x0, y0] = hull[i - 1];
                const auto& [x1, y1] = hull[i];
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        return hull.back().second;
    };
    for (std::size_t i = 0; i <= n; ++i)
        if (!vals[i] && hull_value(Rational(static_cast<long>(i))) > bottom_bounds[i])
            throw PrecisionExhausted("Newton polygon not determined at precision");
    std::vector<Rational> slopes;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        Rational dx = hull[i].first - hull[i - 1].first;
        Rational s = (hull[i].second - hull[i - 1].second) / dx;
        long reps = rat_num(dx).convert_to<long>();
        for (long k = 0; k < reps; ++k) slopes.push_back(s);
    }
    std::sort(slopes.begin(), slopes.end(), std::greater<Rational>());
    return slopes;
}

}  // namespace detail

enum class NewtonMode { charpoly, limit };

// Slopes of the Newton polygon of the F-crystal with matrix A (phi = A*sigma),
// nonincreasing. charpoly mode requires sigma-fixed entries; limit mode
// iterates (1/m) smith(phi^m) with m doubling until within tol, then rounds
// to denominators bounded by the rank.
inline std::vector<Rational> newton_slopes(const ModelMatrix& A, NewtonMode mode,
                                           const Rational& tol = Rational(1, 24)) {
    std::size_t n = A.rows();
    if (n != A.cols()) throw InputError("newton_slopes requires a square matrix");
    if (n == 0) return {};
    if (mode == NewtonMode::charpoly) {
        if (!A.is_sigma_fixed())
            throw ValidationError("charpoly mode requires sigma-fixed entries");
        std::vector<RingElem> coeffs = detail::berkowitz_charpoly(A);
        std::vector<MaybeRational> vals;
        std::vector<Rational> bounds;
        for (const auto& c : coeffs) {
            vals.push_back(c.valuation());
            bounds.emplace_back(c.prec(), A.params()->ram_index());
        }
        return detail::newton_polygon_slopes(vals, bounds);
    }
    // limit mode: raise the working modulus so that deep powers stay visible
    ElementaryDivisors ed0 = smith_valuations(A);
    if (ed0.rank_deficit > 0)
        throw PrecisionExhausted("phi is singular at precision; Newton slopes undefined");
    Rational detval = 0;
    for (const auto& v : ed0.vals) detval += v;
    const int m_max = 256;
    const auto& P = A.params();
    int m_need = P->precision_m();
    {
        Int need = rat_ceil(detval) * m_max + 8;
        if (need > P->precision_m()) m_need = need.convert_to<int>();
    }
    ParamsPtr W = P->precision_m() >= m_need
                      ? P
                      : ModelRingParams::create(P->p(), P->residue_degree(), P->ram_index(),
                                                m_need, P->residue_poly());
    ModelMatrix base = A.reembed(W);
    ModelMatrix power = base;  // phi^m with m = 1
    int m = 1;
    auto polygon_of = [&](const ModelMatrix& B, int mm) {
        ElementaryDivisors ed = smith_valuations(B);
        if (ed.rank_deficit > 0)
            throw PrecisionExhausted("phi^m singular at precision in limit mode");
        std::vector<Rational> s;
        for (const auto& v : ed.vals) s.push_back(v / mm);
        return ConcavePolygon(std::move(s));
    };
    ConcavePolygon prev = polygon_of(power, m);
    while (m < m_max) {
        power = power.mul(power.frobenius_entrywise(m));
        m *= 2;
        ConcavePolygon cur = polygon_of(power, m);
        Rational dist = function_sup_distance(to_function(prev), to_function(cur));
        if (dist < tol) {
            // round slopes to denominators bounded by the rank
            std::vector<Rational> rounded;
            Rational sum = 0;
            for (const auto& s : cur.slopes()) {
                Rational rs = round_to_denominator(s, Int(n));
                rounded.push_back(rs);
                sum += rs;
            }
            std::sort(rounded.begin(), rounded.end(), std::greater<Rational>());
            if (sum != detval) throw NoConvergence(m);
            return rounded;
        }
        prev = cur;
    }
    throw NoConvergence(m_max);
}

// --- fraction-field elimination ------------------------------------------

using FieldMatrix = std::vector<std::vector<FieldElem>>;

inline FieldMatrix to_field_matrix(const ModelMatrix& A) {
    FieldMatrix F(A.rows(), std::vector<FieldElem>(A.cols()));
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) F[i][j] = FieldElem(A.at(i, j));
    return F;
}

// Rank over the fraction field by valuation-pivot elimination. Entries that
// cannot be told from zero stop the elimination; if any remain with low
// certified precision the caller may treat the result as undecided.
inline std::size_t field_rank(FieldMatrix w) {
    std::size_t r = w.size();
    std::size_t c = r ? w[0].size() : 0;
    std::size_t rank = 0;
    for (std::size_t t = 0; t < std::min(r, c); ++t) {
        std::optional<Rational> best;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < r; ++i)
            for (std::size_t j = t; j < c; ++j) {
                auto v = w[i][j].valuation();
                if (v && (!best || *v < *best)) {
                    best = *v;
                    bi = i;
                    bj = j;
                }
            }
        if (!best) break;
        std::swap(w[t], w[bi]);
        if (bj != t)
            for (std::size_t i = 0; i < r; ++i) std::swap(w[i][t], w[i][bj]);
        for (std::size_t i = t + 1; i < r; ++i) {
            if (w[i][t].is_bottom()) continue;
            FieldElem q = w[i][t] / w[t][t];
            for (std::size_t j = t; j < c; ++j) w[i][j] = w[i][j] - q * w[t][j];
        }
        ++rank;
    }
    return rank;
}

// Kernel basis over the fraction field of a square or rectangular matrix.
inline std::vector<std::vector<FieldElem>> field_kernel_basis(const ModelMatrix& A) {
    FieldMatrix w = to_field_matrix(A);
    std::size_t r = A.rows(), c = A.cols();
    std::vector<std::size_t> colperm(c);
    for (std::size_t j = 0; j < c; ++j) colperm[j] = j;
    std::size_t rank = 0;
    for (std::size_t t = 0; t < std::min(r, c); ++t) {
        std::optional<Rational> best;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < r; ++i)
            for (std::size_t j = t; j < c; ++j) {
                auto v = w[i][j].valuation();
                if (v && (!best || *v < *best)) {
                    best = *v;
                    bi = i;
                    bj = j;
                }
            }
        if (!best) break;
        std::swap(w[t], w[bi]);
        if (bj != t) {
            for (std::size_t i = 0; i < r; ++i) std::swap(w[i][t], w[i][bj]);
            std::swap(colperm[t], colperm[bj]);
        }
        for (std::size_t i = t + 1; i < r; ++i) {
            if (w[i][t].is_bottom()) continue;
            FieldElem q = w[i][t] / w[t][t];
            for (std::size_t j = t; j < c; ++j) w[i][j] = w[i][j] - q * w[t][j];
        }
        ++rank;
    }
    const auto& P = A.params();
    FieldElem one(P->one());
    FieldElem zero(P->zero());
    std::vector<std::vector<FieldElem>> basis;
    for (std::size_t f = rank; f < c; ++f) {
        std::vector<FieldElem> x(c, zero);
        x[f] = one;
        for (std::size_t t = rank; t-- > 0;) {
            FieldElem s = zero;
            for (std::size_t j = t + 1; j < c; ++j) {
                if (w[t][j].is_bottom()) continue;
                s = s + w[t][j] * x[j];
            }
            x[t] = -(s / w[t][t]);
        }
        std::vector<FieldElem> v(c);
        for (std::size_t j = 0; j < c; ++j) v[colperm[j]] = x[j];
        basis.push_back(std::move(v));
    }
    return basis;
}

// Solves A X = B over the fraction field (A square, provably invertible).
inline std::vector<std::vector<FieldElem>> field_solve(const ModelMatrix& A,
                                                       const ModelMatrix& B) {
    std::size_t n = A.rows();
    if (A.cols() != n || B.rows() != n) throw InputError("field_solve dimension mismatch");
    std::size_t bc = B.cols();
    FieldMatrix w(n, std::vector<FieldElem>(n + bc));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) w[i][j] = FieldElem(A.at(i, j));
        for (std::size_t j = 0; j < bc; ++j) w[i][n + j] = FieldElem(B.at(i, j));
    }
    std::vector<std::size_t> colperm(n);
    for (std::size_t j = 0; j < n; ++j) colperm[j] = j;
    for (std::size_t t = 0; t < n; ++t) {
        std::optional<Rational> best;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < n; ++i)
            for (std::size_t j = t; j < n; ++j) {
                auto v = w[i][j].valuation();
                if (v && (!best || *v < *best)) {
                    best = *v;
                    bi = i;
                    bj = j;
                }
            }
        if (!best) throw PrecisionExhausted("matrix singular at precision in field_solve");
        std::swap(w[t], w[bi]);
        if (bj != t) {
            for (std::size_t i = 0; i < n; ++i) std::swap(w[i][t], w[i][bj]);
            std::swap(colperm[t], colperm[bj]);
        }
        for (std::size_t i = t + 1; i < n; ++i) {
            if (w[i][t].is_bottom()) continue;
            FieldElem q = w[i][t] / w[t][t];
            for (std::size_t j = t; j < n + bc; ++j) w[i][j] = w[i][j] - q * w[t][j];
        }
    }
    const auto& P = A.params();
    std::vector<std::vector<FieldElem>> X(n, std::vector<FieldElem>(bc, FieldElem(P->zero())));
    for (std::size_t col = 0; col < bc; ++col) {
        std::vector<FieldElem> x(n, FieldElem(P->zero()));
        for (std::size_t t = n; t-- > 0;) {
            FieldElem s = w[t][n + col];
            for (std::size_t j = t + 1; j < n; ++j) {
                if (w[t][j].is_bottom()) continue;
                s = s - w[t][j] * x[j];
            }
            x[t] = s / w[t][t];
        }
        for (std::size_t j = 0; j < n; ++j) X[colperm[j]][col] = x[j];
    }
    return X;
}

// p * A^{-1} as an integral matrix; throws if a quotient entry is not
// integral (the cokernel of A would then not be p-torsion).
inline ModelMatrix p_times_inverse(const ModelMatrix& A) {
    const auto& P = A.params();
    ModelMatrix pI = ModelMatrix::identity(P, A.rows()).scale(P->from_int(P->p()));
    auto X = field_solve(A, pI);
    ModelMatrix R(P, A.rows(), A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.rows(); ++j) R.at(i, j) = X[i][j].to_ring();
    return R;
}

// Basis of the saturated lattice M cap ker_K(C), as primitive columns whose
// residues are linearly independent.
inline std::vector<std::vector<RingElem>> saturated_kernel_of(const ModelMatrix& C) {
    const auto& P = C.params();
    std::size_t n = C.rows();
    auto kern = field_kernel_basis(C);
    std::size_t k = kern.size();
    if (k == 0) return {};
    // clear denominators and make each column primitive
    std::vector<std::vector<RingElem>> W(k, std::vector<RingElem>(n));
    for (std::size_t c = 0; c < k; ++c) {
        int max_shift = 0;
        for (const auto& x : kern[c]) max_shift = std::max(max_shift, x.shift());
        std::vector<RingElem> col(n);
        std::optional<int> minv;
        for (std::size_t i = 0; i < n; ++i) {
            FieldElem lifted = kern[c][i] * FieldElem(P->u_pow(max_shift));
            col[i] = lifted.to_ring();
            auto v = col[i].u_valuation();
            if (v && (!minv || *v < *minv)) minv = *v;
        }
        if (!minv) throw PrecisionExhausted("kernel vector vanished at precision");
        for (auto& x : col) x = x.div_u_exact(*minv);
        W[c] = std::move(col);
    }
    // column reduction until the residues become independent
    const GFContext& gf = P->gf();
    int guard = P->max_uprec() * static_cast<int>(k) + 8;
    while (guard-- > 0) {
        GFMatrix Wbar(&gf, n, k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < k; ++c) Wbar.at(i, c) = W[c][i].residue();
        if (Wbar.rank() == k) return W;
        // find a residue dependency: kernel vector of Wbar
        std::vector<GFElem> z(k, gf.zero());
        {
            GFMatrix w2 = Wbar;
            std::size_t rank = 0;
            std::vector<std::size_t> pivcol;
            std::vector<std::size_t> colperm(k);
            for (std::size_t j = 0; j < k; ++j) colperm[j] = j;
            for (std::size_t tcol = 0; tcol < k && rank < n; ++tcol) {
                std::size_t pi = n;
                for (std::size_t i = rank; i < n; ++i)
                    if (!gf.is_zero(w2.at(i, tcol))) {
                        pi = i;
                        break;
                    }
                if (pi == n) {
                    // free column: back-substitute a dependency
                    z[tcol] = gf.one();
                    for (std::size_t rr = rank; rr-- > 0;) {
                        GFElem s = gf.zero();
                        for (std::size_t j = pivcol[rr] + 1; j <= tcol; ++j)
                            s = gf.add(s, gf.mul(w2.at(rr, j), z[j]));
                        z[pivcol[rr]] = gf.neg(s);
                    }
                    break;
                }
                if (pi != rank)
                    for (std::size_t j = 0; j < k; ++j) std::swap(w2.at(pi, j), w2.at(rank, j));
                GFElem inv = gf.inv(w2.at(rank, tcol));
                for (std::size_t j = 0; j < k; ++j)
                    w2.at(rank, j) = gf.mul(w2.at(rank, j), inv);
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == rank || gf.is_zero(w2.at(i, tcol))) continue;
                    GFElem ff = w2.at(i, tcol);
                    for (std::size_t j = 0; j < k; ++j)
                        w2.at(i, j) = gf.sub(w2.at(i, j), gf.mul(ff, w2.at(rank, j)));
                }
                pivcol.push_back(tcol);
                ++rank;
            }
        }
        // combine columns with the dependency; replace the last involved one
        std::size_t j0 = k;
        for (std::size_t j = k; j-- > 0;)
            if (!gf.is_zero(z[j])) {
                j0 = j;
                break;
            }
        if (j0 == k) throw InternalMismatch("residue dependency expected but not found");
        std::vector<RingElem> comb(n, P->zero());
        for (std::size_t j = 0; j < k; ++j) {
            if (gf.is_zero(z[j])) continue;
            RingElem cj = RingElem(P, {P->gr_lift(z[j])}, P->max_uprec());
            for (std::size_t i = 0; i < n; ++i) comb[i] = comb[i] + cj * W[j][i];
        }
        std::optional<int> minv;
        for (const auto& x : comb) {
            auto v = x.u_valuation();
            if (v && (!minv || *v < *minv)) minv = *v;
        }
        if (!minv) throw PrecisionExhausted("saturation step vanished at precision");
        if (*minv < 1) throw InternalMismatch("saturation step did not gain valuation");
        for (auto& x : comb) x = x.div_u_exact(*minv);
        W[j0] = std::move(comb);
    }
    throw PrecisionExhausted("saturation did not stabilise within the precision budget");
}

inline std::vector<std::vector<RingElem>> saturated_kernel_basis(const ModelMatrix& A,
                                                                 const RingElem& t) {
    return saturated_kernel_of(A.sub(ModelMatrix::identity(A.params(), A.rows()).scale(t)));
}

// Ranks of the saturated lattices M cap ker_K(A - tau(pi)) per eigenvalue.
inline std::vector<int> saturation_ranks(const ModelMatrix& A,
                                         const std::vector<RingElem>& eigenvalues) {
    std::size_t n = A.rows();
    if (A.cols() != n) throw InputError("saturation_ranks requires a square matrix");
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        for (std::size_t j = i + 1; j < eigenvalues.size(); ++j)
            if ((eigenvalues[i] - eigenvalues[j]).is_bottom())
                throw EigenvalueCollision("eigenvalues indistinguishable at precision");
    const auto& P = A.params();
    // A must satisfy prod (A - t I) = 0 at precision
    ModelMatrix prod = ModelMatrix::identity(P, n);
    for (const auto& t : eigenvalues)
        prod = prod.mul(A.sub(ModelMatrix::identity(P, n).scale(t)));
    if (!prod.is_zero_at_precision())
        throw ValidationError("matrix does not satisfy its split eigenvalue polynomial");
    std::vector<int> ranks;
    for (const auto& t : eigenvalues) {
        ModelMatrix C = A.sub(ModelMatrix::identity(P, n).scale(t));
        ranks.push_back(static_cast<int>(n - field_rank(to_field_matrix(C))));
    }
    return ranks;
}

// Column-only Smith reduction of a fraction-field matrix: returns the
// diagonal valuations (nullopt for positions that vanish at precision) and
// the integral unimodular column transform V with Y V in echelon form.
struct ColumnSmith {
    std::vector<MaybeRational> diag;
    ModelMatrix V;
};

inline ColumnSmith column_transform_snf(FieldMatrix Y, const ParamsPtr& P) {
    std::size_t r = Y.size();
    std::size_t c = r ? Y[0].size() : 0;
    ModelMatrix V = ModelMatrix::identity(P, c);
    std::size_t m = std::min(r, c);
    std::vector<MaybeRational> diag(c, std::nullopt);
    for (std::size_t t = 0; t < m; ++t) {
        std::optional<Rational> best;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < r; ++i)
            for (std::size_t j = t; j < c; ++j) {
                auto v = Y[i][j].valuation();
                if (v && (!best || *v < *best)) {
                    best = *v;
                    bi = i;
                    bj = j;
                }
            }
        if (!best) break;
        std::swap(Y[t], Y[bi]);
        if (bj != t) {
            for (std::size_t i = 0; i < r; ++i) std::swap(Y[i][t], Y[i][bj]);
            for (std::size_t i = 0; i < c; ++i) std::swap(V.at(i, t), V.at(i, bj));
        }
        for (std::size_t i = t + 1; i < r; ++i) {
            if (Y[i][t].is_bottom()) continue;
            FieldElem q = Y[i][t] / Y[t][t];
            for (std::size_t j = t; j < c; ++j) Y[i][j] = Y[i][j] - q * Y[t][j];
        }
        for (std::size_t j = t + 1; j < c; ++j) {
            if (Y[t][j].is_bottom()) continue;
            FieldElem q = Y[t][j] / Y[t][t];
            RingElem qr = q.to_ring();  // integral: pivot has minimal valuation
            for (std::size_t i = t; i < r; ++i) Y[i][j] = Y[i][j] - q * Y[i][t];
            for (std::size_t i = 0; i < c; ++i)
                V.at(i, j) = V.at(i, j) - qr * V.at(i, t);
        }
        diag[t] = *best;
    }
    return {std::move(diag), std::move(V)};
}

}  // namespace polyinv
