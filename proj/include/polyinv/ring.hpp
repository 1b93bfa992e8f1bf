#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polyinv/errors.hpp"
#include "polyinv/gf.hpp"
#include "polyinv/rational.hpp"

namespace polyinv {

// Coefficient of one u-slot: an element of the Galois ring
// W(F_{p^{f'}}) / p^M = (Z/p^M)[y]/(g), stored as f' integers mod p^M.
using GRElem = std::vector<Int>;

class RingElem;

namespace detail {

// F_p[y] helpers used by the irreducibility check; little-endian coeffs.
inline std::vector<Int> poly_trim(std::vector<Int> a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

inline std::vector<Int> poly_mod(std::vector<Int> a, const std::vector<Int>& g, const Int& p) {
    auto modp = [&](const Int& x) {
        Int r = x % p;
        if (r < 0) r += p;
        return r;
    };
    for (auto& c : a) c = modp(c);
    std::size_t dg = g.size() - 1;
    for (std::size_t k = a.size(); k-- > dg;) {
        Int c = a[k];
        if (c == 0) continue;
        a[k] = 0;
        for (std::size_t j = 0; j < dg; ++j) a[k - dg + j] = modp(a[k - dg + j] - c * g[j]);
    }
    a.resize(dg, Int(0));
    return a;
}

inline std::vector<Int> poly_mulmod(const std::vector<Int>& a, const std::vector<Int>& b,
                                    const std::vector<Int>& g, const Int& p) {
    std::vector<Int> prod(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] += a[i] * b[j];
    }
    return poly_mod(std::move(prod), g, p);
}

// x^e mod (g, p)
inline std::vector<Int> poly_xpowmod(Int e, const std::vector<Int>& g, const Int& p) {
    std::size_t dg = g.size() - 1;
    std::vector<Int> result(dg, Int(0)), base(dg, Int(0));
    result[0] = 1;
    if (dg == 1) {
        base = poly_mod({Int(0), Int(1)}, g, p);
    } else {
        base[1] = 1;
    }
    while (e > 0) {
        if ((e & 1) != 0) result = poly_mulmod(result, base, g, p);
        base = poly_mulmod(base, base, g, p);
        e >>= 1;
    }
    return result;
}

inline std::vector<Int> poly_gcd(std::vector<Int> a, std::vector<Int> b, const Int& p) {
    auto modp = [&](const Int& x) {
        Int r = x % p;
        if (r < 0) r += p;
        return r;
    };
    a = poly_trim(std::move(a));
    b = poly_trim(std::move(b));
    while (!b.empty()) {
        // a mod b with b made monic
        Int lead_inv = 1;
        {
            // Fermat inverse mod p
            Int base = b.back(), e = p - 2, r = 1;
            while (e > 0) {
                if ((e & 1) != 0) r = modp(r * base);
                base = modp(base * base);
                e >>= 1;
            }
            lead_inv = r;
        }
        std::vector<Int> bm = b;
        for (auto& c : bm) c = modp(c * lead_inv);
        while (a.size() >= bm.size() && !a.empty()) {
            Int c = a.back();
            std::size_t off = a.size() - bm.size();
            for (std::size_t j = 0; j < bm.size(); ++j) a[off + j] = modp(a[off + j] - c * bm[j]);
            a = poly_trim(std::move(a));
        }
        std::swap(a, b);
    }
    return a;
}

inline bool is_probable_prime(const Int& n) {
    if (n < 2) return false;
    for (int q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    Int d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        Int x = boost::multiprecision::powm(Int(a), d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = x * x % n;
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

inline bool is_irreducible_mod_p(const std::vector<Int>& g, const Int& p) {
    std::size_t f = g.size() - 1;
    if (f == 0) return false;
    // x^(p^f) == x mod g
    Int pf = 1;
    for (std::size_t i = 0; i < f; ++i) pf *= p;
    std::vector<Int> xq = poly_xpowmod(pf, g, p);
    std::vector<Int> x = poly_mod({Int(0), Int(1)}, g, p);
    if (poly_trim([&] {
            std::vector<Int> d(xq.size());
            for (std::size_t i = 0; i < xq.size(); ++i) d[i] = (xq[i] - x[i]) % p;
            return d;
        }()) != std::vector<Int>{})
        return false;
    // gcd(x^(p^(f/q)) - x, g) == 1 for every prime q | f
    for (std::size_t q = 2; q <= f; ++q) {
        if (f % q != 0) continue;
        bool q_prime = true;
        for (std::size_t t = 2; t * t <= q; ++t)
            if (q % t == 0) q_prime = false;
        if (!q_prime) continue;
        Int pe = 1;
        for (std::size_t i = 0; i < f / q; ++i) pe *= p;
        std::vector<Int> xe = poly_xpowmod(pe, g, p);
        std::vector<Int> diff(std::max<std::size_t>(xe.size(), 2), Int(0));
        for (std::size_t i = 0; i < xe.size(); ++i) diff[i] = xe[i];
        diff[1] -= 1;
        auto gg = poly_gcd(diff, g, p);
        if (gg.size() > 1) return false;
    }
    return true;
}

}  // namespace detail

// Parameters of the truncated model (W(F_{p^{f'}})/p^M)[u]/(u^N - p) of O_K.
// The value group is (1/N)Z, normalised at v(p) = 1; elements carry an
// absolute u-adic precision cap P <= N*M.
class ModelRingParams : public std::enable_shared_from_this<ModelRingParams> {
public:
    static constexpr int kDefaultPrecisionM = 24;

    static std::shared_ptr<const ModelRingParams> create(Int p, int residue_degree, int ram_index,
                                                         int precision_m = kDefaultPrecisionM,
                                                         std::vector<Int> residue_poly = {}) {
        return std::shared_ptr<const ModelRingParams>(new ModelRingParams(
            std::move(p), residue_degree, ram_index, precision_m, std::move(residue_poly)));
    }

    const Int& p() const { return p_; }
    int residue_degree() const { return f_; }
    int ram_index() const { return N_; }
    int precision_m() const { return M_; }
    int max_uprec() const { return N_ * M_; }
    const std::vector<Int>& residue_poly() const { return poly_; }
    const GFContext& gf() const { return gf_; }
    const Int& p_pow_m() const { return p_pow_[M_]; }
    const Int& p_pow(int k) const { return p_pow_[static_cast<std::size_t>(k)]; }

    bool same_as(const ModelRingParams& o) const {
        return p_ == o.p_ && f_ == o.f_ && N_ == o.N_ && M_ == o.M_ && poly_ == o.poly_;
    }

    // --- Galois ring coefficient arithmetic ------------------------------

    GRElem gr_zero() const { return GRElem(f_, Int(0)); }
    GRElem gr_from_int(const Int& a) const {
        GRElem e = gr_zero();
        e[0] = mod_pm(a);
        return e;
    }
    Int mod_pm(const Int& a) const {
        Int r = a % p_pow_[M_];
        if (r < 0) r += p_pow_[M_];
        return r;
    }
    bool gr_is_zero(const GRElem& a) const {
        return std::all_of(a.begin(), a.end(), [](const Int& c) { return c == 0; });
    }
    GRElem gr_add(const GRElem& a, const GRElem& b) const {
        GRElem r(f_);
        for (int i = 0; i < f_; ++i) r[i] = mod_pm(a[i] + b[i]);
        return r;
    }
    GRElem gr_sub(const GRElem& a, const GRElem& b) const {
        GRElem r(f_);
        for (int i = 0; i < f_; ++i) r[i] = mod_pm(a[i] - b[i]);
        return r;
    }
    GRElem gr_neg(const GRElem& a) const {
        GRElem r(f_);
        for (int i = 0; i < f_; ++i) r[i] = mod_pm(-a[i]);
        return r;
    }
    GRElem gr_mul(const GRElem& a, const GRElem& b) const {
        std::vector<Int> prod(2 * f_ - 1, Int(0));
        for (int i = 0; i < f_; ++i) {
            if (a[i] == 0) continue;
            for (int j = 0; j < f_; ++j)
                if (b[j] != 0) prod[i + j] += a[i] * b[j];
        }
        // reduce mod the monic residue_poly, then mod p^M
        for (std::size_t k = prod.size(); k-- > static_cast<std::size_t>(f_);) {
            Int c = prod[k];
            if (c == 0) continue;
            prod[k] = 0;
            for (int j = 0; j < f_; ++j) prod[k - f_ + j] -= c * poly_[j];
        }
        GRElem r(f_);
        for (int i = 0; i < f_; ++i) r[i] = mod_pm(prod[i]);
        return r;
    }
    GRElem gr_scale(const GRElem& a, const Int& c) const {
        GRElem r(f_);
        for (int i = 0; i < f_; ++i) r[i] = mod_pm(a[i] * c);
        return r;
    }
    GRElem gr_reduce_mod_pk(const GRElem& a, int k) const {
        if (k >= M_) return a;
        if (k <= 0) return gr_zero();
        GRElem r(f_);
        for (int i = 0; i < f_; ++i) {
            r[i] = a[i] % p_pow_[k];
            if (r[i] < 0) r[i] += p_pow_[k];
        }
        return r;
    }
    // p-adic valuation of a coefficient; M_ stands for "zero mod p^M".
    int gr_vp(const GRElem& a) const {
        int best = M_;
        for (int i = 0; i < f_; ++i) {
            if (a[i] == 0) continue;
            Int c = a[i];
            int v = 0;
            while (v < best && c % p_ == 0) {
                c /= p_;
                ++v;
            }
            best = std::min(best, v);
            if (best == 0) return 0;
        }
        return best;
    }
    GRElem gr_div_p_exact(const GRElem& a, int k) const {
        GRElem r(f_);
        const Int& pk = p_pow_[k];
        for (int i = 0; i < f_; ++i) {
            if (a[i] % pk != 0) throw Error("internal: inexact division by p^k");
            r[i] = a[i] / pk;
        }
        return r;
    }
    GFElem gr_residue(const GRElem& a) const {
        GFElem e(f_);
        for (int i = 0; i < f_; ++i) e[i] = gf_.mod_p(a[i]);
        return e;
    }
    GRElem gr_lift(const GFElem& a) const {
        GRElem e(f_);
        for (int i = 0; i < f_; ++i) e[i] = a[i];
        return e;
    }
    // Inverse of a unit (vp = 0) by Hensel lifting the residue inverse.
    GRElem gr_inv(const GRElem& a) const {
        if (gr_vp(a) != 0) throw Error("internal: inverse of a non-unit coefficient");
        GRElem z = gr_lift(gf_.inv(gr_residue(a)));
        GRElem two = gr_from_int(2);
        for (int k = 1; k < M_; k *= 2) z = gr_mul(z, gr_sub(two, gr_mul(a, z)));
        return z;
    }
    // The Frobenius lift sigma on the Galois ring: a(y) -> a(sigma(y)).
    GRElem gr_frob(const GRElem& a) const {
        GRElem r = gr_scale(frob_y_pow_[0], a[0]);
        for (int j = 1; j < f_; ++j) r = gr_add(r, gr_scale(frob_y_pow_[j], a[j]));
        return r;
    }

    // --- element factories ------------------------------------------------

    RingElem zero(int uprec = -1) const;
    RingElem one() const;
    RingElem from_int(const Int& a) const;
    RingElem u_pow(int k) const;          // u^k, k >= 0 (k >= N carries into p)
    RingElem monomial(const Int& c, int u_exp) const;

private:
    ModelRingParams(Int p, int f, int N, int M, std::vector<Int> poly)
        : p_(std::move(p)), f_(f), N_(N), M_(M), poly_(std::move(poly)) {
        if (!detail::is_probable_prime(p_)) throw ValidationError("p must be prime");
        if (f_ < 1) throw ValidationError("residue_degree must be >= 1");
        if (N_ < 1) throw ValidationError("ram_index must be >= 1");
        if (M_ < 1) throw ValidationError("precision must be >= 1");
        if (poly_.empty()) poly_ = default_poly();
        if (static_cast<int>(poly_.size()) != f_ + 1 || poly_.back() != 1)
            throw ValidationError("residue_poly must be monic of degree residue_degree");
        for (auto& c : poly_) {
            c %= p_;
            if (c < 0) c += p_;
        }
        poly_.back() = 1;
        if (!detail::is_irreducible_mod_p(poly_, p_))
            throw ValidationError("residue_poly is reducible mod p");
        p_pow_.resize(M_ + 1);
        p_pow_[0] = 1;
        for (int i = 1; i <= M_; ++i) p_pow_[i] = p_pow_[i - 1] * p_;
        std::vector<Int> gf_poly = poly_;
        gf_ = GFContext(p_, gf_poly);
        init_frobenius();
    }

    std::vector<Int> default_poly() const {
        if (f_ == 1) return {Int(0), Int(1)};  // y; the quotient is Z/p^M
        // least monic irreducible of degree f' in lexicographic coefficient order
        std::vector<Int> g(f_ + 1, Int(0));
        g[f_] = 1;
        while (true) {
            if (detail::is_irreducible_mod_p(g, p_)) return g;
            int i = 0;
            while (i < f_) {
                g[i] += 1;
                if (g[i] < p_) break;
                g[i] = 0;
                ++i;
            }
            if (i == f_) throw Error("internal: no irreducible polynomial found");
        }
    }

    void init_frobenius() {
        frob_y_pow_.assign(f_, gr_zero());
        frob_y_pow_[0] = gr_from_int(1);
        if (f_ == 1) return;
        // Hensel-lift the root y^p of residue_poly: z_{k+1} = z - g(z)/g'(z)
        GRElem y = gr_zero();
        y[1] = 1;
        GRElem z = gr_from_int(1);
        {
            // z0 = y^p
            Int e = p_;
            GRElem base = y;
            GRElem acc = gr_from_int(1);
            while (e > 0) {
                if ((e & 1) != 0) acc = gr_mul(acc, base);
                base = gr_mul(base, base);
                e >>= 1;
            }
            z = acc;
        }
        auto eval_g = [&](const GRElem& x) {
            GRElem acc = gr_from_int(poly_[f_]);
            for (int i = f_ - 1; i >= 0; --i) acc = gr_add(gr_mul(acc, x), gr_from_int(poly_[i]));
            return acc;
        };
        auto eval_gp = [&](const GRElem& x) {
            GRElem acc = gr_scale(gr_from_int(poly_[f_]), Int(f_));
            for (int i = f_ - 1; i >= 1; --i)
                acc = gr_add(gr_mul(acc, x), gr_scale(gr_from_int(poly_[i]), Int(i)));
            return acc;
        };
        for (int k = 1; k < 2 * M_; k *= 2)
            z = gr_sub(z, gr_mul(eval_g(z), gr_inv(eval_gp(z))));
        frob_y_pow_[1] = z;
        for (int j = 2; j < f_; ++j) frob_y_pow_[j] = gr_mul(frob_y_pow_[j - 1], z);
    }

    Int p_;
    int f_, N_, M_;
    std::vector<Int> poly_;
    std::vector<Int> p_pow_;
    GFContext gf_;
    std::vector<GRElem> frob_y_pow_;  // sigma(y)^j for j < f'
};

using ParamsPtr = std::shared_ptr<const ModelRingParams>;

// An element of the truncated model ring: sum over slots i < N of c_i u^i
// with c_i in the Galois ring, known modulo u^prec. Immutable after
// canonicalisation.
class RingElem {
public:
    RingElem() = default;
    RingElem(ParamsPtr params, std::vector<GRElem> slots, int uprec)
        : params_(std::move(params)), slots_(std::move(slots)), prec_(uprec) {
        canonicalize();
    }

    const ParamsPtr& params() const { return params_; }
    int prec() const { return prec_; }
    const std::vector<GRElem>& slots() const { return slots_; }

    // Least slot valuation i + N*vp(c_i), in units of 1/N; nullopt = bottom.
    std::optional<int> u_valuation() const {
        const auto& P = *params_;
        int N = P.ram_index();
        int best = prec_;
        for (int i = 0; i < N; ++i) {
            if (P.gr_is_zero(slots_[i])) continue;
            int v = i + N * P.gr_vp(slots_[i]);
            best = std::min(best, v);
        }
        if (best >= prec_) return std::nullopt;
        return best;
    }

    MaybeRational valuation() const {
        auto v = u_valuation();
        if (!v) return std::nullopt;
        return Rational(*v, params_->ram_index());
    }

    bool is_bottom() const { return !u_valuation().has_value(); }

    GFElem residue() const { return params_->gr_residue(slots_[0]); }

    RingElem operator-() const {
        std::vector<GRElem> s(slots_.size());
        for (std::size_t i = 0; i < slots_.size(); ++i) s[i] = params_->gr_neg(slots_[i]);
        return RingElem(params_, std::move(s), prec_);
    }

    friend RingElem operator+(const RingElem& a, const RingElem& b) {
        check_params(a, b);
        const auto& P = *a.params_;
        std::vector<GRElem> s(P.ram_index());
        for (int i = 0; i < P.ram_index(); ++i) s[i] = P.gr_add(a.slots_[i], b.slots_[i]);
        return RingElem(a.params_, std::move(s), std::min(a.prec_, b.prec_));
    }

    friend RingElem operator-(const RingElem& a, const RingElem& b) {
        check_params(a, b);
        const auto& P = *a.params_;
        std::vector<GRElem> s(P.ram_index());
        for (int i = 0; i < P.ram_index(); ++i) s[i] = P.gr_sub(a.slots_[i], b.slots_[i]);
        return RingElem(a.params_, std::move(s), std::min(a.prec_, b.prec_));
    }

    friend RingElem operator*(const RingElem& a, const RingElem& b) {
        check_params(a, b);
        const auto& P = *a.params_;
        int N = P.ram_index();
        std::vector<GRElem> s(N, P.gr_zero());
        for (int i = 0; i < N; ++i) {
            if (P.gr_is_zero(a.slots_[i])) continue;
            for (int j = 0; j < N; ++j) {
                if (P.gr_is_zero(b.slots_[j])) continue;
                GRElem prod = P.gr_mul(a.slots_[i], b.slots_[j]);
                int k = i + j;
                if (k >= N) prod = P.gr_scale(prod, P.p());  // u^N = p
                s[k % N] = P.gr_add(s[k % N], prod);
            }
        }
        int va = a.u_valuation().value_or(a.prec_);
        int vb = b.u_valuation().value_or(b.prec_);
        int prec = std::min({a.prec_ + vb, b.prec_ + va, P.max_uprec()});
        return RingElem(a.params_, std::move(s), prec);
    }

    // Exact division by u^k; requires u_valuation >= k.
    RingElem div_u_exact(int k) const {
        if (k == 0) return *this;
        const auto& P = *params_;
        int N = P.ram_index();
        std::vector<GRElem> s(N, P.gr_zero());
        for (int i = 0; i < N; ++i) {
            if (P.gr_is_zero(slots_[i])) continue;
            if (i >= k) {
                s[i - k] = P.gr_add(s[i - k], slots_[i]);
            } else {
                int t = k - i;
                int m = (t + N - 1) / N;
                int target = i - k + m * N;
                s[target] = P.gr_add(s[target], P.gr_div_p_exact(slots_[i], m));
            }
        }
        return RingElem(params_, std::move(s), prec_ - k);
    }

    // Inverse of a unit (valuation 0), to this element's precision.
    RingElem unit_inverse() const {
        const auto& P = *params_;
        auto v = u_valuation();
        if (!v || *v != 0) throw Error("internal: unit_inverse of a non-unit");
        RingElem z(params_, lift_slot0(P.gr_lift(P.gf().inv(residue()))), prec_);
        RingElem two = P.from_int(2);
        for (int k = 1; k < prec_; k *= 2) z = z * (two - *this * z);
        return RingElem(params_, z.slots_, prec_);
    }

    // Entrywise Frobenius lift (sigma on coefficients, u fixed).
    RingElem frobenius() const {
        const auto& P = *params_;
        std::vector<GRElem> s(P.ram_index());
        for (int i = 0; i < P.ram_index(); ++i) s[i] = P.gr_frob(slots_[i]);
        return RingElem(params_, std::move(s), prec_);
    }

    bool is_sigma_fixed() const { return (*this - frobenius()).is_bottom(); }

    // Clamp precision down; never claims digits that were not computed.
    RingElem with_prec(int uprec) const {
        return RingElem(params_, slots_, std::min(uprec, prec_));
    }

    // Canonical representative reinterpreted in another model ring with the
    // same p, f', residue_poly and N (used to raise working precision).
    RingElem reembed(const ParamsPtr& target) const {
        std::vector<GRElem> s = slots_;
        int scale = target->ram_index() / params_->ram_index();
        if (scale * params_->ram_index() != target->ram_index())
            throw Error("internal: reembed requires compatible ramification");
        std::vector<GRElem> t(target->ram_index(), target->gr_zero());
        for (std::size_t i = 0; i < s.size(); ++i) t[i * scale] = s[i];
        int prec = prec_ >= params_->max_uprec() ? target->max_uprec()
                                                 : std::min(prec_ * scale, target->max_uprec());
        return RingElem(target, std::move(t), prec);
    }

    std::string to_string() const {
        const auto& P = *params_;
        std::ostringstream os;
        bool first = true;
        for (int i = 0; i < P.ram_index(); ++i) {
            if (P.gr_is_zero(slots_[i])) continue;
            if (!first) os << " + ";
            first = false;
            os << "(";
            for (int j = 0; j < P.residue_degree(); ++j) {
                if (j) os << ",";
                os << slots_[i][j];
            }
            os << ")";
            if (i > 0) os << "*u^" << i;
        }
        if (first) os << "0";
        os << " [mod u^" << prec_ << "]";
        return os.str();
    }

    static void check_params(const RingElem& a, const RingElem& b) {
        if (!a.params_ || !b.params_ || !a.params_->same_as(*b.params_)) throw ParamsMismatch();
    }

private:
    std::vector<GRElem> lift_slot0(GRElem c) const {
        std::vector<GRElem> s(params_->ram_index(), params_->gr_zero());
        s[0] = std::move(c);
        return s;
    }

    void canonicalize() {
        const auto& P = *params_;
        int N = P.ram_index();
        prec_ = std::min(prec_, P.max_uprec());
        if (static_cast<int>(slots_.size()) != N) slots_.resize(N, P.gr_zero());
        for (int i = 0; i < N; ++i) {
            int k = (prec_ - i + N - 1) / N;  // ceil((prec - i)/N)
            slots_[i] = P.gr_reduce_mod_pk(slots_[i], k);
        }
    }

    ParamsPtr params_;
    std::vector<GRElem> slots_;
    int prec_ = 0;
};

inline RingElem ModelRingParams::zero(int uprec) const {
    int P = uprec < 0 ? max_uprec() : uprec;
    return RingElem(shared_from_this(), std::vector<GRElem>(N_, gr_zero()), P);
}

inline RingElem ModelRingParams::one() const { return from_int(1); }

inline RingElem ModelRingParams::from_int(const Int& a) const {
    std::vector<GRElem> s(N_, gr_zero());
    s[0] = gr_from_int(a);
    return RingElem(shared_from_this(), std::move(s), max_uprec());
}

inline RingElem ModelRingParams::u_pow(int k) const { return monomial(Int(1), k); }

inline RingElem ModelRingParams::monomial(const Int& c, int u_exp) const {
    if (u_exp < 0) throw ValidationError("negative u-exponent");
    std::vector<GRElem> s(N_, gr_zero());
    int slot = u_exp % N_;
    int carries = u_exp / N_;
    if (carries < M_) {
        Int coeff = c * p_pow_[carries];
        s[slot] = gr_from_int(coeff);
    }
    return RingElem(shared_from_this(), std::move(s), max_uprec());
}

enum class RingOp { add, sub, mul };

inline RingElem ring_arith(RingOp op, const RingElem& a, const RingElem& b) {
    switch (op) {
        case RingOp::add: return a + b;
        case RingOp::sub: return a - b;
        case RingOp::mul: return a * b;
    }
    throw Error("unreachable");
}

// Quotient c with b*c = a up to propagated precision. Requires
// v(b) != bottom and v(b) <= v(a); precision decreases by N*v(b).
inline RingElem ring_div(const RingElem& a, const RingElem& b) {
    RingElem::check_params(a, b);
    auto vb = b.u_valuation();
    if (!vb) throw DivideByIndistinguishableZero();
    int va = a.u_valuation().value_or(a.prec());
    if (*vb > va) throw ValidationError("quotient is not integral: v(b) > v(a)");
    int result_prec = std::min(a.prec(), b.prec()) - *vb;
    if (result_prec < 1)
        throw PrecisionExhausted("division leaves no significant digits");
    RingElem a2 = a.with_prec(std::min(a.prec(), b.prec())).div_u_exact(*vb);
    RingElem b2 = b.div_u_exact(*vb);
    RingElem c = a2 * b2.unit_inverse();
    return c.with_prec(result_prec);
}

inline MaybeRational valuation(const RingElem& a) { return a.valuation(); }
inline GFElem residue(const RingElem& a) { return a.residue(); }
inline RingElem frobenius(const RingElem& a) { return a.frobenius(); }

inline bool equal_at_precision(const RingElem& a, const RingElem& b) {
    return (a - b).is_bottom();
}

// An element of the fraction field: num * u^(-shift). Only used inside
// eliminations that must divide freely; results are converted back to
// RingElem when integrality is established.
class FieldElem {
public:
    FieldElem() = default;
    explicit FieldElem(RingElem num, int shift = 0) : num_(std::move(num)), shift_(shift) {
        normalize();
    }

    const RingElem& num() const { return num_; }
    int shift() const { return shift_; }
    bool is_bottom() const { return num_.is_bottom(); }

    MaybeRational valuation() const {
        auto v = num_.valuation();
        if (!v) return std::nullopt;
        return *v - Rational(shift_, num_.params()->ram_index());
    }

    FieldElem operator-() const { return FieldElem(-num_, shift_); }

    friend FieldElem operator+(const FieldElem& a, const FieldElem& b) {
        int s = std::max(a.shift_, b.shift_);
        const auto& P = a.num_.params();
        RingElem na = a.shift_ == s ? a.num_ : a.num_ * P->u_pow(s - a.shift_);
        RingElem nb = b.shift_ == s ? b.num_ : b.num_ * P->u_pow(s - b.shift_);
        return FieldElem(na + nb, s);
    }
    friend FieldElem operator-(const FieldElem& a, const FieldElem& b) { return a + (-b); }
    friend FieldElem operator*(const FieldElem& a, const FieldElem& b) {
        return FieldElem(a.num_ * b.num_, a.shift_ + b.shift_);
    }
    friend FieldElem operator/(const FieldElem& a, const FieldElem& b) {
        auto vb = b.num_.u_valuation();
        if (!vb) throw DivideByIndistinguishableZero();
        int va = a.num_.u_valuation().value_or(a.num_.prec());
        int k = std::max(0, *vb - va);
        const auto& P = a.num_.params();
        RingElem lifted = k > 0 ? a.num_ * P->u_pow(k) : a.num_;
        RingElem q = ring_div(lifted, b.num_);
        int shift = a.shift_ - b.shift_ + k;
        if (shift < 0) {
            q = q * P->u_pow(-shift);
            shift = 0;
        }
        return FieldElem(std::move(q), shift);
    }

    // Integral representative; requires valuation >= 0.
    RingElem to_ring() const {
        if (shift_ == 0) return num_;
        auto v = num_.u_valuation();
        if (num_.is_bottom()) {
            if (num_.prec() - shift_ < 1)
                throw PrecisionExhausted("cannot certify integrality at precision");
            return num_.params()->zero(num_.prec() - shift_);
        }
        if (*v < shift_) throw ValidationError("fraction-field element is not integral");
        return num_.div_u_exact(shift_);
    }

private:
    void normalize() {
        if (shift_ == 0) return;
        auto v = num_.u_valuation();
        int k = std::min(shift_, v.value_or(num_.prec()));
        if (k > 0) {
            num_ = num_.div_u_exact(k);
            shift_ -= k;
        }
    }

    RingElem num_;
    int shift_ = 0;
};

}  // namespace polyinv
