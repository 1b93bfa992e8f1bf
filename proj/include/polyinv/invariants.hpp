#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyinv/errors.hpp"
#include "polyinv/gf.hpp"
#include "polyinv/lattice.hpp"
#include "polyinv/polygon.hpp"
#include "polyinv/rational.hpp"
#include "polyinv/ring.hpp"

namespace polyinv {

// (height, degree) of one subobject, feeding the Harder-Narasimhan hull.
struct SubobjectRecord {
    Int height;
    Rational degree;
};

// Matrix-level shadow of a p-divisible group with O_F-structure.
// pi_on_omega[v] is the matrix of the uniformiser action on the rank-r_v
// direct summand of the cotangent space attached to the v-th unramified
// embedding. phi/pi_on_D describe the Dieudonne side of the reduction, with
// the basis ordered in f consecutive blocks of size e*n and phi mapping
// block v-1 into block v (cyclically).
struct StructuredDatum {
    ParamsPtr model;
    int e = 1, f = 1, n = 1;
    std::vector<ModelMatrix> pi_on_omega;                       // size f
    std::optional<std::vector<std::vector<RingElem>>> tau_pi;   // per v: e conjugates
    std::optional<std::vector<int>> r_tau;                      // d entries, v-major
    std::optional<ModelMatrix> phi;
    std::optional<ModelMatrix> pi_on_D;
    std::optional<std::vector<SubobjectRecord>> subobjects_p;
    std::optional<std::vector<SubobjectRecord>> subobjects_pi;
    std::optional<std::map<int, std::vector<SubobjectRecord>>> hn_tower;

    int d() const { return e * f; }
    int r_upsilon(std::size_t v) const { return static_cast<int>(pi_on_omega[v].rows()); }
    int dim_h() const {
        int s = 0;
        for (const auto& m : pi_on_omega) s += static_cast<int>(m.rows());
        return s;
    }
    Rational endpoint() const { return Rational(dim_h(), d()); }
};

// Validates structural invariants; returns warnings for the conditions that
// are only enforceable when decidable at precision. Throws on hard failures.
inline std::vector<std::string> validate_datum(const StructuredDatum& dat) {
    std::vector<std::string> warnings;
    if (dat.e < 1 || dat.f < 1 || dat.n < 1)
        throw ValidationError("e, f and n must be positive");
    if (static_cast<int>(dat.pi_on_omega.size()) != dat.f)
        throw ValidationError("pi_on_omega must have one matrix per unramified embedding");
    for (int v = 0; v < dat.f; ++v) {
        const auto& A = dat.pi_on_omega[v];
        if (A.rows() != A.cols())
            throw ValidationError("pi_on_omega matrices must be square");
        int r = static_cast<int>(A.rows());
        if (r > dat.e * dat.n)
            throw ValidationError("rank of omega_v exceeds e*n");
        if (r == 0) continue;
        ElementaryDivisors ed = smith_valuations(A);
        if (ed.rank_deficit > 0)
            throw PrecisionExhausted("pi action on omega_v is singular at precision");
        Rational det = std::accumulate(ed.vals.begin(), ed.vals.end(), Rational(0));
        if (det != Rational(r, dat.e))
            throw ValidationError("v(det pi) on omega_" + std::to_string(v) + " is " +
                                  to_string(det) + ", expected " + to_string(Rational(r, dat.e)));
    }
    if (dat.tau_pi) {
        if (static_cast<int>(dat.tau_pi->size()) != dat.f)
            throw ValidationError("tau_pi must list conjugates per unramified embedding");
        for (const auto& lst : *dat.tau_pi)
            if (static_cast<int>(lst.size()) != dat.e)
                throw ValidationError("tau_pi needs e conjugates per embedding");
    }
    if (dat.r_tau) {
        if (static_cast<int>(dat.r_tau->size()) != dat.d())
            throw ValidationError("r_tau must have d = e*f entries");
        int sum = 0;
        for (int r : *dat.r_tau) {
            if (r < 0 || r > dat.n) throw RTauOutOfRange("r_tau entries must lie in [0, n]");
            sum += r;
        }
        if (sum != dat.dim_h())
            throw ValidationError("sum of r_tau must equal dim H = sum of ranks of omega_v");
    }
    if (dat.phi.has_value() != dat.pi_on_D.has_value())
        throw ValidationError("phi and pi_on_D must be supplied together");
    if (dat.phi) {
        std::size_t dn = static_cast<std::size_t>(dat.d()) * dat.n;
        if (dat.phi->rows() != dn || dat.phi->cols() != dn || dat.pi_on_D->rows() != dn ||
            dat.pi_on_D->cols() != dn)
            throw ValidationError("phi and pi_on_D must be d*n x d*n");
        // pi commutes with phi: Pi * Phi = Phi * sigma(Pi)
        ModelMatrix lhs = dat.pi_on_D->mul(*dat.phi);
        ModelMatrix rhs = dat.phi->mul(dat.pi_on_D->frobenius_entrywise());
        if (!lhs.sub(rhs).is_zero_at_precision())
            throw ValidationError("pi_on_D does not commute with phi (sigma-twisted)");
        // p D subset phi D, i.e. all divisors of phi have valuation <= 1
        ElementaryDivisors ed = smith_valuations(*dat.phi);
        if (ed.rank_deficit > 0) {
            warnings.push_back("phi singular at precision: p*D subset phi*D not decidable");
        } else if (!ed.vals.empty() && ed.vals.front() > 1) {
            throw ValidationError("phi divisor exceeds p: p*D is not contained in phi*D");
        }
    }
    auto check_records = [](const std::vector<SubobjectRecord>& recs, const char* which) {
        for (const auto& r : recs) {
            if (r.height < 0) throw ValidationError(std::string(which) + ": negative height");
            if (r.degree < 0 || r.degree > Rational(r.height))
                throw ValidationError(std::string(which) + ": degree outside [0, height]");
        }
    };
    if (dat.subobjects_p) check_records(*dat.subobjects_p, "subobjects_p");
    if (dat.subobjects_pi) check_records(*dat.subobjects_pi, "subobjects_pi");
    if (dat.hn_tower)
        for (const auto& [lvl, recs] : *dat.hn_tower) {
            if (lvl < 1) throw ValidationError("hn_tower levels must be >= 1");
            check_records(recs, "hn_tower");
        }
    return warnings;
}

struct UpsilonPolygons {
    std::vector<ConcavePolygon> per_upsilon;
    ConcavePolygon averaged;
};

inline ConcavePolygon average_over_upsilon(const std::vector<ConcavePolygon>& per, int f) {
    std::vector<Rational> coeffs(per.size(), Rational(1, f));
    return poly_combine(coeffs, per);
}

// Integral Hodge polygon: valuations of the elementary divisors of the pi
// action on omega_v, padded with zeros to length n, averaged with weight 1/f.
inline UpsilonPolygons integral_hodge(const StructuredDatum& dat) {
    UpsilonPolygons out;
    for (int v = 0; v < dat.f; ++v) {
        const auto& A = dat.pi_on_omega[v];
        std::vector<Rational> positive;
        if (A.rows() > 0) {
            ElementaryDivisors ed = smith_valuations(A);
            if (ed.rank_deficit > 0)
                throw PrecisionExhausted("divisors of pi on omega_v not visible at precision");
            for (const auto& val : ed.vals)
                if (val > 0) positive.push_back(val);
        }
        if (static_cast<int>(positive.size()) > dat.n)
            throw NotRealizable("more than n nontrivial divisors on omega_" + std::to_string(v));
        positive.resize(dat.n, Rational(0));
        out.per_upsilon.emplace_back(std::move(positive));
    }
    out.averaged = average_over_upsilon(out.per_upsilon, dat.f);
    return out;
}

inline ConcavePolygon polygon_from_torsion_dims(const std::vector<int>& g, int e, int n) {
    // x -> (1/e) sum_j min(x, g_j): slope on [i-1,i] is #{j : g_j >= i}/e
    std::vector<Rational> s;
    s.reserve(n);
    for (int i = 1; i <= n; ++i) {
        int count = 0;
        for (int gj : g)
            if (gj >= i) ++count;
        s.emplace_back(count, e);
    }
    return ConcavePolygon(std::move(s));
}

enum class HodgeSource { omega, dieudonne };

// Hodge polygon of the special fibre from the graded pi-torsion dimensions.
inline UpsilonPolygons hodge_special_fibre(const StructuredDatum& dat, HodgeSource source) {
    UpsilonPolygons out;
    if (source == HodgeSource::omega) {
        for (int v = 0; v < dat.f; ++v) {
            GFMatrix Nbar = dat.pi_on_omega[v].residue_matrix();
            std::vector<int> g = kernel_rank_chain(Nbar, dat.e);
            if (!g.empty() && g[0] > dat.n)
                throw NotRealizable("graded pi-torsion exceeds n");
            for (std::size_t j = 1; j < g.size(); ++j)
                if (g[j] > g[j - 1]) throw NotRealizable("graded pi-torsion not decreasing");
            out.per_upsilon.push_back(polygon_from_torsion_dims(g, dat.e, dat.n));
        }
    } else {
        if (!dat.phi) throw ValidationError("dieudonne mode requires phi");
        std::size_t en = static_cast<std::size_t>(dat.e) * dat.n;
        GFMatrix Abar = dat.phi->residue_matrix();
        GFMatrix Pbar = dat.pi_on_D->residue_matrix();
        const GFContext& gf = dat.model->gf();
        for (int v = 0; v < dat.f; ++v) {
            std::size_t row0 = static_cast<std::size_t>(v) * en;
            std::size_t col0 = static_cast<std::size_t>((v - 1 + dat.f) % dat.f) * en;
            GFMatrix image(&gf, en, en);
            for (std::size_t i = 0; i < en; ++i)
                for (std::size_t j = 0; j < en; ++j) image.at(i, j) = Abar.at(row0 + i, col0 + j);
            GFMatrix op(&gf, en, en);
            for (std::size_t i = 0; i < en; ++i)
                for (std::size_t j = 0; j < en; ++j) op.at(i, j) = Pbar.at(row0 + i, row0 + j);
            QuotientSpace q = quotient_action(image, op);
            std::vector<int> g = kernel_rank_chain(q.action, dat.e);
            if (!g.empty() && g[0] > dat.n)
                throw NotRealizable("graded pi-torsion exceeds n (dieudonne mode)");
            out.per_upsilon.push_back(polygon_from_torsion_dims(g, dat.e, dat.n));
        }
    }
    out.averaged = average_over_upsilon(out.per_upsilon, dat.f);
    return out;
}

// Optional derivation of r_tau as the fraction-field eigenspace dimensions
// of the pi action, embedding-major. Requires tau_pi; eigenvalues that
// collide at precision make the multiplicities underivable.
inline std::vector<int> derive_r_tau(const StructuredDatum& dat) {
    if (!dat.tau_pi) throw ValidationError("derive_r_tau requires tau_pi");
    std::vector<int> out;
    for (int v = 0; v < dat.f; ++v) {
        const auto& A = dat.pi_on_omega[v];
        if (A.rows() == 0) {
            out.insert(out.end(), dat.e, 0);
            continue;
        }
        std::vector<int> ranks = saturation_ranks(A, (*dat.tau_pi)[v]);
        int sum = 0;
        for (int r : ranks) sum += r;
        if (sum != static_cast<int>(A.rows()))
            throw ValidationError("pi is not diagonalisable over the fraction field; "
                                  "r_tau cannot be derived");
        out.insert(out.end(), ranks.begin(), ranks.end());
    }
    return out;
}

// Pappas-Rapoport polygon x -> (1/d) sum_tau min(x, r_tau).
inline ConcavePolygon pappas_rapoport(const StructuredDatum& dat) {
    if (!dat.r_tau) throw ValidationError("pappas_rapoport requires r_tau");
    std::vector<Rational> s;
    for (int i = 1; i <= dat.n; ++i) {
        int count = 0;
        for (int r : *dat.r_tau) {
            if (r > dat.n) throw RTauOutOfRange("r_tau entry exceeds n");
            if (r >= i) ++count;
        }
        s.emplace_back(count, dat.d());
    }
    return ConcavePolygon(std::move(s));
}

// Per-upsilon PR polygon (1/e) sum_{tau | v} min(x, r_tau); r_tau is stored
// v-major, so embeddings v*e..v*e+e-1 restrict to v.
inline ConcavePolygon pappas_rapoport_upsilon(const StructuredDatum& dat, int v) {
    if (!dat.r_tau) throw ValidationError("pappas_rapoport requires r_tau");
    std::vector<Rational> s;
    for (int i = 1; i <= dat.n; ++i) {
        int count = 0;
        for (int t = 0; t < dat.e; ++t)
            if ((*dat.r_tau)[static_cast<std::size_t>(v) * dat.e + t] >= i) ++count;
        s.emplace_back(count, dat.e);
    }
    return ConcavePolygon(std::move(s));
}

// Newton polygon of the special fibre, renormalised to [0,n].
inline ConcavePolygon newton_special_fibre(const StructuredDatum& dat,
                                           const Rational& tol = Rational(1, 24)) {
    if (!dat.phi) throw ValidationError("newton_special_fibre requires phi");
    NewtonMode mode = dat.phi->is_sigma_fixed() ? NewtonMode::charpoly : NewtonMode::limit;
    std::vector<Rational> slopes = newton_slopes(*dat.phi, mode, tol);
    ConcavePolygon full = ConcavePolygon::from_sorted(std::move(slopes));
    return poly_rescale(full, Int(dat.d())).to_polygon();
}

// Concave hull of the subobject records, rescaled by d.
inline BreakpointFunction hn_polygon(const std::vector<SubobjectRecord>& records,
                                     const SubobjectRecord& total, const Int& d) {
    std::vector<std::pair<Rational, Rational>> pts;
    pts.emplace_back(Rational(0), Rational(0));
    for (const auto& r : records) {
        if (r.height > total.height)
            throw InputError("subobject height exceeds the total height");
        pts.emplace_back(Rational(r.height), r.degree);
    }
    pts.emplace_back(Rational(total.height), total.degree);
    return concave_hull(std::move(pts), Rational(total.height)).rescale(d);
}

struct TowerLimit {
    BreakpointFunction minimum;
    bool consistent = false;    // level-1 polygon equals the minimum within tol
    bool has_level_one = false;
};

// Pointwise minimum of the renormalised tower polygons (1/i) HN(H[p^i])(i x).
inline TowerLimit hn_tower_limit(const StructuredDatum& dat, const Rational& tol) {
    if (!dat.hn_tower || dat.hn_tower->empty()) throw EmptyTower();
    TowerLimit out;
    std::optional<BreakpointFunction> minimum;
    std::optional<BreakpointFunction> level1;
    for (const auto& [lvl, recs] : *dat.hn_tower) {
        SubobjectRecord total{Int(lvl) * dat.d() * dat.n, Rational(lvl) * dat.dim_h()};
        BreakpointFunction fn = hn_polygon(recs, total, Int(dat.d())).rescale(Int(lvl));
        if (lvl == 1) level1 = fn;
        minimum = minimum ? function_min(*minimum, fn) : fn;
    }
    out.minimum = *minimum;
    out.has_level_one = level1.has_value();
    out.consistent =
        level1.has_value() && function_sup_distance(*level1, *minimum) <= tol;
    return out;
}

// deg C = v(Fitt_0 omega_C), optionally normalised by the inertia weight.
inline Rational degree_from_presentation(const ModelMatrix& A, int f_weight = 1) {
    if (f_weight < 1) throw InputError("f_weight must be positive");
    return fitting_valuations(A)[0] / f_weight;
}

// Integral Hodge polygon of the Cartier dual, computed two ways:
// (a) slope reversal 1 - lambda, (b) divisors of p * pi^{-1} per upsilon.
inline ConcavePolygon dual_integral_hodge(const StructuredDatum& dat) {
    ConcavePolygon via_formula = poly_dual(integral_hodge(dat).averaged);
    std::vector<ConcavePolygon> per;
    for (int v = 0; v < dat.f; ++v) {
        const auto& A = dat.pi_on_omega[v];
        std::vector<Rational> vals;
        if (A.rows() > 0) {
            ElementaryDivisors ed = smith_valuations(p_times_inverse(A));
            if (ed.rank_deficit > 0)
                throw PrecisionExhausted("dual divisors not visible at precision");
            vals = ed.vals;
        }
        while (static_cast<int>(vals.size()) < dat.n) vals.emplace_back(1);
        std::sort(vals.begin(), vals.end(), std::greater<Rational>());
        // the dual cotangent space has rank e*n - r_v; its polygon keeps the
        // n smallest dual divisors, the dropped ones are the padded units
        std::vector<Rational> keep(vals.end() - dat.n, vals.end());
        per.emplace_back(std::move(keep));
    }
    ConcavePolygon via_inverse = average_over_upsilon(per, dat.f);
    if (!(via_formula == via_inverse))
        throw InternalMismatch("dual polygon routes disagree: " + via_formula.to_string() +
                               " vs " + via_inverse.to_string());
    return via_formula;
}

enum class TriBool { yes, no, undecided };

inline const char* to_cstring(TriBool t) {
    switch (t) {
        case TriBool::yes: return "true";
        case TriBool::no: return "false";
        default: return "undecided";
    }
}

// Whether the pi action on omega splits into eigenlattices. Tame case via
// the slope-pattern criterion; wild case via the saturated eigenspace test.
inline TriBool is_pi_diagonalisable(const StructuredDatum& dat) {
    if (!dat.tau_pi) throw ValidationError("is_pi_diagonalisable requires tau_pi");
    bool tame = Int(dat.e) % dat.model->p() != 0;  // gcd(e, p) = 1
    if (tame) {
        UpsilonPolygons hi = integral_hodge(dat);
        for (int v = 0; v < dat.f; ++v) {
            int r = dat.r_upsilon(v);
            if (r > dat.n) return TriBool::no;
            for (int i = 0; i < dat.n; ++i) {
                Rational expect = i < r ? Rational(1, dat.e) : Rational(0);
                if (hi.per_upsilon[v].slope(i) != expect) return TriBool::no;
            }
        }
        return TriBool::yes;
    }
    try {
        for (int v = 0; v < dat.f; ++v) {
            const auto& A = dat.pi_on_omega[v];
            std::size_t r = A.rows();
            if (r == 0) continue;
            std::vector<std::vector<RingElem>> all_cols;
            for (const auto& t : (*dat.tau_pi)[v]) {
                auto basis = saturated_kernel_basis(A, t);
                for (auto& col : basis) all_cols.push_back(std::move(col));
            }
            if (all_cols.size() != r) return TriBool::no;
            const GFContext& gf = dat.model->gf();
            GFMatrix joint(&gf, r, all_cols.size());
            for (std::size_t j = 0; j < all_cols.size(); ++j)
                for (std::size_t i = 0; i < r; ++i) joint.at(i, j) = all_cols[j][i].residue();
            if (joint.rank() != r) return TriBool::no;
        }
        return TriBool::yes;
    } catch (const PrecisionExhausted&) {
        return TriBool::undecided;
    }
}

// --- the comparison report --------------------------------------------------

struct CheckEntry {
    std::string name;
    std::string status;   // "holds", "fails" or "skipped"
    std::string witness;  // first violated prefix/abscissa, empty if none
    std::string note;
};

struct ComparisonReport {
    std::optional<UpsilonPolygons> hdg_int;
    std::optional<ConcavePolygon> pr;
    std::optional<UpsilonPolygons> hdg_k;
    std::optional<ConcavePolygon> newt;
    std::optional<BreakpointFunction> hn_p;
    std::optional<BreakpointFunction> hn_pi;
    std::optional<ConcavePolygon> dual;
    std::string pi_diagonalisable = "skipped";
    std::optional<TowerLimit> tower;
    std::vector<CheckEntry> checks;
    std::vector<std::string> warnings;

    bool any_failure() const {
        for (const auto& c : checks)
            if (c.status == "fails") return true;
        return false;
    }
};

namespace detail {

inline void add_poly_check(ComparisonReport& rep, const std::string& name,
                           const ConcavePolygon& f, const ConcavePolygon& g) {
    std::size_t w = 0;
    bool ok = poly_leq(f, g, &w);
    rep.checks.push_back({name, ok ? "holds" : "fails", ok ? "" : std::to_string(w), ""});
}

inline void add_fn_check(ComparisonReport& rep, const std::string& name,
                         const BreakpointFunction& f, const BreakpointFunction& g) {
    Rational w;
    bool ok = function_leq(f, g, &w);
    rep.checks.push_back({name, ok ? "holds" : "fails", ok ? "" : to_string(w), ""});
}

inline void add_skipped(ComparisonReport& rep, const std::string& name,
                        const std::string& why) {
    rep.checks.push_back({name, "skipped", "", why});
}

}  // namespace detail

// Runs every comparison theorem available for the datum; missing inputs are
// reported as skipped entries, inequality failures as report entries.
inline ComparisonReport check_all(const StructuredDatum& input) {
    ComparisonReport rep;
    rep.warnings = validate_datum(input);
    StructuredDatum dat = input;
    if (!dat.r_tau && dat.tau_pi) {
        try {
            dat.r_tau = derive_r_tau(dat);
            validate_datum(dat);
            rep.warnings.push_back(
                "r_tau derived from tau_pi eigenspace dimensions; eigenvalue collisions at "
                "precision would merge multiplicities");
        } catch (const Error&) {
            dat.r_tau.reset();
        }
    }

    rep.hdg_int = integral_hodge(dat);
    rep.hdg_k = hodge_special_fibre(dat, HodgeSource::omega);
    if (dat.phi) {
        UpsilonPolygons from_d = hodge_special_fibre(dat, HodgeSource::dieudonne);
        if (!(from_d.averaged == rep.hdg_k->averaged))
            throw ValidationError("Hodge polygon from omega and from dieudonne data disagree: " +
                                  rep.hdg_k->averaged.to_string() + " vs " +
                                  from_d.averaged.to_string());
        rep.checks.push_back({"Hdg(H_k) omega/dieudonne agreement", "holds", "", ""});
    }
    if (dat.r_tau) {
        rep.pr = pappas_rapoport(dat);
        detail::add_poly_check(rep, "Hdg_int <= PR", rep.hdg_int->averaged, *rep.pr);
        detail::add_poly_check(rep, "Hdg(H_k) <= PR", rep.hdg_k->averaged, *rep.pr);
        for (int v = 0; v < dat.f; ++v)
            detail::add_poly_check(rep, "Hdg(H_k)_v <= PR_v (v=" + std::to_string(v) + ")",
                                   rep.hdg_k->per_upsilon[v], pappas_rapoport_upsilon(dat, v));
        bool max_left = rep.hdg_int->averaged == *rep.pr;
        bool max_right = rep.hdg_k->averaged == *rep.pr;
        rep.checks.push_back({"(Hdg_int = PR) iff (Hdg(H_k) = PR)",
                              max_left == max_right ? "holds" : "fails", "",
                              max_left ? "both equalities hold" : "both equalities fail"});
    } else {
        detail::add_skipped(rep, "Hdg_int <= PR", "r_tau absent");
        detail::add_skipped(rep, "Hdg(H_k) <= PR", "r_tau absent");
        detail::add_skipped(rep, "(Hdg_int = PR) iff (Hdg(H_k) = PR)", "r_tau absent");
    }
    // duality: route (a) against route (b), and the involution
    {
        rep.dual = dual_integral_hodge(dat);
        rep.checks.push_back({"dual polygon routes agree", "holds", "", ""});
        ConcavePolygon back = poly_dual(*rep.dual);
        rep.checks.push_back({"duality involution", back == rep.hdg_int->averaged ? "holds"
                                                                                  : "fails",
                              "", ""});
    }
    // endpoint consistency
    {
        Rational want = dat.endpoint();
        bool ok = rep.hdg_int->averaged.total() == want &&
                  rep.hdg_k->averaged.total() == want &&
                  (!rep.pr || rep.pr->total() == want);
        rep.checks.push_back({"endpoints equal dim H / d", ok ? "holds" : "fails", "",
                              "dim H / d = " + to_string(want)});
    }
    if (dat.phi) {
        rep.newt = newton_special_fibre(dat);
        bool ok = rep.newt->total() == dat.endpoint();
        rep.checks.push_back({"Newton endpoint equals dim H / d", ok ? "holds" : "fails", "", ""});
    }
    // Harder-Narasimhan side, from user-supplied subobject records
    BreakpointFunction hdgi_fn = to_function(rep.hdg_int->averaged);
    if (dat.subobjects_p) {
        SubobjectRecord total{Int(dat.d()) * dat.n, Rational(dat.dim_h())};
        rep.hn_p = hn_polygon(*dat.subobjects_p, total, Int(dat.d()));
        detail::add_fn_check(rep, "HN(H[p]) <= Hdg_int", *rep.hn_p, hdgi_fn);
    } else {
        detail::add_skipped(rep, "HN(H[p]) <= Hdg_int", "subobjects_p absent");
    }
    if (dat.subobjects_pi) {
        SubobjectRecord total{Int(dat.f) * dat.n, Rational(dat.dim_h(), dat.e)};
        rep.hn_pi = hn_polygon(*dat.subobjects_pi, total, Int(dat.f));
        detail::add_fn_check(rep, "HN(H[pi]) <= Hdg_int", *rep.hn_pi, hdgi_fn);
    } else {
        detail::add_skipped(rep, "HN(H[pi]) <= Hdg_int", "subobjects_pi absent");
    }
    if (rep.hn_p && rep.hn_pi)
        detail::add_fn_check(rep, "HN(H[p]) <= HN(H[pi])", *rep.hn_p, *rep.hn_pi);
    // pi-diagonalisability and its consequence
    if (dat.tau_pi) {
        TriBool pid = is_pi_diagonalisable(dat);
        rep.pi_diagonalisable = to_cstring(pid);
        if (pid == TriBool::yes) {
            bool ok = rep.hdg_int->averaged == rep.hdg_k->averaged;
            rep.checks.push_back(
                {"pi-diagonalisable => Hdg_int = Hdg(H_k)", ok ? "holds" : "fails", "", ""});
        } else {
            detail::add_skipped(rep, "pi-diagonalisable => Hdg_int = Hdg(H_k)",
                                pid == TriBool::no ? "not pi-diagonalisable" : "undecided");
        }
    } else {
        detail::add_skipped(rep, "pi-diagonalisable => Hdg_int = Hdg(H_k)", "tau_pi absent");
    }
    if (dat.hn_tower) rep.tower = hn_tower_limit(dat, Rational(1, 1000000));
    return rep;
}

}  // namespace polyinv
