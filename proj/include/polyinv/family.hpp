#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "polyinv/errors.hpp"
#include "polyinv/invariants.hpp"
#include "polyinv/rational.hpp"
#include "polyinv/ring.hpp"

namespace polyinv {

// One matrix entry of a family: c * (factor of valuation u_val) * prod T^m.
// u_val is measured in the normalisation v(p) = 1.
struct FamilyEntry {
    Int c = 0;
    Rational u_val = 0;
    std::map<std::string, int> powers;
};

// v(T_k)(s) = constant + coef * s.
struct AffineForm {
    Rational constant = 0;
    Rational coef = 0;
    Rational at(const Rational& s) const { return constant + coef * s; }
};

struct Interval {
    Rational lo, hi;
    bool lo_closed = true, hi_closed = true;

    bool contains(const Rational& s) const {
        if (s < lo || s > hi) return false;
        if (s == lo && !lo_closed) return false;
        if (s == hi && !hi_closed) return false;
        return true;
    }
    std::string to_string() const {
        return std::string(lo_closed ? "[" : "(") + polyinv::to_string(lo) + ", " +
               polyinv::to_string(hi) + (hi_closed ? "]" : ")");
    }
};

// One-parameter family of structured data over a rational interval domain.
struct FamilyDatum {
    Int p;
    int residue_degree = 1;
    int precision_m = ModelRingParams::kDefaultPrecisionM;
    std::vector<Int> residue_poly;  // empty: default
    int e = 1, f = 1, n = 1;
    std::vector<std::vector<std::vector<FamilyEntry>>> pi_on_omega;  // per v, rows of entries
    std::map<std::string, AffineForm> constraints;
    std::optional<std::vector<int>> r_tau;
    Interval domain;
};

// Evaluates the family at s: chooses N as the lcm of the valuation
// denominators of every entry and substitutes T_k -> u^(N * v(T_k)(s)).
inline StructuredDatum instantiate(const FamilyDatum& fam, const Rational& s) {
    if (!fam.domain.contains(s)) throw OutOfDomain("s = " + to_string(s) + " outside domain " +
                                                    fam.domain.to_string());
    std::map<std::string, Rational> pv;
    for (const auto& [name, form] : fam.constraints) {
        Rational v = form.at(s);
        if (v < 0)
            throw OutOfDomain("parameter " + name + " has negative valuation at s = " +
                              to_string(s));
        pv[name] = v;
    }
    // total valuation of every entry must be N-integral
    Int N = 1;
    for (const auto& mat : fam.pi_on_omega)
        for (const auto& row : mat)
            for (const auto& entry : row) {
                if (entry.c == 0) continue;
                Rational total = entry.u_val;
                for (const auto& [name, m] : entry.powers) {
                    auto it = pv.find(name);
                    if (it == pv.end())
                        throw ValidationError("entry uses unconstrained parameter " + name);
                    total += it->second * m;
                }
                if (total < 0) throw OutOfDomain("entry valuation negative at s");
                N = int_lcm(N, rat_den(total));
            }
    if (N > 1000000)
        throw ValidationError("sample at s = " + to_string(s) +
                              " needs ramification index " + N.str() + "; choose sample "
                              "points with smaller denominators");
    StructuredDatum dat;
    dat.model = ModelRingParams::create(fam.p, fam.residue_degree, N.convert_to<int>(),
                                        fam.precision_m, fam.residue_poly);
    dat.e = fam.e;
    dat.f = fam.f;
    dat.n = fam.n;
    for (const auto& mat : fam.pi_on_omega) {
        std::size_t r = mat.size();
        ModelMatrix M(dat.model, r, r);
        for (std::size_t i = 0; i < r; ++i) {
            if (mat[i].size() != r) throw ValidationError("family matrix is not square");
            for (std::size_t j = 0; j < r; ++j) {
                const auto& entry = mat[i][j];
                if (entry.c == 0) continue;
                Rational total = entry.u_val;
                for (const auto& [name, m] : entry.powers) total += pv.at(name) * m;
                Int uexp = rat_num(total * Rational(N));
                M.at(i, j) = dat.model->monomial(entry.c, uexp.convert_to<int>());
            }
        }
        dat.pi_on_omega.push_back(std::move(M));
    }
    dat.r_tau = fam.r_tau;
    return dat;
}

struct AffinePiece {
    Rational x0, x1;  // piece interval
    Rational a, b;    // y = a + b*s
    Rational at(const Rational& s) const { return a + b * s; }
};

enum class Continuity { ok, undecided };

struct SweepResult {
    std::vector<std::pair<Rational, ConcavePolygon>> samples;
    std::vector<std::vector<AffinePiece>> slope_models;  // one model per slope index
    Continuity continuity = Continuity::ok;

    bool continuity_ok() const { return continuity == Continuity::ok; }

    Rational slope_at(std::size_t i, const Rational& s) const {
        for (const auto& p : slope_models[i])
            if (s >= p.x0 && s <= p.x1) return p.at(s);
        throw OutOfDomain("fitted model does not cover s = " + to_string(s));
    }
};

namespace detail {

inline ConcavePolygon family_polygon_at(const FamilyDatum& fam, const Rational& s) {
    StructuredDatum dat = instantiate(fam, s);
    validate_datum(dat);
    return integral_hodge(dat).averaged;
}

}  // namespace detail

// Samples the integral Hodge polygon on a grid, fits each slope as an exact
// piecewise-affine function of s and checks that the pieces connect.
inline SweepResult sweep(const FamilyDatum& fam, int grid) {
    if (grid < 2) throw InputError("grid must be >= 2");
    const Rational lo = fam.domain.lo, hi = fam.domain.hi;
    if (!(lo < hi)) throw ValidationError("family domain is empty");
    Rational span = hi - lo;
    std::map<Rational, ConcavePolygon> samples;
    auto sample_at = [&](const Rational& s) {
        if (samples.count(s)) return;
        samples.emplace(s, detail::family_polygon_at(fam, s));
    };
    for (int j = 0; j <= grid; ++j) {
        Rational s = lo + span * Rational(j, grid);
        if (j == 0 && !fam.domain.lo_closed) s = lo + span / Rational(2 * grid);
        if (j == grid && !fam.domain.hi_closed) s = hi - span / Rational(2 * grid);
        sample_at(s);
    }
    std::size_t n = samples.begin()->second.length();
    for (const auto& [s, poly] : samples)
        if (poly.length() != n || poly.total() != samples.begin()->second.total())
            throw ValidationError("family polygon changes length or endpoint across samples");

    const int kMaxRounds = 12;
    bool undecided = false;
    for (int round = 0; round < kMaxRounds; ++round) {
        std::set<Rational> to_insert;
        std::vector<Rational> xs;
        for (const auto& [s, poly] : samples) xs.push_back(s);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Rational> m;
            for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
                const Rational& y0 = samples.at(xs[k]).slope(i);
                const Rational& y1 = samples.at(xs[k + 1]).slope(i);
                m.push_back((y1 - y0) / (xs[k + 1] - xs[k]));
            }
            for (std::size_t k = 0; k < m.size(); ++k) {
                bool left_ok = k > 0 && m[k - 1] == m[k];
                bool right_ok = k + 1 < m.size() && m[k] == m[k + 1];
                if (left_ok || right_ok) continue;
                // isolated segment: try to resolve the break by intersecting
                // the neighbouring trusted lines
                bool resolved = false;
                if (k > 0 && k + 1 < m.size()) {
                    Rational mL = m[k - 1], mR = m[k + 1];
                    if (mL != mR) {
                        Rational aL = samples.at(xs[k]).slope(i) - mL * xs[k];
                        Rational aR = samples.at(xs[k + 1]).slope(i) - mR * xs[k + 1];
                        Rational sx = (aR - aL) / (mL - mR);
                        if (sx >= xs[k] && sx <= xs[k + 1]) {
                            sample_at(sx);
                            Rational y = samples.at(sx).slope(i);
                            if (y == aL + mL * sx && y == aR + mR * sx) resolved = true;
                        }
                    }
                }
                if (!resolved) to_insert.insert((xs[k] + xs[k + 1]) / 2);
            }
        }
        if (to_insert.empty()) break;
        for (const auto& s : to_insert) sample_at(s);
        if (round == kMaxRounds - 1) undecided = true;
    }

    SweepResult out;
    for (const auto& [s, poly] : samples) out.samples.emplace_back(s, poly);
    out.slope_models.resize(n);
    std::vector<Rational> xs;
    for (const auto& [s, poly] : samples) xs.push_back(s);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Rational> m;
        for (std::size_t k = 0; k + 1 < xs.size(); ++k)
            m.push_back((samples.at(xs[k + 1]).slope(i) - samples.at(xs[k]).slope(i)) /
                        (xs[k + 1] - xs[k]));
        // maximal runs of equal segment slopes
        std::vector<AffinePiece> pieces;
        std::size_t k = 0;
        while (k < m.size()) {
            std::size_t kend = k;
            while (kend + 1 < m.size() && m[kend + 1] == m[k]) ++kend;
            AffinePiece piece;
            piece.b = m[k];
            piece.a = samples.at(xs[k]).slope(i) - piece.b * xs[k];
            piece.x0 = xs[k];
            piece.x1 = xs[kend + 1];
            bool trusted = kend > k;
            if (!trusted && !pieces.empty() && k + 1 < m.size()) {
                // unresolved isolated segment between trusted pieces
                undecided = true;
            }
            pieces.push_back(piece);
            k = kend + 1;
        }
        // adjacent pieces meet at shared samples; extend the terminal pieces
        // to the domain boundary
        if (!pieces.empty()) {
            pieces.front().x0 = lo;
            pieces.back().x1 = hi;
        }
        // merge collinear neighbours
        std::vector<AffinePiece> merged;
        for (const auto& piece : pieces) {
            if (!merged.empty() && merged.back().a == piece.a && merged.back().b == piece.b)
                merged.back().x1 = piece.x1;
            else
                merged.push_back(piece);
        }
        out.slope_models[i] = std::move(merged);
    }
    out.continuity = undecided ? Continuity::undecided : Continuity::ok;
    // the fitted model must reproduce every sample
    for (const auto& [s, poly] : out.samples)
        for (std::size_t i = 0; i < n; ++i)
            if (out.slope_at(i, s) != poly.slope(i))
                throw InternalMismatch("fitted model fails to reproduce a sample");
    return out;
}

struct SublevelResult {
    std::vector<Interval> intervals;
    std::vector<std::string> warnings;
    SweepResult sweep;
};

// The region { s : Hdg_int(s) <= f0 }, solved exactly from the fitted
// piecewise-affine prefix sums; closed in the domain.
inline SublevelResult sublevel_region(const FamilyDatum& fam, const ConcavePolygon& f0,
                                      int grid) {
    SublevelResult out;
    out.sweep = sweep(fam, grid);
    std::size_t n = out.sweep.slope_models.size();
    if (f0.length() != n) throw LengthMismatch();
    Rational endpoint = out.sweep.samples.front().second.total();
    if (f0.total() != endpoint) {
        out.warnings.push_back("endpoint mismatch: order requires equal totals, region empty");
        return out;
    }
    // piece boundaries across all slope models
    std::set<Rational> cuts{fam.domain.lo, fam.domain.hi};
    for (const auto& model : out.sweep.slope_models)
        for (const auto& piece : model) {
            cuts.insert(piece.x0);
            cuts.insert(piece.x1);
        }
    std::vector<Rational> xs(cuts.begin(), cuts.end());
    std::vector<Interval> region{
        {fam.domain.lo, fam.domain.hi, fam.domain.lo_closed, fam.domain.hi_closed}};
    for (std::size_t j = 0; j < n; ++j) {
        Rational cj = f0.value_at_int(j + 1);
        // prefix sum P_j is affine on each cut interval
        std::vector<Interval> allowed;
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            Rational mid = (xs[k] + xs[k + 1]) / 2;
            Rational a = 0, b = 0;
            for (std::size_t i = 0; i <= j; ++i) {
                bool found = false;
                for (const auto& piece : out.sweep.slope_models[i])
                    if (mid >= piece.x0 && mid <= piece.x1) {
                        a += piece.a;
                        b += piece.b;
                        found = true;
                        break;
                    }
                if (!found) throw InternalMismatch("fitted model has a gap");
            }
            // solve a + b*s <= cj on [xs[k], xs[k+1]]
            if (b == 0) {
                if (a <= cj) allowed.push_back({xs[k], xs[k + 1], true, true});
            } else if (b > 0) {
                Rational t = (cj - a) / b;
                if (t >= xs[k]) allowed.push_back({xs[k], std::min(t, xs[k + 1]), true, true});
            } else {
                Rational t = (cj - a) / b;
                if (t <= xs[k + 1]) allowed.push_back({std::max(t, xs[k]), xs[k + 1], true, true});
            }
        }
        // intersect the accumulated region with the allowed set
        std::vector<Interval> next;
        for (const auto& r : region)
            for (const auto& al : allowed) {
                Rational lo = std::max(r.lo, al.lo), hi = std::min(r.hi, al.hi);
                if (lo > hi) continue;
                bool lc = lo == r.lo ? (lo == al.lo ? r.lo_closed && al.lo_closed : r.lo_closed)
                                     : al.lo_closed;
                bool hc = hi == r.hi ? (hi == al.hi ? r.hi_closed && al.hi_closed : r.hi_closed)
                                     : al.hi_closed;
                if (lo == hi && !(lc && hc)) continue;
                next.push_back({lo, hi, lc, hc});
            }
        // normalise: sort and merge touching intervals
        std::sort(next.begin(), next.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> mergedv;
        for (const auto& iv : next) {
            if (!mergedv.empty() &&
                (iv.lo < mergedv.back().hi ||
                 (iv.lo == mergedv.back().hi && (iv.lo_closed || mergedv.back().hi_closed)))) {
                if (iv.hi > mergedv.back().hi) {
                    mergedv.back().hi = iv.hi;
                    mergedv.back().hi_closed = iv.hi_closed;
                } else if (iv.hi == mergedv.back().hi) {
                    mergedv.back().hi_closed = mergedv.back().hi_closed || iv.hi_closed;
                }
            } else {
                mergedv.push_back(iv);
            }
        }
        region = std::move(mergedv);
    }
    out.intervals = std::move(region);
    return out;
}

}  // namespace polyinv
