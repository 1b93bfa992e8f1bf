#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "polyinv/errors.hpp"
#include "polyinv/rational.hpp"

namespace polyinv {

// A decreasing tuple of exact rationals, viewed as the concave piecewise
// affine function on [0,n] through (0,0) with slope a_i on [i-1,i].
class ConcavePolygon {
public:
    ConcavePolygon() = default;
    explicit ConcavePolygon(std::vector<Rational> slopes) : slopes_(std::move(slopes)) {
        for (std::size_t i = 1; i < slopes_.size(); ++i)
            if (slopes_[i - 1] < slopes_[i])
                throw ValidationError("polygon slopes must be nonincreasing");
    }

    static ConcavePolygon from_sorted(std::vector<Rational> any_order) {
        std::sort(any_order.begin(), any_order.end(), std::greater<Rational>());
        return ConcavePolygon(std::move(any_order));
    }

    std::size_t length() const { return slopes_.size(); }
    const std::vector<Rational>& slopes() const { return slopes_; }
    const Rational& slope(std::size_t i) const { return slopes_.at(i); }

    Rational value_at_int(std::size_t i) const {
        Rational s = 0;
        for (std::size_t j = 0; j < i; ++j) s += slopes_[j];
        return s;
    }

    Rational value(const Rational& x) const {
        if (x < 0 || x > Rational(static_cast<long>(length())))
            throw InputError("polygon evaluated outside [0,n]");
        Int k = rat_floor(x);
        std::size_t i = k.convert_to<std::size_t>();
        Rational base = value_at_int(i);
        Rational frac = x - Rational(k);
        if (frac == 0 || i >= length()) return base;
        return base + slopes_[i] * frac;
    }

    Rational total() const { return value_at_int(length()); }

    bool operator==(const ConcavePolygon& o) const { return slopes_ == o.slopes_; }
    bool operator!=(const ConcavePolygon& o) const { return !(*this == o); }

    std::string to_string() const {
        std::ostringstream os;
        os << "(";
        for (std::size_t i = 0; i < slopes_.size(); ++i) {
            if (i) os << ", ";
            os << polyinv::to_string(slopes_[i]);
        }
        os << ")";
        return os.str();
    }

private:
    std::vector<Rational> slopes_;
};

// Exact partial order: prefix sums of f <= those of g with equal totals.
// Returns the 1-based index of the first violated prefix through *witness
// when the comparison fails.
inline bool poly_leq(const ConcavePolygon& f, const ConcavePolygon& g,
                     std::size_t* witness = nullptr) {
    if (f.length() != g.length()) throw LengthMismatch();
    Rational pf = 0, pg = 0;
    bool ok = true;
    std::size_t first_bad = 0;
    for (std::size_t i = 0; i < f.length(); ++i) {
        pf += f.slope(i);
        pg += g.slope(i);
        if (pf > pg && ok) {
            ok = false;
            first_bad = i + 1;
        }
    }
    if (pf != pg && ok) {
        ok = false;
        first_bad = f.length();
    }
    if (!ok && witness) *witness = first_bad;
    return ok;
}

// Pointwise nonnegative linear combination; slopes combine slotwise since
// all summands share integer break structure.
inline ConcavePolygon poly_combine(const std::vector<Rational>& coeffs,
                                   const std::vector<ConcavePolygon>& polys) {
    if (coeffs.size() != polys.size()) throw LengthMismatch();
    if (polys.empty()) return ConcavePolygon();
    std::size_t n = polys[0].length();
    for (const auto& p : polys)
        if (p.length() != n) throw LengthMismatch();
    for (const auto& c : coeffs)
        if (c < 0) throw InputError("poly_combine coefficients must be nonnegative");
    std::vector<Rational> s(n, Rational(0));
    for (std::size_t k = 0; k < polys.size(); ++k)
        for (std::size_t i = 0; i < n; ++i) s[i] += coeffs[k] * polys[k].slope(i);
    return ConcavePolygon(std::move(s));
}

// Slopes (1 - a_n, ..., 1 - a_1); requires slopes in [0,1].
inline ConcavePolygon poly_dual(const ConcavePolygon& f) {
    std::vector<Rational> s;
    s.reserve(f.length());
    for (std::size_t i = f.length(); i-- > 0;) {
        const Rational& a = f.slope(i);
        if (a < 0 || a > 1) throw SlopeOutOfRange("poly_dual requires slopes in [0,1]");
        s.push_back(Rational(1) - a);
    }
    return ConcavePolygon(std::move(s));
}

// A concave piecewise affine function through (0,0) with exact rational
// break points; the common representation for rescaled and hull-valued
// polygons whose breaks need not be integral.
class BreakpointFunction {
public:
    BreakpointFunction() = default;
    // vertices must start at (0,0), have strictly increasing x and concave
    // slope sequence; collinear interior vertices are dropped.
    explicit BreakpointFunction(std::vector<std::pair<Rational, Rational>> vertices)
        : v_(std::move(vertices)) {
        if (v_.empty() || v_.front().first != 0 || v_.front().second != 0)
            throw ValidationError("breakpoint function must start at (0,0)");
        for (std::size_t i = 1; i < v_.size(); ++i)
            if (v_[i - 1].first >= v_[i].first)
                throw ValidationError("breakpoint x-coordinates must increase");
        dedup_collinear();
    }

    const std::vector<std::pair<Rational, Rational>>& vertices() const { return v_; }
    Rational width() const { return v_.back().first; }
    Rational total() const { return v_.back().second; }

    Rational value(const Rational& x) const {
        if (x < 0 || x > width()) throw InputError("evaluated outside domain");
        for (std::size_t i = 1; i < v_.size(); ++i) {
            if (x <= v_[i].first) {
                const auto& [x0, y0] = v_[i - 1];
                const auto& [x1, y1] = v_[i];
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        return v_.back().second;
    }

    // x -> (1/d) f(d x); maps vertices (x,y) -> (x/d, y/d).
    BreakpointFunction rescale(const Int& d) const {
        if (d <= 0) throw InputError("rescale factor must be positive");
        std::vector<std::pair<Rational, Rational>> w;
        w.reserve(v_.size());
        for (const auto& [x, y] : v_) w.emplace_back(x / Rational(d), y / Rational(d));
        return BreakpointFunction(std::move(w));
    }

    bool breaks_integral() const {
        for (const auto& [x, y] : v_)
            if (rat_den(x) != 1) return false;
        return true;
    }

    // Conversion when all breaks land on integers; throws otherwise.
    ConcavePolygon to_polygon() const {
        if (!breaks_integral())
            throw NonIntegralBreaks("break points do not land on integers");
        if (rat_den(width()) != 1) throw NonIntegralBreaks("width is not an integer");
        std::size_t n = rat_num(width()).convert_to<std::size_t>();
        std::vector<Rational> s;
        s.reserve(n);
        Rational prev = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            Rational cur = value(Rational(static_cast<long>(i)));
            s.push_back(cur - prev);
            prev = cur;
        }
        return ConcavePolygon(std::move(s));
    }

    bool operator==(const BreakpointFunction& o) const { return v_ == o.v_; }

    std::string to_string() const {
        std::ostringstream os;
        os << "{";
        for (std::size_t i = 0; i < v_.size(); ++i) {
            if (i) os << ", ";
            os << "(" << polyinv::to_string(v_[i].first) << ", "
               << polyinv::to_string(v_[i].second) << ")";
        }
        os << "}";
        return os.str();
    }

private:
    void dedup_collinear() {
        if (v_.size() < 3) return;
        std::vector<std::pair<Rational, Rational>> out;
        out.push_back(v_[0]);
        for (std::size_t i = 1; i + 1 < v_.size(); ++i) {
            const auto& [x0, y0] = out.back();
            const auto& [x1, y1] = v_[i];
            const auto& [x2, y2] = v_[i + 1];
            if ((y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0)) continue;
            out.push_back(v_[i]);
        }
        out.push_back(v_.back());
        v_ = std::move(out);
    }

    std::vector<std::pair<Rational, Rational>> v_;
};

inline BreakpointFunction to_function(const ConcavePolygon& f) {
    std::vector<std::pair<Rational, Rational>> v;
    v.emplace_back(Rational(0), Rational(0));
    Rational acc = 0;
    for (std::size_t i = 0; i < f.length(); ++i) {
        acc += f.slope(i);
        v.emplace_back(Rational(static_cast<long>(i + 1)), acc);
    }
    if (f.length() == 0) return BreakpointFunction(std::move(v));
    return BreakpointFunction(std::move(v));
}

// x -> (1/d) f(d x) for a polygon on [0,h] with d | h. Returns the exact
// break-point function; use to_polygon() when integrality is needed.
inline BreakpointFunction poly_rescale(const ConcavePolygon& f, const Int& d) {
    if (d <= 0) throw InputError("rescale factor must be positive");
    if (Int(f.length()) % d != 0) throw NonDivisibleHeight("d must divide the height");
    return to_function(f).rescale(d);
}

// Upper concave envelope through (0,0) and the width endpoint.
inline BreakpointFunction concave_hull(std::vector<std::pair<Rational, Rational>> points,
                                       const Rational& width) {
    bool has_origin = false, has_end = false;
    for (const auto& [x, y] : points) {
        if (x < 0 || x > width) throw InputError("hull point outside [0,width]");
        if (x == 0 && y > 0) throw InputError("hull point above the origin");
        if (x == 0 && y == 0) has_origin = true;
        if (x == width) has_end = true;
    }
    if (!has_origin) throw MissingEndpoint("hull requires the point (0,0)");
    if (!has_end) throw MissingEndpoint("hull requires a point at x = width");
    std::sort(points.begin(), points.end());
    // keep the highest point per x
    std::vector<std::pair<Rational, Rational>> uniq;
    for (const auto& pt : points) {
        if (!uniq.empty() && uniq.back().first == pt.first) {
            if (pt.second > uniq.back().second) uniq.back().second = pt.second;
        } else {
            uniq.push_back(pt);
        }
    }
    // Andrew monotone chain, upper hull
    std::vector<std::pair<Rational, Rational>> hull;
    for (const auto& pt : uniq) {
        while (hull.size() >= 2) {
            const auto& [x0, y0] = hull[hull.size() - 2];
            const auto& [x1, y1] = hull[hull.size() - 1];
            // pop if x1 lies on or below the chord x0 -> pt
            if ((y1 - y0) * (pt.first - x1) <= (pt.second - y1) * (x1 - x0))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    return BreakpointFunction(std::move(hull));
}

// Pointwise order for piecewise affine functions on a common domain:
// f <= g everywhere and equal totals. Reports the first x of violation.
inline bool function_leq(const BreakpointFunction& f, const BreakpointFunction& g,
                         Rational* witness_x = nullptr) {
    if (f.width() != g.width()) throw LengthMismatch();
    if (f.total() != g.total()) {
        if (witness_x) *witness_x = f.width();
        return false;
    }
    std::set<Rational> xs;
    for (const auto& [x, y] : f.vertices()) xs.insert(x);
    for (const auto& [x, y] : g.vertices()) xs.insert(x);
    for (const auto& x : xs) {
        if (f.value(x) > g.value(x)) {
            if (witness_x) *witness_x = x;
            return false;
        }
    }
    return true;
}

// Pointwise minimum; exact rational break points.
inline BreakpointFunction function_min(const BreakpointFunction& f,
                                       const BreakpointFunction& g) {
    if (f.width() != g.width()) throw LengthMismatch();
    std::set<Rational> xs;
    for (const auto& [x, y] : f.vertices()) xs.insert(x);
    for (const auto& [x, y] : g.vertices()) xs.insert(x);
    // insert crossings inside every node interval
    std::vector<Rational> nodes(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        Rational x0 = nodes[i], x1 = nodes[i + 1];
        Rational d0 = f.value(x0) - g.value(x0);
        Rational d1 = f.value(x1) - g.value(x1);
        if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
            Rational t = d0 / (d0 - d1);
            xs.insert(x0 + t * (x1 - x0));
        }
    }
    std::vector<std::pair<Rational, Rational>> v;
    for (const auto& x : xs) v.emplace_back(x, std::min(f.value(x), g.value(x)));
    return BreakpointFunction(std::move(v));
}

inline Rational function_sup_distance(const BreakpointFunction& f,
                                      const BreakpointFunction& g) {
    if (f.width() != g.width()) throw LengthMismatch();
    std::set<Rational> xs;
    for (const auto& [x, y] : f.vertices()) xs.insert(x);
    for (const auto& [x, y] : g.vertices()) xs.insert(x);
    Rational best = 0;
    for (const auto& x : xs) {
        Rational d = f.value(x) - g.value(x);
        if (d < 0) d = -d;
        best = std::max(best, d);
    }
    return best;
}

}  // namespace polyinv
