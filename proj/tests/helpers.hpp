#pragma once

#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "polyinv/io.hpp"
#include "polyinv/polyinv.hpp"

namespace testutil {

using namespace polyinv;

inline ParamsPtr params(long p, int fprime, int N, int M = 24) {
    return ModelRingParams::create(Int(p), fprime, N, M);
}

inline RingElem elem(const ParamsPtr& P, const std::string& shorthand) {
    return detail::parse_ring_entry(Json(shorthand), P, "test");
}

inline ModelMatrix mat(const ParamsPtr& P,
                       std::initializer_list<std::initializer_list<const char*>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows.begin()->size() : 0;
    ModelMatrix m(P, r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (const char* s : row) m.at(i, j++) = elem(P, s);
        ++i;
    }
    return m;
}

inline ConcavePolygon poly(std::initializer_list<const char*> slopes) {
    std::vector<Rational> s;
    for (const char* x : slopes) s.push_back(parse_rational(x));
    return ConcavePolygon(std::move(s));
}

inline int rand_below(std::mt19937_64& rng, int k) {
    return k <= 1 ? 0 : static_cast<int>(rng() % static_cast<unsigned>(k));
}

// random element with valuation >= 0 and a sprinkle of zeros
inline RingElem random_elem(std::mt19937_64& rng, const ParamsPtr& P, bool allow_zero = true) {
    if (allow_zero && rand_below(rng, 4) == 0) return P->zero();
    Int c = 1 + rand_below(rng, 6);
    if (rand_below(rng, 2)) c = -c;
    int uexp = rand_below(rng, 2 * P->ram_index());
    RingElem x = P->monomial(c, uexp);
    if (rand_below(rng, 2)) x = x + P->monomial(1 + rand_below(rng, 3), rand_below(rng, 3));
    return x;
}

}  // namespace testutil
