#pragma once

#include <map>
#include <random>
#include <vector>

#include "polyinv/invariants.hpp"
#include "polyinv/lattice.hpp"
#include "polyinv/ring.hpp"

namespace polyinv {

namespace detail {

// deterministic across standard libraries, unlike uniform_int_distribution
inline int rand_below(std::mt19937_64& rng, int k) {
    return k <= 1 ? 0 : static_cast<int>(rng() % static_cast<unsigned>(k));
}

}  // namespace detail

struct RandomDatumOptions {
    Int p = 3;
    int e = 2;
    int f = 1;
    int n = 2;
    int precision_m = 12;
    int conjugations = 6;
    bool max_case = false;  // build an instance with Hdg_int = PR = Hdg(H_k)
};

// Builds a valid datum in the block form of the Pappas-Rapoport filtration:
// per embedding an upper block-triangular matrix with diagonal blocks
// tau_i(pi) * I of valuation 1/e and integral coupling blocks, conjugated by
// random elementary matrices. r_tau and tau_pi are derived from the blocks.
inline StructuredDatum random_valid_datum(std::mt19937_64& rng, const RandomDatumOptions& opt) {
    int N = opt.e;  // u^(N/e) realises the valuation 1/e
    ParamsPtr params = ModelRingParams::create(opt.p, 1, N, opt.precision_m);
    for (int attempt = 0; attempt < 64; ++attempt) {
        StructuredDatum dat;
        dat.model = params;
        dat.e = opt.e;
        dat.f = opt.f;
        dat.n = opt.n;
        std::vector<int> r_tau_all;
        std::vector<std::vector<RingElem>> tau_pi_all;
        bool bad = false;
        for (int v = 0; v < opt.f && !bad; ++v) {
            std::vector<int> r(opt.e);
            for (int i = 0; i < opt.e; ++i) r[i] = detail::rand_below(rng, opt.n + 1);
            if (opt.max_case) std::sort(r.begin(), r.end(), std::greater<int>());
            int rv = 0;
            for (int ri : r) rv += ri;
            std::vector<RingElem> taus;
            for (int i = 0; i < opt.e; ++i)
                taus.push_back(params->monomial(1 + Int(i) * opt.p, 1));
            ModelMatrix A(params, rv, rv);
            std::vector<int> offset(opt.e + 1, 0);
            for (int i = 0; i < opt.e; ++i) offset[i + 1] = offset[i] + r[i];
            for (int i = 0; i < opt.e; ++i)
                for (int k = 0; k < r[i]; ++k) A.at(offset[i] + k, offset[i] + k) = taus[i];
            if (opt.max_case) {
                // superdiagonal couplings with full residue rank, as in the
                // equality case of the maximality criterion
                for (int i = 0; i + 1 < opt.e; ++i)
                    for (int k = 0; k < r[i + 1]; ++k)
                        A.at(offset[i] + k, offset[i + 1] + k) = params->one();
            } else {
                for (int i = 0; i < opt.e; ++i)
                    for (int j = i + 1; j < opt.e; ++j)
                        for (int a = 0; a < r[i]; ++a)
                            for (int b = 0; b < r[j]; ++b) {
                                int kind = detail::rand_below(rng, 4);
                                if (kind == 0) continue;  // leave zero
                                Int c = 1 + detail::rand_below(rng, 3);
                                int uexp = detail::rand_below(rng, N + 2);
                                A.at(offset[i] + a, offset[j] + b) = params->monomial(c, uexp);
                            }
            }
            // conjugate by elementary matrices: row_i += c row_j, col_j -= c col_i
            for (int t = 0; t < opt.conjugations && rv >= 2; ++t) {
                int i = detail::rand_below(rng, rv);
                int j = detail::rand_below(rng, rv);
                if (i == j) continue;
                RingElem c = params->monomial(1 + detail::rand_below(rng, 2),
                                              detail::rand_below(rng, N + 1));
                for (int k = 0; k < rv; ++k)
                    A.at(i, k) = A.at(i, k) + c * A.at(j, k);
                for (int k = 0; k < rv; ++k)
                    A.at(k, j) = A.at(k, j) - A.at(k, i) * c;
            }
            dat.pi_on_omega.push_back(A);
            for (int ri : r) r_tau_all.push_back(ri);
            tau_pi_all.push_back(std::move(taus));
        }
        if (bad) continue;
        dat.r_tau = r_tau_all;
        dat.tau_pi = tau_pi_all;
        try {
            validate_datum(dat);
            integral_hodge(dat);
            hodge_special_fibre(dat, HodgeSource::omega);
        } catch (const NotRealizable&) {
            continue;
        } catch (const PrecisionExhausted&) {
            continue;
        }
        return dat;
    }
    throw Error("random datum generation kept hitting unrealisable instances");
}

// pi-diagonal datum with subobject records and an hn_tower built from
// nested coordinate sublattices, respecting the pi-power exact sequences:
// heights j*f*m with degrees j*f*m/e, proportional across tower levels.
inline StructuredDatum random_diagonal_tower_datum(std::mt19937_64& rng,
                                                   const RandomDatumOptions& opt) {
    int N = opt.e;
    ParamsPtr params = ModelRingParams::create(opt.p, 1, N, opt.precision_m);
    StructuredDatum dat;
    dat.model = params;
    dat.e = opt.e;
    dat.f = opt.f;
    dat.n = opt.n;
    int rmin = opt.n;
    std::vector<int> r_tau_all;
    for (int v = 0; v < opt.f; ++v) {
        int rv = detail::rand_below(rng, opt.n + 1);
        rmin = std::min(rmin, rv);
        ModelMatrix A(params, rv, rv);
        for (int k = 0; k < rv; ++k)
            A.at(k, k) = params->monomial(1 + Int(detail::rand_below(rng, 2)) * opt.p, 1);
        dat.pi_on_omega.push_back(A);
        // distribute rv over the e embeddings restricting to v
        std::vector<int> r(opt.e, 0);
        int left = rv;
        for (int i = 0; i < opt.e && left > 0; ++i) {
            r[i] = std::min(left, detail::rand_below(rng, opt.n + 1));
            left -= r[i];
        }
        if (left > 0) {
            for (int i = 0; i < opt.e && left > 0; ++i) {
                int add = std::min(opt.n - r[i], left);
                r[i] += add;
                left -= add;
            }
        }
        for (int ri : r) r_tau_all.push_back(ri);
    }
    dat.r_tau = r_tau_all;
    // nested subset sizes m_1 < m_2 <= rmin
    std::vector<int> sizes;
    if (rmin >= 1) sizes.push_back(1 + detail::rand_below(rng, rmin));
    if (rmin >= 2 && sizes[0] < rmin) sizes.push_back(rmin);
    std::vector<SubobjectRecord> recs_pi, recs_p;
    for (int m : sizes) {
        Rational deg(Int(dat.f) * m, opt.e);
        recs_pi.push_back({Int(dat.f) * m, deg});
        for (int j = 1; j <= opt.e; ++j)
            recs_p.push_back({Int(j) * dat.f * m, Rational(Int(j) * dat.f * m, opt.e)});
    }
    dat.subobjects_pi = recs_pi;
    dat.subobjects_p = recs_p;
    std::map<int, std::vector<SubobjectRecord>> tower;
    for (int lvl = 1; lvl <= 3; ++lvl) {
        std::vector<SubobjectRecord> lv;
        for (const auto& rec : recs_p) lv.push_back({rec.height * lvl, rec.degree * lvl});
        tower[lvl] = std::move(lv);
    }
    dat.hn_tower = tower;
    return dat;
}

}  // namespace polyinv
