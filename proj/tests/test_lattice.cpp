#include <doctest.h>

#include <random>

#include "helpers.hpp"

using namespace polyinv;
using testutil::mat;
using testutil::params;

namespace {

std::vector<Rational> rationals(std::initializer_list<const char*> xs) {
    std::vector<Rational> out;
    for (const char* x : xs) out.push_back(parse_rational(x));
    return out;
}

ModelMatrix random_matrix(std::mt19937_64& rng, const ParamsPtr& P, std::size_t r,
                          std::size_t c) {
    ModelMatrix m(P, r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.at(i, j) = testutil::random_elem(rng, P);
    return m;
}

}  // namespace

TEST_CASE("smith valuations") {
    auto P6 = params(3, 1, 6);
    // the worked example at v(T) = 1/6: T -> u, U*sqrt(p) -> u^5
    ModelMatrix A = mat(P6, {{"0", "0", "u^5"}, {"1", "0", "0"}, {"0", "u", "0"}});
    ElementaryDivisors ed = smith_valuations(A);
    CHECK(ed.rank_deficit == 0);
    CHECK(ed.vals == rationals({"5/6", "1/6", "0"}));

    auto P2 = params(3, 1, 2);
    CHECK(smith_valuations(ModelMatrix::identity(P2, 4)).vals == rationals({"0", "0", "0", "0"}));
    ModelMatrix B = mat(P2, {{"u", "1"}, {"0", "u"}});
    CHECK(smith_valuations(B).vals == rationals({"1", "0"}));
    // singular matrices report the rank deficit
    ModelMatrix Z(P2, 2, 2);
    CHECK(smith_valuations(Z).rank_deficit == 2);
}

TEST_CASE("fitting valuations are suffix sums") {
    auto P = params(3, 1, 2);
    ModelMatrix D = mat(P, {{"p", "0"}, {"0", "1"}});
    CHECK(fitting_valuations(D) == rationals({"1", "0", "0"}));
    auto P6 = params(3, 1, 6);
    ModelMatrix A = mat(P6, {{"0", "0", "u^5"}, {"1", "0", "0"}, {"0", "u", "0"}});
    CHECK(fitting_valuations(A) == rationals({"1", "1/6", "0", "0"}));
    ModelMatrix Z(P, 1, 1);
    CHECK_THROWS_AS(fitting_valuations(Z), PrecisionExhausted);
}

TEST_CASE("minor oracle agrees with the smith route") {
    auto P = params(3, 1, 2);
    CHECK(minor_fitting_oracle(mat(P, {{"p", "0"}, {"0", "1"}})) == rationals({"1", "0", "0"}));
    CHECK(minor_fitting_oracle(mat(P, {{"u", "1"}, {"0", "u"}})) == rationals({"1", "0", "0"}));
    CHECK_THROWS_AS(minor_fitting_oracle(ModelMatrix(P, 6, 6)), TooLarge);

    auto Q = params(3, 1, 4, 16);
    std::mt19937_64 rng(17);
    for (int t = 0; t < 60; ++t) {
        std::size_t r = 1 + testutil::rand_below(rng, 4);
        std::size_t c = 1 + testutil::rand_below(rng, 4);
        ModelMatrix A = random_matrix(rng, Q, r, c);
        std::vector<Rational> via_minors, via_smith;
        bool minors_ok = true, smith_ok = true;
        try {
            via_minors = minor_fitting_oracle(A);
        } catch (const PrecisionExhausted&) {
            minors_ok = false;
        }
        try {
            via_smith = fitting_valuations(A);
        } catch (const PrecisionExhausted&) {
            smith_ok = false;
        }
        REQUIRE(minors_ok == smith_ok);
        if (minors_ok) CHECK(via_minors == via_smith);
    }
}

TEST_CASE("kernel rank chain") {
    auto P = params(3, 1, 6);
    const GFContext& gf = P->gf();
    // the worked example: basis (f1, f2, f4), pi: f1 -> f2, f2 -> 0, f4 -> 0
    GFMatrix N(&gf, 3, 3);
    N.at(1, 0) = gf.one();
    CHECK(kernel_rank_chain(N, 3) == std::vector<int>{2, 1, 0});
    GFMatrix Z(&gf, 4, 4);
    CHECK(kernel_rank_chain(Z, 3) == std::vector<int>{4, 0, 0});
    GFMatrix J(&gf, 3, 3);  // one Jordan block of size e = 3
    J.at(0, 1) = gf.one();
    J.at(1, 2) = gf.one();
    CHECK(kernel_rank_chain(J, 3) == std::vector<int>{1, 1, 1});
    GFMatrix I3 = GFMatrix::identity(&gf, 3);
    CHECK_THROWS_AS(kernel_rank_chain(I3, 2), NotNilpotentAtE);
}

TEST_CASE("kernel rank chain is nonincreasing on random nilpotents") {
    auto P = params(3, 1, 1);
    const GFContext& gf = P->gf();
    std::mt19937_64 rng(41);
    for (int t = 0; t < 60; ++t) {
        std::size_t m = 1 + testutil::rand_below(rng, 5);
        GFMatrix N(&gf, m, m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                N.at(i, j) = gf.from_int(testutil::rand_below(rng, 3));
        std::vector<int> g = kernel_rank_chain(N, static_cast<int>(m));
        for (std::size_t j = 1; j < g.size(); ++j) CHECK(g[j] <= g[j - 1]);
    }
}

TEST_CASE("limit mode works over a ramified model") {
    auto P = params(3, 1, 2, 24);
    ModelMatrix A = mat(P, {{"0", "1"}, {"p", "0"}});
    auto want = rationals({"1/2", "1/2"});
    CHECK(newton_slopes(A, NewtonMode::charpoly) == want);
    CHECK(newton_slopes(A, NewtonMode::limit, Rational(1, 24)) == want);
}

TEST_CASE("semilinear powers") {
    auto P = params(5, 1, 1);
    ModelMatrix A = mat(P, {{"2", "1"}, {"0", "3"}});
    CHECK(semilinear_power(A, 1).sub(A).is_zero_at_precision());
    CHECK(semilinear_power(A, 2).sub(A.mul(A)).is_zero_at_precision());

    auto Q = ModelRingParams::create(Int(3), 2, 1, 6, {Int(1), Int(0), Int(1)});
    RingElem y(Q, {GRElem{Int(0), Int(1)}}, Q->max_uprec());
    ModelMatrix Y(Q, 1, 1);
    Y.at(0, 0) = y;
    ModelMatrix Y2 = semilinear_power(Y, 2);
    CHECK(equal_at_precision(Y2.at(0, 0), y * frobenius(y)));
    // y * sigma(y) is the norm down to Z_p; for y^2 = -1 it is -(-1) = 1
    CHECK(*Y2.at(0, 0).valuation() == Rational(0));
}

TEST_CASE("newton slopes via charpoly and via limit") {
    auto P = params(3, 1, 1);
    ModelMatrix A = mat(P, {{"0", "p", "0"}, {"0", "0", "p"}, {"1", "0", "0"}});
    auto want_23 = rationals({"2/3", "2/3", "2/3"});
    CHECK(newton_slopes(A, NewtonMode::charpoly) == want_23);
    CHECK(newton_slopes(A, NewtonMode::limit, Rational(1, 24)) == want_23);
    ModelMatrix B = mat(P, {{"0", "0", "p"}, {"1", "0", "0"}, {"0", "1", "0"}});
    auto want_13 = rationals({"1/3", "1/3", "1/3"});
    CHECK(newton_slopes(B, NewtonMode::charpoly) == want_13);
    CHECK(newton_slopes(B, NewtonMode::limit, Rational(1, 24)) == want_13);
    ModelMatrix C = mat(P, {{"p"}});
    CHECK(newton_slopes(C, NewtonMode::charpoly) == rationals({"1"}));
    // mixed block: slopes 1 and 0
    ModelMatrix D = mat(P, {{"p", "0"}, {"0", "1"}});
    CHECK(newton_slopes(D, NewtonMode::charpoly) == rationals({"1", "0"}));
    CHECK(newton_slopes(D, NewtonMode::limit, Rational(1, 24)) == rationals({"1", "0"}));
}

TEST_CASE("injection monotonicity of elementary divisors") {
    // submodules of M = sum O/u^(a_j), generated by random elements; the
    // divisor valuations of the submodule never exceed those of M slotwise
    auto P = params(3, 1, 2, 16);
    std::mt19937_64 rng(23);
    for (int t = 0; t < 60; ++t) {
        std::size_t m = 1 + testutil::rand_below(rng, 3);
        std::size_t mprime = 1 + testutil::rand_below(rng, 4);
        std::vector<int> a_exp(m);
        for (auto& e : a_exp) e = testutil::rand_below(rng, 7);
        ModelMatrix X = random_matrix(rng, P, m, mprime);
        FieldMatrix Y(m, std::vector<FieldElem>(mprime));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < mprime; ++j) Y[i][j] = FieldElem(X.at(i, j), a_exp[i]);
        ColumnSmith cs = column_transform_snf(std::move(Y), P);
        ModelMatrix pres = cs.V;
        for (std::size_t j = 0; j < mprime; ++j) {
            int texp = 0;
            if (cs.diag[j] && *cs.diag[j] < 0)
                texp = (-rat_num(*cs.diag[j] * P->ram_index())).convert_to<int>();
            RingElem sc = P->u_pow(texp);
            for (std::size_t i = 0; i < mprime; ++i) pres.at(i, j) = pres.at(i, j) * sc;
        }
        std::vector<Rational> b = smith_valuations(pres).vals;
        std::vector<Rational> a;
        for (int e : a_exp) a.emplace_back(e, P->ram_index());
        std::sort(a.begin(), a.end(), std::greater<Rational>());
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (j < a.size())
                CHECK(b[j] <= a[j]);
            else
                CHECK(b[j] == 0);
        }
    }
}

TEST_CASE("surjection monotonicity of elementary divisors") {
    // quotients of M = sum O/u^(a_j) by random elements, presented by the
    // augmented matrix [diag | Z]
    auto P = params(2, 1, 3, 16);
    std::mt19937_64 rng(29);
    for (int t = 0; t < 60; ++t) {
        std::size_t m = 1 + testutil::rand_below(rng, 3);
        std::size_t k = testutil::rand_below(rng, 3);
        std::vector<int> a_exp(m);
        for (auto& e : a_exp) e = testutil::rand_below(rng, 8);
        ModelMatrix pres(P, m, m + k);
        for (std::size_t i = 0; i < m; ++i) pres.at(i, i) = P->u_pow(a_exp[i]);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < m; ++i)
                pres.at(i, m + j) = testutil::random_elem(rng, P);
        std::vector<Rational> b = smith_valuations(pres).vals;
        std::vector<Rational> a;
        for (int e : a_exp) a.emplace_back(e, P->ram_index());
        std::sort(a.begin(), a.end(), std::greater<Rational>());
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (j < a.size())
                CHECK(b[j] <= a[j]);
            else
                CHECK(b[j] == 0);
        }
    }
}

TEST_CASE("saturation ranks") {
    auto P = params(5, 1, 2, 16);
    RingElem t1 = P->u_pow(1);
    RingElem t2 = -P->u_pow(1);
    ModelMatrix A(P, 2, 2);
    A.at(0, 0) = t1;
    A.at(1, 1) = t2;
    CHECK(saturation_ranks(A, {t1, t2}) == std::vector<int>{1, 1});
    ModelMatrix S(P, 3, 3);
    for (int i = 0; i < 3; ++i) S.at(i, i) = t1;
    CHECK(saturation_ranks(S, {t1}) == std::vector<int>{3});
    CHECK_THROWS_AS(saturation_ranks(S, {t1, t1}), EigenvalueCollision);
    // the wild counterexample: ranks (1,1) but residues span only a line
    auto W = params(2, 1, 2, 16);
    ModelMatrix B = mat(W, {{"u", "u"}, {"0", "-u"}});
    RingElem w1 = W->u_pow(1), w2 = -W->u_pow(1);
    CHECK(saturation_ranks(B, {w1, w2}) == std::vector<int>{1, 1});
    auto b1 = saturated_kernel_basis(B, w1);
    auto b2 = saturated_kernel_basis(B, w2);
    REQUIRE(b1.size() == 1);
    REQUIRE(b2.size() == 1);
    GFMatrix joint(&W->gf(), 2, 2);
    for (int i = 0; i < 2; ++i) {
        joint.at(i, 0) = b1[0][i].residue();
        joint.at(i, 1) = b2[0][i].residue();
    }
    CHECK(joint.rank() == 1);
}

TEST_CASE("saturated eigenlattices scaled by rho_I land in the column lattice") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 25; ++t) {
        RandomDatumOptions opt;
        opt.p = (t % 2) ? Int(3) : Int(2);
        opt.e = 2 + t % 2;
        opt.f = 1;
        opt.n = 2;
        StructuredDatum dat = random_valid_datum(rng, opt);
        const ModelMatrix& A = dat.pi_on_omega[0];
        if (A.rows() == 0) continue;
        const auto& taus = (*dat.tau_pi)[0];
        // singletons I = {tau} and the full set
        std::vector<std::vector<std::size_t>> subsets;
        for (std::size_t i = 0; i < taus.size(); ++i) subsets.push_back({i});
        std::vector<std::size_t> all(taus.size());
        for (std::size_t i = 0; i < taus.size(); ++i) all[i] = i;
        subsets.push_back(all);
        for (const auto& I : subsets) {
            ModelMatrix C = ModelMatrix::identity(dat.model, A.rows());
            RingElem rho = dat.model->one();
            for (auto i : I) {
                C = C.mul(A.sub(ModelMatrix::identity(dat.model, A.rows()).scale(taus[i])));
                rho = rho * taus[i];
            }
            std::vector<std::vector<RingElem>> basis;
            try {
                basis = saturated_kernel_of(C);
            } catch (const PrecisionExhausted&) {
                continue;
            }
            for (const auto& w : basis) {
                ModelMatrix rhs(dat.model, A.rows(), 1);
                for (std::size_t i = 0; i < A.rows(); ++i) rhs.at(i, 0) = rho * w[i];
                auto X = field_solve(A, rhs);
                for (std::size_t i = 0; i < A.rows(); ++i)
                    CHECK_NOTHROW(X[i][0].to_ring());  // integral solution exists
            }
        }
    }
}
