#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace polyinv;
using testutil::poly;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kMinimal = R"({
  "version": "1",
  "model": {"p": 3, "ram_index": 2},
  "datum": {"e": 1, "f": 1, "n": 2,
            "pi_on_omega": [[["p", "0"], ["0", "p"]]]}
})";

}  // namespace

TEST_CASE("shipped inputs parse and validate") {
    for (const char* name : {"/sec52.json", "/wild-p2.json", "/of-module.json"}) {
        InputDocument doc = parse_input(slurp(std::string(POLYINV_DATA_DIR) + name));
        REQUIRE(doc.datum.has_value());
        CHECK_NOTHROW(validate_datum(*doc.datum));
    }
    InputDocument fam = parse_input(slurp(std::string(POLYINV_DATA_DIR) + "/sec52-family.json"));
    REQUIRE(fam.family.has_value());
    CHECK(integral_hodge(instantiate(*fam.family, Rational(1, 6))).averaged ==
          poly({"5/6", "1/6"}));
}

TEST_CASE("unknown fields are rejected by name") {
    std::string text = kMinimal;
    text.replace(text.find("pi_on_omega"), 11, "pi_matrixxx");
    try {
        parse_input(text);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("pi_matrixxx") != std::string::npos);
    }
}

TEST_CASE("shorthand grammar") {
    auto P = testutil::params(3, 1, 6);
    CHECK(*testutil::elem(P, "p").valuation() == Rational(1));
    CHECK(*testutil::elem(P, "p^2").valuation() == Rational(2));
    CHECK(*testutil::elem(P, "3*u^2").valuation() == Rational(4, 3));
    CHECK(*testutil::elem(P, "-1").valuation() == Rational(0));
    CHECK(equal_at_precision(testutil::elem(P, "-u"), -P->u_pow(1)));
    CHECK(testutil::elem(P, "0").is_bottom());
    CHECK_THROWS_AS(testutil::elem(P, "u^"), ShorthandError);
    CHECK_THROWS_AS(testutil::elem(P, "2**3"), ShorthandError);
    CHECK_THROWS_AS(testutil::elem(P, "q"), ShorthandError);
    // beyond-precision monomials are rejected at parse time
    auto Q = testutil::params(3, 1, 6, 1);
    CHECK_THROWS_AS(testutil::elem(Q, "u^7"), ShorthandError);
}

TEST_CASE("document structure errors") {
    CHECK_THROWS_AS(parse_input("not json"), SchemaError);
    CHECK_THROWS_AS(parse_input(R"({"version": "2", "model": {"p": 3}, "datum": {}})"),
                    SchemaError);
    CHECK_THROWS_AS(parse_input(R"({"version": "1"})"), SchemaError);
    // both datum and family present
    CHECK_THROWS_AS(
        parse_input(R"({"version": "1", "model": {"p": 3}, "datum": {}, "family": {}})"),
        SchemaError);
    // family documents must not pin the ramification index
    std::string fam_text = slurp(std::string(POLYINV_DATA_DIR) + "/sec52-family.json");
    fam_text.replace(fam_text.find("\"model\": {"), 10, "\"model\": {\"ram_index\": 6, ");
    CHECK_THROWS_AS(parse_input(fam_text), SchemaError);
    // composite p is an input error
    std::string text = kMinimal;
    text.replace(text.find("\"p\": 3"), 6, "\"p\": 6");
    CHECK_THROWS_AS(parse_input(text), SchemaError);
}

TEST_CASE("slots objects round-trip through the parser") {
    auto doc = parse_input(R"({
      "version": "1",
      "model": {"p": 3, "residue_degree": 2, "ram_index": 2, "precision": 4,
                "residue_poly": [1, 0, 1]},
      "datum": {"e": 1, "f": 1, "n": 1,
                "pi_on_omega": [[[{"slots": [[3, 3], [0, 0]]}]]]}
    })");
    REQUIRE(doc.datum.has_value());
    CHECK(*doc.datum->pi_on_omega[0].at(0, 0).valuation() == Rational(1));
    CHECK_NOTHROW(validate_datum(*doc.datum));
}

TEST_CASE("subobject records and towers parse") {
    auto doc = parse_input(R"({
      "version": "1",
      "model": {"p": 3, "ram_index": 1},
      "datum": {"e": 1, "f": 1, "n": 2,
                "pi_on_omega": [[["p"]]],
                "subobjects_p": [{"height": 1, "degree": "1/2"}],
                "hn_tower": {"1": [{"height": 1, "degree": 1}],
                             "2": [{"height": 2, "degree": 2}]}}
    })");
    REQUIRE(doc.datum.has_value());
    CHECK(doc.datum->subobjects_p->size() == 1);
    CHECK(doc.datum->subobjects_p->front().degree == Rational(1, 2));
    CHECK(doc.datum->hn_tower->size() == 2);
}

TEST_CASE("POLYINV_PRECISION_M overrides the default precision") {
    setenv("POLYINV_PRECISION_M", "5", 1);
    InputDocument doc = parse_input(kMinimal);
    CHECK(doc.datum->model->precision_m() == 5);
    unsetenv("POLYINV_PRECISION_M");
    InputDocument doc2 = parse_input(kMinimal);
    CHECK(doc2.datum->model->precision_m() == ModelRingParams::kDefaultPrecisionM);
}

TEST_CASE("reports are deterministic") {
    InputDocument doc = parse_input(slurp(std::string(POLYINV_DATA_DIR) + "/sec52.json"));
    std::string a = render_report(check_all(*doc.datum));
    std::string b = render_report(check_all(*doc.datum));
    CHECK(a == b);
    CHECK(a.find("Hdg_int        [\"5/6\", \"1/6\"]") != std::string::npos);
}
