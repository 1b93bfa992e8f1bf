#pragma once

#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyinv/errors.hpp"
#include "polyinv/family.hpp"
#include "polyinv/invariants.hpp"
#include "polyinv/ring.hpp"

namespace polyinv {

using Json = nlohmann::json;

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed,
                           const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw SchemaError(path, "unknown field '" + it.key() + "'");
}

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw SchemaError(path, "missing field '" + key + "'");
    return obj.at(key);
}

inline int as_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    return j.get<int>();
}

inline Rational as_rational(const Json& j, const std::string& path) {
    try {
        if (j.is_number_integer()) return Rational(j.get<long>());
        if (j.is_string()) return parse_rational(j.get<std::string>());
    } catch (const InputError& e) {
        throw SchemaError(path, e.what());
    }
    throw SchemaError(path, "expected an integer or a rational string \"num/den\"");
}

// Shorthand grammar: ['-'] factor ('*' factor)*, factor = integer | p['^'k]
// | u['^'k]. Returns the constant, the p-exponent and the u-exponent.
struct Shorthand {
    Int c = 1;
    int p_exp = 0;
    int u_exp = 0;
};

inline Shorthand parse_shorthand(const std::string& s, const std::string& path) {
    Shorthand out;
    std::size_t i = 0;
    if (s.empty()) throw ShorthandError("empty entry at " + path);
    if (s[0] == '-') {
        out.c = -1;
        i = 1;
    }
    bool expect_factor = true;
    while (i < s.size()) {
        if (!expect_factor) {
            if (s[i] != '*') throw ShorthandError("expected '*' in \"" + s + "\" at " + path);
            ++i;
            expect_factor = true;
            continue;
        }
        if (s[i] == 'p' || s[i] == 'u') {
            char which = s[i++];
            int k = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                std::size_t start = i;
                while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) ++i;
                if (start == i) throw ShorthandError("missing exponent in \"" + s + "\"");
                k = std::stoi(s.substr(start, i - start));
            }
            (which == 'p' ? out.p_exp : out.u_exp) += k;
        } else if (isdigit(static_cast<unsigned char>(s[i]))) {
            std::size_t start = i;
            while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) ++i;
            out.c *= Int(s.substr(start, i - start));
        } else {
            throw ShorthandError("unexpected character '" + std::string(1, s[i]) + "' in \"" +
                                 s + "\" at " + path);
        }
        expect_factor = false;
    }
    if (expect_factor) throw ShorthandError("dangling '*' in \"" + s + "\" at " + path);
    return out;
}

inline RingElem parse_ring_entry(const Json& j, const ParamsPtr& params,
                                 const std::string& path) {
    if (j.is_number_integer()) return params->from_int(Int(j.get<long>()));
    if (j.is_string()) {
        Shorthand sh = parse_shorthand(j.get<std::string>(), path);
        if (sh.u_exp >= params->max_uprec())
            throw ShorthandError("u^" + std::to_string(sh.u_exp) +
                                 " lies beyond precision u^" +
                                 std::to_string(params->max_uprec()) + " at " + path);
        Int c = sh.c;
        for (int k = 0; k < sh.p_exp; ++k) c *= params->p();
        return params->monomial(c, sh.u_exp);
    }
    if (j.is_object()) {
        reject_unknown(j, {"slots"}, path);
        const Json& slots = require(j, "slots", path);
        if (!slots.is_array() || static_cast<int>(slots.size()) != params->ram_index())
            throw SchemaError(path, "slots must list ram_index coefficient vectors");
        std::vector<GRElem> s;
        for (const auto& slot : slots) {
            if (!slot.is_array() || static_cast<int>(slot.size()) != params->residue_degree())
                throw SchemaError(path, "each slot needs residue_degree coefficients");
            GRElem g;
            for (const auto& coef : slot) {
                if (coef.is_number_integer())
                    g.emplace_back(coef.get<long>());
                else if (coef.is_string())
                    g.emplace_back(Int(coef.get<std::string>()));
                else
                    throw SchemaError(path, "slot coefficients must be integers");
            }
            s.push_back(std::move(g));
        }
        return RingElem(params, std::move(s), params->max_uprec());
    }
    throw SchemaError(path, "entry must be an integer, a shorthand string or a slots object");
}

inline ModelMatrix parse_matrix(const Json& j, const ParamsPtr& params, const std::string& path) {
    if (!j.is_array() || j.empty()) {
        if (j.is_array()) return ModelMatrix(params, 0, 0);
        throw SchemaError(path, "expected a matrix (array of rows)");
    }
    std::size_t rows = j.size();
    std::size_t cols = j.at(0).is_array() ? j.at(0).size() : 0;
    ModelMatrix m(params, rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const Json& row = j.at(i);
        if (!row.is_array() || row.size() != cols)
            throw SchemaError(path, "matrix rows must have equal length");
        for (std::size_t k = 0; k < cols; ++k)
            m.at(i, k) = parse_ring_entry(row.at(k), params,
                                          path + "[" + std::to_string(i) + "][" +
                                              std::to_string(k) + "]");
    }
    return m;
}

inline std::vector<SubobjectRecord> parse_records(const Json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of records");
    std::vector<SubobjectRecord> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Json& rec = j.at(i);
        std::string p = path + "[" + std::to_string(i) + "]";
        if (!rec.is_object()) throw SchemaError(p, "record must be an object");
        reject_unknown(rec, {"height", "degree"}, p);
        SubobjectRecord r;
        r.height = Int(as_int(require(rec, "height", p), p + ".height"));
        r.degree = as_rational(require(rec, "degree", p), p + ".degree");
        out.push_back(std::move(r));
    }
    return out;
}

inline int env_precision_m() {
    if (const char* env = std::getenv("POLYINV_PRECISION_M")) {
        int m = std::atoi(env);
        if (m >= 1) return m;
    }
    return ModelRingParams::kDefaultPrecisionM;
}

inline FamilyEntry parse_family_entry(const Json& j, const std::string& path) {
    FamilyEntry e;
    if (j.is_number_integer()) {
        e.c = j.get<long>();
        return e;
    }
    if (j.is_string()) {
        Shorthand sh = parse_shorthand(j.get<std::string>(), path);
        if (sh.u_exp != 0)
            throw ShorthandError("u powers are ambiguous in a family; use a mono object with a "
                                 "valuation at " + path);
        e.c = sh.c;
        e.u_val = Rational(sh.p_exp);
        return e;
    }
    if (j.is_object()) {
        reject_unknown(j, {"mono"}, path);
        const Json& m = require(j, "mono", path);
        if (!m.is_object()) throw SchemaError(path, "mono must be an object");
        e.c = 1;
        for (auto it = m.begin(); it != m.end(); ++it) {
            if (it.key() == "c") {
                Shorthand sh = parse_shorthand(it.value().is_string()
                                                   ? it.value().get<std::string>()
                                                   : std::to_string(it.value().get<long>()),
                                               path + ".c");
                if (sh.u_exp != 0)
                    throw ShorthandError("mono constant cannot carry u powers at " + path);
                e.c = sh.c;
                e.u_val += Rational(sh.p_exp);
            } else if (it.key() == "u") {
                e.u_val += as_rational(it.value(), path + ".u");
            } else {
                e.powers[it.key()] = as_int(it.value(), path + "." + it.key());
            }
        }
        return e;
    }
    throw SchemaError(path, "entry must be an integer, a shorthand string or a mono object");
}

}  // namespace detail

struct InputDocument {
    std::string version;
    std::optional<StructuredDatum> datum;
    std::optional<FamilyDatum> family;
};

inline InputDocument parse_input(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("$", "document must be an object");
    detail::reject_unknown(doc, {"version", "model", "datum", "family"}, "$");
    InputDocument out;
    out.version = detail::require(doc, "version", "$").get<std::string>();
    if (out.version != "1") throw SchemaError("$.version", "unsupported version " + out.version);
    const Json& model = detail::require(doc, "model", "$");
    detail::reject_unknown(model, {"p", "residue_degree", "ram_index", "precision",
                                   "residue_poly"},
                           "$.model");
    Int p = Int(detail::as_int(detail::require(model, "p", "$.model"), "$.model.p"));
    int fprime = model.contains("residue_degree")
                     ? detail::as_int(model.at("residue_degree"), "$.model.residue_degree")
                     : 1;
    int M = model.contains("precision") ? detail::as_int(model.at("precision"), "$.model.precision")
                                        : detail::env_precision_m();
    std::vector<Int> poly;
    if (model.contains("residue_poly")) {
        if (!model.at("residue_poly").is_array())
            throw SchemaError("$.model.residue_poly", "expected an integer array");
        for (const auto& ci : model.at("residue_poly"))
            poly.emplace_back(detail::as_int(ci, "$.model.residue_poly[]"));
    }
    if (doc.contains("datum") == doc.contains("family"))
        throw SchemaError("$", "exactly one of 'datum' or 'family' is required");

    if (doc.contains("datum")) {
        if (!model.contains("ram_index"))
            throw SchemaError("$.model", "missing field 'ram_index'");
        int N = detail::as_int(model.at("ram_index"), "$.model.ram_index");
        ParamsPtr params;
        try {
            params = ModelRingParams::create(p, fprime, N, M, poly);
        } catch (const ValidationError& e) {
            throw SchemaError("$.model", e.what());
        }
        const Json& d = doc.at("datum");
        detail::reject_unknown(d,
                               {"e", "f", "n", "pi_on_omega", "tau_pi", "r_tau", "phi",
                                "pi_on_D", "subobjects_p", "subobjects_pi", "hn_tower"},
                               "$.datum");
        StructuredDatum dat;
        dat.model = params;
        dat.e = detail::as_int(detail::require(d, "e", "$.datum"), "$.datum.e");
        dat.f = detail::as_int(detail::require(d, "f", "$.datum"), "$.datum.f");
        dat.n = detail::as_int(detail::require(d, "n", "$.datum"), "$.datum.n");
        const Json& po = detail::require(d, "pi_on_omega", "$.datum");
        if (!po.is_array()) throw SchemaError("$.datum.pi_on_omega", "expected matrices per v");
        for (std::size_t v = 0; v < po.size(); ++v)
            dat.pi_on_omega.push_back(detail::parse_matrix(
                po.at(v), params, "$.datum.pi_on_omega[" + std::to_string(v) + "]"));
        if (d.contains("tau_pi")) {
            const Json& tp = d.at("tau_pi");
            if (!tp.is_array()) throw SchemaError("$.datum.tau_pi", "expected arrays per v");
            std::vector<std::vector<RingElem>> all;
            for (std::size_t v = 0; v < tp.size(); ++v) {
                std::vector<RingElem> lst;
                for (std::size_t i = 0; i < tp.at(v).size(); ++i)
                    lst.push_back(detail::parse_ring_entry(
                        tp.at(v).at(i), params,
                        "$.datum.tau_pi[" + std::to_string(v) + "][" + std::to_string(i) + "]"));
                all.push_back(std::move(lst));
            }
            dat.tau_pi = std::move(all);
        }
        if (d.contains("r_tau")) {
            std::vector<int> rt;
            for (const auto& x : d.at("r_tau")) rt.push_back(detail::as_int(x, "$.datum.r_tau[]"));
            dat.r_tau = std::move(rt);
        }
        if (d.contains("phi")) dat.phi = detail::parse_matrix(d.at("phi"), params, "$.datum.phi");
        if (d.contains("pi_on_D"))
            dat.pi_on_D = detail::parse_matrix(d.at("pi_on_D"), params, "$.datum.pi_on_D");
        if (d.contains("subobjects_p"))
            dat.subobjects_p = detail::parse_records(d.at("subobjects_p"), "$.datum.subobjects_p");
        if (d.contains("subobjects_pi"))
            dat.subobjects_pi =
                detail::parse_records(d.at("subobjects_pi"), "$.datum.subobjects_pi");
        if (d.contains("hn_tower")) {
            if (!d.at("hn_tower").is_object())
                throw SchemaError("$.datum.hn_tower", "expected an object keyed by level");
            std::map<int, std::vector<SubobjectRecord>> tower;
            for (auto it = d.at("hn_tower").begin(); it != d.at("hn_tower").end(); ++it) {
                int lvl = 0;
                try {
                    lvl = std::stoi(it.key());
                } catch (const std::exception&) {
                    throw SchemaError("$.datum.hn_tower", "level keys must be integers");
                }
                tower[lvl] =
                    detail::parse_records(it.value(), "$.datum.hn_tower." + it.key());
            }
            dat.hn_tower = std::move(tower);
        }
        out.datum = std::move(dat);
        return out;
    }

    // family document
    if (model.contains("ram_index"))
        throw SchemaError("$.model", "ram_index is chosen per sample in a family document");
    const Json& fam = doc.at("family");
    detail::reject_unknown(
        fam, {"e", "f", "n", "params", "constraints", "domain", "pi_on_omega", "r_tau"},
        "$.family");
    FamilyDatum fd;
    fd.p = p;
    fd.residue_degree = fprime;
    fd.precision_m = M;
    fd.residue_poly = poly;
    fd.e = detail::as_int(detail::require(fam, "e", "$.family"), "$.family.e");
    fd.f = detail::as_int(detail::require(fam, "f", "$.family"), "$.family.f");
    fd.n = detail::as_int(detail::require(fam, "n", "$.family"), "$.family.n");
    std::set<std::string> declared;
    const Json& ps = detail::require(fam, "params", "$.family");
    if (!ps.is_array()) throw SchemaError("$.family.params", "expected an array of names");
    for (const auto& name : ps) {
        if (!name.is_string()) throw SchemaError("$.family.params", "names must be strings");
        declared.insert(name.get<std::string>());
    }
    const Json& cons = detail::require(fam, "constraints", "$.family");
    if (!cons.is_object()) throw SchemaError("$.family.constraints", "expected an object");
    for (auto it = cons.begin(); it != cons.end(); ++it) {
        if (!declared.count(it.key()))
            throw SchemaError("$.family.constraints", "constraint for undeclared parameter '" +
                                                          it.key() + "'");
        const Json& c = it.value();
        detail::reject_unknown(c, {"const", "coef"}, "$.family.constraints." + it.key());
        AffineForm form;
        if (c.contains("const"))
            form.constant = detail::as_rational(c.at("const"), "$.family.constraints.const");
        if (c.contains("coef"))
            form.coef = detail::as_rational(c.at("coef"), "$.family.constraints.coef");
        fd.constraints[it.key()] = form;
    }
    for (const auto& name : declared)
        if (!fd.constraints.count(name))
            throw SchemaError("$.family.constraints", "missing constraint for parameter '" +
                                                          name + "'");
    const Json& dom = detail::require(fam, "domain", "$.family");
    detail::reject_unknown(dom, {"min", "max", "min_closed", "max_closed"}, "$.family.domain");
    fd.domain.lo = detail::as_rational(detail::require(dom, "min", "$.family.domain"),
                                       "$.family.domain.min");
    fd.domain.hi = detail::as_rational(detail::require(dom, "max", "$.family.domain"),
                                       "$.family.domain.max");
    fd.domain.lo_closed =
        dom.contains("min_closed") ? dom.at("min_closed").get<bool>() : false;
    fd.domain.hi_closed =
        dom.contains("max_closed") ? dom.at("max_closed").get<bool>() : false;
    const Json& po = detail::require(fam, "pi_on_omega", "$.family");
    if (!po.is_array()) throw SchemaError("$.family.pi_on_omega", "expected matrices per v");
    for (std::size_t v = 0; v < po.size(); ++v) {
        const Json& mat = po.at(v);
        std::string mp = "$.family.pi_on_omega[" + std::to_string(v) + "]";
        if (!mat.is_array()) throw SchemaError(mp, "expected a matrix");
        std::vector<std::vector<FamilyEntry>> rows;
        for (std::size_t i = 0; i < mat.size(); ++i) {
            std::vector<FamilyEntry> row;
            const Json& r = mat.at(i);
            if (!r.is_array()) throw SchemaError(mp, "matrix rows must be arrays");
            for (std::size_t k = 0; k < r.size(); ++k) {
                FamilyEntry entry = detail::parse_family_entry(
                    r.at(k), mp + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
                for (const auto& [nm, pw] : entry.powers)
                    if (!declared.count(nm))
                        throw SchemaError(mp, "entry uses undeclared parameter '" + nm + "'");
                row.push_back(std::move(entry));
            }
            rows.push_back(std::move(row));
        }
        fd.pi_on_omega.push_back(std::move(rows));
    }
    if (fam.contains("r_tau")) {
        std::vector<int> rt;
        for (const auto& x : fam.at("r_tau")) rt.push_back(detail::as_int(x, "$.family.r_tau[]"));
        fd.r_tau = std::move(rt);
    }
    out.family = std::move(fd);
    return out;
}

// --- report rendering -------------------------------------------------------

inline std::string decimal6(const Rational& q) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", to_double(q));
    return buf;
}

inline std::string polygon_json(const ConcavePolygon& p) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < p.length(); ++i) {
        if (i) os << ", ";
        os << '"' << to_string(p.slope(i)) << '"';
    }
    os << "]";
    return os.str();
}

inline std::string polygon_decimal(const ConcavePolygon& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.length(); ++i) {
        if (i) os << ", ";
        os << decimal6(p.slope(i));
    }
    os << ")";
    return os.str();
}

inline std::string function_json(const BreakpointFunction& f) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < f.vertices().size(); ++i) {
        if (i) os << ", ";
        os << "[\"" << to_string(f.vertices()[i].first) << "\", \""
           << to_string(f.vertices()[i].second) << "\"]";
    }
    os << "]";
    return os.str();
}

inline void render_polygons(std::ostringstream& os, const ComparisonReport& rep) {
    if (rep.hdg_int) {
        os << "Hdg_int        " << polygon_json(rep.hdg_int->averaged) << "  ~ "
           << polygon_decimal(rep.hdg_int->averaged) << "\n";
        for (std::size_t v = 0; v < rep.hdg_int->per_upsilon.size(); ++v)
            os << "  Hdg_int[v=" << v << "] " << polygon_json(rep.hdg_int->per_upsilon[v])
               << "\n";
    }
    if (rep.hdg_k)
        os << "Hdg(H_k)       " << polygon_json(rep.hdg_k->averaged) << "  ~ "
           << polygon_decimal(rep.hdg_k->averaged) << "\n";
    if (rep.pr)
        os << "PR             " << polygon_json(*rep.pr) << "  ~ " << polygon_decimal(*rep.pr)
           << "\n";
    else
        os << "PR             skipped: r_tau absent\n";
    if (rep.newt)
        os << "Newt           " << polygon_json(*rep.newt) << "  ~ " << polygon_decimal(*rep.newt)
           << "\n";
    if (rep.dual)
        os << "Hdg_int(dual)  " << polygon_json(*rep.dual) << "\n";
    if (rep.hn_p) os << "HN(H[p])       " << function_json(*rep.hn_p) << "\n";
    if (rep.hn_pi) os << "HN(H[pi])      " << function_json(*rep.hn_pi) << "\n";
    os << "pi-diagonalisable: " << rep.pi_diagonalisable << "\n";
    if (rep.tower) {
        os << "HN tower min   " << function_json(rep.tower->minimum) << "\n";
        os << "HN-type consistent: " << (rep.tower->consistent ? "true" : "false") << "\n";
    }
}

inline std::string render_report(const ComparisonReport& rep) {
    std::ostringstream os;
    render_polygons(os, rep);
    os << "checks:\n";
    for (const auto& c : rep.checks) {
        os << "  [" << (c.status == "holds" ? "PASS" : c.status == "fails" ? "FAIL" : "SKIP")
           << "] " << c.name;
        if (!c.witness.empty()) os << "  (first violation at " << c.witness << ")";
        if (!c.note.empty()) os << "  -- " << c.note;
        os << "\n";
    }
    for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
    return os.str();
}

}  // namespace polyinv
