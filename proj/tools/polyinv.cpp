#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyinv/polyinv.hpp"

namespace {

using namespace polyinv;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const StructuredDatum& need_datum(const InputDocument& doc) {
    if (!doc.datum) throw InputError("this command needs a datum document, not a family");
    return *doc.datum;
}

const FamilyDatum& need_family(const InputDocument& doc) {
    if (!doc.family) throw InputError("this command needs a family document");
    return *doc.family;
}

int run_compute(const InputDocument& doc) {
    ComparisonReport rep = check_all(need_datum(doc));
    std::ostringstream os;
    render_polygons(os, rep);
    for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
    std::cout << os.str();
    return 0;
}

int run_check(const InputDocument& doc, int trials, unsigned long long seed) {
    ComparisonReport rep = check_all(need_datum(doc));
    std::cout << render_report(rep);
    bool failed = rep.any_failure();
    if (trials > 0) {
        std::mt19937_64 rng(seed);
        int violations = 0;
        const Int ps[] = {Int(2), Int(3), Int(5)};
        for (int t = 0; t < trials; ++t) {
            RandomDatumOptions opt;
            opt.p = ps[t % 3];
            opt.e = 1 + t % 3;
            opt.f = 1 + (t / 3) % 2;
            opt.n = 1 + (t / 6) % 3;
            opt.max_case = t % 7 == 0;
            StructuredDatum dat = random_valid_datum(rng, opt);
            ComparisonReport r = check_all(dat);
            if (r.any_failure()) ++violations;
        }
        std::cout << "random suite: " << trials << " trials, " << violations << " violations\n";
        if (violations > 0) failed = true;
    }
    return failed ? 1 : 0;
}

int run_family(const InputDocument& doc, int grid, const std::string& sublevel) {
    const FamilyDatum& fam = need_family(doc);
    std::ostringstream os;
    if (sublevel.empty()) {
        SweepResult res = sweep(fam, grid);
        os << "samples:\n";
        for (const auto& [s, poly] : res.samples)
            os << "  s = " << to_string(s) << "  Hdg_int = " << polygon_json(poly) << "\n";
        os << "fitted slopes:\n";
        for (std::size_t i = 0; i < res.slope_models.size(); ++i) {
            os << "  lambda_" << i + 1 << ":";
            for (const auto& piece : res.slope_models[i])
                os << "  [" << to_string(piece.x0) << ", " << to_string(piece.x1) << "] -> "
                   << to_string(piece.a) << " + " << to_string(piece.b) << "*s";
            os << "\n";
        }
        os << "continuity_ok: "
           << (res.continuity == Continuity::ok ? "true" : "undecided") << "\n";
    } else {
        std::vector<Rational> slopes;
        std::stringstream ss(sublevel);
        std::string tok;
        while (std::getline(ss, tok, ',')) slopes.push_back(parse_rational(tok));
        ConcavePolygon f0(std::move(slopes));
        SublevelResult res = sublevel_region(fam, f0, grid);
        os << "sublevel f0 = " << polygon_json(f0) << "\n";
        if (res.intervals.empty()) os << "region: empty\n";
        for (const auto& iv : res.intervals) os << "region: " << iv.to_string() << "\n";
        for (const auto& w : res.warnings) os << "warning: " << w << "\n";
        os << "continuity_ok: "
           << (res.sweep.continuity == Continuity::ok ? "true" : "undecided") << "\n";
    }
    std::cout << os.str();
    return 0;
}

int run_plot(const InputDocument& doc, const std::string& out) {
    ComparisonReport rep = check_all(need_datum(doc));
    std::vector<std::pair<std::string, BreakpointFunction>> fns;
    if (rep.hdg_int) fns.emplace_back("Hdg_int", to_function(rep.hdg_int->averaged));
    if (rep.hdg_k) fns.emplace_back("Hdg(H_k)", to_function(rep.hdg_k->averaged));
    if (rep.pr) fns.emplace_back("PR", to_function(*rep.pr));
    if (rep.newt) fns.emplace_back("Newt", to_function(*rep.newt));
    if (rep.hn_p) fns.emplace_back("HN(H[p])", *rep.hn_p);
    if (rep.hn_pi) fns.emplace_back("HN(H[pi])", *rep.hn_pi);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw InputError("cannot write " + out);
    f << render_svg(fns);
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polyinv: polygon invariants of p-divisible groups with O_F-structure"};
    app.require_subcommand(1);

    std::string file, sublevel, svg_out = "polygons.svg";
    int grid = 8, trials = 0;
    unsigned long long seed = 20240801ULL;

    CLI::App* c_compute = app.add_subcommand("compute", "print all available polygons");
    c_compute->add_option("file", file)->required();
    CLI::App* c_check = app.add_subcommand("check", "run the comparison theorems");
    c_check->add_option("file", file)->required();
    c_check->add_option("--trials", trials, "additional randomized theorem trials");
    c_check->add_option("--seed", seed, "seed for the randomized trials");
    CLI::App* c_family = app.add_subcommand("family", "sweep a one-parameter family");
    c_family->add_option("file", file)->required();
    c_family->add_option("--grid", grid, "number of grid intervals");
    c_family->add_option("--sublevel", sublevel, "comma-separated slopes of f0");
    CLI::App* c_plot = app.add_subcommand("plot", "emit an SVG overlay of the polygons");
    c_plot->add_option("file", file)->required();
    c_plot->add_option("-o,--out", svg_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        polyinv::InputDocument doc = polyinv::parse_input(slurp(file));
        if (c_compute->parsed()) return run_compute(doc);
        if (c_check->parsed()) return run_check(doc, trials, seed);
        if (c_family->parsed()) return run_family(doc, grid, sublevel);
        if (c_plot->parsed()) return run_plot(doc, svg_out);
    } catch (const polyinv::PrecisionExhausted& e) {
        std::cerr << "precision exhausted: " << e.what() << "\n";
        return 3;
    } catch (const polyinv::NoConvergence& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return 3;
    } catch (const polyinv::NotRealizable& e) {
        std::cerr << "not realizable: " << e.what() << "\n";
        return 4;
    } catch (const polyinv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
