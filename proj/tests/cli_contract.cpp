// Exit-code and output contract of the polyinv binary, exercised end to end.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int g_failures = 0;
std::string g_bin;
const std::string kData = POLYINV_DATA_DIR;

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string out_file = "cli_out.tmp";
    std::string cmd = g_bin + " " + args + " > " + out_file + " 2>&1";
    int rc = std::system(cmd.c_str());
    int code = rc == -1 ? -1 : WEXITSTATUS(rc);
    std::ifstream in(out_file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::remove(out_file.c_str());
    return {code, ss.str()};
}

void expect(const std::string& what, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << what;
    if (!ok && !detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++g_failures;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_contract <path-to-polyinv>\n";
        return 1;
    }
    g_bin = argv[1];

    RunResult check = run("check " + kData + "/sec52.json");
    expect("check sec52.json exits 0", check.exit_code == 0, std::to_string(check.exit_code));
    expect("check sec52.json reports Hdg_int = (5/6, 1/6)",
           check.output.find("[\"5/6\", \"1/6\"]") != std::string::npos);
    expect("check sec52.json reports PR = (1, 0)",
           check.output.find("[\"1\", \"0\"]") != std::string::npos);

    RunResult again = run("check " + kData + "/sec52.json");
    expect("reports are byte-identical across runs", again.output == check.output);

    RunResult compute = run("compute " + kData + "/sec52.json");
    expect("compute exits 0", compute.exit_code == 0, std::to_string(compute.exit_code));

    // skip contract: no r_tau means PR is reported skipped, exit stays 0
    write_file("no_rtau.json", R"({
      "version": "1",
      "model": {"p": 3, "ram_index": 2},
      "datum": {"e": 1, "f": 1, "n": 2, "pi_on_omega": [[["p", "0"], ["0", "p"]]]}
    })");
    RunResult skip = run("compute no_rtau.json");
    expect("compute without r_tau exits 0 and skips PR",
           skip.exit_code == 0 && skip.output.find("skipped: r_tau absent") != std::string::npos,
           std::to_string(skip.exit_code));

    // schema violations are exit code 2 and name the offending field
    write_file("bad_field.json", R"({
      "version": "1",
      "model": {"p": 3, "ram_index": 2},
      "datum": {"e": 1, "f": 1, "n": 2, "pi_matrix": [[["p"]]]}
    })");
    RunResult bad = run("check bad_field.json");
    expect("unknown field exits 2 and is named",
           bad.exit_code == 2 && bad.output.find("pi_matrix") != std::string::npos,
           std::to_string(bad.exit_code));

    // a failing comparison is exit code 1: a subobject record above Hdg_int
    write_file("hn_violation.json", R"({
      "version": "1",
      "model": {"p": 3, "ram_index": 2},
      "datum": {"e": 2, "f": 1, "n": 2, "pi_on_omega": [[["u", "u"], ["0", "-u"]]],
                "subobjects_p": [{"height": 2, "degree": 2}]}
    })");
    RunResult viol = run("check hn_violation.json");
    expect("violated comparison exits 1", viol.exit_code == 1, std::to_string(viol.exit_code));

    // not-realizable data is exit code 4
    write_file("unrealizable.json", R"({
      "version": "1",
      "model": {"p": 3, "ram_index": 2},
      "datum": {"e": 2, "f": 1, "n": 1, "pi_on_omega": [[["u", "0"], ["0", "u"]]]}
    })");
    RunResult unreal = run("compute unrealizable.json");
    expect("unrealizable datum exits 4", unreal.exit_code == 4, std::to_string(unreal.exit_code));

    // exhausted precision is exit code 3: at M = 1 the entry p is invisible
    write_file("exhausted.json", R"({
      "version": "1",
      "model": {"p": 3, "ram_index": 1, "precision": 1},
      "datum": {"e": 1, "f": 1, "n": 1, "pi_on_omega": [[["p"]]]}
    })");
    RunResult exhausted = run("compute exhausted.json");
    expect("exhausted precision exits 3", exhausted.exit_code == 3,
           std::to_string(exhausted.exit_code));
    std::remove("exhausted.json");

    RunResult fam = run("family " + kData + "/sec52-family.json --grid 8 --sublevel 2/3,1/3");
    expect("family sublevel exits 0 and prints [1/3, 1/2)",
           fam.exit_code == 0 && fam.output.find("[1/3, 1/2)") != std::string::npos,
           fam.output);

    RunResult fam_sweep = run("family " + kData + "/sec52-family.json --grid 8");
    RunResult fam_sweep2 = run("family " + kData + "/sec52-family.json --grid 8");
    expect("family sweeps are byte-identical across runs",
           fam_sweep.exit_code == 0 && fam_sweep.output == fam_sweep2.output);

    RunResult trials = run("check " + kData + "/sec52.json --trials 12 --seed 7");
    expect("randomized trials report zero violations",
           trials.exit_code == 0 &&
               trials.output.find("12 trials, 0 violations") != std::string::npos,
           std::to_string(trials.exit_code));

    RunResult plot = run("plot " + kData + "/sec52.json -o plot_test.svg");
    std::ifstream svg("plot_test.svg");
    std::ostringstream svg_text;
    svg_text << svg.rdbuf();
    expect("plot writes an SVG with one polyline per polygon",
           plot.exit_code == 0 && svg_text.str().find("<svg") != std::string::npos &&
               svg_text.str().find("Newt") != std::string::npos,
           std::to_string(plot.exit_code));
    std::remove("plot_test.svg");
    std::remove("no_rtau.json");
    std::remove("bad_field.json");
    std::remove("hn_violation.json");
    std::remove("unrealizable.json");

    if (g_failures == 0) {
        std::cout << "cli contract satisfied\n";
        return 0;
    }
    std::cout << g_failures << " cli contract checks failed\n";
    return 1;
}
