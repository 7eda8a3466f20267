// Acceptance gate.  Runs the seven shipping criteria end to end — partly
// against the CLI binary (argv[1]), partly against the library — and prints
// exactly one PASS/FAIL line per criterion.  Exit code = number of failures.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "fastescape/census.hpp"
#include "fastescape/complexpoly.hpp"
#include "fastescape/constants.hpp"
#include "fastescape/grid.hpp"
#include "fastescape/rng.hpp"

using nlohmann::json;
using namespace fastescape;

namespace {

std::string g_cli;
int g_failures = 0;

// Values handed from one criterion to a later one.
double g_x_star = std::nan("");
double g_trunc_depth3 = std::nan("");

struct CmdResult {
    std::string out;
    int status = -1;
    double seconds = 0.0;
};

CmdResult run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = "'" + g_cli + "' " + args;
    if (!env.empty()) cmd = env + " " + cmd;
    CmdResult res;
    const auto t0 = std::chrono::steady_clock::now();
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return res;
    char buf[1 << 16];
    size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    const int rc = pclose(pipe);
    if (rc >= 0 && WIFEXITED(rc)) res.status = WEXITSTATUS(rc);
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

json parse_json(const std::string& text) {
    return json::parse(text, nullptr, /*allow_exceptions=*/false);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void report(int idx, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", idx, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

// 1. The closed-form constants for the sine family: c1 = 536*sqrt(2)+1 for
//    both beta = 0 and beta = pi/2 (the distortion constant ignores beta),
//    and an area bound in [355, 361).  Each CLI run must finish inside 1 s.
void criterion1() {
    const double want_c1 = 536.0 * std::sqrt(2.0) + 1.0;
    bool ok = true;
    std::string detail;
    const char* betas[2] = {"0", "1.5707963267948966"};
    for (int i = 0; i < 2; ++i) {
        const CmdResult r = run_cli(std::string("constants --alpha 1 --beta ") + betas[i]);
        const json j = parse_json(r.out);
        if (r.status != 0 || j.is_discarded()) {
            ok = false;
            detail += std::string(i ? "; " : "") + "beta=" + betas[i] + " run failed";
            continue;
        }
        const double c1 = j["constants"]["c1"].get<double>();
        const double area = j["constants"]["areaBound"].get<double>();
        if (i == 0) g_x_star = j["constants"]["xStar"].get<double>();
        const bool good = std::abs(c1 - want_c1) <= 1e-9 * want_c1 && area >= 355.0 &&
                          area < 361.0 && r.seconds < 1.0;
        ok = ok && good;
        detail += std::string(i ? "; " : "") + "beta=" + betas[i] + ": c1=" + fmt(c1) +
                  " areaBound=" + fmt(area) + " (" + fmt(r.seconds, 2) + "s)";
    }
    report(1, ok, "constants, alpha=1, beta in {0, pi/2}: " + detail);
}

// 2. Randomized estimate checks: every lemma block must report zero failures
//    with the stated sample sizes, inside 60 s.
void criterion2() {
    const CmdResult r = run_cli(
        "lemmas --alpha 1 --beta 0 --which all --squares 200 --circle-samples 1000 "
        "--pairs 1000 --chains 50 --seed 1");
    const json j = parse_json(r.out);
    bool ok = r.status == 0 && !j.is_discarded();
    std::string detail;
    if (ok) {
        for (const char* key : {"pp", "estp1", "ln", "mq", "chain", "univalence"}) {
            const bool p = j.contains(key) && j[key].contains("pass") &&
                           j[key]["pass"].get<bool>();
            ok = ok && p;
            detail += std::string(key) + (p ? "=pass " : "=FAIL ");
        }
        ok = ok && j["pass"].get<bool>() && r.seconds < 60.0;
        detail += "(" + fmt(r.seconds, 1) + "s)";
    } else {
        detail = "lemmas run failed (exit " + std::to_string(r.status) + ")";
    }
    report(2, ok, "estimate suite, 200 squares / 1000-point circles: " + detail);
}

// 3. Density bound on the first admissible square [x*, x*+r] x [0, r] at
//    depth 2: covered fraction must beat both reported lower bounds minus
//    3 sigma, with almost no indeterminate samples.
void criterion3() {
    const ComplexPoly P = ComplexPoly::sine_family({1.0, 0.0}, {0.0, 0.0});
    const ConstantSet cs = compute_constants(P);
    const DensityReport rep =
        sample_square_density(P, Square{cs.x_star, 0.0, cs.r}, 2, 10000, 1, CensusOptions{});
    const double covered = rep.certifiedFraction + rep.indeterminateFraction;
    const double rho0 = 1.0 - 2.0 * std::exp(-2.0);
    const bool ok = std::abs(rep.boundProduct - rho0) <= 1e-9 &&
                    covered >= rep.boundProduct - 3.0 * rep.sigma &&
                    covered >= rep.boundExp - 3.0 * rep.sigma &&
                    rep.indeterminateFraction < 1e-2 && rep.pass;
    report(3, ok,
           "depth-2 density at x*: certified+indeterminate=" + fmt(covered) +
               " vs product bound " + fmt(rep.boundProduct) + " and exp bound " +
               fmt(rep.boundExp) + " (sigma=" + fmt(rep.sigma) +
               ", indeterminate=" + fmt(rep.indeterminateFraction) + ")");
}

// 4. Strip census at xMax = 40, r = 1/8, 1024 samples/square: depth-3
//    totalUpper stays below 361, truncatedArea is nondecreasing in depth and
//    moves < 5% between depths 2 and 3, and the depth-3 run fits in 10 min.
void criterion4() {
    double trunc[4] = {0, 0, 0, 0};
    double total[4] = {0, 0, 0, 0};
    double secs[4] = {0, 0, 0, 0};
    bool ok = true;
    std::string detail;
    for (int depth = 1; depth <= 3 && ok; ++depth) {
        const CmdResult r = run_cli(
            "census --alpha 1 --beta 0 --r 0.125 --xmax 40 --samples 1024 --seed 1 "
            "--depth " +
            std::to_string(depth));
        const json j = parse_json(r.out);
        if (r.status != 0 || j.is_discarded()) {
            ok = false;
            detail = "depth-" + std::to_string(depth) + " census run failed";
            break;
        }
        trunc[depth] = j["truncatedArea"].get<double>();
        total[depth] = j["totalUpper"].get<double>();
        secs[depth] = r.seconds;
    }
    if (ok) {
        g_trunc_depth3 = trunc[3];
        const double rel = std::abs(trunc[3] - trunc[2]) / trunc[3];
        ok = total[3] < 361.0 && trunc[2] >= trunc[1] && trunc[3] >= trunc[2] &&
             rel < 0.05 && secs[3] < 600.0;
        detail = "totalUpper(d3)=" + fmt(total[3]) + " truncated d1/d2/d3=" + fmt(trunc[1]) +
                 "/" + fmt(trunc[2]) + "/" + fmt(trunc[3]) + " (step " +
                 fmt(100.0 * rel, 3) + "%, " + fmt(secs[1] + secs[2] + secs[3], 1) + "s)";
    }
    report(4, ok, "one-period strip census, xMax=40: " + detail);
}

// 5. Oracle equivalence: on 20 random admissible squares the depth-1 packing
//    density (forward-image grid enumeration + pullback quadrature) must
//    bracket the sampled depth-1 certified fraction within 3 sigma plus the
//    boundary term.  A small c1 keeps the level-1 threshold low enough for
//    the image grids to stay enumerable.
void criterion5() {
    const ComplexPoly P = ComplexPoly::sine_family({1.0, 0.0}, {0.0, 0.0});
    NestingOptions nopt;
    nopt.c1 = 0.02;
    CensusOptions copt;
    copt.c1 = 0.02;
    SplitMix64 gen(20260819ull);
    int failures = 0;
    double worst = 0.0; // largest violation of either bracket side
    for (int i = 0; i < 20; ++i) {
        const long m = 34 + static_cast<long>(gen.next() % 11ull); // min |Re| in [4.25, 5.5]
        const long n = static_cast<long>(gen.next() % 50ull);
        const bool neg = (gen.next() & 1ull) != 0;
        const GridSquare q{neg ? -m - 1 : m, n, 0.125};
        const NestingReport nr = build_nesting_level(P, q, 1, nopt);
        const DensityReport dr = sample_square_density(P, q, 1, 20000, 1000 + i, copt);
        const double cf = dr.certifiedFraction;
        const double lo = nr.density - 3.0 * dr.sigma - 1e-9;
        const double hi = nr.density + nr.boundary_fraction + 3.0 * dr.sigma + 1e-9;
        if (cf < lo || cf > hi) ++failures;
        worst = std::max(worst, std::max(lo - cf, cf - hi));
    }
    const bool ok = failures == 0;
    report(5, ok,
           "depth-1 packing vs sampling on 20 random squares: failures=" +
               std::to_string(failures) + " worst bracket excess=" + fmt(worst));
}

// 6. Determinism: the census JSON must be byte-identical when the worker
//    count changes (environment cap 1 vs 8), all else equal.
void criterion6() {
    const std::string args =
        "census --alpha 1 --beta 0 --r 0.125 --xmax 27 --depth 1 --samples 64 --seed 3";
    const CmdResult a = run_cli(args, "FASTESCAPE_THREADS=1");
    const CmdResult b = run_cli(args, "FASTESCAPE_THREADS=8");
    const bool ok =
        a.status == b.status && a.status >= 0 && !a.out.empty() && a.out == b.out;
    report(6, ok,
           "census byte-identity across FASTESCAPE_THREADS 1 vs 8: " +
               std::string(a.out == b.out ? "identical" : "DIFFERENT") + " (" +
               std::to_string(a.out.size()) + " bytes, exits " + std::to_string(a.status) +
               "/" + std::to_string(b.status) + ")");
}

// 7. Rendering: the 800x314 strip image is bit-identical across repeat runs
//    and under an exact one-period window translation, and the white-pixel
//    area of the depth-3 image (escape base x*) matches the depth-3 census
//    truncatedArea to within one pixel row.
void criterion7() {
    const double tau = 6.283185307179586;
    const std::string dir = "/tmp";
    const std::string p1 = dir + "/fe_accept_1.ppm", p2 = dir + "/fe_accept_2.ppm",
                      p3 = dir + "/fe_accept_3.ppm", p4 = dir + "/fe_accept_4.ppm";
    char win[160], shifted[160];
    std::snprintf(win, sizeof win, "--window -8,8,0,%.17g", tau);
    std::snprintf(shifted, sizeof shifted, "--window %.17g,%.17g,0,%.17g", -8.0 + tau,
                  8.0 + tau, tau);
    const std::string base =
        "render --alpha 1 --beta 0 --depth 3 --size 800x314 --conjugate-view ";
    const CmdResult r1 = run_cli(base + win + " --out " + p1);
    const CmdResult r2 = run_cli(base + win + " --out " + p2);
    const CmdResult r3 = run_cli(base + shifted + " --out " + p3);

    char flat[256];
    std::snprintf(flat, sizeof flat,
                  "render --alpha 1 --beta 0 --depth 3 --size 800x314 "
                  "--window -40,40,0,6.5 --x0 %.17g --out %s",
                  g_x_star, p4.c_str());
    const CmdResult r4 = run_cli(flat);

    bool ok = r1.status == 0 && r2.status == 0 && r3.status == 0 && r4.status == 0;
    std::string detail;
    if (!ok) {
        detail = "render runs failed";
    } else {
        const std::string img1 = read_file(p1);
        const bool repeat_same = !img1.empty() && img1 == read_file(p2);
        const bool period_same = img1 == read_file(p3);
        const json j4 = parse_json(r4.out);
        const double wf = j4.is_discarded() ? std::nan("") : j4["whiteFraction"].get<double>();
        const double white_area = wf * 80.0 * 6.5;     // window is 80 x 6.5
        const double pixel_row = 80.0 * 6.5 / 314.0;   // area of one pixel row
        const double diff = std::abs(white_area - g_trunc_depth3);
        ok = repeat_same && period_same && diff <= pixel_row;
        detail = std::string("repeat ") + (repeat_same ? "identical" : "DIFFERENT") +
                 ", +2pi window " + (period_same ? "identical" : "DIFFERENT") +
                 ", white area " + fmt(white_area) + " vs census " + fmt(g_trunc_depth3) +
                 " (|diff| " + fmt(diff) + " <= row " + fmt(pixel_row) + ")";
    }
    for (const std::string& p : {p1, p2, p3, p4}) std::remove(p.c_str());
    report(7, ok, "800x314 strip renders: " + detail);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
        return 99;
    }
    g_cli = argv[1];
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    std::printf("%s: %d of 7 criteria failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
                g_failures);
    return g_failures;
}
