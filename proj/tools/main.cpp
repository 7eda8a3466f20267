// Command-line front end: computes the constant set, classifies single
// orbits, estimates per-square densities, runs the strip census, exercises
// the distortion checks, and renders escape-depth images. Machine output is
// JSON on stdout (PPM/CSV go to files); exit code 0 means every requested
// check passed, 1 means some check failed, 2 means bad usage or a runtime
// error.

#include "CLI11.hpp"
#include "json.hpp"

#include "fastescape/census.hpp"
#include "fastescape/config.hpp"
#include "fastescape/constants.hpp"
#include "fastescape/distortion.hpp"
#include "fastescape/orbit.hpp"
#include "fastescape/render.hpp"
#include "fastescape/rng.hpp"
#include "fastescape/tower.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace fastescape;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double kTwoPi = 6.283185307179586;

/// Common flag values; count() on the stored options decides which ones
/// were actually given and should override the config file.
struct CommonFlags {
    std::string config_path, poly, alpha, beta, out;
    double r = 0.0, x0 = 0.0, c1 = 0.0;
    int depth = 0, threads = 0, prec_bits = 0;
    long samples = 0;
    unsigned long long seed = 0;

    CLI::Option *o_poly = nullptr, *o_alpha = nullptr, *o_beta = nullptr;
    CLI::Option *o_r = nullptr, *o_x0 = nullptr, *o_c1 = nullptr;
    CLI::Option *o_depth = nullptr, *o_samples = nullptr, *o_seed = nullptr;
    CLI::Option *o_threads = nullptr, *o_prec = nullptr, *o_out = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value config file");
        o_poly = cmd->add_option("--poly", poly,
                                 "coefficients c0,c1,...,cN as complex literals (e.g. -0.5,0,0.5)");
        o_alpha = cmd->add_option("--alpha", alpha, "sine-family alpha (complex literal)");
        o_beta = cmd->add_option("--beta", beta, "sine-family beta (complex literal)");
        o_r = cmd->add_option("--r", r, "grid square side, 0 < r <= 1/(4N)");
        o_x0 = cmd->add_option("--x0", x0, "escape-test base override (>= 6 log 2)");
        o_c1 = cmd->add_option("--c1", c1, "distortion-constant override");
        o_depth = cmd->add_option("--depth", depth, "certification depth");
        o_samples = cmd->add_option("--samples", samples, "samples per square");
        o_seed = cmd->add_option("--seed", seed, "RNG seed");
        o_threads = cmd->add_option("--threads", threads, "worker cap (0 = auto/env)");
        o_prec = cmd->add_option("--prec-bits", prec_bits, "angle-rescue precision (0 = off)");
        o_out = cmd->add_option("--out", out, "output file path");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("config: cannot open '" + config_path + "'");
            std::stringstream ss;
            ss << f.rdbuf();
            cfg = parse_config(ss.str());
        }
        if (o_poly->count()) {
            cfg.coeffs.clear();
            std::istringstream cs(poly);
            for (std::string c; std::getline(cs, c, ',');) cfg.coeffs.push_back(parse_complex(c));
            cfg.hasAlphaBeta = false;
        }
        if (o_alpha->count() || o_beta->count()) {
            if (o_alpha->count()) cfg.alpha = parse_complex(alpha);
            if (o_beta->count()) cfg.beta = parse_complex(beta);
            cfg.hasAlphaBeta = true;
            if (!o_poly->count()) cfg.coeffs.clear();
        }
        if (o_r->count()) cfg.r = r;
        if (o_x0->count()) cfg.x0 = x0;
        if (o_c1->count()) cfg.c1 = c1;
        if (o_depth->count()) cfg.depth = depth;
        if (o_samples->count()) cfg.samples = samples;
        if (o_seed->count()) cfg.seed = seed;
        if (o_threads->count()) cfg.threads = threads;
        if (o_prec->count()) cfg.precBits = prec_bits;
        if (o_out->count()) cfg.outPath = out;
        validate_config(cfg);
        return cfg;
    }
};

void print_json(const ojson& j) { std::cout << j.dump(2) << "\n"; }

const char* status_name(OrbitStatus s) {
    switch (s) {
        case OrbitStatus::Certified: return "certified";
        case OrbitStatus::Failed: return "failed";
        default: return "indeterminate";
    }
}

ojson constants_json(const ConstantSet& cs) {
    ojson j;
    j["N"] = cs.N;
    j["K"] = cs.K;
    j["K0"] = cs.K0;
    j["r0"] = cs.radii.r0;
    j["R1"] = cs.radii.R1;
    j["R2"] = cs.radii.R2;
    j["R3"] = cs.radii.R3;
    j["R4"] = cs.radii.R4;
    j["R5"] = cs.radii.R5;
    j["R6"] = cs.radii.R6;
    j["r"] = cs.r;
    j["c0"] = cs.c0;
    j["c1"] = cs.c1;
    j["xStar"] = cs.x_star;
    j["rho"] = cs.rho;
    j["rhoProduct"] = cs.rho_product;
    j["areaBound"] = cs.area_bound;
    return j;
}

ojson density_json(const DensityReport& d) {
    ojson j;
    if (d.on_grid) j["square"] = {{"m", d.square.m}, {"n", d.square.n}, {"r", d.square.r}};
    j["region"] = {{"re0", d.region.re0}, {"im0", d.region.im0}, {"side", d.region.side}};
    j["depth"] = d.depth;
    j["samples"] = d.samples;
    j["seed"] = d.seed;
    j["certifiedFraction"] = d.certifiedFraction;
    j["indeterminateFraction"] = d.indeterminateFraction;
    j["boundProduct"] = d.boundProduct;
    j["boundExp"] = d.boundExp;
    j["sigma"] = d.sigma;
    j["pass"] = d.pass;
    return j;
}

OrbitOptions orbit_options(const RunConfig& cfg) {
    OrbitOptions o;
    o.prec_bits = cfg.precBits;
    return o;
}

CensusOptions census_options(const RunConfig& cfg) {
    CensusOptions o;
    o.c1 = cfg.c1;
    o.x_star = cfg.x0;
    o.orbit = orbit_options(cfg);
    o.workers = cfg.threads;
    return o;
}

// ---------------------------------------------------------------- lemmas --

/// Random grid square inside {|Re| >= x} within a one-period band:
/// columns within `span` units of the cut, either sign, rows in [0, 2pi).
GridSquare random_admissible_square(SplitMix64& g, double x, double r, double span) {
    const long m0 = static_cast<long>(std::ceil(x / r));
    const long cols = std::max<long>(1, static_cast<long>(span / r));
    const long rows = static_cast<long>(kTwoPi / r);
    const long off = static_cast<long>(g.next() % static_cast<unsigned long long>(cols));
    const long n = static_cast<long>(g.next() % static_cast<unsigned long long>(std::max<long>(rows, 1)));
    const bool neg = (g.next() & 1) != 0;
    const long m = neg ? -(m0 + off) - 1 : m0 + off;
    return GridSquare{m, n, r};
}

int run_lemmas(const RunConfig& cfg, const std::string& which, long squares, long pairs,
               int circle_samples, long chains) {
    const ComplexPoly P = config_poly(cfg);
    const double side = config_side(cfg);
    const ConstantSet cs = compute_constants(P, side, cfg.c1, cfg.x0);
    const bool all = which == "all";
    bool ok = true;
    ojson j;
    j["command"] = "lemmas";
    j["config"] = config_json(cfg);
    j["which"] = which;

    if (all || which == "pp") {
        const PolyAsymReport rep = check_poly_asymptotics(P, 0.25, circle_samples);
        j["pp"] = {{"outerRadius", rep.outer_radius}, {"innerRadius", rep.inner_radius},
                   {"checked", rep.checked},          {"failures", rep.failures},
                   {"worstOuterSlack", rep.worst_outer_slack},
                   {"worstInnerSlack", rep.worst_inner_slack},
                   {"pass", rep.pass}};
        ok = ok && rep.pass;
    }
    if (all || which == "estp1") {
        const DerivBoundReport rep = check_derivative_bounds(P, circle_samples);
        j["estp1"] = {{"checked", rep.checked},
                      {"failures", rep.failures},
                      {"worstFirstSlack", rep.worst_first_slack},
                      {"worstSecondSlack", rep.worst_second_slack},
                      {"minAbsFprime", rep.min_abs_fprime},
                      {"pass", rep.pass}};
        ok = ok && rep.pass;
    }
    if (all || which == "ln") {
        SplitMix64 g(mix64(cfg.seed, 0x4c4e));
        long fails = 0;
        double worst = 0.0;
        for (long i = 0; i < squares; ++i) {
            const GridSquare Q = random_admissible_square(g, cs.x_star, side, 10.0);
            const LNReport rep = check_LN(P, Q);
            if (!rep.pass) ++fails;
            worst = std::max(worst, rep.L / rep.bound);
        }
        j["ln"] = {{"squares", squares}, {"failures", fails}, {"worstRatio", worst},
                   {"pass", fails == 0}};
        ok = ok && fails == 0;
    }
    if (all || which == "mq") {
        // Boundary-square counting is verified at moderate |Re| where the
        // image grid can be enumerated exactly; the inequality is scale-free
        // in r |f'|, while at the full base scale the image boundary meets
        // ~1e11 squares and any truncated count would be vacuous.
        SplitMix64 g(mix64(cfg.seed, 0x6d51));
        long fails = 0, clipped = 0;
        double worst = 0.0;
        for (long i = 0; i < squares; ++i) {
            const GridSquare Q =
                random_admissible_square(g, 6.0 * std::log(2.0) + side, side,
                                         8.0 - 6.0 * std::log(2.0) - 2.0 * side);
            const double x1 = 2.0 * std::exp(Q.geometry().min_abs_re() / 2.0);
            const BoundaryCountReport rep = count_boundary_squares(P, Q, x1);
            if (!rep.pass) ++fails;
            if (rep.clip_nonempty) ++clipped;
            if (rep.c > 0.0) worst = std::max(worst, static_cast<double>(rep.count) / rep.c);
        }
        j["mq"] = {{"squares", squares}, {"failures", fails}, {"clipNonempty", clipped},
                   {"worstRatio", worst}, {"pass", fails == 0}};
        ok = ok && fails == 0;
    }
    if (all || which == "chain") {
        SplitMix64 g(mix64(cfg.seed, 0x6368));
        const double lo = 6.0 * std::log(2.0);
        const ThresholdTower tower(lo);
        const long m0 = static_cast<long>(std::ceil(lo / side));
        long fails = 0, levels_bad = 0;
        double worst = 0.0;
        for (long i = 0; i < chains; ++i) {
            // The forward image's |Re| depends on the (essentially random)
            // angle of f at the seed square, so resample seeds until the
            // built chain actually sits on ascending threshold levels.
            ChainReport rep;
            for (int attempt = 0; attempt < 25; ++attempt) {
                const long m = m0 + static_cast<long>(g.next() % 6ull);
                const long n = static_cast<long>(g.next() % 40ull);
                const bool neg = (g.next() & 1) != 0;
                const GridSquare q0{neg ? -m - 1 : m, n, side};
                const std::vector<GridSquare> chain =
                    build_forward_chain(P, q0, q0.geometry().min_abs_re(), 3);
                rep = chain_distortion(P, chain, tower);
                if (rep.levels_ok) break;
            }
            if (!rep.pass) ++fails;
            if (!rep.levels_ok) ++levels_bad;
            worst = std::max(worst, rep.Lest);
        }
        j["chain"] = {{"chains", chains}, {"failures", fails}, {"levelsBad", levels_bad},
                      {"worstLest", worst}, {"bound", std::exp(2.0)},
                      {"pass", fails == 0 && levels_bad == 0}};
        ok = ok && fails == 0 && levels_bad == 0;
    }
    if (all || which == "univalence") {
        const UnivalenceReport disk =
            univalence_probe(P, ProbeRegion::disk(), pairs, mix64(cfg.seed, 0x7531));
        bool sector_ok = true;
        double min_ratio = disk.min_ratio;
        const int N = P.degree();
        for (int s = 0; s < 2 * (N - 1); ++s) {
            const double theta = (s + 0.5) * kTwoPi / (2.0 * (N - 1));
            const UnivalenceReport rep =
                univalence_probe(P, ProbeRegion::sector(theta), pairs, mix64(cfg.seed, 0x7532, s));
            sector_ok = sector_ok && rep.pass;
            min_ratio = std::min(min_ratio, rep.min_ratio);
        }
        j["univalence"] = {{"pairsPerRegion", pairs}, {"minRatio", min_ratio},
                           {"pass", disk.pass && sector_ok}};
        ok = ok && disk.pass && sector_ok;
    }

    j["pass"] = ok;
    print_json(j);
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fast-escape area certification toolkit"};
    app.require_subcommand(1);

    CommonFlags c_const, c_classify, c_density, c_census, c_lemmas, c_render;

    CLI::App* cmd_const = app.add_subcommand("constants", "derive the full constant set");
    c_const.attach(cmd_const);

    CLI::App* cmd_classify = app.add_subcommand("classify", "classify one orbit to depth");
    c_classify.attach(cmd_classify);
    std::string point;
    cmd_classify->add_option("--z0", point, "seed point (complex literal)")->required();

    CLI::App* cmd_density = app.add_subcommand("density", "certified density of one square");
    c_density.attach(cmd_density);
    std::string square_arg, origin_arg;
    cmd_density->add_option("--square", square_arg, "grid square indices m,n");
    cmd_density->add_option("--origin", origin_arg, "free square corner re,im");

    CLI::App* cmd_census = app.add_subcommand("census", "full one-period strip census");
    c_census.attach(cmd_census);
    double xmax = 40.0, strip_offset = 0.0;
    std::string csv_path;
    cmd_census->add_option("--xmax", xmax, "truncation bound on |Re|");
    cmd_census->add_option("--strip-offset", strip_offset, "strip lower edge Im offset");
    cmd_census->add_option("--csv", csv_path, "write per-square table to this file");

    CLI::App* cmd_lemmas = app.add_subcommand("lemmas", "randomized estimate checks");
    c_lemmas.attach(cmd_lemmas);
    std::string which = "all";
    long lemma_squares = 200, lemma_pairs = 1000, lemma_chains = 50;
    int circle_samples = 1000;
    cmd_lemmas->add_option("--which", which, "pp|estp1|ln|mq|chain|univalence|all")
        ->check(CLI::IsMember({"pp", "estp1", "ln", "mq", "chain", "univalence", "all"}));
    cmd_lemmas->add_option("--squares", lemma_squares, "random squares per check");
    cmd_lemmas->add_option("--pairs", lemma_pairs, "pairs per univalence region");
    cmd_lemmas->add_option("--circle-samples", circle_samples, "points per probe circle");
    cmd_lemmas->add_option("--chains", lemma_chains, "forward chains to build");

    CLI::App* cmd_render = app.add_subcommand("render", "escape-depth image of a window");
    c_render.attach(cmd_render);
    std::string window_arg = "-8,8,0,6.283185307179586", size_arg = "800x314", palette_arg = "grayscale";
    bool conjugate_view = false;
    cmd_render->add_option("--window", window_arg, "re0,re1,im0,im1");
    cmd_render->add_option("--size", size_arg, "WxH in pixels");
    cmd_render->add_option("--palette", palette_arg, "grayscale|faildepth")
        ->check(CLI::IsMember({"grayscale", "faildepth"}));
    cmd_render->add_flag("--conjugate-view", conjugate_view,
                         "image the sine-plane coordinates (seed i*(p+beta))");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_const->parsed()) {
            const RunConfig cfg = c_const.resolve();
            const ConstantSet cs =
                compute_constants(config_poly(cfg), config_side(cfg), cfg.c1, cfg.x0);
            ojson j;
            j["command"] = "constants";
            j["config"] = config_json(cfg);
            j["constants"] = constants_json(cs);
            print_json(j);
            return 0;
        }

        if (cmd_classify->parsed()) {
            const RunConfig cfg = c_classify.resolve();
            const ComplexPoly P = config_poly(cfg);
            const double base =
                cfg.x0 > 0.0 ? cfg.x0
                             : compute_constants(P, config_side(cfg), cfg.c1).x_star;
            const ThresholdTower tower(base);
            const EntireMap map(P);
            const cdbl z0 = parse_complex(point);
            const OrbitVerdict v = classify_orbit(map, z0, cfg.depth, tower, orbit_options(cfg));
            ojson j;
            j["command"] = "classify";
            j["config"] = config_json(cfg);
            j["point"] = {z0.real(), z0.imag()};
            j["x0"] = base;
            j["status"] = status_name(v.status);
            j["depth"] = v.depth;
            j["at"] = v.at;
            j["margins"] = v.margins;
            print_json(j);
            return 0;
        }

        if (cmd_density->parsed()) {
            const RunConfig cfg = c_density.resolve();
            const ComplexPoly P = config_poly(cfg);
            const double side = config_side(cfg);
            if (square_arg.empty() == origin_arg.empty())
                throw ConfigError("density: give exactly one of --square m,n or --origin re,im");
            DensityReport rep;
            if (!square_arg.empty()) {
                long m = 0, n = 0;
                if (std::sscanf(square_arg.c_str(), "%ld,%ld", &m, &n) != 2)
                    throw ConfigError("square: expected two integers m,n; got '" + square_arg + "'");
                rep = sample_square_density(P, GridSquare{m, n, side}, cfg.depth, cfg.samples,
                                            cfg.seed, census_options(cfg));
            } else {
                double re0 = 0.0, im0 = 0.0;
                if (std::sscanf(origin_arg.c_str(), "%lf,%lf", &re0, &im0) != 2)
                    throw ConfigError("origin: expected two reals re,im; got '" + origin_arg + "'");
                rep = sample_square_density(P, Square{re0, im0, side}, cfg.depth, cfg.samples,
                                            cfg.seed, census_options(cfg));
            }
            ojson j;
            j["command"] = "density";
            j["config"] = config_json(cfg);
            j["report"] = density_json(rep);
            print_json(j);
            return rep.pass ? 0 : 1;
        }

        if (cmd_census->parsed()) {
            const RunConfig cfg = c_census.resolve();
            const ComplexPoly P = config_poly(cfg);
            const StripCensus sc = strip_census(P, strip_offset, config_side(cfg), xmax, cfg.depth,
                                                cfg.samples, cfg.seed, census_options(cfg));
            ojson j;
            j["command"] = "census";
            j["config"] = config_json(cfg);
            j["stripImOffset"] = sc.stripImOffset;
            j["r"] = sc.r;
            j["xMax"] = sc.xMax;
            j["depth"] = sc.depth;
            j["samplesPerSquare"] = sc.samplesPerSquare;
            j["seed"] = sc.seed;
            j["truncatedArea"] = sc.truncatedArea;
            j["tailBound"] = sc.tailBound;
            j["totalUpper"] = sc.totalUpper;
            j["areaBound"] = sc.areaBound;
            j["sampledSquares"] = sc.sampledSquares;
            j["skippedSquares"] = sc.skippedSquares;
            j["indeterminateSamples"] = sc.indeterminateSamples;
            ojson cells = ojson::array();
            for (const SquareCell& c : sc.cells)
                cells.push_back({{"m", c.m},
                                 {"n", c.n},
                                 {"certifiedFraction", c.certifiedFraction},
                                 {"indeterminateFraction", c.indeterminateFraction},
                                 {"skipped", c.skipped}});
            j["cells"] = cells;
            const bool pass = sc.totalUpper <= sc.areaBound;
            j["pass"] = pass;
            if (!csv_path.empty()) {
                std::ofstream csv(csv_path);
                if (!csv) throw ConfigError("csv: cannot open '" + csv_path + "'");
                csv << "m,n,certifiedFraction,indeterminateFraction\n";
                char line[128];
                for (const SquareCell& c : sc.cells) {
                    std::snprintf(line, sizeof line, "%ld,%ld,%.17g,%.17g\n", c.m, c.n,
                                  c.certifiedFraction, c.indeterminateFraction);
                    csv << line;
                }
            }
            print_json(j);
            return pass ? 0 : 1;
        }

        if (cmd_lemmas->parsed()) {
            const RunConfig cfg = c_lemmas.resolve();
            return run_lemmas(cfg, which, lemma_squares, lemma_pairs, circle_samples,
                              lemma_chains);
        }

        if (cmd_render->parsed()) {
            const RunConfig cfg = c_render.resolve();
            if (cfg.outPath.empty()) throw ConfigError("out: render needs --out file.ppm");
            RenderSpec spec;
            if (std::sscanf(window_arg.c_str(), "%lf,%lf,%lf,%lf", &spec.re0, &spec.re1, &spec.im0,
                            &spec.im1) != 4)
                throw ConfigError("window: expected re0,re1,im0,im1; got '" + window_arg + "'");
            if (std::sscanf(size_arg.c_str(), "%dx%d", &spec.widthPx, &spec.heightPx) != 2)
                throw ConfigError("size: expected WxH; got '" + size_arg + "'");
            spec.depth = cfg.depth;
            spec.palette = palette_arg == "faildepth" ? Palette::FailDepth : Palette::Grayscale;
            spec.conjugateView = conjugate_view;
            RenderOptions ro;
            ro.x0 = cfg.x0;
            ro.beta = cfg.coeffs.empty() ? cfg.beta : cdbl{0.0, 0.0};
            ro.workers = cfg.threads;
            ro.orbit = orbit_options(cfg);
            const Image img = render_strip(config_poly(cfg), spec, ro);
            write_ppm(img, cfg.outPath);
            ojson j;
            j["command"] = "render";
            j["config"] = config_json(cfg);
            j["window"] = {spec.re0, spec.re1, spec.im0, spec.im1};
            j["widthPx"] = spec.widthPx;
            j["heightPx"] = spec.heightPx;
            j["palette"] = palette_arg;
            j["conjugateView"] = spec.conjugateView;
            j["x0"] = ro.x0 > 0.0 ? ro.x0 : 6.0 * std::log(2.0);
            j["whiteFraction"] = white_fraction(img);
            j["out"] = cfg.outPath;
            print_json(j);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
