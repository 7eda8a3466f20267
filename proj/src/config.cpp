#include "fastescape/config.hpp"

#include "fastescape/constants.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace fastescape {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_real(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(key + ": empty value");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ConfigError(key + ": cannot parse '" + t + "' as a real number");
    return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError(key + ": empty value");
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size())
        throw ConfigError(key + ": cannot parse '" + t + "' as an integer");
    return v;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

cdbl parse_complex(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError("complex literal: empty value");
    if (t.back() != 'i' && t.back() != 'I') {
        // "re,im" pair form; only usable where the literal stands alone,
        // since coefficient lists are themselves comma-separated.
        if (const size_t comma = t.find(','); comma != std::string::npos)
            return {parse_real("complex literal", t.substr(0, comma)),
                    parse_real("complex literal", t.substr(comma + 1))};
        return {parse_real("complex literal", t), 0.0};
    }

    const std::string body = t.substr(0, t.size() - 1);
    // Split at the last sign that is not a leading sign and not part of an
    // exponent; everything after it (plus the dropped 'i') is the imaginary
    // term.
    size_t split = std::string::npos;
    for (size_t k = body.size(); k-- > 1;) {
        const char c = body[k];
        if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [](const std::string& s) {
        if (s.empty() || s == "+") return 1.0;
        if (s == "-") return -1.0;
        return parse_real("complex literal", s);
    };
    if (split == std::string::npos) return {0.0, imag_of(body)};
    return {parse_real("complex literal", body.substr(0, split)), imag_of(body.substr(split))};
}

std::string format_complex(cdbl v) {
    if (v.imag() == 0.0) return format_real(v.real());
    std::string im = format_real(v.imag());
    if (v.real() == 0.0) return im + "i";
    if (im[0] != '-') im.insert(im.begin(), '+');
    return format_real(v.real()) + im + "i";
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    bool saw_alpha = false, saw_beta = false;

    // Cut into assignments: newline-separated lines, each possibly holding
    // several comma-separated key=value pairs. A comma-piece without '='
    // belongs to the previous value (this keeps coefficient lists intact).
    std::vector<std::string> assigns;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        if (const size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string piece;
        std::istringstream parts(line);
        while (std::getline(parts, piece, ',')) {
            if (trim(piece).empty()) continue;
            if (piece.find('=') == std::string::npos && !assigns.empty())
                assigns.back() += "," + piece;
            else
                assigns.push_back(piece);
        }
    }

    for (const std::string& a : assigns) {
        const size_t eq = a.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key=value, got '" + trim(a) + "'");
        const std::string key = trim(a.substr(0, eq));
        const std::string val = trim(a.substr(eq + 1));
        if (key == "coeffs") {
            cfg.coeffs.clear();
            std::istringstream cs(val);
            for (std::string c; std::getline(cs, c, ',');) cfg.coeffs.push_back(parse_complex(c));
        } else if (key == "alpha") {
            cfg.alpha = parse_complex(val);
            saw_alpha = true;
        } else if (key == "beta") {
            cfg.beta = parse_complex(val);
            saw_beta = true;
        } else if (key == "r") {
            cfg.r = parse_real(key, val);
        } else if (key == "x0") {
            cfg.x0 = parse_real(key, val);
        } else if (key == "c1") {
            cfg.c1 = parse_real(key, val);
        } else if (key == "depth") {
            cfg.depth = static_cast<int>(parse_integer(key, val));
        } else if (key == "samples") {
            cfg.samples = static_cast<long>(parse_integer(key, val));
        } else if (key == "seed") {
            cfg.seed = static_cast<unsigned long long>(parse_integer(key, val));
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_integer(key, val));
        } else if (key == "prec_bits") {
            cfg.precBits = static_cast<int>(parse_integer(key, val));
        } else if (key == "out") {
            cfg.outPath = val;
        } else {
            throw ConfigError("config: unknown key '" + key +
                              "'; known keys: coeffs, alpha, beta, r, x0, c1, depth, samples, "
                              "seed, threads, prec_bits, out");
        }
    }

    cfg.hasAlphaBeta = saw_alpha || saw_beta;
    validate_config(cfg);
    return cfg;
}

void validate_config(const RunConfig& cfg) {
    const bool has_coeffs = !cfg.coeffs.empty();
    if (has_coeffs && cfg.hasAlphaBeta)
        throw ConfigError("polynomial: give either coeffs or alpha/beta, not both");
    if (!has_coeffs && !cfg.hasAlphaBeta)
        throw ConfigError("polynomial: one of coeffs or alpha/beta is required");

    int N = 2;
    if (has_coeffs) {
        if (cfg.coeffs.size() < 3)
            throw ConfigError("coeffs: need at least 3 entries (degree >= 2)");
        if (cfg.coeffs.front() == cdbl{0.0, 0.0} || cfg.coeffs.back() == cdbl{0.0, 0.0})
            throw ConfigError("coeffs: first and last coefficients must be nonzero");
        N = static_cast<int>(cfg.coeffs.size()) - 1;
    } else if (cfg.alpha == cdbl{0.0, 0.0}) {
        throw ConfigError("alpha: must be nonzero");
    }

    if (cfg.r != 0.0) {
        const double rmax = 1.0 / (4.0 * N);
        if (!(cfg.r > 0.0) || cfg.r > rmax * (1.0 + 1e-12))
            throw ConfigError("r: must satisfy 0 < r <= 1/(4N) = " + format_real(rmax) +
                              "; got " + format_real(cfg.r));
    }
    if (cfg.x0 != 0.0) {
        const double xmin = 6.0 * std::log(2.0);
        if (!std::isfinite(cfg.x0) || cfg.x0 < xmin * (1.0 - 1e-12))
            throw ConfigError("x0: must be >= 6*log(2) = " + format_real(xmin) + "; got " +
                              format_real(cfg.x0));
    }
    if (cfg.c1 != 0.0 && !(cfg.c1 > 0.0 && std::isfinite(cfg.c1)))
        throw ConfigError("c1: must be a positive real number; got " + format_real(cfg.c1));
    if (cfg.depth < 0 || cfg.depth > 64)
        throw ConfigError("depth: must be in [0, 64]; got " + std::to_string(cfg.depth));
    if (cfg.samples < 1 || cfg.samples > 1000000000L)
        throw ConfigError("samples: must be in [1, 1e9]; got " + std::to_string(cfg.samples));
    if (cfg.threads < 0 || cfg.threads > 4096)
        throw ConfigError("threads: must be in [0, 4096]; got " + std::to_string(cfg.threads));
    if (cfg.precBits != 0 && (cfg.precBits < 64 || cfg.precBits > 1048576))
        throw ConfigError("prec_bits: must be 0 (off) or in [64, 1048576]; got " +
                          std::to_string(cfg.precBits));
}

std::string emit_config(const RunConfig& cfg) {
    std::string out;
    if (!cfg.coeffs.empty()) {
        out += "coeffs=";
        for (size_t k = 0; k < cfg.coeffs.size(); ++k) {
            if (k) out += ",";
            out += format_complex(cfg.coeffs[k]);
        }
        out += "\n";
    } else {
        out += "alpha=" + format_complex(cfg.alpha) + "\n";
        out += "beta=" + format_complex(cfg.beta) + "\n";
    }
    out += "r=" + format_real(cfg.r) + "\n";
    out += "x0=" + format_real(cfg.x0) + "\n";
    out += "c1=" + format_real(cfg.c1) + "\n";
    out += "depth=" + std::to_string(cfg.depth) + "\n";
    out += "samples=" + std::to_string(cfg.samples) + "\n";
    out += "seed=" + std::to_string(cfg.seed) + "\n";
    out += "threads=" + std::to_string(cfg.threads) + "\n";
    out += "prec_bits=" + std::to_string(cfg.precBits) + "\n";
    if (!cfg.outPath.empty()) out += "out=" + cfg.outPath + "\n";
    return out;
}

ComplexPoly config_poly(const RunConfig& cfg) {
    if (!cfg.coeffs.empty()) return ComplexPoly(cfg.coeffs);
    return ComplexPoly::sine_family(cfg.alpha, cfg.beta);
}

double config_side(const RunConfig& cfg) {
    if (cfg.r > 0.0) return cfg.r;
    const int N = cfg.coeffs.empty() ? 2 : static_cast<int>(cfg.coeffs.size()) - 1;
    return default_square_side(N);
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    if (!cfg.coeffs.empty()) {
        j["poly"]["family"] = "coeffs";
    } else {
        j["poly"]["family"] = "sine";
        j["poly"]["alpha"] = {cfg.alpha.real(), cfg.alpha.imag()};
        j["poly"]["beta"] = {cfg.beta.real(), cfg.beta.imag()};
    }
    nlohmann::ordered_json cs = nlohmann::ordered_json::array();
    const ComplexPoly p = config_poly(cfg);
    for (const cdbl& c : p.coeffs()) cs.push_back({c.real(), c.imag()});
    j["poly"]["coeffs"] = cs;
    j["r"] = config_side(cfg);
    j["x0"] = cfg.x0;
    j["c1"] = cfg.c1;
    j["depth"] = cfg.depth;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["precBits"] = cfg.precBits;
    j["out"] = cfg.outPath;
    return j;
}

} // namespace fastescape
