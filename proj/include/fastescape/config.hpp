#pragma once

#include "fastescape/complexpoly.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fastescape {

/// A configuration field failed to parse or landed outside its admissible
/// range. The message always names the offending key first.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a run needs, before derived quantities are computed.
/// Exactly one polynomial spelling must be present: an explicit coefficient
/// list, or the sine-type family parameters alpha/beta. Zero in r / x0 / c1
/// means "derive the value from the polynomial".
struct RunConfig {
    std::vector<cdbl> coeffs; ///< non-empty iff spelled as coefficients
    bool hasAlphaBeta = false;
    cdbl alpha{0.0, 0.0};
    cdbl beta{0.0, 0.0};

    double r = 0.0;  ///< square side; 0 = min(1/8, 1/(4N))
    double x0 = 0.0; ///< escape-test base override; 0 = derived
    double c1 = 0.0; ///< distortion-constant override; 0 = derived
    int depth = 3;
    long samples = 4096;
    unsigned long long seed = 1;
    int threads = 0;     ///< worker cap; 0 = hardware / env
    int precBits = 2048; ///< angle-rescue precision; 0 disables the rescue
    std::string outPath;

    bool operator==(const RunConfig&) const = default;
};

/// Parse "re", "imi" or "re+imi" (e.g. "1", "-0.5", "2i", "1.5e-3-2i", "-i").
cdbl parse_complex(const std::string& text);

/// Inverse of parse_complex; exact round-trip through 17 significant digits.
std::string format_complex(cdbl v);

/// Parse key=value text (newlines and/or commas between assignments; commas
/// inside a coeffs list are kept with the list) and validate every field.
/// Throws ConfigError naming the first invalid field and its admissible
/// range.
RunConfig parse_config(const std::string& text);

/// Range checks only; same errors as parse_config. Field order is fixed, so
/// the first violation reported is deterministic.
void validate_config(const RunConfig& cfg);

/// Canonical key=value rendering; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);

/// Build the polynomial this config describes.
ComplexPoly config_poly(const RunConfig& cfg);

/// The square side actually used: cfg.r, or the derived default.
double config_side(const RunConfig& cfg);

/// Resolved config as an ordered JSON object, embedded in every command's
/// machine output for provenance.
nlohmann::ordered_json config_json(const RunConfig& cfg);

} // namespace fastescape
