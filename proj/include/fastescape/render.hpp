#pragma once

#include "fastescape/complexpoly.hpp"
#include "fastescape/orbit.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fastescape {

/// Pixel colouring scheme.
///  - Grayscale: white = escape test fails immediately (level 0 or 1),
///    graded light grays for deeper failures, dark for fully certified,
///    mid-gray (128) for an undecidable angle.
///  - FailDepth: same white/dark/mid-gray anchors, but failures at level
///    >= 2 get distinct hues keyed by the failing level.
enum class Palette { Grayscale, FailDepth };

/// Raster window over the dynamical plane.
///
/// When conjugateView is set the pixel coordinate p is interpreted in the
/// coordinates of the sine-type map and the orbit is started at i*(p + beta)
/// instead of p, so the periodic structure runs along the horizontal axis
/// of the picture. The translation-invariant axis (Im in the plain view,
/// Re in the conjugate view) is canonicalized modulo 2*pi before pixel
/// interpolation, which makes windows differing by exactly one period
/// produce bit-identical buffers.
struct RenderSpec {
    double re0 = 0.0, re1 = 1.0; ///< window in the horizontal direction
    double im0 = 0.0, im1 = 1.0; ///< window in the vertical direction
    int widthPx = 1;
    int heightPx = 1;
    int depth = 3;               ///< certification depth per pixel
    Palette palette = Palette::Grayscale;
    bool conjugateView = false;
};

struct RenderOptions {
    double x0 = 0.0;     ///< escape-test base; 0 picks the minimal 6*log(2)
    cdbl beta{0.0, 0.0}; ///< conjugation offset, used only with conjugateView
    int workers = 0;     ///< 0 = worker_count()
    OrbitOptions orbit{};
};

/// 8-bit RGB raster, rows stored top-down (row 0 = largest Im).
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb; ///< 3 * width * height bytes

    const std::uint8_t* pixel(int col, int row) const {
        return rgb.data() + 3 * (static_cast<size_t>(row) * width + col);
    }
};

/// Classify the orbit of every pixel-center point and colour it by verdict.
/// Deterministic: the buffer is a pure function of (P, spec, options) and
/// does not depend on the worker count. Throws std::invalid_argument on a
/// degenerate window or non-positive raster dimensions.
Image render_strip(const ComplexPoly& P, const RenderSpec& spec,
                   const RenderOptions& opt = {});

/// Binary PPM (P6, maxval 255).
void write_ppm(const Image& img, const std::string& path);

/// Fraction of pixels that are pure white (escape test failed at level 0/1).
double white_fraction(const Image& img);

} // namespace fastescape
