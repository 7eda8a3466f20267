#include "fastescape/render.hpp"

#include "fastescape/parallel.hpp"
#include "fastescape/tower.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace fastescape {

namespace {

constexpr double kTwoPi = 6.283185307179586; // nearest double to 2*pi

/// Shift t0 by a whole number of (floating-point) periods into [0, 2*pi).
/// Two windows whose origins differ by exactly k * kTwoPi in doubles land
/// on the same canonical origin, which is what makes period-translated
/// renders bit-identical rather than merely close.
double canonical_origin(double t0) {
    const double k = std::floor(t0 / kTwoPi);
    double base = t0 - k * kTwoPi;
    if (base < 0.0) base += kTwoPi;
    else if (base >= kTwoPi) base -= kTwoPi;
    return base;
}

struct Rgb {
    std::uint8_t r, g, b;
};

/// levels == number of checks passed before the classification ended;
/// certified orbits report levels = depth + 1.
Rgb colour(Palette palette, OrbitStatus status, int levels, int depth) {
    if (status == OrbitStatus::IndeterminateAngle) return {128, 128, 128};
    if (status == OrbitStatus::Certified) {
        (void)depth;
        return palette == Palette::FailDepth ? Rgb{16, 16, 48} : Rgb{32, 32, 32};
    }
    // Failed at level `levels`.
    if (levels <= 1) return {255, 255, 255}; // Fatou-like: never even starts
    if (palette == Palette::Grayscale) {
        const std::uint8_t g =
            static_cast<std::uint8_t>(levels == 2 ? 192 : 160);
        return {g, g, g};
    }
    static constexpr Rgb kHues[] = {
        {240, 180, 60}, {200, 80, 160}, {80, 180, 220},
        {220, 90, 60},  {120, 200, 90}, {170, 140, 230},
    };
    return kHues[(levels - 2) % 6];
}

} // namespace

Image render_strip(const ComplexPoly& P, const RenderSpec& spec,
                   const RenderOptions& opt) {
    if (spec.widthPx < 1 || spec.heightPx < 1)
        throw std::invalid_argument("render_strip: raster dimensions must be >= 1");
    if (!(spec.re0 < spec.re1) || !(spec.im0 < spec.im1))
        throw std::invalid_argument("render_strip: window must satisfy re0 < re1, im0 < im1");
    if (spec.depth < 0) throw std::invalid_argument("render_strip: depth must be >= 0");

    const double x0 = opt.x0 > 0.0 ? opt.x0 : 6.0 * std::log(2.0);
    const ThresholdTower tower(x0);
    const EntireMap map(P);

    // Canonicalize the origin of the axis along which the map is periodic:
    // Im in the plain view, Re under the conjugation p -> i*(p + beta).
    const double re_base = spec.conjugateView ? canonical_origin(spec.re0) : spec.re0;
    const double im_base = spec.conjugateView ? spec.im0 : canonical_origin(spec.im0);
    const double re_step = (spec.re1 - spec.re0) / spec.widthPx;
    const double im_step = (spec.im1 - spec.im0) / spec.heightPx;

    Image img;
    img.width = spec.widthPx;
    img.height = spec.heightPx;
    img.rgb.assign(3 * static_cast<size_t>(spec.widthPx) * spec.heightPx, 0);

    parallel_for(
        static_cast<size_t>(spec.heightPx),
        [&](size_t row) {
            const double im =
                im_base + (static_cast<double>(spec.heightPx) - 0.5 - static_cast<double>(row)) * im_step;
            std::uint8_t* out = img.rgb.data() + 3 * row * static_cast<size_t>(spec.widthPx);
            for (int col = 0; col < spec.widthPx; ++col) {
                const double re = re_base + (static_cast<double>(col) + 0.5) * re_step;
                const cdbl z0 = spec.conjugateView
                                    ? cdbl{-(im + opt.beta.imag()), re + opt.beta.real()}
                                    : cdbl{re, im};
                const OrbitVerdict v = classify_orbit(map, z0, spec.depth, tower, opt.orbit);
                const int levels = v.status == OrbitStatus::Certified ? spec.depth + 1 : v.at;
                const Rgb c = colour(spec.palette, v.status, levels, spec.depth);
                out[3 * col + 0] = c.r;
                out[3 * col + 1] = c.g;
                out[3 * col + 2] = c.b;
            }
        },
        opt.workers);

    return img;
}

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_ppm: cannot open " + path);
    f << "P6\n" << img.width << " " << img.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
    if (!f) throw std::runtime_error("write_ppm: short write to " + path);
}

double white_fraction(const Image& img) {
    if (img.rgb.empty()) return 0.0;
    size_t white = 0;
    const size_t n = static_cast<size_t>(img.width) * img.height;
    for (size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = img.rgb.data() + 3 * i;
        if (p[0] == 255 && p[1] == 255 && p[2] == 255) ++white;
    }
    return static_cast<double>(white) / static_cast<double>(n);
}

} // namespace fastescape
