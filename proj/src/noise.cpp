#include "sdet/noise.hpp"

#include <cmath>

#include "sdet/rng.hpp"

namespace sdet {

NoiseSpec NoiseSpec::rain_light(std::uint64_t seed) {
    NoiseSpec s;
    s.kind = NoiseKind::rain;
    s.streaks = 40;
    s.streak_len = 10.0;
    s.blur_radius = 1;
    s.brightness = 0.9;
    s.seed = seed;
    return s;
}

NoiseSpec NoiseSpec::rain_heavy(std::uint64_t seed) {
    NoiseSpec s;
    s.kind = NoiseKind::rain;
    s.streaks = 120;
    s.streak_len = 16.0;
    s.blur_radius = 2;
    s.brightness = 0.7;
    s.seed = seed;
    return s;
}

namespace {

std::uint8_t quantise(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

std::vector<double> to_double(const Image& img) {
    return std::vector<double>(img.px.begin(), img.px.end());
}

Image from_double(const std::vector<double>& buf, int h, int w) {
    Image out(h, w);
    for (std::size_t i = 0; i < buf.size(); ++i) out.px[i] = quantise(buf[i]);
    return out;
}

// separable box blur, clamped borders
void box_blur(std::vector<double>& buf, int h, int w, int radius) {
    if (radius <= 0) return;
    const double inv = 1.0 / (2 * radius + 1);
    std::vector<double> tmp(buf.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int d = -radius; d <= radius; ++d) {
                    const int xx = std::clamp(x + d, 0, w - 1);
                    acc += buf[(static_cast<std::size_t>(y) * w + xx) * 3 + c];
                }
                tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc * inv;
            }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int d = -radius; d <= radius; ++d) {
                    const int yy = std::clamp(y + d, 0, h - 1);
                    acc += tmp[(static_cast<std::size_t>(yy) * w + x) * 3 + c];
                }
                buf[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc * inv;
            }
}

}  // namespace

Image gaussian_noise(const Image& img, const NoiseSpec& spec) {
    spec.validate();
    if (spec.sigma == 0.0) return img;
    Rng rng(spec.seed);
    Image out(img.h, img.w);
    for (std::size_t i = 0; i < img.px.size(); ++i)
        out.px[i] = quantise(img.px[i] + rng.normal(0.0, spec.sigma));
    return out;
}

Image rain_sim(const Image& img, const NoiseSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<double> buf = to_double(img);

    box_blur(buf, img.h, img.w, spec.blur_radius);

    // bright streaks at 70-110 degrees from horizontal, drawn additively with
    // bilinear anti-aliasing
    const double gain = 0.4 * 255.0;
    for (int s = 0; s < spec.streaks; ++s) {
        const double x0 = rng.uniform(0.0, img.w);
        const double y0 = rng.uniform(0.0, img.h);
        const double angle = rng.uniform(70.0, 110.0) * 3.14159265358979323846 / 180.0;
        const double len = rng.uniform(0.5, 1.0) * spec.streak_len;
        const double dx = std::cos(angle);
        const double dy = std::sin(angle);
        const int steps = std::max(2, static_cast<int>(len * 2.0));
        for (int t = 0; t < steps; ++t) {
            const double px = x0 + dx * len * t / (steps - 1);
            const double py = y0 + dy * len * t / (steps - 1);
            const int ix = static_cast<int>(std::floor(px));
            const int iy = static_cast<int>(std::floor(py));
            const double fx = px - ix;
            const double fy = py - iy;
            const double amount = gain / steps * 2.0;
            for (int oy = 0; oy <= 1; ++oy)
                for (int ox = 0; ox <= 1; ++ox) {
                    const int xx = ix + ox;
                    const int yy = iy + oy;
                    if (xx < 0 || xx >= img.w || yy < 0 || yy >= img.h) continue;
                    const double wgt = (ox ? fx : 1 - fx) * (oy ? fy : 1 - fy);
                    for (int c = 0; c < 3; ++c)
                        buf[(static_cast<std::size_t>(yy) * img.w + xx) * 3 + c] +=
                            amount * wgt;
                }
        }
    }

    for (auto& v : buf) v *= spec.brightness;
    return from_double(buf, img.h, img.w);
}

Image apply_noise(const Image& img, const NoiseSpec& spec) {
    switch (spec.kind) {
        case NoiseKind::none: return img;
        case NoiseKind::gaussian: return gaussian_noise(img, spec);
        case NoiseKind::rain: return rain_sim(img, spec);
    }
    return img;
}

}  // namespace sdet
