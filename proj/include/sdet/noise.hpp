#pragma once

#include <cstdint>
#include <string>

#include "sdet/image.hpp"

namespace sdet {

enum class NoiseKind { none, gaussian, rain };

// Evaluation-time corruption. Rain applies box blur, bright angled streaks,
// then a global brightness reduction, in that order.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double sigma = 0.0;          // gaussian std, pixel-value units
    int streaks = 0;             // rain
    double streak_len = 12.0;    // px
    int blur_radius = 0;         // px
    double brightness = 1.0;     // in (0, 1]
    std::uint64_t seed = 0;

    void validate() const {
        require(sigma >= 0.0, "noise: sigma must be >= 0");
        require(brightness > 0.0 && brightness <= 1.0, "noise: brightness must be in (0,1]");
        require(streaks >= 0 && blur_radius >= 0, "noise: counts must be >= 0");
    }
    static NoiseSpec rain_light(std::uint64_t seed);
    static NoiseSpec rain_heavy(std::uint64_t seed);
};

Image gaussian_noise(const Image& img, const NoiseSpec& spec);
Image rain_sim(const Image& img, const NoiseSpec& spec);

// Dispatch on spec.kind; none returns the input untouched.
Image apply_noise(const Image& img, const NoiseSpec& spec);

}  // namespace sdet
