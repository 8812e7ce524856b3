#pragma once

#include <vector>

#include "sdet/features.hpp"
#include "sdet/nn.hpp"
#include "sdet/rng.hpp"

namespace sdet {

// Small convolutional trunk plus a top-down feature pyramid. The trunk is
// fixed at its random initialisation; only the pyramid convolutions (lateral
// and smoothing) are trained, and only in the final training phase.
struct BackboneConfig {
    int in_channels = 3;
    std::vector<int> trunk_channels = {16, 32, 64, 64};  // 3x3 stride-2 stages
    std::vector<int> pyramid_stages = {1, 2, 3};         // trunk stages feeding the pyramid
    int pyramid_channels = 32;

    void validate() const {
        require_config(trunk_channels.size() >= 2, "backbone: need >= 2 trunk stages");
        require_config(!pyramid_stages.empty(), "backbone: pyramid needs >= 1 level");
        for (int s : pyramid_stages)
            require_config(s >= 0 && s < static_cast<int>(trunk_channels.size()),
                           "backbone: pyramid stage out of range");
        require_config(pyramid_channels >= 1, "backbone: pyramid_channels must be >= 1");
    }
};

struct BackboneTrace {
    bool recorded = false;
    std::vector<Tensor> stage_out;  // post-relu trunk outputs of pyramid stages
    std::vector<Tensor> merged;     // lateral + upsampled, before smoothing
};

struct BackboneGrads {
    std::vector<std::vector<double>> dlat_w, dlat_b, dsmooth_w, dsmooth_b;
    void init(const struct Backbone& bb);
    void scale(double f);
};

struct Backbone {
    BackboneConfig cfg;
    std::vector<Conv2d> trunk;
    std::vector<Conv2d> lateral;  // 1x1 projections, finest first
    std::vector<Conv2d> smooth;   // 3x3 per level

    void init(const BackboneConfig& config, Rng& rng);
    // image is (in_channels, H, W); H and W must be divisible far enough for
    // every requested stage.
    FeatureMaps forward(const Tensor& image, BackboneTrace* trace = nullptr) const;
    // dlevels: one gradient tensor per pyramid level. Trunk gradients are not
    // computed (the trunk stays frozen).
    void backward(const BackboneTrace& trace, std::vector<Tensor> dlevels,
                  BackboneGrads& grads) const;

    int level_stride(std::size_t level_idx) const { return 2 << cfg.pyramid_stages[level_idx]; }
};

}  // namespace sdet
