#pragma once

#include <vector>

#include "sdet/nn.hpp"

namespace sdet {

// Multi-level feature maps. Level 0 is the finest; strides strictly increase.
struct FeatureMaps {
    struct Level {
        int id = 0;
        int stride = 1;  // pixels per feature cell
        Tensor map;
    };
    std::vector<Level> levels;
    int image_h = 0, image_w = 0;

    void validate() const {
        require_config(!levels.empty(), "FeatureMaps: no levels");
        for (std::size_t i = 0; i < levels.size(); ++i) {
            require_config(levels[i].map.c == levels[0].map.c,
                           "FeatureMaps: channel count differs across levels");
            if (i > 0)
                require_config(levels[i].stride > levels[i - 1].stride,
                               "FeatureMaps: strides must strictly increase");
        }
    }
};

}  // namespace sdet
