#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdet/geometry.hpp"
#include "sdet/nn.hpp"

namespace sdet {

// 8-bit RGB raster, row-major interleaved.
struct Image {
    int h = 0, w = 0;
    std::vector<std::uint8_t> px;  // h * w * 3

    Image() = default;
    Image(int h_, int w_) : h(h_), w(w_), px(static_cast<std::size_t>(h_) * w_ * 3, 0) {}

    std::uint8_t& at(int y, int x, int c) { return px[(static_cast<std::size_t>(y) * w + x) * 3 + c]; }
    std::uint8_t at(int y, int x, int c) const {
        return px[(static_cast<std::size_t>(y) * w + x) * 3 + c];
    }
};

// Binary PPM (P6), the lossless interchange format of the dataset.
void write_ppm(const std::string& path, const Image& img);
Image read_ppm(const std::string& path);

// Image tensor in [0, 1], CHW.
Tensor image_to_tensor(const Image& img);

// 1px rectangle outline, clipped to the image.
void draw_box(Image& img, const BBox& box, std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace sdet
