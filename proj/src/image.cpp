#include "sdet/image.hpp"

#include <cstdio>
#include <fstream>

namespace sdet {

void write_ppm(const std::string& path, const Image& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "P6\n" << img.w << " " << img.h << "\n255\n";
    f.write(reinterpret_cast<const char*>(img.px.data()),
            static_cast<std::streamsize>(img.px.size()));
    if (!f) throw IoError("short write: " + path);
}

Image read_ppm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string magic;
    f >> magic;
    if (magic != "P6") throw IoError("not a binary PPM: " + path);
    int w = 0, h = 0, maxval = 0;
    f >> w >> h >> maxval;
    if (w <= 0 || h <= 0 || maxval != 255) throw IoError("unsupported PPM header: " + path);
    f.get();  // single whitespace after header
    Image img(h, w);
    f.read(reinterpret_cast<char*>(img.px.data()), static_cast<std::streamsize>(img.px.size()));
    if (!f) throw IoError("truncated PPM: " + path);
    return img;
}

Tensor image_to_tensor(const Image& img) {
    Tensor t(3, img.h, img.w);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int c = 0; c < 3; ++c) t.at(c, y, x) = img.at(y, x, c) / 255.0;
    return t;
}

void draw_box(Image& img, const BBox& box, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const int x1 = std::max(0, static_cast<int>(std::floor(box.x1)));
    const int y1 = std::max(0, static_cast<int>(std::floor(box.y1)));
    const int x2 = std::min(img.w - 1, static_cast<int>(std::ceil(box.x2)) - 1);
    const int y2 = std::min(img.h - 1, static_cast<int>(std::ceil(box.y2)) - 1);
    if (x2 < x1 || y2 < y1) return;
    auto put = [&](int y, int x) {
        img.at(y, x, 0) = r;
        img.at(y, x, 1) = g;
        img.at(y, x, 2) = b;
    };
    for (int x = x1; x <= x2; ++x) {
        put(y1, x);
        put(y2, x);
    }
    for (int y = y1; y <= y2; ++y) {
        put(y, x1);
        put(y, x2);
    }
}

}  // namespace sdet
