#include "odstain/image.hpp"

namespace odstain {

RgbImage RgbImage::filled(int h, int w, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RgbImage img(h, w);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        img.data[i * 3 + 0] = r;
        img.data[i * 3 + 1] = g;
        img.data[i * 3 + 2] = b;
    }
    return img;
}

ScalarField rgb_to_grayscale(const RgbImage& img) {
    ScalarField gray(img.height, img.width);
    const std::uint8_t* p = img.data.data();
    for (std::size_t i = 0; i < img.pixel_count(); ++i, p += 3) {
        gray.values[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return gray;
}

}  // namespace odstain
