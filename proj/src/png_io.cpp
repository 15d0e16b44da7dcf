#include "odstain/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

namespace odstain {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

}  // namespace

RgbImage load_png(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || ec) {
        fail(Errc::MissingFile, "no such file: " + path.string());
    }
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) fail(Errc::MissingFile, "cannot open " + path.string());

    unsigned char sig[8] = {};
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        fail(Errc::MalformedImage, "not a PNG file: " + path.string());
    }

    PngReader r;
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) fail(Errc::Internal, "png_create_read_struct failed");
    r.info = png_create_info_struct(r.png);
    if (!r.info) fail(Errc::Internal, "png_create_info_struct failed");

    RgbImage img;
    std::vector<png_bytep> row_ptrs;

    if (setjmp(png_jmpbuf(r.png))) {
        fail(Errc::MalformedImage, "corrupt PNG: " + path.string());
    }

    png_init_io(r.png, fp.get());
    png_set_sig_bytes(r.png, 8);
    png_read_info(r.png, r.info);

    const int bit_depth = png_get_bit_depth(r.png, r.info);
    if (bit_depth != 8) {
        fail(Errc::MalformedImage,
             "unsupported bit depth " + std::to_string(bit_depth) + ": " + path.string());
    }

    const int color_type = png_get_color_type(r.png, r.info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(r.png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(r.png);
    }
    png_set_strip_alpha(r.png);
    png_set_interlace_handling(r.png);
    png_read_update_info(r.png, r.info);

    const png_uint_32 h = png_get_image_height(r.png, r.info);
    const png_uint_32 w = png_get_image_width(r.png, r.info);
    if (h < 1 || w < 1) fail(Errc::MalformedImage, "empty PNG: " + path.string());
    if (png_get_rowbytes(r.png, r.info) != static_cast<std::size_t>(w) * 3) {
        fail(Errc::MalformedImage, "unexpected row layout: " + path.string());
    }

    img = RgbImage(static_cast<int>(h), static_cast<int>(w));
    row_ptrs.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) {
        row_ptrs[y] = img.data.data() + static_cast<std::size_t>(y) * w * 3;
    }
    png_read_image(r.png, row_ptrs.data());
    png_read_end(r.png, nullptr);
    return img;
}

void save_png(const RgbImage& img, const std::filesystem::path& path) {
    if (img.height < 1 || img.width < 1) fail(Errc::InvalidParameter, "empty image");
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) fail(Errc::IoFailure, "cannot write " + path.string());

    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) fail(Errc::Internal, "png_create_write_struct failed");
    w.info = png_create_info_struct(w.png);
    if (!w.info) fail(Errc::Internal, "png_create_info_struct failed");

    std::vector<png_const_bytep> row_ptrs(img.height);
    for (int y = 0; y < img.height; ++y) {
        row_ptrs[y] = img.data.data() + static_cast<std::size_t>(y) * img.width * 3;
    }

    if (setjmp(png_jmpbuf(w.png))) {
        fail(Errc::IoFailure, "PNG write failed: " + path.string());
    }

    png_init_io(w.png, fp.get());
    png_set_IHDR(w.png, w.info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    png_write_rows(w.png, const_cast<png_bytepp>(const_cast<png_const_bytep*>(row_ptrs.data())),
                   static_cast<png_uint_32>(img.height));
    png_write_end(w.png, w.info);
    if (std::fflush(fp.get()) != 0) fail(Errc::IoFailure, "PNG flush failed: " + path.string());
}

}  // namespace odstain
