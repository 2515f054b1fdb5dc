#include "terraclass/render.hpp"

#include "terraclass/errors.hpp"

#include <png.h>

#include <cstdio>
#include <map>
#include <memory>

namespace terraclass {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f != nullptr) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_error_handler(png_structp, png_const_charp message) {
    throw IoError(std::string("png: ") + message);
}

void png_warning_handler(png_structp, png_const_charp) {}

std::uint32_t pack(const Rgb& c) {
    return (static_cast<std::uint32_t>(c.r) << 16) | (static_cast<std::uint32_t>(c.g) << 8) | c.b;
}

} // namespace

void write_png(const RgbImage& image, const std::filesystem::path& path) {
    if (image.width == 0 || image.height == 0 ||
        image.pixels.size() != image.width * image.height * 3) {
        throw ValidationError(ErrorCode::Validation, "invalid image dimensions");
    }
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) {
        throw IoError("cannot create " + path.string());
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                              png_warning_handler);
    if (png == nullptr) {
        throw IoError("png_create_write_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* png;
        png_infop* info;
        ~Guard() { png_destroy_write_struct(png, info); }
    } guard{&png, &info};
    if (info == nullptr) {
        throw IoError("png_create_info_struct failed");
    }

    png_init_io(png, file.get());
    png_set_compression_level(png, 9);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_BASE, PNG_FILTER_TYPE_BASE);
    png_write_info(png, info);
    for (std::size_t y = 0; y < image.height; ++y) {
        auto* row = const_cast<png_bytep>(image.pixels.data() + y * image.width * 3);
        png_write_row(png, row);
    }
    png_write_end(png, nullptr);
    if (std::fflush(file.get()) != 0) {
        throw IoError("write failure on " + path.string());
    }
}

RgbImage read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) {
        throw IoError("cannot open " + path.string());
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler,
                                             png_warning_handler);
    if (png == nullptr) {
        throw IoError("png_create_read_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* png;
        png_infop* info;
        ~Guard() { png_destroy_read_struct(png, info, nullptr); }
    } guard{&png, &info};
    if (info == nullptr) {
        throw IoError("png_create_info_struct failed");
    }

    png_init_io(png, file.get());
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    const auto depth = png_get_bit_depth(png, info);
    if (depth == 16) {
        png_set_strip_16(png);
    }
    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    if ((color & PNG_COLOR_MASK_ALPHA) != 0) {
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);

    RgbImage image;
    image.width = png_get_image_width(png, info);
    image.height = png_get_image_height(png, info);
    if (png_get_rowbytes(png, info) != image.width * 3) {
        throw IoError(path.string() + ": unsupported PNG layout");
    }
    image.pixels.resize(image.width * image.height * 3);
    for (std::size_t y = 0; y < image.height; ++y) {
        png_read_row(png, image.pixels.data() + y * image.width * 3, nullptr);
    }
    png_read_end(png, nullptr);
    return image;
}

std::filesystem::path legend_strip_path(const std::filesystem::path& png) {
    std::filesystem::path p = png;
    p.replace_extension(".legend.png");
    return p;
}

void render_map(const ClassRaster& cr, const ClassLegend& legend,
                const std::filesystem::path& path) {
    validate_against_legend(cr, legend);
    const auto hist = cr.histogram();
    std::map<std::uint32_t, ClassId> seen;
    if (hist[kUnclassified] > 0) {
        seen.emplace(0U, kUnclassified);
    }
    for (const auto& e : legend.entries()) {
        const auto [it, fresh] = seen.emplace(pack(e.color), e.class_id);
        if (!fresh) {
            throw ValidationError(ErrorCode::Validation,
                                  "class " + std::to_string(e.class_id) + " shares its color with " +
                                      (it->second == kUnclassified
                                           ? std::string("unclassified (black)")
                                           : "class " + std::to_string(it->second)));
        }
    }

    std::array<Rgb, 256> lut{};
    for (const auto& e : legend.entries()) {
        lut[e.class_id] = e.color;
    }
    RgbImage image{cr.cols(), cr.rows(), {}};
    image.pixels.reserve(cr.size() * 3);
    for (ClassId v : cr.values()) {
        image.pixels.push_back(lut[v].r);
        image.pixels.push_back(lut[v].g);
        image.pixels.push_back(lut[v].b);
    }
    write_png(image, path);

    constexpr std::size_t swatch = 16;
    const std::size_t n = std::max<std::size_t>(1, legend.size());
    RgbImage strip{n * swatch, swatch, std::vector<std::uint8_t>(n * swatch * swatch * 3, 0)};
    for (std::size_t i = 0; i < legend.size(); ++i) {
        const Rgb c = legend.entries()[i].color;
        for (std::size_t y = 0; y < swatch; ++y) {
            for (std::size_t x = 0; x < swatch; ++x) {
                auto* px = strip.pixels.data() + (y * strip.width + i * swatch + x) * 3;
                px[0] = c.r;
                px[1] = c.g;
                px[2] = c.b;
            }
        }
    }
    write_png(strip, legend_strip_path(path));
}

ClassRaster decode_map(const std::filesystem::path& path, const ClassLegend& legend) {
    const RgbImage image = read_png(path);
    std::map<std::uint32_t, ClassId> inverse;
    inverse.emplace(0U, kUnclassified);
    for (const auto& e : legend.entries()) {
        inverse[pack(e.color)] = e.class_id;
    }
    ClassRaster out(image.height, image.width);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Rgb c{image.pixels[i * 3], image.pixels[i * 3 + 1], image.pixels[i * 3 + 2]};
        const auto it = inverse.find(pack(c));
        if (it == inverse.end()) {
            throw ValidationError(ErrorCode::Validation,
                                  path.string() + ": color not in legend at pixel " +
                                      std::to_string(i));
        }
        out[i] = it->second;
    }
    return out;
}

} // namespace terraclass
