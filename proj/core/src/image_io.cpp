#include "speed/image_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace speed::io {
namespace {

enum class Format { png, tiff, unknown };

Format format_of(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") {
        return Format::png;
    }
    if (ext == ".tif" || ext == ".tiff") {
        return Format::tiff;
    }
    return Format::unknown;
}

// Interleaved 8-bit pixels, 1 or 3 channels.
struct Bytes {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
};

Bytes read_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
        throw IoError("cannot read PNG " + path.string() + ": " + image.message);
    }
    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    Bytes out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.channels = gray ? 1 : 3;
    out.data.resize(PNG_IMAGE_SIZE(image));
    if (png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr) == 0) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot decode PNG " + path.string() + ": " + msg);
    }
    return out;
}

void write_png(const std::filesystem::path& path, const Bytes& bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(bytes.width);
    image.height = static_cast<png_uint_32>(bytes.height);
    image.format = bytes.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (png_image_write_to_file(&image, path.c_str(), 0, bytes.data.data(), 0, nullptr) == 0) {
        throw IoError("cannot write PNG " + path.string() + ": " + image.message);
    }
}

struct TiffCloser {
    void operator()(TIFF* t) const noexcept { TIFFClose(t); }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

void silence_tiff_warnings() {
    static const bool once = [] {
        TIFFSetWarningHandler(nullptr);
        TIFFSetErrorHandler(nullptr);
        return true;
    }();
    (void)once;
}

Bytes read_tiff(const std::filesystem::path& path) {
    silence_tiff_warnings();
    TiffHandle tif(TIFFOpen(path.c_str(), "r"));
    if (!tif) {
        throw IoError("cannot open TIFF " + path.string());
    }
    std::uint32_t w = 0;
    std::uint32_t h = 0;
    std::uint16_t spp = 1;
    std::uint16_t bps = 8;
    std::uint16_t compression = COMPRESSION_NONE;
    std::uint16_t planar = PLANARCONFIG_CONTIG;
    TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
    TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bps);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_COMPRESSION, &compression);
    TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
    if (bps != 8 || compression != COMPRESSION_NONE || planar != PLANARCONFIG_CONTIG) {
        throw IoError("unsupported TIFF layout in " + path.string() + " (need 8-bit, uncompressed, contiguous)");
    }
    if (spp != 1 && spp != 3 && spp != 4) {
        throw IoError("unsupported TIFF channel count in " + path.string());
    }
    if (w == 0 || h == 0) {
        throw IoError("empty TIFF " + path.string());
    }
    Bytes out;
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.channels = spp == 1 ? 1 : 3;
    out.data.resize(static_cast<std::size_t>(w) * h * out.channels);
    std::vector<std::uint8_t> line(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
    for (std::uint32_t y = 0; y < h; ++y) {
        if (TIFFReadScanline(tif.get(), line.data(), y, 0) < 0) {
            throw IoError("cannot decode TIFF " + path.string());
        }
        auto* dst = out.data.data() + static_cast<std::size_t>(y) * w * out.channels;
        for (std::uint32_t x = 0; x < w; ++x) {
            for (int c = 0; c < out.channels; ++c) {
                dst[x * out.channels + c] = line[x * spp + c];
            }
        }
    }
    return out;
}

void write_tiff(const std::filesystem::path& path, const Bytes& bytes) {
    silence_tiff_warnings();
    TiffHandle tif(TIFFOpen(path.c_str(), "w"));
    if (!tif) {
        throw IoError("cannot create TIFF " + path.string());
    }
    TIFF* t = tif.get();
    TIFFSetField(t, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(bytes.width));
    TIFFSetField(t, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(bytes.height));
    TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(bytes.channels));
    TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(8));
    TIFFSetField(t, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
    TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
    TIFFSetField(t, TIFFTAG_PHOTOMETRIC, bytes.channels == 1 ? PHOTOMETRIC_MINISBLACK : PHOTOMETRIC_RGB);
    TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(t, 0));
    const std::size_t stride = static_cast<std::size_t>(bytes.width) * bytes.channels;
    std::vector<std::uint8_t> line(stride);
    for (int y = 0; y < bytes.height; ++y) {
        std::copy_n(bytes.data.begin() + static_cast<std::ptrdiff_t>(y * stride), stride, line.begin());
        if (TIFFWriteScanline(t, line.data(), static_cast<std::uint32_t>(y), 0) < 0) {
            throw IoError("cannot write TIFF " + path.string());
        }
    }
}

Bytes read_bytes(const std::filesystem::path& path) {
    switch (format_of(path)) {
        case Format::png:
            return read_png(path);
        case Format::tiff:
            return read_tiff(path);
        case Format::unknown:
            break;
    }
    throw IoError("unsupported image format: " + path.string());
}

void write_bytes(const std::filesystem::path& path, const Bytes& bytes) {
    switch (format_of(path)) {
        case Format::png:
            write_png(path, bytes);
            return;
        case Format::tiff:
            write_tiff(path, bytes);
            return;
        case Format::unknown:
            break;
    }
    throw IoError("unsupported image format: " + path.string());
}

}  // namespace

std::uint8_t to_byte(double v) noexcept {
    const double scaled = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
    return static_cast<std::uint8_t>(scaled);
}

bool is_supported_image(const std::filesystem::path& path) {
    return format_of(path) != Format::unknown;
}

ColorRaster load_color(const std::filesystem::path& path) {
    const Bytes bytes = read_bytes(path);
    ColorRaster out(bytes.width, bytes.height);
    const std::size_t n = static_cast<std::size_t>(bytes.width) * bytes.height;
    for (int c = 0; c < 3; ++c) {
        auto dst = out.channel(c).values();
        const int src_c = bytes.channels == 1 ? 0 : c;
        for (std::size_t i = 0; i < n; ++i) {
            dst[i] = bytes.data[i * bytes.channels + src_c] / 255.0;
        }
    }
    return out;
}

GrayRaster load_gray(const std::filesystem::path& path) {
    const Bytes bytes = read_bytes(path);
    if (bytes.channels == 1) {
        GrayRaster out(bytes.width, bytes.height);
        auto dst = out.values();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = bytes.data[i] / 255.0;
        }
        return out;
    }
    return to_grayscale(load_color(path));
}

void save(const std::filesystem::path& path, const ColorRaster& img) {
    Bytes bytes{img.width(), img.height(), 3, {}};
    const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
    bytes.data.resize(n * 3);
    for (int c = 0; c < 3; ++c) {
        const auto src = img.channel(c).values();
        for (std::size_t i = 0; i < n; ++i) {
            bytes.data[i * 3 + c] = to_byte(src[i]);
        }
    }
    write_bytes(path, bytes);
}

void save(const std::filesystem::path& path, const GrayRaster& img) {
    Bytes bytes{img.width(), img.height(), 1, {}};
    bytes.data.reserve(img.size());
    for (double v : img.values()) {
        bytes.data.push_back(to_byte(v));
    }
    write_bytes(path, bytes);
}

void save(const std::filesystem::path& path, const EdgeMap& map) {
    Bytes bytes{map.width(), map.height(), 1, {}};
    bytes.data.reserve(map.size());
    for (std::uint8_t v : map.values()) {
        bytes.data.push_back(v != 0 ? 255 : 0);
    }
    write_bytes(path, bytes);
}

}  // namespace speed::io
