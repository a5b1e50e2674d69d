// png_io.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace dcomp::png {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void write_chunk(std::vector<std::uint8_t>& out, const char type[4],
                 const std::uint8_t* data, std::size_t len) {
    put_u32(out, static_cast<std::uint32_t>(len));
    const std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    if (len) out.insert(out.end(), data, data + len);
    const auto crc = crc32(0, out.data() + start, static_cast<uInt>(4 + len));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

constexpr std::uint8_t kSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

} // namespace

std::vector<std::uint8_t> encode(const Raster& img) {
    if (img.empty()) throw PngError("encode: empty raster");
    int color_type;
    switch (img.channels()) {
        case 1: color_type = 0; break;
        case 3: color_type = 2; break;
        case 4: color_type = 6; break;
        default: throw PngError("encode: unsupported channel count");
    }

    // Raw scanlines, filter type 0 per row.
    const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * img.height());
    for (int y = 0; y < img.height(); ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), img.row(y), img.row(y) + stride);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> deflated(bound);
    if (compress2(deflated.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw PngError("encode: deflate failed");
    deflated.resize(bound);

    std::vector<std::uint8_t> out;
    out.insert(out.end(), kSignature, kSignature + 8);
    std::uint8_t ihdr[13];
    ihdr[0] = static_cast<std::uint8_t>(img.width() >> 24);
    ihdr[1] = static_cast<std::uint8_t>(img.width() >> 16);
    ihdr[2] = static_cast<std::uint8_t>(img.width() >> 8);
    ihdr[3] = static_cast<std::uint8_t>(img.width());
    ihdr[4] = static_cast<std::uint8_t>(img.height() >> 24);
    ihdr[5] = static_cast<std::uint8_t>(img.height() >> 16);
    ihdr[6] = static_cast<std::uint8_t>(img.height() >> 8);
    ihdr[7] = static_cast<std::uint8_t>(img.height());
    ihdr[8] = 8;  // bit depth
    ihdr[9] = static_cast<std::uint8_t>(color_type);
    ihdr[10] = ihdr[11] = ihdr[12] = 0;  // compression, filter, interlace
    write_chunk(out, "IHDR", ihdr, sizeof ihdr);
    write_chunk(out, "IDAT", deflated.data(), deflated.size());
    write_chunk(out, "IEND", nullptr, 0);
    return out;
}

void write_file(const std::string& path, const Raster& img) {
    const auto bytes = encode(img);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw PngError("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw PngError("short write: " + path);
}

Raster decode(const std::uint8_t* data, std::size_t size) {
    if (size < 8 || std::memcmp(data, kSignature, 8) != 0)
        throw PngError("decode: not a PNG");

    int w = 0, h = 0, bit_depth = 0, color_type = 0, interlace = 0;
    std::vector<std::uint8_t> idat;
    std::vector<std::uint8_t> palette;  // rgb triples

    std::size_t pos = 8;
    bool seen_end = false;
    while (pos + 8 <= size && !seen_end) {
        const std::uint32_t len = get_u32(data + pos);
        if (pos + 12 + len > size) throw PngError("decode: truncated chunk");
        const char* type = reinterpret_cast<const char*>(data + pos + 4);
        const std::uint8_t* body = data + pos + 8;
        if (!std::memcmp(type, "IHDR", 4)) {
            w = static_cast<int>(get_u32(body));
            h = static_cast<int>(get_u32(body + 4));
            bit_depth = body[8];
            color_type = body[9];
            interlace = body[12];
        } else if (!std::memcmp(type, "PLTE", 4)) {
            palette.assign(body, body + len);
        } else if (!std::memcmp(type, "IDAT", 4)) {
            idat.insert(idat.end(), body, body + len);
        } else if (!std::memcmp(type, "IEND", 4)) {
            seen_end = true;
        }
        pos += 12 + len;
    }
    if (w <= 0 || h <= 0) throw PngError("decode: bad dimensions");
    if (bit_depth != 8) throw PngError("decode: only 8-bit depth supported");
    if (interlace != 0) throw PngError("decode: interlaced PNG not supported");

    int src_channels;
    switch (color_type) {
        case 0: src_channels = 1; break;
        case 2: src_channels = 3; break;
        case 3: src_channels = 1; break;
        case 4: src_channels = 2; break;
        case 6: src_channels = 4; break;
        default: throw PngError("decode: unsupported color type");
    }

    const std::size_t stride = static_cast<std::size_t>(w) * src_channels;
    std::vector<std::uint8_t> raw((stride + 1) * h);
    uLongf raw_len = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
        raw_len != raw.size())
        throw PngError("decode: inflate failed");

    // Undo per-row filters in place.
    std::vector<std::uint8_t> prev(stride, 0);
    std::vector<std::uint8_t> line(stride);
    std::vector<std::uint8_t> pixels;
    pixels.reserve(stride * h);
    const int bpp = src_channels;
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
        const int filter = src[0];
        std::memcpy(line.data(), src + 1, stride);
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<std::size_t>(bpp) ? line[i - bpp] : 0;
            const int b = prev[i];
            const int c = i >= static_cast<std::size_t>(bpp) ? prev[i - bpp] : 0;
            int v = line[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw PngError("decode: bad filter type");
            }
            line[i] = static_cast<std::uint8_t>(v);
        }
        pixels.insert(pixels.end(), line.begin(), line.end());
        prev = line;
    }

    int out_channels = src_channels;
    if (color_type == 3) out_channels = 3;
    if (color_type == 4) out_channels = 4;
    Raster out(w, h, out_channels);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* sp = pixels.data() + static_cast<std::size_t>(y) * stride;
        std::uint8_t* dp = out.row(y);
        for (int x = 0; x < w; ++x) {
            switch (color_type) {
                case 0:
                case 2:
                case 6:
                    std::memcpy(dp, sp, src_channels);
                    break;
                case 3: {
                    const std::size_t pi = static_cast<std::size_t>(sp[0]) * 3;
                    if (pi + 2 >= palette.size()) throw PngError("decode: palette index out of range");
                    dp[0] = palette[pi];
                    dp[1] = palette[pi + 1];
                    dp[2] = palette[pi + 2];
                    break;
                }
                case 4:
                    dp[0] = dp[1] = dp[2] = sp[0];
                    dp[3] = sp[1];
                    break;
            }
            sp += src_channels;
            dp += out_channels;
        }
    }
    return out;
}

Raster read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw PngError("cannot open: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return decode(bytes.data(), bytes.size());
}

} // namespace dcomp::png
