#include "hsal/io.hpp"

#include "hsal/types.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hsal::io {

namespace {

std::string npy_header(const std::vector<size_t>& shape) {
    std::ostringstream dict;
    dict << "{'descr': '<f4', 'fortran_order': False, 'shape': (";
    for (size_t i = 0; i < shape.size(); ++i) {
        dict << shape[i];
        if (shape.size() == 1 || i + 1 < shape.size()) dict << ",";
        if (i + 1 < shape.size()) dict << " ";
    }
    dict << "), }";
    std::string d = dict.str();
    // Total header (magic + version + length field + dict) padded to 64 bytes.
    const size_t base = 10;
    size_t total = base + d.size() + 1;
    size_t padded = (total + 63) / 64 * 64;
    d.append(padded - base - d.size() - 1, ' ');
    d.push_back('\n');

    std::string h;
    h += "\x93NUMPY";
    h += char(1);
    h += char(0);
    const uint16_t len = uint16_t(d.size());
    h += char(len & 0xff);
    h += char(len >> 8);
    h += d;
    return h;
}

}  // namespace

void save_npy(const std::string& path, const std::vector<size_t>& shape,
              const float* data, size_t count) {
    size_t expect = 1;
    for (size_t s : shape) expect *= s;
    if (expect != count) throw Error("save_npy: shape does not match element count");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("save_npy: cannot open " + path);
    const std::string h = npy_header(shape);
    out.write(h.data(), std::streamsize(h.size()));
    out.write(reinterpret_cast<const char*>(data), std::streamsize(count * sizeof(float)));
    if (!out) throw Error("save_npy: write failed for " + path);
}

NpyArray load_npy(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("load_npy: cannot open " + path);

    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "\x93NUMPY", 6) != 0)
        throw Error("load_npy: not an NPY file: " + path);
    if (magic[6] != 1) throw Error("load_npy: unsupported NPY version in " + path);

    uint8_t len_bytes[2];
    in.read(reinterpret_cast<char*>(len_bytes), 2);
    const size_t header_len = size_t(len_bytes[0]) | (size_t(len_bytes[1]) << 8);
    std::string header(header_len, '\0');
    in.read(header.data(), std::streamsize(header_len));
    if (!in) throw Error("load_npy: truncated header in " + path);

    if (header.find("'<f4'") == std::string::npos)
        throw Error("load_npy: only little-endian float32 supported: " + path);
    if (header.find("'fortran_order': False") == std::string::npos)
        throw Error("load_npy: only C-order arrays supported: " + path);

    const size_t open = header.find('(');
    const size_t close = header.find(')', open);
    if (open == std::string::npos || close == std::string::npos)
        throw Error("load_npy: malformed shape in " + path);

    NpyArray arr;
    std::string dims = header.substr(open + 1, close - open - 1);
    std::stringstream ss(dims);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::string t;
        for (char c : tok)
            if (!std::isspace(static_cast<unsigned char>(c))) t += c;
        if (!t.empty()) arr.shape.push_back(std::stoul(t));
    }
    if (arr.shape.empty()) throw Error("load_npy: zero-dimensional array in " + path);

    size_t count = 1;
    for (size_t s : arr.shape) count *= s;
    arr.data.resize(count);
    in.read(reinterpret_cast<char*>(arr.data.data()), std::streamsize(count * sizeof(float)));
    if (!in) throw Error("load_npy: payload shorter than header claims: " + path);
    return arr;
}

void save_png_rgba(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgba) {
    if (rgba.size() != size_t(width) * height * 4)
        throw Error("save_png_rgba: buffer size mismatch");

    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    img.width = png_uint_32(width);
    img.height = png_uint_32(height);
    img.format = PNG_FORMAT_RGBA;

    if (!png_image_write_to_file(&img, path.c_str(), 0, rgba.data(),
                                 png_int_32(width * 4), nullptr)) {
        throw Error(std::string("save_png_rgba: ") + img.message);
    }
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw Error("cannot open file: " + path);
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<uint8_t> bytes(static_cast<size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw Error("read failed: " + path);
    return bytes;
}

void write_file_bytes(const std::string& path, const void* data, size_t size) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open file for writing: " + path);
    out.write(static_cast<const char*>(data), std::streamsize(size));
    if (!out) throw Error("write failed: " + path);
}

std::string read_file_text(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

void write_file_text(const std::string& path, const std::string& text) {
    write_file_bytes(path, text.data(), text.size());
}

std::string fnv1a_hex(const std::vector<uint8_t>& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file_hex(const std::string& path) {
    return fnv1a_hex(read_file_bytes(path));
}

}  // namespace hsal::io
