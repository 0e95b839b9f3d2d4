#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hsal::io {

// Minimal NPY (format version 1.0) support: little-endian float32,
// C-contiguous, 2-D or 3-D. Enough for the map sidecar files; anything
// else is rejected.
struct NpyArray {
    std::vector<size_t> shape;
    std::vector<float> data;
};

void save_npy(const std::string& path, const std::vector<size_t>& shape,
              const float* data, size_t count);
NpyArray load_npy(const std::string& path);

// RGBA8 PNG writer (libpng). Rows are top-to-bottom, pixels RGBA.
void save_png_rgba(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgba);

std::vector<uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const void* data, size_t size);
std::string read_file_text(const std::string& path);
void write_file_text(const std::string& path, const std::string& text);

// FNV-1a 64-bit content hash, hex encoded; used by manifests so that
// byte-identical reruns are checkable at a glance.
std::string fnv1a_hex(const std::vector<uint8_t>& bytes);
std::string hash_file_hex(const std::string& path);

}  // namespace hsal::io
