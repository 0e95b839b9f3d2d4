#pragma once

#include "hsal/albedo.hpp"
#include "hsal/simd.hpp"
#include "hsal/spectral.hpp"
#include "hsal/types.hpp"

#include <vector>

namespace hsal {

// Dictionary of (spectral signature, albedo) pairs extracted at measured
// pixels. Signatures are stored contiguously so the similarity scan can
// stream them.
class SpectralDictionary {
public:
    SpectralDictionary() = default;
    SpectralDictionary(int band_count, size_t reserve = 0);

    void add(std::span<const float> signature, const RgbTriple& albedo, int src_x, int src_y);

    size_t size() const { return albedos_.size(); }
    int band_count() const { return band_count_; }
    const float* signature(size_t i) const { return signatures_.data() + i * band_count_; }
    const RgbTriple& albedo(size_t i) const { return albedos_[i]; }
    std::pair<int, int> source_pixel(size_t i) const { return sources_[i]; }

private:
    int band_count_ = 0;
    std::vector<float> signatures_;
    std::vector<RgbTriple> albedos_;
    std::vector<std::pair<int, int>> sources_;
};

struct DensifierConfig {
    double alpha = 1.0;   // weight of the cosine term; 1.0 per the reference setup
    int k_neighbors = 3;

    // Reference forces the scalar kernels; Fast uses the runtime-dispatched
    // variant. Both must produce identical neighbor assignments, which the
    // equivalence tests enforce.
    simd::IsaChoice kernels = simd::IsaChoice::Auto;

    void validate() const;
};

// One entry per measured (not densified) valid pixel, in row-major pixel
// order. Signatures are raw radiance: no normalization, so the Euclidean
// term keeps its intensity-discriminating role and alpha's scale follows
// the radiance units.
SpectralDictionary build_dictionary(const SpectralCube& cube, const AlbedoMap& sparse);

// Hybrid spectral distance, lower is more similar:
//   score = ||q - e||_2 - alpha * cos(q, e)
// A zero-norm signature contributes cosine 0 and raises the degenerate flag.
double hybrid_distance(std::span<const float> query, std::span<const float> entry, double alpha,
                       bool* degenerate = nullptr);

struct DensifyStats {
    size_t filled = 0;
    size_t degenerate_signatures = 0;
    int effective_k = 0;         // k after reduction to dictionary size
    bool k_reduced = false;
};

// Fill every invalid pixel with the mean linear-RGB albedo of the
// k_neighbors lowest-score dictionary entries. Measured pixels pass through
// untouched; the output mask is fully valid. Ties break on score, then on
// dictionary order (row-major source pixel).
AlbedoMap densify(const SpectralCube& cube, const AlbedoMap& sparse, const DensifierConfig& cfg,
                  DensifyStats* stats = nullptr);

// Indices of the k best entries for one query, exposed for the
// scan-equivalence tests.
std::vector<size_t> top_k_entries(const SpectralDictionary& dict, std::span<const float> query,
                                  const DensifierConfig& cfg);

}  // namespace hsal
