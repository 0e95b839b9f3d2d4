#include "hsal/densify.hpp"

#include <algorithm>
#include <cmath>

namespace hsal {

SpectralDictionary::SpectralDictionary(int band_count, size_t reserve) : band_count_(band_count) {
    if (band_count <= 0) throw Error("dictionary: nonpositive band count");
    signatures_.reserve(reserve * size_t(band_count));
    albedos_.reserve(reserve);
    sources_.reserve(reserve);
}

void SpectralDictionary::add(std::span<const float> signature, const RgbTriple& albedo, int src_x,
                             int src_y) {
    if (int(signature.size()) != band_count_)
        throw Error("dictionary: signature band count mismatch");
    signatures_.insert(signatures_.end(), signature.begin(), signature.end());
    albedos_.push_back(albedo);
    sources_.emplace_back(src_x, src_y);
}

void DensifierConfig::validate() const {
    if (!(alpha >= 0.0)) throw Error("densifier config: alpha must be nonnegative");
    if (k_neighbors < 1) throw Error("densifier config: k_neighbors must be at least 1");
}

SpectralDictionary build_dictionary(const SpectralCube& cube, const AlbedoMap& sparse) {
    if (cube.width() != sparse.width() || cube.height() != sparse.height())
        throw Error("build_dictionary: cube and albedo map dimensions differ");

    SpectralDictionary dict(cube.band_count(), sparse.valid_count());
    for (int y = 0; y < cube.height(); ++y)
        for (int x = 0; x < cube.width(); ++x)
            if (sparse.provenance(x, y) == PixelProvenance::Measured)
                dict.add(cube.pixel(x, y), sparse.linear(x, y), x, y);

    if (dict.size() == 0) throw Error("build_dictionary: no measured pixels to index");
    return dict;
}

namespace {

double scan_score(const simd::Kernels& k, const float* q, double q_norm, const float* e,
                  double e_norm, int bands, double alpha, bool* degenerate) {
    float l2 = 0.0f, dot = 0.0f;
    k.l2sq_dot(q, e, size_t(bands), &l2, &dot);
    double cosine = 0.0;
    if (q_norm > 0.0 && e_norm > 0.0) {
        cosine = double(dot) / (q_norm * e_norm);
    } else if (degenerate) {
        *degenerate = true;
    }
    return std::sqrt(double(l2)) - alpha * cosine;
}

struct Candidate {
    double score;
    size_t index;
};

// Sorted insert, capped at k. Candidates arrive in ascending index order,
// so strict comparison keeps the earliest index on ties.
void push_candidate(std::vector<Candidate>& best, size_t k, Candidate c) {
    auto pos = std::find_if(best.begin(), best.end(),
                            [&](const Candidate& b) { return c.score < b.score; });
    if (pos == best.end() && best.size() >= k) return;
    best.insert(pos, c);
    if (best.size() > k) best.pop_back();
}

}  // namespace

double hybrid_distance(std::span<const float> query, std::span<const float> entry, double alpha,
                       bool* degenerate) {
    if (query.size() != entry.size()) throw Error("hybrid_distance: vector length mismatch");
    const auto& k = simd::scalar_kernels();
    const double qn = std::sqrt(double(k.dot(query.data(), query.data(), query.size())));
    const double en = std::sqrt(double(k.dot(entry.data(), entry.data(), entry.size())));
    bool degen = false;
    const double s =
        scan_score(k, query.data(), qn, entry.data(), en, int(query.size()), alpha, &degen);
    if (degenerate) *degenerate = degen;
    return s;
}

std::vector<size_t> top_k_entries(const SpectralDictionary& dict, std::span<const float> query,
                                  const DensifierConfig& cfg) {
    cfg.validate();
    if (dict.size() == 0) throw Error("top_k_entries: empty dictionary");
    if (int(query.size()) != dict.band_count())
        throw Error("top_k_entries: query band count mismatch");

    const auto& k = simd::kernels(cfg.kernels);
    const size_t k_eff = std::min(size_t(cfg.k_neighbors), dict.size());
    const int bands = dict.band_count();

    const double q_norm = std::sqrt(double(k.dot(query.data(), query.data(), query.size())));

    std::vector<Candidate> best;
    best.reserve(k_eff + 1);
    for (size_t i = 0; i < dict.size(); ++i) {
        const float* e = dict.signature(i);
        const double e_norm = std::sqrt(double(k.dot(e, e, size_t(bands))));
        const double s = scan_score(k, query.data(), q_norm, e, e_norm, bands, cfg.alpha, nullptr);
        push_candidate(best, k_eff, {s, i});
    }

    std::vector<size_t> out(best.size());
    for (size_t i = 0; i < best.size(); ++i) out[i] = best[i].index;
    return out;
}

AlbedoMap densify(const SpectralCube& cube, const AlbedoMap& sparse, const DensifierConfig& cfg,
                  DensifyStats* stats) {
    cfg.validate();
    const SpectralDictionary dict = build_dictionary(cube, sparse);

    const auto& kern = simd::kernels(cfg.kernels);
    const int bands = dict.band_count();
    const size_t k_eff = std::min(size_t(cfg.k_neighbors), dict.size());

    DensifyStats local;
    local.effective_k = int(k_eff);
    local.k_reduced = k_eff < size_t(cfg.k_neighbors);

    // Entry norms once per scan, with the same kernel set as the scan itself.
    std::vector<double> entry_norms(dict.size());
    for (size_t i = 0; i < dict.size(); ++i) {
        const float* e = dict.signature(i);
        entry_norms[i] = std::sqrt(double(kern.dot(e, e, size_t(bands))));
    }

    AlbedoMap out = sparse;
    std::vector<Candidate> best;
    for (int y = 0; y < cube.height(); ++y) {
        for (int x = 0; x < cube.width(); ++x) {
            if (sparse.valid(x, y)) continue;

            const auto q = cube.pixel(x, y);
            const double q_norm = std::sqrt(double(kern.dot(q.data(), q.data(), q.size())));
            if (q_norm == 0.0) ++local.degenerate_signatures;

            best.clear();
            for (size_t i = 0; i < dict.size(); ++i) {
                const double s = scan_score(kern, q.data(), q_norm, dict.signature(i),
                                            entry_norms[i], bands, cfg.alpha, nullptr);
                push_candidate(best, k_eff, {s, i});
            }

            RgbTriple mean;
            for (const Candidate& c : best) {
                const RgbTriple& a = dict.albedo(c.index);
                mean.r += a.r;
                mean.g += a.g;
                mean.b += a.b;
            }
            const double inv = 1.0 / double(best.size());
            out.set(x, y, {mean.r * inv, mean.g * inv, mean.b * inv}, PixelProvenance::Densified);
            ++local.filled;
        }
    }

    if (stats) *stats = local;
    return out;
}

}  // namespace hsal
