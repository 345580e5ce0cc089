#include "squill/embedder.hpp"

#include <cmath>

#include "squill/common.hpp"

namespace squill {

std::vector<std::vector<float>> DeterministicEmbedder::embed(
    const std::vector<std::string>& texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        std::vector<float> v(dimension_, 0.0f);
        std::string s = to_lower(text);
        auto add_feature = [&](std::string_view feature) {
            std::uint64_t h = fnv1a64(feature);
            std::size_t idx = static_cast<std::size_t>(h % dimension_);
            float sign = (h >> 63) ? -1.0f : 1.0f;
            v[idx] += sign;
        };
        if (s.size() < 3) {
            if (!s.empty()) add_feature(s);
        } else {
            for (std::size_t i = 0; i + 3 <= s.size(); ++i)
                add_feature(std::string_view(s).substr(i, 3));
        }
        double norm = 0.0;
        for (float x : v) norm += static_cast<double>(x) * x;
        if (norm == 0.0) {
            v[0] = 1.0f;
        } else {
            float inv = static_cast<float>(1.0 / std::sqrt(norm));
            for (float& x : v) x *= inv;
        }
        out.push_back(std::move(v));
    }
    return out;
}

double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size())
        throw DimensionMismatchError("vector dimensions differ: " + std::to_string(a.size()) +
                                     " vs " + std::to_string(b.size()));
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace squill
