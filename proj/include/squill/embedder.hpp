#pragma once

#include <memory>
#include <string>
#include <vector>

#include "squill/errors.hpp"

namespace squill {

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dimension() const = 0;
    // One unit-norm vector per input text, in order.
    virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) = 0;

    std::vector<float> embed_one(const std::string& text) {
        return embed(std::vector<std::string>{text})[0];
    }
};

// Hashed character-trigram bag over the lowercased text, fixed dimension,
// L2-normalized. Deterministic across runs and platforms, which makes the
// whole retrieval path testable offline. Identical strings embed identically,
// so exact value matches score cosine 1.0.
class DeterministicEmbedder : public Embedder {
public:
    explicit DeterministicEmbedder(std::size_t dimension = 256) : dimension_(dimension) {}

    std::size_t dimension() const override { return dimension_; }
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;

private:
    std::size_t dimension_;
};

double cosine_similarity(const std::vector<float>& a, const std::vector<float>& b);

std::unique_ptr<Embedder> make_http_embedder(const std::string& base_url, std::size_t dimension);

}  // namespace squill
