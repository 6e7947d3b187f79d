#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace webmall {

// Produces a fixed-size vector for a piece of text. Implementations must be
// deterministic for the local backend; the remote backend is only used when
// an embedding endpoint is configured.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dim() const = 0;
    virtual std::vector<float> embed(std::string_view text) const = 0;
};

// Feature-hashing embedder. Tokenizes on non-alphanumeric boundaries after
// lowercasing, hashes each token with FNV-1a 64, accumulates +1 or -1 into
// bucket (hash % dim) depending on the hash's top bit, then L2-normalizes.
// An empty token set yields the all-zero vector.
class HashingEmbedder : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dim = 256);
    std::size_t dim() const override { return dim_; }
    std::vector<float> embed(std::string_view text) const override;

private:
    std::size_t dim_;
};

// Calls an OpenAI-style /embeddings endpoint. base_url comes from
// EMBED_BASE_URL; the API key is sent as a bearer token when non-empty.
class RemoteEmbedder : public Embedder {
public:
    RemoteEmbedder(std::string base_url, std::string api_key, std::string model,
                   std::size_t dim);
    std::size_t dim() const override { return dim_; }
    std::vector<float> embed(std::string_view text) const override;

private:
    std::string base_url_;
    std::string api_key_;
    std::string model_;
    std::size_t dim_;
};

// Returns the remote embedder when EMBED_BASE_URL is set, otherwise the
// local hashing embedder.
std::unique_ptr<Embedder> make_default_embedder(std::size_t dim = 256);

float cosine_similarity(const std::vector<float>& a, const std::vector<float>& b);

} // namespace webmall
