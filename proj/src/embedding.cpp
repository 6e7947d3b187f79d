#include "webmall/embedding.hpp"

#include "webmall/errors.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <cmath>
#include <cstdlib>
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace webmall {

using nlohmann::json;

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::vector<float> HashingEmbedder::embed(std::string_view text) const {
    std::vector<float> vec(dim_, 0.0f);
    bool any = false;
    for (const std::string& tok : util::tokenize(text)) {
        uint64_t h = util::fnv1a64(tok);
        std::size_t bucket = h % dim_;
        float sign = (h >> 63) ? -1.0f : 1.0f;
        vec[bucket] += sign;
        any = true;
    }
    if (!any) return vec;
    double norm_sq = 0.0;
    for (float v : vec) norm_sq += double(v) * double(v);
    if (norm_sq == 0.0) return vec; // signs cancelled exactly
    double inv = 1.0 / std::sqrt(norm_sq);
    for (float& v : vec) v = static_cast<float>(v * inv);
    return vec;
}

RemoteEmbedder::RemoteEmbedder(std::string base_url, std::string api_key,
                               std::string model, std::size_t dim)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)),
      model_(std::move(model)), dim_(dim) {
    if (base_url_.empty()) throw ConfigError("remote embedder needs a base URL");
}

std::vector<float> RemoteEmbedder::embed(std::string_view text) const {
    UrlParts parts = parse_url(base_url_);
    std::string origin = parts.scheme + "://" + parts.authority();
    std::string path = parts.path.empty() ? "" : parts.path;
    if (!path.empty() && path.back() == '/') path.pop_back();
    path += "/embeddings";

    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    json body = {{"input", json::array({std::string(text)})}};
    if (!model_.empty()) body["model"] = model_;

    std::string last_error;
    for (int attempt = 0; attempt < 3; ++attempt) {
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "no response from " + origin;
            continue;
        }
        if (res->status != 200) {
            last_error = "embeddings endpoint returned " + std::to_string(res->status);
            continue;
        }
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("data") || !parsed["data"].is_array() ||
            parsed["data"].empty() || !parsed["data"][0].contains("embedding")) {
            last_error = "embeddings endpoint returned an unexpected payload";
            continue;
        }
        const json& emb = parsed["data"][0]["embedding"];
        std::vector<float> vec;
        vec.reserve(emb.size());
        for (const json& v : emb) vec.push_back(v.get<float>());
        return vec;
    }
    throw NetError("embedding request failed: " + last_error);
}

std::unique_ptr<Embedder> make_default_embedder(std::size_t dim) {
    const char* base = std::getenv("EMBED_BASE_URL");
    if (base && *base) {
        const char* key = std::getenv("EMBED_API_KEY");
        const char* model = std::getenv("EMBED_MODEL");
        return std::make_unique<RemoteEmbedder>(base, key ? key : "",
                                                model ? model : "", dim);
    }
    return std::make_unique<HashingEmbedder>(dim);
}

float cosine_similarity(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size())
        throw IndexError("cosine similarity over mismatched dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += double(a[i]) * double(b[i]);
        na += double(a[i]) * double(a[i]);
        nb += double(b[i]) * double(b[i]);
    }
    if (na == 0.0 || nb == 0.0) return 0.0f;
    return static_cast<float>(dot / (std::sqrt(na) * std::sqrt(nb)));
}

} // namespace webmall
