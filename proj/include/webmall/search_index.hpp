#pragma once

#include "webmall/embedding.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace webmall {

struct IndexedDoc {
    std::string doc_id;
    std::string shop_id;
    std::string url;
    std::string title;
    std::string text;
    std::vector<float> embedding;
};

struct SearchHit {
    std::string doc_id;
    std::string shop_id;
    std::string url;
    std::string title;
    float score = 0.0f;
};

struct SearchOptions {
    std::size_t k = 10;
    std::string shop_filter; // empty means all shops
};

// Dense vector index with exact scan search. Results are ordered by score
// descending; equal scores fall back to doc_id ascending, so rankings are
// reproducible across runs and platforms.
class SearchIndex {
public:
    explicit SearchIndex(std::shared_ptr<const Embedder> embedder);

    void add(std::string doc_id, std::string shop_id, std::string url,
             std::string title, std::string text);
    std::vector<SearchHit> search(std::string_view query,
                                  const SearchOptions& options = {}) const;

    std::size_t size() const { return docs_.size(); }
    const std::vector<IndexedDoc>& docs() const { return docs_; }
    const IndexedDoc* doc_by_id(const std::string& doc_id) const;
    std::size_t dim() const { return embedder_->dim(); }

    // Line-JSON persistence: a header line followed by one document per
    // line, keys sorted. Saving a loaded index reproduces the file
    // byte-for-byte.
    void save(const std::string& path) const;
    static SearchIndex load(const std::string& path,
                            std::shared_ptr<const Embedder> embedder);

private:
    std::shared_ptr<const Embedder> embedder_;
    std::vector<IndexedDoc> docs_;
};

class Catalog;
struct Offer;

// Text indexed for one offer: title, description, and category path.
std::string offer_index_text(const Offer& offer);

// Per-shop index over the catalog's offers, doc_id = offer_id. The MCP and
// NLWeb search tools both answer from this.
SearchIndex build_offer_index(const Catalog& catalog, const std::string& shop_id,
                              std::shared_ptr<const Embedder> embedder);

} // namespace webmall
