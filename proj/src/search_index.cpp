#include "webmall/search_index.hpp"

#include "webmall/catalog.hpp"
#include "webmall/errors.hpp"
#include "webmall/util.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

namespace webmall {

using nlohmann::json;

SearchIndex::SearchIndex(std::shared_ptr<const Embedder> embedder)
    : embedder_(std::move(embedder)) {
    if (!embedder_) throw IndexError("search index needs an embedder");
}

void SearchIndex::add(std::string doc_id, std::string shop_id, std::string url,
                      std::string title, std::string text) {
    for (const IndexedDoc& doc : docs_)
        if (doc.doc_id == doc_id)
            throw IndexError("duplicate doc_id: " + doc_id);
    IndexedDoc doc;
    doc.doc_id = std::move(doc_id);
    doc.shop_id = std::move(shop_id);
    doc.url = std::move(url);
    doc.title = std::move(title);
    doc.text = std::move(text);
    doc.embedding = embedder_->embed(doc.text);
    docs_.push_back(std::move(doc));
}

std::vector<SearchHit> SearchIndex::search(std::string_view query,
                                           const SearchOptions& options) const {
    std::vector<float> q = embedder_->embed(query);
    std::vector<SearchHit> hits;
    hits.reserve(docs_.size());
    for (const IndexedDoc& doc : docs_) {
        if (!options.shop_filter.empty() && doc.shop_id != options.shop_filter)
            continue;
        SearchHit hit;
        hit.doc_id = doc.doc_id;
        hit.shop_id = doc.shop_id;
        hit.url = doc.url;
        hit.title = doc.title;
        hit.score = cosine_similarity(q, doc.embedding);
        hits.push_back(std::move(hit));
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > options.k) hits.resize(options.k);
    return hits;
}

const IndexedDoc* SearchIndex::doc_by_id(const std::string& doc_id) const {
    for (const IndexedDoc& doc : docs_)
        if (doc.doc_id == doc_id) return &doc;
    return nullptr;
}

void SearchIndex::save(const std::string& path) const {
    std::ostringstream out;
    json header;
    header["dim"] = embedder_->dim();
    header["docs"] = docs_.size();
    header["kind"] = "search_index";
    out << header.dump() << "\n";
    for (const IndexedDoc& doc : docs_) {
        json line;
        line["doc_id"] = doc.doc_id;
        line["shop_id"] = doc.shop_id;
        line["url"] = doc.url;
        line["title"] = doc.title;
        line["text"] = doc.text;
        json emb = json::array();
        for (float v : doc.embedding) emb.push_back(static_cast<double>(v));
        line["embedding"] = std::move(emb);
        out << line.dump() << "\n";
    }
    util::write_file(path, out.str());
}

SearchIndex SearchIndex::load(const std::string& path,
                              std::shared_ptr<const Embedder> embedder) {
    SearchIndex index(std::move(embedder));
    std::istringstream in(util::read_file(path));
    std::string line;
    if (!std::getline(in, line))
        throw IndexError(path + ": empty index file");
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("kind", "") != "search_index")
        throw IndexError(path + ": not a search index file");
    std::size_t dim = header.value("dim", std::size_t(0));
    if (dim != index.embedder_->dim())
        throw IndexError(path + ": index dimension " + std::to_string(dim) +
                         " does not match embedder dimension " +
                         std::to_string(index.embedder_->dim()));

    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json doc_json = json::parse(line, nullptr, false);
        if (doc_json.is_discarded())
            throw IndexError(path + ":" + std::to_string(line_no) + ": invalid JSON");
        IndexedDoc doc;
        try {
            doc.doc_id = doc_json.at("doc_id").get<std::string>();
            doc.shop_id = doc_json.at("shop_id").get<std::string>();
            doc.url = doc_json.at("url").get<std::string>();
            doc.title = doc_json.at("title").get<std::string>();
            doc.text = doc_json.at("text").get<std::string>();
            for (const json& v : doc_json.at("embedding"))
                doc.embedding.push_back(static_cast<float>(v.get<double>()));
        } catch (const json::exception& e) {
            throw IndexError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (doc.embedding.size() != dim)
            throw IndexError(path + ":" + std::to_string(line_no) +
                             ": embedding has wrong dimension");
        if (!seen.insert(doc.doc_id).second)
            throw IndexError(path + ":" + std::to_string(line_no) +
                             ": duplicate doc_id " + doc.doc_id);
        index.docs_.push_back(std::move(doc));
    }
    return index;
}

std::string offer_index_text(const Offer& offer) {
    std::string text = offer.title + ". " + offer.description;
    if (!offer.category_path.empty()) {
        text += ". ";
        for (std::size_t i = 0; i < offer.category_path.size(); ++i) {
            if (i) text += " > ";
            text += offer.category_path[i];
        }
    }
    return text;
}

SearchIndex build_offer_index(const Catalog& catalog, const std::string& shop_id,
                              std::shared_ptr<const Embedder> embedder) {
    SearchIndex index(std::move(embedder));
    for (const Offer* offer : catalog.shop_offers(shop_id))
        index.add(offer->offer_id, offer->shop_id, offer->url, offer->title,
                  offer_index_text(*offer));
    return index;
}

} // namespace webmall
