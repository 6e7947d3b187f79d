#pragma once

#include "webmall/catalog.hpp"
#include "webmall/search_index.hpp"
#include "webmall/server.hpp"

#include <string>
#include <vector>

namespace webmall {

struct CrawledPage {
    std::string url; // canonical, normalized
    std::string shop_id;
    std::string title;
    std::string text; // cleaned visible text
};

// Breadth-first walk over each shop's internal links starting from its home
// page. Only browsable pages are followed (home, category listings, product
// pages); cart, search, and API paths are skipped. The frontier is kept
// sorted, so the visit order and the returned page order are deterministic.
// Throws NetError naming the shop when a page cannot be fetched.
std::vector<CrawledPage> crawl_shops(const Catalog& catalog,
                                     const UrlResolver& resolver);

// Unified index over crawled pages, one document per page, doc_id = URL.
SearchIndex build_rag_index(const std::vector<CrawledPage>& pages,
                            std::shared_ptr<const Embedder> embedder);

} // namespace webmall
