#pragma once

#include "webmall/catalog.hpp"
#include "webmall/commerce.hpp"

#include <map>
#include <string>
#include <vector>

namespace webmall {

// Case-insensitive token-AND match over title+description. Every query
// token must occur in the offer's tokens; offers are ranked by total
// occurrence count descending, then offer_id ascending, capped at `cap`.
std::vector<const Offer*> lexical_search(const Catalog& catalog,
                                         const std::string& shop_id,
                                         const std::string& query,
                                         std::size_t cap = 20);

struct StoreRequest {
    std::string method; // "GET" or "POST"
    std::string path;   // decoded, no query string
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> form;
    std::string session_id;
};

struct StoreResponse {
    int status = 200;
    std::string body; // text/html
};

// Server-rendered storefront for one shop. Pages are static HTML with
// relative links; the browsing agent and the crawler only ever see markup.
class Storefront {
public:
    Storefront(const Catalog& catalog, std::string shop_id,
               CommerceEngine& commerce);

    StoreResponse handle(const StoreRequest& request) const;

    std::string render_home(int page) const;
    std::string render_category(const std::string& slug_path, int page) const;
    std::string render_product_page(const Offer& offer) const;
    std::string render_search(const std::string& query) const;
    std::string render_cart(const std::string& session_id) const;
    std::string render_order(const Order& order) const;

    static constexpr std::size_t kPageSize = 20;

private:
    std::string layout(const std::string& page_title, const std::string& main) const;
    std::string offer_list(const std::vector<const Offer*>& offers) const;
    std::string pagination(const std::string& base_path, int page, bool has_more) const;
    std::string error_page(int status, const std::string& message) const;

    const Catalog& catalog_;
    std::string shop_id_;
    CommerceEngine& commerce_;
};

} // namespace webmall
