#include "webmall/crawler.hpp"

#include "webmall/errors.hpp"
#include "webmall/html_text.hpp"
#include "webmall/page_model.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <httplib.h>
#include <map>
#include <set>

namespace webmall {

namespace {

bool browsable_path(const std::string& path) {
    if (path == "/" || path.empty()) return true;
    return util::starts_with(path, "/category/") ||
           util::starts_with(path, "/product/");
}

} // namespace

std::vector<CrawledPage> crawl_shops(const Catalog& catalog,
                                     const UrlResolver& resolver) {
    std::set<std::string> frontier;
    std::set<std::string> visited;
    for (const Shop& shop : catalog.shops())
        frontier.insert(normalize_url(shop.base_url + "/"));

    std::map<std::string, std::unique_ptr<httplib::Client>> clients;
    auto fetch = [&](const std::string& canonical_url) -> std::string {
        std::string local = resolver.to_local(canonical_url);
        UrlParts parts = parse_url(local);
        std::string origin = parts.scheme + "://" + parts.authority();
        auto& client = clients[origin];
        if (!client) {
            client = std::make_unique<httplib::Client>(origin);
            client->set_connection_timeout(5);
            client->set_read_timeout(30);
        }
        std::string target = parts.path.empty() ? "/" : parts.path;
        if (!parts.query.empty()) target += "?" + parts.query;
        auto res = client->Get(target);
        if (!res) {
            const Shop* shop = catalog.shop_for_url(canonical_url);
            throw NetError("cannot reach " +
                           (shop ? shop->shop_id : std::string("shop")) + " at " +
                           canonical_url);
        }
        if (res->status != 200) return "";
        return res->body;
    };

    std::vector<CrawledPage> pages;
    while (!frontier.empty()) {
        std::string url = *frontier.begin();
        frontier.erase(frontier.begin());
        if (visited.count(url)) continue;
        visited.insert(url);

        const Shop* shop = catalog.shop_for_url(url);
        if (!shop) continue;

        std::string body = fetch(url);
        if (body.empty()) continue;

        PageModel model = extract_page_model(body, url);
        CrawledPage page;
        page.url = url;
        page.shop_id = shop->shop_id;
        page.title = model.title;
        page.text = model.text;
        pages.push_back(std::move(page));

        for (const PageLink& link : model.links) {
            std::string href;
            try {
                href = normalize_url(link.href);
            } catch (const UrlError&) {
                continue;
            }
            const Shop* target_shop = catalog.shop_for_url(href);
            if (!target_shop || target_shop->shop_id != shop->shop_id) continue;
            UrlParts parts = parse_url(href);
            if (!browsable_path(parts.path)) continue;
            if (!visited.count(href)) frontier.insert(href);
        }
    }
    return pages;
}

SearchIndex build_rag_index(const std::vector<CrawledPage>& pages,
                            std::shared_ptr<const Embedder> embedder) {
    SearchIndex index(std::move(embedder));
    for (const CrawledPage& page : pages)
        index.add(page.url, page.shop_id, page.url, page.title, page.text);
    return index;
}

} // namespace webmall
