#include "webmall/server.hpp"

#include "webmall/errors.hpp"
#include "webmall/mcp_server.hpp"
#include "webmall/nlweb_server.hpp"
#include "webmall/storefront.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <chrono>
#include <httplib.h>
#include <thread>

namespace webmall {

using nlohmann::json;

namespace {

std::string base_key(const std::string& url) {
    UrlParts parts = parse_url(normalize_url(url));
    return parts.scheme + "://" + parts.authority();
}

std::string swap_base(const std::string& url,
                      const std::map<std::string, std::string>& mapping) {
    UrlParts parts;
    try {
        parts = parse_url(url);
    } catch (const UrlError&) {
        return url;
    }
    std::string key;
    try {
        key = base_key(url);
    } catch (const UrlError&) {
        return url;
    }
    auto it = mapping.find(key);
    if (it == mapping.end()) return url;
    std::string out = it->second + parts.path;
    if (!parts.query.empty()) out += "?" + parts.query;
    return out;
}

std::string cookie_value(const std::string& header, const std::string& name) {
    size_t pos = 0;
    while (pos < header.size()) {
        size_t eq = header.find('=', pos);
        if (eq == std::string::npos) break;
        std::string key = util::trim(header.substr(pos, eq - pos));
        size_t end = header.find(';', eq + 1);
        std::string value = header.substr(
            eq + 1, end == std::string::npos ? std::string::npos : end - eq - 1);
        if (key == name) return util::trim(value);
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    return "";
}

} // namespace

void UrlResolver::map_base(const std::string& canonical_base,
                           const std::string& local_base) {
    std::string canonical = base_key(canonical_base);
    std::string local = base_key(local_base);
    to_local_[canonical] = local;
    to_canonical_[local] = canonical;
}

std::string UrlResolver::to_local(const std::string& url) const {
    return swap_base(url, to_local_);
}

std::string UrlResolver::to_canonical(const std::string& url) const {
    return swap_base(url, to_canonical_);
}

json snapshot_to_json(const StateSnapshot& snapshot) {
    json carts = json::object();
    for (const auto& [shop_id, counts] : snapshot.carts) {
        json items = json::object();
        for (const auto& [offer_id, qty] : counts) items[offer_id] = qty;
        carts[shop_id] = std::move(items);
    }
    json orders = json::object();
    for (const auto& [shop_id, order_list] : snapshot.orders) {
        json list = json::array();
        for (const ItemCounts& counts : order_list) {
            json items = json::object();
            for (const auto& [offer_id, qty] : counts) items[offer_id] = qty;
            list.push_back(std::move(items));
        }
        orders[shop_id] = std::move(list);
    }
    return json{{"carts", std::move(carts)}, {"orders", std::move(orders)}};
}

StateSnapshot snapshot_from_json(const json& value) {
    StateSnapshot snapshot;
    if (value.contains("carts")) {
        for (auto& [shop_id, items] : value["carts"].items()) {
            ItemCounts counts;
            for (auto& [offer_id, qty] : items.items())
                counts[offer_id] = qty.get<long long>();
            if (!counts.empty()) snapshot.carts[shop_id] = std::move(counts);
        }
    }
    if (value.contains("orders")) {
        for (auto& [shop_id, order_list] : value["orders"].items()) {
            for (const json& order : order_list) {
                ItemCounts counts;
                for (auto& [offer_id, qty] : order.items())
                    counts[offer_id] = qty.get<long long>();
                snapshot.orders[shop_id].push_back(std::move(counts));
            }
        }
    }
    return snapshot;
}

struct TestbedServer::ShopHost {
    std::string shop_id;
    httplib::Server server;
    std::thread thread;
    std::unique_ptr<Storefront> storefront;
    ToolRegistry mcp;
    ToolRegistry nlweb;
};

TestbedServer::TestbedServer(const Catalog& catalog, int ports_base,
                             std::string admin_token)
    : catalog_(catalog), ports_base_(ports_base),
      admin_token_(std::move(admin_token)), commerce_(catalog) {}

TestbedServer::~TestbedServer() { stop(); }

void TestbedServer::start() {
    if (running_) return;
    auto embedder = std::make_shared<HashingEmbedder>();

    int shop_index = 0;
    for (const Shop& shop : catalog_.shops()) {
        auto host = std::make_unique<ShopHost>();
        host->shop_id = shop.shop_id;
        host->storefront =
            std::make_unique<Storefront>(catalog_, shop.shop_id, commerce_);
        auto offer_index = std::make_shared<SearchIndex>(
            build_offer_index(catalog_, shop.shop_id, embedder));
        host->mcp = build_mcp_tools(shop.shop_id, catalog_, commerce_, offer_index);
        host->nlweb =
            build_nlweb_tools(shop.shop_id, catalog_, commerce_, offer_index);

        httplib::Server& svr = host->server;
        const std::string shop_id = shop.shop_id;

        svr.Get("/health", [shop_id](const httplib::Request&, httplib::Response& res) {
            json body = {{"status", "ok"}, {"shop", shop_id}};
            res.set_content(body.dump(), "application/json");
        });

        ToolRegistry* mcp = &host->mcp;
        svr.Post("/mcp", [mcp](const httplib::Request& req, httplib::Response& res) {
            res.set_content(mcp->handle_request(req.body), "application/json");
        });
        ToolRegistry* nlweb = &host->nlweb;
        svr.Post("/nlweb", [nlweb](const httplib::Request& req, httplib::Response& res) {
            res.set_content(nlweb->handle_request(req.body), "application/json");
        });

        CommerceEngine* commerce = &commerce_;
        const std::string admin_token = admin_token_;
        svr.Get(R"(/admin/session/([^/]+)/snapshot)",
                [commerce, admin_token](const httplib::Request& req,
                                        httplib::Response& res) {
                    if (!admin_token.empty()) {
                        std::string auth = req.get_header_value("Authorization");
                        if (auth != "Bearer " + admin_token) {
                            res.status = 401;
                            res.set_content(json{{"error", "unauthorized"}}.dump(),
                                            "application/json");
                            return;
                        }
                    }
                    std::string session_id = req.matches[1];
                    if (!commerce->has_session(session_id)) {
                        res.status = 404;
                        res.set_content(json{{"error", "unknown session"}}.dump(),
                                        "application/json");
                        return;
                    }
                    json body = snapshot_to_json(commerce->snapshot_state(session_id));
                    body["session"] = session_id;
                    res.set_content(body.dump(), "application/json");
                });

        Storefront* front = host->storefront.get();
        auto html_handler = [front, commerce](const httplib::Request& req,
                                              httplib::Response& res) {
            StoreRequest store_req;
            store_req.method = req.method;
            store_req.path = req.path;
            for (const auto& [key, value] : req.params) store_req.query[key] = value;
            if (req.method == "POST")
                for (const auto& [key, value] : util::form_decode(req.body))
                    store_req.form[key] = value;

            std::string session =
                cookie_value(req.get_header_value("Cookie"), "wm_session");
            if (session.empty() || !commerce->has_session(session)) {
                session = commerce->create_session();
                res.set_header("Set-Cookie", "wm_session=" + session + "; Path=/");
            }
            store_req.session_id = session;

            StoreResponse store_res = front->handle(store_req);
            res.status = store_res.status;
            res.set_content(store_res.body, "text/html; charset=utf-8");
        };
        svr.Get(".*", html_handler);
        svr.Post(".*", html_handler);

        ShopEndpoints endpoints;
        endpoints.shop_id = shop.shop_id;
        endpoints.base_url = shop.base_url;
        if (ports_base_ > 0) {
            endpoints.port = ports_base_ + shop_index;
            if (!svr.bind_to_port("127.0.0.1", endpoints.port))
                throw NetError("cannot bind 127.0.0.1:" +
                               std::to_string(endpoints.port) + " for " +
                               shop.shop_id);
        } else {
            endpoints.port = svr.bind_to_any_port("127.0.0.1");
            if (endpoints.port <= 0)
                throw NetError("cannot bind an ephemeral port for " + shop.shop_id);
        }
        endpoints.local_url = "http://127.0.0.1:" + std::to_string(endpoints.port);
        endpoints_.push_back(endpoints);

        host->thread = std::thread([&svr]() { svr.listen_after_bind(); });
        hosts_.push_back(std::move(host));
        ++shop_index;
    }

    for (const ShopEndpoints& endpoints : endpoints_) {
        httplib::Client probe(endpoints.local_url);
        probe.set_connection_timeout(2);
        bool up = false;
        for (int attempt = 0; attempt < 100; ++attempt) {
            auto res = probe.Get("/health");
            if (res && res->status == 200) {
                up = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        if (!up) throw NetError(endpoints.shop_id + " did not become healthy");
    }
    running_ = true;
}

void TestbedServer::stop() {
    for (auto& host : hosts_) {
        host->server.stop();
        if (host->thread.joinable()) host->thread.join();
    }
    hosts_.clear();
    endpoints_.clear();
    running_ = false;
}

const ShopEndpoints* TestbedServer::endpoint(const std::string& shop_id) const {
    for (const ShopEndpoints& endpoints : endpoints_)
        if (endpoints.shop_id == shop_id) return &endpoints;
    return nullptr;
}

UrlResolver TestbedServer::resolver() const {
    UrlResolver resolver;
    for (const ShopEndpoints& endpoints : endpoints_)
        resolver.map_base(endpoints.base_url, endpoints.local_url);
    return resolver;
}

} // namespace webmall
