#pragma once

#include "webmall/catalog.hpp"
#include "webmall/commerce.hpp"
#include "webmall/jsonrpc.hpp"
#include "webmall/search_index.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace webmall {

// Translates between the catalog's stable shop URLs and the loopback
// addresses the shops are actually bound to. Unknown hosts pass through.
class UrlResolver {
public:
    void map_base(const std::string& canonical_base, const std::string& local_base);
    std::string to_local(const std::string& url) const;
    std::string to_canonical(const std::string& url) const;

private:
    std::map<std::string, std::string> to_local_;
    std::map<std::string, std::string> to_canonical_;
};

struct ShopEndpoints {
    std::string shop_id;
    int port = 0;
    std::string base_url;  // catalog URL, e.g. http://shop1.webmall.local
    std::string local_url; // bound address, e.g. http://127.0.0.1:18801
};

// Hosts all four shops. Each shop gets one port serving its HTML storefront
// at the root, its own tool API at POST /mcp, the uniform natural-language
// endpoint at POST /nlweb, GET /health, and a state inspection hook at
// GET /admin/session/{id}/snapshot (bearer-protected when a token is set).
// ports_base 0 binds ephemeral ports.
class TestbedServer {
public:
    TestbedServer(const Catalog& catalog, int ports_base = 0,
                  std::string admin_token = "");
    ~TestbedServer();

    TestbedServer(const TestbedServer&) = delete;
    TestbedServer& operator=(const TestbedServer&) = delete;

    void start();
    void stop();

    const Catalog& catalog() const { return catalog_; }
    CommerceEngine& commerce() { return commerce_; }
    const std::vector<ShopEndpoints>& endpoints() const { return endpoints_; }
    const ShopEndpoints* endpoint(const std::string& shop_id) const;
    UrlResolver resolver() const;

private:
    struct ShopHost;

    const Catalog& catalog_;
    int ports_base_;
    std::string admin_token_;
    CommerceEngine commerce_;
    std::vector<std::unique_ptr<ShopHost>> hosts_;
    std::vector<ShopEndpoints> endpoints_;
    bool running_ = false;
};

nlohmann::json snapshot_to_json(const StateSnapshot& snapshot);
StateSnapshot snapshot_from_json(const nlohmann::json& value);

} // namespace webmall
