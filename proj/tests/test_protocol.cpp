#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "webmall/catalog.hpp"
#include "webmall/commerce.hpp"
#include "webmall/embedding.hpp"
#include "webmall/jsonrpc.hpp"
#include "webmall/mcp_server.hpp"
#include "webmall/nlweb_server.hpp"
#include "webmall/search_index.hpp"
#include "webmall/server.hpp"

#include <httplib.h>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

using namespace webmall;
using nlohmann::json;

namespace {

json call(const ToolRegistry& registry, const std::string& method,
          const json& params = json::object()) {
    json request = {{"jsonrpc", "2.0"}, {"id", 1}, {"method", method}};
    if (!params.empty()) request["params"] = params;
    return json::parse(registry.handle_request(request.dump()));
}

json call_tool(const ToolRegistry& registry, const std::string& name,
               const json& arguments) {
    return call(registry, "tools/call", {{"name", name}, {"arguments", arguments}});
}

struct ShopTools {
    std::shared_ptr<const Catalog> catalog_ptr =
        load_catalog("data/demo_catalog.jsonl");
    const Catalog& catalog = *catalog_ptr;
    CommerceEngine commerce{catalog};
    std::shared_ptr<HashingEmbedder> embedder = std::make_shared<HashingEmbedder>(256);

    ToolRegistry mcp(const std::string& shop_id) {
        auto index = std::make_shared<SearchIndex>(
            build_offer_index(catalog, shop_id, embedder));
        return build_mcp_tools(shop_id, catalog, commerce, index);
    }
    ToolRegistry nlweb(const std::string& shop_id) {
        auto index = std::make_shared<SearchIndex>(
            build_offer_index(catalog, shop_id, embedder));
        return build_nlweb_tools(shop_id, catalog, commerce, index);
    }
};

json demo_shipping_shop1() {
    return {{"name", "Alex Doe"},
            {"street", "12 Elm Street"},
            {"city", "Springfield"},
            {"postal_code", "62704"},
            {"country", "USA"}};
}

} // namespace

TEST_CASE("jsonrpc envelope constructors") {
    json ok = jsonrpc::make_result(7, json{{"x", 1}});
    CHECK(ok["jsonrpc"] == "2.0");
    CHECK(ok["id"] == 7);
    CHECK(ok["result"]["x"] == 1);
    CHECK_FALSE(ok.contains("error"));

    json err = jsonrpc::make_error("abc", jsonrpc::kMethodNotFound, "nope");
    CHECK(err["jsonrpc"] == "2.0");
    CHECK(err["id"] == "abc");
    CHECK(err["error"]["code"] == -32601);
    CHECK(err["error"]["message"] == "nope");
    CHECK_FALSE(err.contains("result"));
}

TEST_CASE("registry maps protocol violations to the right codes") {
    ToolRegistry registry;
    registry.register_tool(
        {"echo", "echoes", {{"text", "string", true, ""}}},
        [](const json& args) { return json{{"echo", args["text"]}}; });

    SUBCASE("parse error") {
        json res = json::parse(registry.handle_request("{nope"));
        CHECK(res["error"]["code"] == jsonrpc::kParseError);
        CHECK(res["id"].is_null());
    }
    SUBCASE("invalid request shapes") {
        for (const char* body :
             {R"([1,2])", R"("str")", R"({"method":"tools/list"})",
              R"({"jsonrpc":"1.0","method":"tools/list"})",
              R"({"jsonrpc":"2.0","method":42})",
              R"({"jsonrpc":"2.0","method":"x","params":"flat"})",
              R"({"jsonrpc":"2.0","method":"x","id":{"o":1}})"}) {
            json res = json::parse(registry.handle_request(body));
            CHECK(res["error"]["code"] == jsonrpc::kInvalidRequest);
        }
    }
    SUBCASE("unknown method and unknown tool") {
        CHECK(call(registry, "resources/list")["error"]["code"] ==
              jsonrpc::kMethodNotFound);
        CHECK(call_tool(registry, "missing", json::object())["error"]["code"] ==
              jsonrpc::kMethodNotFound);
    }
    SUBCASE("bad params") {
        json res = call(registry, "tools/call", {{"arguments", json::object()}});
        CHECK(res["error"]["code"] == jsonrpc::kInvalidParams);
        res = call_tool(registry, "echo", json::object());
        CHECK(res["error"]["code"] == jsonrpc::kInvalidParams);
        res = call_tool(registry, "echo", {{"text", 42}});
        CHECK(res["error"]["code"] == jsonrpc::kInvalidParams);
    }
    SUBCASE("happy path and id echo") {
        json request = {{"jsonrpc", "2.0"},
                        {"id", "req-9"},
                        {"method", "tools/call"},
                        {"params",
                         {{"name", "echo"}, {"arguments", {{"text", "hi"}}}}}};
        json res = json::parse(registry.handle_request(request.dump()));
        CHECK(res["id"] == "req-9");
        CHECK(res["result"]["isError"] == false);
        CHECK(res["result"]["content"]["echo"] == "hi");
    }
    SUBCASE("tools/list carries schemas") {
        json res = call(registry, "tools/list");
        REQUIRE(res["result"]["tools"].size() == 1);
        const json& tool = res["result"]["tools"][0];
        CHECK(tool["name"] == "echo");
        CHECK(tool["inputSchema"]["type"] == "object");
        CHECK(tool["inputSchema"]["required"][0] == "text");
    }
    SUBCASE("domain failures are isError results, not protocol errors") {
        ToolRegistry failing;
        failing.register_tool({"boom", "fails", {}}, [](const json&) -> json {
            throw ToolError("no such product");
        });
        json res = call_tool(failing, "boom", json::object());
        CHECK_FALSE(res.contains("error"));
        CHECK(res["result"]["isError"] == true);
        CHECK(res["result"]["content"]["error"] == "no such product");
    }
}

TEST_CASE("each shop exposes its own tool vocabulary") {
    ShopTools fx;
    auto names = [](const ToolRegistry& registry) {
        std::vector<std::string> out;
        for (const ToolDescriptor& d : registry.descriptors()) out.push_back(d.name);
        return out;
    };
    CHECK(names(fx.mcp("shop1")) ==
          std::vector<std::string>{"search_products", "get_product", "create_session",
                                   "add_item", "checkout"});
    CHECK(names(fx.mcp("shop2")) ==
          std::vector<std::string>{"find_offers", "offer_details", "new_cart",
                                   "put_in_cart", "purchase"});
    CHECK(names(fx.mcp("shop3")) ==
          std::vector<std::string>{"product_search", "lookup", "open_session",
                                   "cart_add", "finalize"});
    CHECK(names(fx.mcp("shop4")) ==
          std::vector<std::string>{"query_catalog", "describe", "begin", "add",
                                   "complete_order"});
    // NLWeb is uniform everywhere.
    for (const char* shop : {"shop1", "shop2", "shop3", "shop4"})
        CHECK(names(fx.nlweb(shop)) ==
              std::vector<std::string>{"ask", "create_session", "add_to_cart",
                                       "view_cart", "checkout"});
}

TEST_CASE("shop1 tool flow end to end") {
    ShopTools fx;
    ToolRegistry registry = fx.mcp("shop1");

    json hits = call_tool(registry, "search_products",
                          {{"query", "ryzen 9 5900x"}, {"max_results", 3}});
    REQUIRE(hits["result"]["isError"] == false);
    const json& items = hits["result"]["content"]["items"];
    REQUIRE_FALSE(items.empty());
    CHECK(items[0]["product_id"] == "D-001");
    CHECK(items[0]["name"].is_string());
    CHECK(items[0]["price_usd"].is_number());
    CHECK(items[0]["url"] == "http://shop1.webmall.local/product/D-001");

    json detail = call_tool(registry, "get_product", {{"product_id", "D-001"}});
    CHECK(detail["result"]["content"]["name"].is_string());
    json missing = call_tool(registry, "get_product", {{"product_id", "D-404"}});
    CHECK(missing["result"]["isError"] == true);

    json session = call_tool(registry, "create_session", json::object());
    std::string sid = session["result"]["content"]["session"];
    CHECK(fx.commerce.has_session(sid));

    json added = call_tool(registry, "add_item",
                           {{"session", sid}, {"product_id", "D-001"}, {"qty", 2}});
    CHECK(added["result"]["isError"] == false);

    json order = call_tool(registry, "checkout",
                           {{"session", sid},
                            {"shipping", demo_shipping_shop1()},
                            {"card", "4242424242424242"}});
    REQUIRE(order["result"]["isError"] == false);
    CHECK(order["result"]["content"]["order_id"].is_string());
    CHECK(order["result"]["content"]["total_usd"].is_number());

    StateSnapshot state = fx.commerce.snapshot_state(sid);
    CHECK(state.carts.empty());
    REQUIRE(state.orders.count("shop1"));
    CHECK(state.orders["shop1"][0].at("D-001") == 2);

    SUBCASE("bad card surfaces as a domain error") {
        json bad = call_tool(registry, "add_item",
                             {{"session", sid}, {"product_id", "D-001"}, {"qty", 1}});
        REQUIRE(bad["result"]["isError"] == false);
        json res = call_tool(registry, "checkout",
                             {{"session", sid},
                              {"shipping", demo_shipping_shop1()},
                              {"card", "1111"}});
        CHECK(res["result"]["isError"] == true);
    }
}

TEST_CASE("the other shops keep their own shapes and price units") {
    ShopTools fx;

    SUBCASE("shop2 works in integer cents") {
        ToolRegistry registry = fx.mcp("shop2");
        json hits =
            call_tool(registry, "find_offers", {{"q", "mx master"}, {"top_k", 2}});
        const json& results = hits["result"]["content"]["results"];
        REQUIRE_FALSE(results.empty());
        CHECK(results[0]["id"] == "D-017");
        CHECK(results[0]["cost_cents"] == 9999);
        CHECK(results[0]["link"].is_string());

        json cart = call_tool(registry, "new_cart", json::object());
        std::string cart_id = cart["result"]["content"]["cart"];
        call_tool(registry, "put_in_cart",
                  {{"cart", cart_id}, {"id", "D-017"}, {"count", 1}});
        json order = call_tool(
            registry, "purchase",
            {{"cart", cart_id},
             {"ship_to",
              {{"recipient", "Alex Doe"},
               {"address_line1", "12 Elm Street"},
               {"city", "Springfield"},
               {"postal", "62704"},
               {"country", "USA"}}},
             {"payment", {{"card_number", "4242424242424242"}}}});
        REQUIRE(order["result"]["isError"] == false);
        CHECK(order["result"]["content"]["order"]["total_cents"] == 9999);
        CHECK(order["result"]["content"]["order"]["currency"] == "USD");
    }

    SUBCASE("shop3 reports decimal string prices") {
        ToolRegistry registry = fx.mcp("shop3");
        json hits = call_tool(registry, "product_search",
                              {{"text", "tomahawk b550"}, {"limit", 2}});
        const json& results = hits["result"]["content"]["hits"];
        REQUIRE_FALSE(results.empty());
        CHECK(results[0]["sku"] == "D-031");
        CHECK(results[0]["price"].is_string());

        json session = call_tool(registry, "open_session", json::object());
        std::string sid = session["result"]["content"]["sid"];
        call_tool(registry, "cart_add", {{"sid", sid}, {"sku", "D-031"}, {"n", 1}});
        json order = call_tool(registry, "finalize",
                               {{"sid", sid},
                                {"address",
                                 {{"name", "Alex Doe"},
                                  {"street", "12 Elm Street"},
                                  {"city", "Springfield"},
                                  {"zip", "62704"},
                                  {"country", "USA"}}},
                                {"card_no", "4242424242424242"}});
        REQUIRE(order["result"]["isError"] == false);
        CHECK(order["result"]["content"]["confirmation"].is_string());
        CHECK(order["result"]["content"]["amount"].is_string());
    }

    SUBCASE("shop4 nests price objects") {
        ToolRegistry registry = fx.mcp("shop4");
        json hits = call_tool(registry, "query_catalog",
                              {{"keywords", "xbox series s"}, {"n", 2}});
        const json& results = hits["result"]["content"]["matches"];
        REQUIRE_FALSE(results.empty());
        CHECK(results[0]["ref"] == "D-055");
        CHECK(results[0]["price"]["amount"] == "279.00");
        CHECK(results[0]["price"]["currency"] == "USD");

        json token = call_tool(registry, "begin", json::object());
        std::string tok = token["result"]["content"]["token"];
        call_tool(registry, "add", {{"token", tok}, {"ref", "D-055"}, {"qty", 1}});
        json order = call_tool(registry, "complete_order",
                               {{"token", tok},
                                {"delivery",
                                 {{"to", "Alex Doe"},
                                  {"street", "12 Elm Street"},
                                  {"city", "Springfield"},
                                  {"postcode", "62704"},
                                  {"country", "USA"}}},
                                {"pay", {{"number", "4242424242424242"}}}});
        REQUIRE(order["result"]["isError"] == false);
        CHECK(order["result"]["content"]["order_ref"].is_string());
        CHECK(order["result"]["content"]["charged"]["amount"] == "279.00");
        CHECK(order["result"]["content"]["charged"]["currency"] == "USD");
    }
}

TEST_CASE("nlweb ask returns schema.org products from the shared index") {
    ShopTools fx;
    ToolRegistry nlweb = fx.nlweb("shop2");

    json res = call_tool(nlweb, "ask", {{"query", "mx master mouse"}, {"limit", 4}});
    REQUIRE(res["result"]["isError"] == false);
    const json& products = res["result"]["content"];
    REQUIRE(products.is_array());
    REQUIRE_FALSE(products.empty());
    const json& first = products[0];
    CHECK(first["@type"] == "Product");
    CHECK(first["name"].is_string());
    CHECK(first["url"] == "http://shop2.webmall.local/product/D-017");
    CHECK(first["offers"]["@type"] == "Offer");
    CHECK(first["offers"]["priceCurrency"] == "USD");
    CHECK(first["offers"]["price"] == "99.99");

    SUBCASE("ask mirrors the shop's own search tool") {
        ToolRegistry mcp = fx.mcp("shop2");
        for (const char* query : {"ryzen", "monitor 1440p", "keyboard", "ssd 2tb"}) {
            json via_ask = call_tool(nlweb, "ask", {{"query", query}, {"limit", 5}});
            json via_mcp = call_tool(mcp, "find_offers", {{"q", query}, {"top_k", 5}});
            std::vector<std::string> ask_ids, mcp_ids;
            for (const json& product : via_ask["result"]["content"]) {
                std::string url = product["url"];
                ask_ids.push_back(url.substr(url.rfind('/') + 1));
            }
            for (const json& row : via_mcp["result"]["content"]["results"])
                mcp_ids.push_back(row["id"]);
            CHECK(ask_ids == mcp_ids);
        }
    }

    SUBCASE("nlweb transaction tools share commerce state") {
        json session = call_tool(nlweb, "create_session", json::object());
        std::string sid = session["result"]["content"]["session"];
        json added = call_tool(
            nlweb, "add_to_cart",
            {{"session", sid},
             {"url", "http://shop2.webmall.local/product/D-017"},
             {"quantity", 2}});
        REQUIRE(added["result"]["isError"] == false);

        json cart = call_tool(nlweb, "view_cart", {{"session", sid}});
        CHECK(cart["result"]["content"]["total"] == "199.98");
        CHECK(cart["result"]["content"]["items"][0]["quantity"] == 2);

        json order = call_tool(
            nlweb, "checkout",
            {{"session", sid},
             {"shipping", demo_shipping_shop1()},
             {"payment", {{"card_number", "4242424242424242"}}}});
        REQUIRE(order["result"]["isError"] == false);

        StateSnapshot state = fx.commerce.snapshot_state(sid);
        REQUIRE(state.orders.count("shop2"));
        CHECK(state.orders["shop2"][0].at("D-017") == 2);

        // URL from another shop is a domain error.
        json wrong = call_tool(
            nlweb, "add_to_cart",
            {{"session", sid},
             {"url", "http://shop1.webmall.local/product/D-001"},
             {"quantity", 1}});
        CHECK(wrong["result"]["isError"] == true);
    }
}

TEST_CASE("schema_org_product shape") {
    auto catalog_ptr = load_catalog("data/demo_catalog.jsonl");
    const Catalog& catalog = *catalog_ptr;
    const Offer* offer = catalog.offer_by_id("D-001");
    REQUIRE(offer != nullptr);
    json product = schema_org_product(*offer);
    CHECK(product["@type"] == "Product");
    CHECK(product["name"] == offer->title);
    CHECK(product["description"] == offer->description);
    CHECK(product["url"] == offer->url);
    CHECK(product["offers"]["@type"] == "Offer");
    CHECK(product["offers"]["price"] == "399.99");
    CHECK(product["offers"]["priceCurrency"] == "USD");
}

TEST_CASE("url resolver maps canonical bases to local ones") {
    UrlResolver resolver;
    resolver.map_base("http://shop1.webmall.local", "http://127.0.0.1:18801");
    CHECK(resolver.to_local("http://shop1.webmall.local/product/D-001") ==
          "http://127.0.0.1:18801/product/D-001");
    CHECK(resolver.to_canonical("http://127.0.0.1:18801/cart") ==
          "http://shop1.webmall.local/cart");
    // Unknown hosts pass through untouched.
    CHECK(resolver.to_local("http://elsewhere.example/x") ==
          "http://elsewhere.example/x");
    CHECK(resolver.to_canonical("http://elsewhere.example/x") ==
          "http://elsewhere.example/x");
}

TEST_CASE("testbed server serves every surface on one port per shop") {
    auto catalog_ptr = load_catalog("data/demo_catalog.jsonl");
    const Catalog& catalog = *catalog_ptr;
    TestbedServer server(catalog, 0, "secret-token");
    server.start();

    REQUIRE(server.endpoints().size() == 4);
    const ShopEndpoints* shop1 = server.endpoint("shop1");
    REQUIRE(shop1 != nullptr);
    httplib::Client client(shop1->local_url);

    SUBCASE("health") {
        auto res = client.Get("/health");
        REQUIRE(res);
        json body = json::parse(res->body);
        CHECK(body["status"] == "ok");
        CHECK(body["shop"] == "shop1");
    }

    SUBCASE("mcp and nlweb answer on their paths") {
        json request = {{"jsonrpc", "2.0"}, {"id", 1}, {"method", "tools/list"}};
        auto mcp_res = client.Post("/mcp", request.dump(), "application/json");
        REQUIRE(mcp_res);
        json mcp_body = json::parse(mcp_res->body);
        CHECK(mcp_body["result"]["tools"][0]["name"] == "search_products");

        auto nlweb_res = client.Post("/nlweb", request.dump(), "application/json");
        REQUIRE(nlweb_res);
        json nlweb_body = json::parse(nlweb_res->body);
        CHECK(nlweb_body["result"]["tools"][0]["name"] == "ask");
    }

    SUBCASE("storefront sets a session cookie and keeps it") {
        auto res = client.Get("/");
        REQUIRE(res);
        CHECK(res->status == 200);
        std::string cookie = res->get_header_value("Set-Cookie");
        CHECK(cookie.find("wm_session=s-") != std::string::npos);

        // Returning the cookie suppresses a new one.
        std::string session = cookie.substr(11, cookie.find(';') - 11);
        httplib::Headers headers = {{"Cookie", "wm_session=" + session}};
        auto again = client.Get("/cart", headers);
        REQUIRE(again);
        CHECK(again->get_header_value("Set-Cookie").empty());
    }

    SUBCASE("admin snapshot is bearer protected") {
        std::string session = server.commerce().create_session();
        server.commerce().add_to_cart(session, "shop1", "D-001", 1);
        std::string path = "/admin/session/" + session + "/snapshot";

        auto denied = client.Get(path);
        REQUIRE(denied);
        CHECK(denied->status == 401);

        httplib::Headers auth = {{"Authorization", "Bearer secret-token"}};
        auto granted = client.Get(path, auth);
        REQUIRE(granted);
        CHECK(granted->status == 200);
        json body = json::parse(granted->body);
        CHECK(body["carts"]["shop1"]["D-001"] == 1);

        auto missing = client.Get("/admin/session/s-424242/snapshot", auth);
        REQUIRE(missing);
        CHECK(missing->status == 404);
    }

    SUBCASE("resolver covers all four shops") {
        UrlResolver resolver = server.resolver();
        for (const ShopEndpoints& endpoints : server.endpoints())
            CHECK(resolver.to_local(endpoints.base_url + "/health") ==
                  endpoints.local_url + "/health");
    }

    server.stop();
}

TEST_CASE("snapshot json codec round trips") {
    StateSnapshot snapshot;
    snapshot.carts["shop1"] = {{"D-001", 2}};
    snapshot.orders["shop2"] = {{{"D-017", 1}}, {{"D-025", 3}}};
    CHECK(snapshot_from_json(snapshot_to_json(snapshot)) == snapshot);

    StateSnapshot empty;
    CHECK(snapshot_from_json(snapshot_to_json(empty)) == empty);
    CHECK(snapshot_to_json(empty)["carts"].is_object());
}
