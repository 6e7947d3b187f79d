#include "webmall/mcp_server.hpp"

#include "webmall/errors.hpp"
#include "webmall/util.hpp"

namespace webmall {

using nlohmann::json;

namespace {

std::size_t clamp_k(const json& args, const char* key, std::size_t fallback) {
    auto it = args.find(key);
    if (it == args.end()) return fallback;
    long long k = it->get<long long>();
    return k < 0 ? 0 : std::size_t(k);
}

std::string str_or_empty(const json& object, const char* key) {
    auto it = object.find(key);
    if (it == object.end() || !it->is_string()) return "";
    return it->get<std::string>();
}

const Offer& offer_of_shop(const Catalog& catalog, const std::string& shop_id,
                           const std::string& offer_id) {
    const Offer* offer = catalog.offer_by_id(offer_id);
    if (!offer || offer->shop_id != shop_id)
        throw ToolError("unknown product: " + offer_id);
    return *offer;
}

double cents_to_dollars(long long cents) { return double(cents) / 100.0; }

json price_object(long long cents, const std::string& currency) {
    return json{{"amount", util::cents_to_decimal(cents)}, {"currency", currency}};
}

json category_array(const Offer& offer) {
    json out = json::array();
    for (const std::string& segment : offer.category_path) out.push_back(segment);
    return out;
}

std::string category_path(const Offer& offer) {
    std::string path;
    for (std::size_t i = 0; i < offer.category_path.size(); ++i) {
        if (i) path += " > ";
        path += offer.category_path[i];
    }
    return path;
}

} // namespace

ToolRegistry build_mcp_tools(const std::string& shop_id, const Catalog& catalog,
                             CommerceEngine& commerce,
                             std::shared_ptr<const SearchIndex> offer_index) {
    if (!catalog.shop(shop_id)) throw ConfigError("unknown shop: " + shop_id);
    ToolRegistry registry;
    const Catalog* cat = &catalog;
    CommerceEngine* eng = &commerce;

    auto run_search = [offer_index](const std::string& query, std::size_t k) {
        SearchOptions options;
        options.k = k;
        return offer_index->search(query, options);
    };

    if (shop_id == "shop1") {
        registry.register_tool(
            {"search_products",
             "Search this shop's catalog and return matching products.",
             {{"query", "string", true, "free-text search query"},
              {"max_results", "integer", false, "maximum results, default 10"}}},
            [=](const json& args) {
                auto hits = run_search(args["query"].get<std::string>(),
                                       clamp_k(args, "max_results", 10));
                json items = json::array();
                for (const SearchHit& hit : hits) {
                    const Offer& offer = offer_of_shop(*cat, "shop1", hit.doc_id);
                    items.push_back({{"product_id", offer.offer_id},
                                     {"name", offer.title},
                                     {"price_usd", cents_to_dollars(offer.price_cents)},
                                     {"url", offer.url}});
                }
                return json{{"items", std::move(items)}};
            });
        registry.register_tool(
            {"get_product",
             "Fetch full details for one product by its id.",
             {{"product_id", "string", true, "product id"}}},
            [=](const json& args) {
                const Offer& offer = offer_of_shop(
                    *cat, "shop1", args["product_id"].get<std::string>());
                return json{{"product_id", offer.offer_id},
                            {"name", offer.title},
                            {"description", offer.description},
                            {"price_usd", cents_to_dollars(offer.price_cents)},
                            {"url", offer.url},
                            {"category", category_array(offer)}};
            });
        registry.register_tool(
            {"create_session", "Start a shopping session.", {}},
            [=](const json&) { return json{{"session", eng->create_session()}}; });
        registry.register_tool(
            {"add_item",
             "Add a product to the session's cart.",
             {{"session", "string", true, "session token"},
              {"product_id", "string", true, "product id"},
              {"qty", "integer", true, "quantity, at least 1"}}},
            [=](const json& args) {
                CartView cart = eng->add_to_cart(
                    args["session"].get<std::string>(), "shop1",
                    args["product_id"].get<std::string>(),
                    args["qty"].get<long long>());
                json items = json::array();
                for (const CartLine& line : cart.lines)
                    items.push_back(
                        {{"product_id", line.offer_id},
                         {"name", line.title},
                         {"qty", line.quantity},
                         {"price_usd", cents_to_dollars(line.unit_price_cents)},
                         {"subtotal_usd", cents_to_dollars(line.subtotal_cents)}});
                return json{{"session", args["session"]},
                            {"items", std::move(items)},
                            {"total_usd", cents_to_dollars(cart.total_cents)}};
            });
        registry.register_tool(
            {"checkout",
             "Place the order for everything in the cart.",
             {{"session", "string", true, "session token"},
              {"shipping", "object", true,
               "object with name, street, city, postal_code, country"},
              {"card", "string", true, "payment card number"}}},
            [=](const json& args) {
                const json& shipping = args["shipping"];
                ShippingInfo info{str_or_empty(shipping, "name"),
                                  str_or_empty(shipping, "street"),
                                  str_or_empty(shipping, "city"),
                                  str_or_empty(shipping, "postal_code"),
                                  str_or_empty(shipping, "country")};
                Order order = eng->checkout(args["session"].get<std::string>(),
                                            "shop1", info,
                                            args["card"].get<std::string>());
                return json{{"order_id", order.order_id},
                            {"total_usd", cents_to_dollars(order.total_cents)}};
            });
        return registry;
    }

    if (shop_id == "shop2") {
        registry.register_tool(
            {"find_offers",
             "Look up offers matching a query string.",
             {{"q", "string", true, "query text"},
              {"top_k", "integer", false, "result cap, default 10"}}},
            [=](const json& args) {
                auto hits = run_search(args["q"].get<std::string>(),
                                       clamp_k(args, "top_k", 10));
                json results = json::array();
                for (const SearchHit& hit : hits) {
                    const Offer& offer = offer_of_shop(*cat, "shop2", hit.doc_id);
                    results.push_back({{"id", offer.offer_id},
                                       {"title", offer.title},
                                       {"cost_cents", offer.price_cents},
                                       {"currency", offer.currency},
                                       {"link", offer.url}});
                }
                return json{{"results", std::move(results)}};
            });
        registry.register_tool(
            {"offer_details",
             "Full record for one offer.",
             {{"id", "string", true, "offer id"}}},
            [=](const json& args) {
                const Offer& offer =
                    offer_of_shop(*cat, "shop2", args["id"].get<std::string>());
                return json{{"id", offer.offer_id},
                            {"title", offer.title},
                            {"description", offer.description},
                            {"cost_cents", offer.price_cents},
                            {"currency", offer.currency},
                            {"link", offer.url},
                            {"categories", category_array(offer)}};
            });
        registry.register_tool(
            {"new_cart", "Open a new cart.", {}},
            [=](const json&) { return json{{"cart", eng->create_session()}}; });
        registry.register_tool(
            {"put_in_cart",
             "Put an offer into a cart.",
             {{"cart", "string", true, "cart token"},
              {"id", "string", true, "offer id"},
              {"count", "integer", true, "quantity, at least 1"}}},
            [=](const json& args) {
                CartView cart = eng->add_to_cart(args["cart"].get<std::string>(),
                                                 "shop2",
                                                 args["id"].get<std::string>(),
                                                 args["count"].get<long long>());
                json contents = json::array();
                for (const CartLine& line : cart.lines)
                    contents.push_back({{"id", line.offer_id},
                                        {"title", line.title},
                                        {"count", line.quantity},
                                        {"cost_cents", line.unit_price_cents}});
                return json{{"cart", args["cart"]},
                            {"contents", std::move(contents)},
                            {"total_cents", cart.total_cents},
                            {"currency", "USD"}};
            });
        registry.register_tool(
            {"purchase",
             "Purchase the cart contents.",
             {{"cart", "string", true, "cart token"},
              {"ship_to", "object", true,
               "object with recipient, address_line1, city, postal, country"},
              {"payment", "object", true, "object with card_number"}}},
            [=](const json& args) {
                const json& ship = args["ship_to"];
                ShippingInfo info{str_or_empty(ship, "recipient"),
                                  str_or_empty(ship, "address_line1"),
                                  str_or_empty(ship, "city"),
                                  str_or_empty(ship, "postal"),
                                  str_or_empty(ship, "country")};
                Order order = eng->checkout(
                    args["cart"].get<std::string>(), "shop2", info,
                    str_or_empty(args["payment"], "card_number"));
                return json{{"order",
                             {{"id", order.order_id},
                              {"total_cents", order.total_cents},
                              {"currency", "USD"}}}};
            });
        return registry;
    }

    if (shop_id == "shop3") {
        registry.register_tool(
            {"product_search",
             "Search the parts catalog.",
             {{"text", "string", true, "search text"},
              {"limit", "integer", false, "result cap, default 10"}}},
            [=](const json& args) {
                auto hits = run_search(args["text"].get<std::string>(),
                                       clamp_k(args, "limit", 10));
                json found = json::array();
                for (const SearchHit& hit : hits) {
                    const Offer& offer = offer_of_shop(*cat, "shop3", hit.doc_id);
                    found.push_back(
                        {{"sku", offer.offer_id},
                         {"label", offer.title},
                         {"price", util::cents_to_decimal(offer.price_cents)},
                         {"page", offer.url}});
                }
                return json{{"hits", std::move(found)}};
            });
        registry.register_tool(
            {"lookup",
             "Look up one SKU.",
             {{"sku", "string", true, "SKU"}}},
            [=](const json& args) {
                const Offer& offer =
                    offer_of_shop(*cat, "shop3", args["sku"].get<std::string>());
                return json{{"sku", offer.offer_id},
                            {"label", offer.title},
                            {"info", offer.description},
                            {"price", util::cents_to_decimal(offer.price_cents)},
                            {"page", offer.url},
                            {"category_path", category_path(offer)}};
            });
        registry.register_tool(
            {"open_session", "Open a buying session.", {}},
            [=](const json&) { return json{{"sid", eng->create_session()}}; });
        registry.register_tool(
            {"cart_add",
             "Add a SKU to the session cart.",
             {{"sid", "string", true, "session id"},
              {"sku", "string", true, "SKU"},
              {"n", "integer", true, "quantity, at least 1"}}},
            [=](const json& args) {
                CartView cart = eng->add_to_cart(args["sid"].get<std::string>(),
                                                 "shop3",
                                                 args["sku"].get<std::string>(),
                                                 args["n"].get<long long>());
                json lines = json::array();
                for (const CartLine& line : cart.lines)
                    lines.push_back(
                        {{"sku", line.offer_id},
                         {"label", line.title},
                         {"n", line.quantity},
                         {"price", util::cents_to_decimal(line.unit_price_cents)}});
                return json{{"sid", args["sid"]},
                            {"lines", std::move(lines)},
                            {"total", util::cents_to_decimal(cart.total_cents)}};
            });
        registry.register_tool(
            {"finalize",
             "Finalize the order for the session cart.",
             {{"sid", "string", true, "session id"},
              {"address", "object", true,
               "object with name, street, city, zip, country"},
              {"card_no", "string", true, "payment card number"}}},
            [=](const json& args) {
                const json& address = args["address"];
                ShippingInfo info{str_or_empty(address, "name"),
                                  str_or_empty(address, "street"),
                                  str_or_empty(address, "city"),
                                  str_or_empty(address, "zip"),
                                  str_or_empty(address, "country")};
                Order order = eng->checkout(args["sid"].get<std::string>(),
                                            "shop3", info,
                                            args["card_no"].get<std::string>());
                return json{{"confirmation", order.order_id},
                            {"amount", util::cents_to_decimal(order.total_cents)}};
            });
        return registry;
    }

    if (shop_id == "shop4") {
        registry.register_tool(
            {"query_catalog",
             "Query the catalog with keywords.",
             {{"keywords", "string", true, "keywords"},
              {"n", "integer", false, "result cap, default 10"}}},
            [=](const json& args) {
                auto hits = run_search(args["keywords"].get<std::string>(),
                                       clamp_k(args, "n", 10));
                json matches = json::array();
                for (const SearchHit& hit : hits) {
                    const Offer& offer = offer_of_shop(*cat, "shop4", hit.doc_id);
                    matches.push_back(
                        {{"ref", offer.offer_id},
                         {"title", offer.title},
                         {"price", price_object(offer.price_cents, offer.currency)},
                         {"href", offer.url}});
                }
                return json{{"matches", std::move(matches)}};
            });
        registry.register_tool(
            {"describe",
             "Describe one catalog entry.",
             {{"ref", "string", true, "catalog reference"}}},
            [=](const json& args) {
                const Offer& offer =
                    offer_of_shop(*cat, "shop4", args["ref"].get<std::string>());
                return json{{"ref", offer.offer_id},
                            {"title", offer.title},
                            {"details", offer.description},
                            {"price", price_object(offer.price_cents, offer.currency)},
                            {"href", offer.url},
                            {"taxonomy", category_array(offer)}};
            });
        registry.register_tool(
            {"begin", "Begin a checkout flow; returns a basket token.", {}},
            [=](const json&) { return json{{"token", eng->create_session()}}; });
        registry.register_tool(
            {"add",
             "Add a referenced item to the basket.",
             {{"ref", "string", true, "catalog reference"},
              {"qty", "integer", true, "quantity, at least 1"},
              {"token", "string", true, "basket token"}}},
            [=](const json& args) {
                CartView cart = eng->add_to_cart(args["token"].get<std::string>(),
                                                 "shop4",
                                                 args["ref"].get<std::string>(),
                                                 args["qty"].get<long long>());
                json basket = json::array();
                for (const CartLine& line : cart.lines)
                    basket.push_back(
                        {{"ref", line.offer_id},
                         {"title", line.title},
                         {"qty", line.quantity},
                         {"price", price_object(line.unit_price_cents, "USD")}});
                return json{{"token", args["token"]},
                            {"basket", std::move(basket)},
                            {"total", price_object(cart.total_cents, "USD")}};
            });
        registry.register_tool(
            {"complete_order",
             "Complete the order for a basket.",
             {{"token", "string", true, "basket token"},
              {"delivery", "object", true,
               "object with to, street, city, postcode, country"},
              {"pay", "object", true, "object with number"}}},
            [=](const json& args) {
                const json& delivery = args["delivery"];
                ShippingInfo info{str_or_empty(delivery, "to"),
                                  str_or_empty(delivery, "street"),
                                  str_or_empty(delivery, "city"),
                                  str_or_empty(delivery, "postcode"),
                                  str_or_empty(delivery, "country")};
                Order order = eng->checkout(args["token"].get<std::string>(),
                                            "shop4", info,
                                            str_or_empty(args["pay"], "number"));
                return json{{"order_ref", order.order_id},
                            {"charged", price_object(order.total_cents, "USD")}};
            });
        return registry;
    }

    throw ConfigError("no tool schema for shop: " + shop_id);
}

} // namespace webmall
