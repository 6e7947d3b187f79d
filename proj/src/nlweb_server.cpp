#include "webmall/nlweb_server.hpp"

#include "webmall/errors.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

namespace webmall {

using nlohmann::json;

json schema_org_product(const Offer& offer) {
    return json{{"@type", "Product"},
                {"name", offer.title},
                {"description", offer.description},
                {"url", offer.url},
                {"offers",
                 {{"@type", "Offer"},
                  {"price", util::cents_to_decimal(offer.price_cents)},
                  {"priceCurrency", offer.currency}}}};
}

namespace {

json cart_json(const Catalog& catalog, const std::string& session,
               const CartView& cart) {
    json items = json::array();
    for (const CartLine& line : cart.lines) {
        const Offer* offer = catalog.offer_by_id(line.offer_id);
        items.push_back({{"url", offer ? offer->url : ""},
                         {"name", line.title},
                         {"quantity", line.quantity},
                         {"price", util::cents_to_decimal(line.unit_price_cents)},
                         {"priceCurrency", "USD"}});
    }
    return json{{"session", session},
                {"items", std::move(items)},
                {"total", util::cents_to_decimal(cart.total_cents)},
                {"totalCurrency", "USD"}};
}

std::string str_or_empty(const json& object, const char* key) {
    auto it = object.find(key);
    if (it == object.end() || !it->is_string()) return "";
    return it->get<std::string>();
}

} // namespace

ToolRegistry build_nlweb_tools(const std::string& shop_id, const Catalog& catalog,
                               CommerceEngine& commerce,
                               std::shared_ptr<const SearchIndex> offer_index) {
    if (!catalog.shop(shop_id)) throw ConfigError("unknown shop: " + shop_id);
    ToolRegistry registry;
    const Catalog* cat = &catalog;
    CommerceEngine* eng = &commerce;
    std::string shop = shop_id;

    registry.register_tool(
        {"ask",
         "Ask this shop a natural-language question about its products.",
         {{"query", "string", true, "natural-language query"},
          {"limit", "integer", false, "maximum results, default 10"}}},
        [=](const json& args) {
            long long limit = 10;
            if (args.contains("limit")) limit = args["limit"].get<long long>();
            if (limit < 0) limit = 0;
            SearchOptions options;
            options.k = std::size_t(limit);
            auto hits = offer_index->search(args["query"].get<std::string>(), options);
            json items = json::array();
            for (const SearchHit& hit : hits) {
                const Offer* offer = cat->offer_by_id(hit.doc_id);
                if (offer) items.push_back(schema_org_product(*offer));
            }
            return items;
        });

    registry.register_tool(
        {"create_session", "Create a shopping session.", {}},
        [=](const json&) { return json{{"session", eng->create_session()}}; });

    registry.register_tool(
        {"add_to_cart",
         "Add a product to the cart by its product URL.",
         {{"session", "string", true, "session token"},
          {"url", "string", true, "product URL"},
          {"quantity", "integer", true, "quantity, at least 1"}}},
        [=](const json& args) {
            const Offer* offer = cat->offer_by_url(args["url"].get<std::string>());
            if (!offer)
                throw ToolError("unknown product: " + args["url"].get<std::string>());
            if (offer->shop_id != shop)
                throw ToolError("product belongs to another shop: " + offer->url);
            CartView cart = eng->add_to_cart(args["session"].get<std::string>(),
                                             shop, offer->offer_id,
                                             args["quantity"].get<long long>());
            return cart_json(*cat, args["session"].get<std::string>(), cart);
        });

    registry.register_tool(
        {"view_cart",
         "View the cart for a session.",
         {{"session", "string", true, "session token"}}},
        [=](const json& args) {
            CartView cart = eng->view_cart(args["session"].get<std::string>(), shop);
            return cart_json(*cat, args["session"].get<std::string>(), cart);
        });

    registry.register_tool(
        {"checkout",
         "Check out the session's cart.",
         {{"session", "string", true, "session token"},
          {"shipping", "object", true,
           "object with name, street, city, postal_code, country"},
          {"payment", "object", true, "object with card_number"}}},
        [=](const json& args) {
            const json& shipping = args["shipping"];
            ShippingInfo info{str_or_empty(shipping, "name"),
                              str_or_empty(shipping, "street"),
                              str_or_empty(shipping, "city"),
                              str_or_empty(shipping, "postal_code"),
                              str_or_empty(shipping, "country")};
            Order order =
                eng->checkout(args["session"].get<std::string>(), shop, info,
                              str_or_empty(args["payment"], "card_number"));
            return json{{"order_id", order.order_id},
                        {"total", util::cents_to_decimal(order.total_cents)},
                        {"totalCurrency", "USD"}};
        });

    return registry;
}

} // namespace webmall
