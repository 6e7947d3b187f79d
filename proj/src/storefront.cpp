#include "webmall/storefront.hpp"

#include "webmall/errors.hpp"
#include "webmall/util.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace webmall {

namespace {

std::string category_slug(const std::vector<std::string>& path, std::size_t depth) {
    std::string slug;
    for (std::size_t i = 0; i < depth && i < path.size(); ++i) {
        if (!slug.empty()) slug += "/";
        slug += util::slugify(path[i]);
    }
    return slug;
}

long long parse_page(const std::map<std::string, std::string>& query) {
    auto it = query.find("page");
    if (it == query.end()) return 1;
    try {
        long long page = std::stoll(it->second);
        return page < 1 ? 1 : page;
    } catch (...) {
        return 1;
    }
}

long long parse_qty(const std::string& raw) {
    if (raw.empty()) return 1;
    try {
        size_t pos = 0;
        long long qty = std::stoll(raw, &pos);
        if (pos != raw.size()) return -1;
        return qty;
    } catch (...) {
        return -1;
    }
}

} // namespace

std::vector<const Offer*> lexical_search(const Catalog& catalog,
                                         const std::string& shop_id,
                                         const std::string& query,
                                         std::size_t cap) {
    std::vector<std::string> terms = util::tokenize(query);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    if (terms.empty()) return {};

    struct Scored {
        const Offer* offer;
        long long count;
    };
    std::vector<Scored> scored;
    for (const Offer* offer : catalog.shop_offers(shop_id)) {
        std::vector<std::string> doc =
            util::tokenize(offer->title + " " + offer->description);
        long long total = 0;
        bool all = true;
        for (const std::string& term : terms) {
            long long count = std::count(doc.begin(), doc.end(), term);
            if (count == 0) {
                all = false;
                break;
            }
            total += count;
        }
        if (all) scored.push_back({offer, total});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.offer->offer_id < b.offer->offer_id;
    });
    std::vector<const Offer*> out;
    for (const Scored& s : scored) {
        if (out.size() >= cap) break;
        out.push_back(s.offer);
    }
    return out;
}

Storefront::Storefront(const Catalog& catalog, std::string shop_id,
                       CommerceEngine& commerce)
    : catalog_(catalog), shop_id_(std::move(shop_id)), commerce_(commerce) {
    if (!catalog_.shop(shop_id_)) throw CatalogError("unknown shop: " + shop_id_);
}

std::string Storefront::layout(const std::string& page_title,
                               const std::string& main) const {
    const Shop* shop = catalog_.shop(shop_id_);
    std::set<std::pair<std::string, std::string>> top; // (name, slug)
    for (const Offer* offer : catalog_.shop_offers(shop_id_))
        if (!offer->category_path.empty())
            top.insert({offer->category_path[0], category_slug(offer->category_path, 1)});

    std::ostringstream out;
    out << "<title>" << util::html_escape(page_title) << " - "
        << util::html_escape(shop->display_name) << "</title>\n";
    out << "<header>\n<nav>\n";
    out << "<a href=\"/\">" << util::html_escape(shop->display_name) << "</a>\n";
    for (const auto& [name, slug] : top)
        out << "<a href=\"/category/" << slug << "\">" << util::html_escape(name)
            << "</a>\n";
    out << "<a href=\"/cart\">Cart</a>\n";
    out << "</nav>\n";
    out << "<form action=\"/search\" method=\"get\">"
        << "<input type=\"text\" name=\"q\" placeholder=\"Search products\">"
        << "<button type=\"submit\">Search</button></form>\n";
    out << "</header>\n<main>\n" << main << "</main>\n";
    out << "<footer><p>" << util::html_escape(shop->display_name)
        << " is part of the WebMall testbed.</p></footer>\n";
    return out.str();
}

std::string Storefront::offer_list(const std::vector<const Offer*>& offers) const {
    std::ostringstream out;
    out << "<ul class=\"products\">\n";
    for (const Offer* offer : offers) {
        out << "<li><a href=\"/product/" << util::html_escape(offer->offer_id)
            << "\">" << util::html_escape(offer->title) << "</a> <span>"
            << util::format_price(offer->price_cents, offer->currency)
            << "</span></li>\n";
    }
    out << "</ul>\n";
    return out.str();
}

std::string Storefront::pagination(const std::string& base_path, int page,
                                   bool has_more) const {
    std::ostringstream out;
    if (page > 1 || has_more) {
        out << "<div class=\"pager\">";
        if (page > 1)
            out << "<a href=\"" << base_path << "?page=" << (page - 1)
                << "\">Previous</a> ";
        out << "Page " << page;
        if (has_more)
            out << " <a href=\"" << base_path << "?page=" << (page + 1)
                << "\">Next</a>";
        out << "</div>\n";
    }
    return out.str();
}

std::string Storefront::render_home(int page) const {
    const Shop* shop = catalog_.shop(shop_id_);
    std::vector<const Offer*> offers = catalog_.shop_offers(shop_id_);

    std::set<std::pair<std::string, std::string>> top;
    for (const Offer* offer : offers)
        if (!offer->category_path.empty())
            top.insert({offer->category_path[0], category_slug(offer->category_path, 1)});

    std::ostringstream main;
    main << "<h1>" << util::html_escape(shop->display_name) << "</h1>\n";
    main << "<h2>Categories</h2>\n<ul class=\"categories\">\n";
    for (const auto& [name, slug] : top)
        main << "<li><a href=\"/category/" << slug << "\">"
             << util::html_escape(name) << "</a></li>\n";
    main << "</ul>\n";

    std::size_t begin = std::size_t(page - 1) * kPageSize;
    std::vector<const Offer*> page_offers;
    for (std::size_t i = begin; i < offers.size() && i < begin + kPageSize; ++i)
        page_offers.push_back(offers[i]);
    main << "<h2>All products</h2>\n" << offer_list(page_offers);
    main << pagination("/", page, begin + kPageSize < offers.size());
    return layout("Home", main.str());
}

std::string Storefront::render_category(const std::string& slug_path,
                                        int page) const {
    std::vector<const Offer*> matching;
    std::set<std::pair<std::string, std::string>> children; // (name, slug)
    std::string display;
    for (const Offer* offer : catalog_.shop_offers(shop_id_)) {
        for (std::size_t depth = 1; depth <= offer->category_path.size(); ++depth) {
            if (category_slug(offer->category_path, depth) == slug_path) {
                matching.push_back(offer);
                if (display.empty()) display = offer->category_path[depth - 1];
                if (depth < offer->category_path.size())
                    children.insert({offer->category_path[depth],
                                     category_slug(offer->category_path, depth + 1)});
                break;
            }
        }
    }
    if (matching.empty()) return "";

    std::ostringstream main;
    main << "<h1>" << util::html_escape(display) << "</h1>\n";
    if (!children.empty()) {
        main << "<h2>Subcategories</h2>\n<ul class=\"categories\">\n";
        for (const auto& [name, slug] : children)
            main << "<li><a href=\"/category/" << slug << "\">"
                 << util::html_escape(name) << "</a></li>\n";
        main << "</ul>\n";
    }
    std::size_t begin = std::size_t(page - 1) * kPageSize;
    std::vector<const Offer*> page_offers;
    for (std::size_t i = begin; i < matching.size() && i < begin + kPageSize; ++i)
        page_offers.push_back(matching[i]);
    main << offer_list(page_offers);
    main << pagination("/category/" + slug_path, page,
                       begin + kPageSize < matching.size());
    return layout(display, main.str());
}

std::string Storefront::render_product_page(const Offer& offer) const {
    std::ostringstream main;
    main << "<div class=\"breadcrumb\"><a href=\"/\">Home</a>";
    for (std::size_t depth = 1; depth <= offer.category_path.size(); ++depth)
        main << " / <a href=\"/category/" << category_slug(offer.category_path, depth)
             << "\">" << util::html_escape(offer.category_path[depth - 1]) << "</a>";
    main << "</div>\n";
    main << "<h1>" << util::html_escape(offer.title) << "</h1>\n";
    main << "<p class=\"price\">Price: "
         << util::format_price(offer.price_cents, offer.currency) << "</p>\n";
    main << "<p class=\"description\">" << util::html_escape(offer.description)
         << "</p>\n";
    if (!offer.attributes.empty()) {
        main << "<dl class=\"attributes\">\n";
        for (const auto& [key, value] : offer.attributes)
            main << "<dt>" << util::html_escape(key) << "</dt><dd>"
                 << util::html_escape(value) << "</dd>\n";
        main << "</dl>\n";
    }
    main << "<form action=\"/cart/add\" method=\"post\">\n"
         << "<input type=\"hidden\" name=\"offer_id\" value=\""
         << util::html_escape(offer.offer_id) << "\">\n"
         << "<input type=\"number\" name=\"qty\" value=\"1\">\n"
         << "<button type=\"submit\">Add to cart</button>\n</form>\n";
    return layout(offer.title, main.str());
}

std::string Storefront::render_search(const std::string& query) const {
    std::vector<const Offer*> results =
        lexical_search(catalog_, shop_id_, query, kPageSize);
    std::ostringstream main;
    main << "<h1>Search results for \"" << util::html_escape(query)
         << "\"</h1>\n";
    if (results.empty()) {
        main << "<p class=\"no-results\">No results found.</p>\n";
    } else {
        main << "<p>" << results.size() << " result"
             << (results.size() == 1 ? "" : "s") << "</p>\n";
        main << offer_list(results);
    }
    return layout("Search", main.str());
}

std::string Storefront::render_cart(const std::string& session_id) const {
    CartView cart = commerce_.view_cart(session_id, shop_id_);
    std::ostringstream main;
    main << "<h1>Your cart</h1>\n";
    if (cart.lines.empty()) {
        main << "<p class=\"empty-cart\">Your cart is empty.</p>\n";
        return layout("Cart", main.str());
    }
    main << "<table class=\"cart\">\n"
         << "<tr><th>Product</th><th>Quantity</th><th>Unit price</th>"
         << "<th>Subtotal</th></tr>\n";
    for (const CartLine& line : cart.lines) {
        main << "<tr><td><a href=\"/product/" << util::html_escape(line.offer_id)
             << "\">" << util::html_escape(line.title) << "</a></td><td>"
             << line.quantity << "</td><td>"
             << util::format_price(line.unit_price_cents, "USD") << "</td><td>"
             << util::format_price(line.subtotal_cents, "USD") << "</td></tr>\n";
    }
    main << "</table>\n<p class=\"total\">Total: "
         << util::format_price(cart.total_cents, "USD") << "</p>\n";
    main << "<h2>Checkout</h2>\n"
         << "<form action=\"/checkout\" method=\"post\">\n"
         << "<label>Name <input type=\"text\" name=\"name\"></label>\n"
         << "<label>Street <input type=\"text\" name=\"street\"></label>\n"
         << "<label>City <input type=\"text\" name=\"city\"></label>\n"
         << "<label>Postal code <input type=\"text\" name=\"postal_code\"></label>\n"
         << "<label>Country <input type=\"text\" name=\"country\"></label>\n"
         << "<label>Card number <input type=\"text\" name=\"card_number\"></label>\n"
         << "<button type=\"submit\">Place order</button>\n</form>\n";
    return layout("Cart", main.str());
}

std::string Storefront::render_order(const Order& order) const {
    std::ostringstream main;
    main << "<h1>Order " << util::html_escape(order.order_id) << "</h1>\n";
    main << "<p>Placed " << util::html_escape(order.created_at) << ", card ending "
         << util::html_escape(order.card_last4) << ".</p>\n";
    main << "<table class=\"order\">\n"
         << "<tr><th>Product</th><th>Quantity</th><th>Unit price</th></tr>\n";
    for (const LineItem& item : order.items) {
        const Offer* offer = catalog_.offer_by_id(item.offer_id);
        main << "<tr><td>"
             << util::html_escape(offer ? offer->title : item.offer_id)
             << "</td><td>" << item.quantity << "</td><td>"
             << util::format_price(item.unit_price_cents, "USD") << "</td></tr>\n";
    }
    main << "</table>\n<p class=\"total\">Total: "
         << util::format_price(order.total_cents, "USD") << "</p>\n";
    return layout("Order " + order.order_id, main.str());
}

std::string Storefront::error_page(int status, const std::string& message) const {
    std::ostringstream main;
    main << "<h1>" << (status == 404 ? "Not found" : "Error") << "</h1>\n";
    main << "<p class=\"error\">" << util::html_escape(message) << "</p>\n";
    return layout(status == 404 ? "Not found" : "Error", main.str());
}

StoreResponse Storefront::handle(const StoreRequest& request) const {
    try {
        if (request.method == "GET") {
            if (request.path == "/" || request.path.empty())
                return {200, render_home(int(parse_page(request.query)))};
            if (util::starts_with(request.path, "/category/")) {
                std::string slug = request.path.substr(10);
                std::string body = render_category(slug, int(parse_page(request.query)));
                if (body.empty())
                    return {404, error_page(404, "no such category: " + slug)};
                return {200, body};
            }
            if (util::starts_with(request.path, "/product/")) {
                std::string offer_id = request.path.substr(9);
                const Offer* offer = catalog_.offer_by_id(offer_id);
                if (!offer || offer->shop_id != shop_id_)
                    return {404, error_page(404, "no such product: " + offer_id)};
                return {200, render_product_page(*offer)};
            }
            if (request.path == "/search") {
                auto it = request.query.find("q");
                return {200, render_search(it == request.query.end() ? "" : it->second)};
            }
            if (request.path == "/cart")
                return {200, render_cart(request.session_id)};
            if (util::starts_with(request.path, "/order/")) {
                std::string order_id = request.path.substr(7);
                auto order = commerce_.find_order(request.session_id, order_id);
                if (!order || order->shop_id != shop_id_)
                    return {404, error_page(404, "no such order: " + order_id)};
                return {200, render_order(*order)};
            }
        }
        if (request.method == "POST") {
            if (request.path == "/cart/add") {
                auto offer_it = request.form.find("offer_id");
                std::string offer_id =
                    offer_it == request.form.end() ? "" : offer_it->second;
                auto qty_it = request.form.find("qty");
                long long qty =
                    qty_it == request.form.end() ? 1 : parse_qty(qty_it->second);
                commerce_.add_to_cart(request.session_id, shop_id_, offer_id, qty);
                return {200, render_cart(request.session_id)};
            }
            if (request.path == "/checkout") {
                auto field = [&](const char* name) {
                    auto it = request.form.find(name);
                    return it == request.form.end() ? std::string() : it->second;
                };
                ShippingInfo shipping{field("name"), field("street"), field("city"),
                                      field("postal_code"), field("country")};
                Order order = commerce_.checkout(request.session_id, shop_id_,
                                                 shipping, field("card_number"));
                std::ostringstream main;
                main << "<h1>Order confirmed</h1>\n";
                main << "<p>Order <strong>" << util::html_escape(order.order_id)
                     << "</strong> has been placed. Total "
                     << util::format_price(order.total_cents, "USD") << ".</p>\n";
                main << "<p><a href=\"/order/" << util::html_escape(order.order_id)
                     << "\">View order</a></p>\n";
                return {200, layout("Order confirmed", main.str())};
            }
        }
        return {404, error_page(404, "no such page: " + request.path)};
    } catch (const CommerceError& e) {
        return {400, error_page(400, e.what())};
    }
}

} // namespace webmall
