#include "webmall/commerce.hpp"

#include "webmall/errors.hpp"
#include "webmall/util.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace webmall {

namespace {

std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec);
    return buf;
}

std::string digits_only(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c >= '0' && c <= '9') out.push_back(c);
    return out;
}

} // namespace

CommerceEngine::CommerceEngine(const Catalog& catalog) : catalog_(catalog) {}

std::string CommerceEngine::create_session() {
    std::lock_guard<std::mutex> lock(mu_);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "s-%06llu",
                  static_cast<unsigned long long>(++next_session_));
    sessions_.emplace(buf, SessionState{});
    return buf;
}

bool CommerceEngine::has_session(const std::string& session_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    return sessions_.count(session_id) > 0;
}

const CommerceEngine::SessionState&
CommerceEngine::session_or_throw(const std::string& session_id) const {
    auto it = sessions_.find(session_id);
    if (it == sessions_.end())
        throw CommerceError(CommerceError::Kind::UnknownSession,
                            "unknown session: " + session_id);
    return it->second;
}

CartView CommerceEngine::render_cart(const std::string& shop_id,
                                     const std::vector<LineItem>& items) const {
    CartView view;
    view.shop_id = shop_id;
    for (const LineItem& item : items) {
        CartLine line;
        line.offer_id = item.offer_id;
        if (const Offer* offer = catalog_.offer_by_id(item.offer_id))
            line.title = offer->title;
        line.quantity = item.quantity;
        line.unit_price_cents = item.unit_price_cents;
        line.subtotal_cents = item.quantity * item.unit_price_cents;
        view.total_cents += line.subtotal_cents;
        view.lines.push_back(std::move(line));
    }
    return view;
}

CartView CommerceEngine::add_to_cart(const std::string& session_id,
                                     const std::string& shop_id,
                                     const std::string& offer_id,
                                     long long quantity) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end())
        throw CommerceError(CommerceError::Kind::UnknownSession,
                            "unknown session: " + session_id);
    if (!catalog_.shop(shop_id))
        throw CommerceError(CommerceError::Kind::UnknownShop,
                            "unknown shop: " + shop_id);
    const Offer* offer = catalog_.offer_by_id(offer_id);
    if (!offer)
        throw CommerceError(CommerceError::Kind::UnknownOffer,
                            "unknown offer: " + offer_id);
    if (offer->shop_id != shop_id)
        throw CommerceError(CommerceError::Kind::ShopMismatch,
                            "offer " + offer_id + " belongs to " + offer->shop_id +
                                ", not " + shop_id);
    if (quantity < 1)
        throw CommerceError(CommerceError::Kind::BadQuantity,
                            "quantity must be at least 1");

    std::vector<LineItem>& cart = it->second.carts[shop_id];
    bool merged = false;
    for (LineItem& item : cart) {
        if (item.offer_id == offer_id) {
            item.quantity += quantity;
            merged = true;
            break;
        }
    }
    if (!merged) cart.push_back({offer_id, quantity, offer->price_cents});
    return render_cart(shop_id, cart);
}

CartView CommerceEngine::view_cart(const std::string& session_id,
                                   const std::string& shop_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    const SessionState& session = session_or_throw(session_id);
    if (!catalog_.shop(shop_id))
        throw CommerceError(CommerceError::Kind::UnknownShop,
                            "unknown shop: " + shop_id);
    auto it = session.carts.find(shop_id);
    static const std::vector<LineItem> empty;
    return render_cart(shop_id, it == session.carts.end() ? empty : it->second);
}

Order CommerceEngine::checkout(const std::string& session_id,
                               const std::string& shop_id,
                               const ShippingInfo& shipping,
                               const std::string& card_number) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end())
        throw CommerceError(CommerceError::Kind::UnknownSession,
                            "unknown session: " + session_id);
    if (!catalog_.shop(shop_id))
        throw CommerceError(CommerceError::Kind::UnknownShop,
                            "unknown shop: " + shop_id);
    auto cart_it = it->second.carts.find(shop_id);
    if (cart_it == it->second.carts.end() || cart_it->second.empty())
        throw CommerceError(CommerceError::Kind::EmptyCart,
                            "cart for " + shop_id + " is empty");
    auto require = [](const std::string& value, const char* field) {
        if (util::trim(value).empty())
            throw CommerceError(CommerceError::Kind::MissingShipping,
                                std::string("missing shipping field: ") + field);
    };
    require(shipping.name, "name");
    require(shipping.street, "street");
    require(shipping.city, "city");
    require(shipping.postal_code, "postal_code");
    require(shipping.country, "country");
    if (!util::luhn_valid(card_number))
        throw CommerceError(CommerceError::Kind::InvalidCard,
                            "card number failed validation");

    Order order;
    char buf[24];
    std::snprintf(buf, sizeof(buf), "o-%06llu",
                  static_cast<unsigned long long>(++next_order_));
    order.order_id = buf;
    order.shop_id = shop_id;
    order.items = cart_it->second;
    order.shipping = shipping;
    std::string digits = digits_only(card_number);
    order.card_last4 = digits.size() >= 4 ? digits.substr(digits.size() - 4) : digits;
    order.created_at = now_iso8601();
    for (const LineItem& item : order.items)
        order.total_cents += item.quantity * item.unit_price_cents;

    it->second.orders[shop_id].push_back(order);
    cart_it->second.clear();
    return order;
}

std::optional<Order> CommerceEngine::find_order(const std::string& session_id,
                                                const std::string& order_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    for (const auto& [shop_id, orders] : it->second.orders)
        for (const Order& order : orders)
            if (order.order_id == order_id) return order;
    return std::nullopt;
}

StateSnapshot CommerceEngine::snapshot_state(const std::string& session_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    const SessionState& session = session_or_throw(session_id);
    StateSnapshot snapshot;
    for (const auto& [shop_id, cart] : session.carts) {
        if (cart.empty()) continue;
        ItemCounts counts;
        for (const LineItem& item : cart) counts[item.offer_id] += item.quantity;
        snapshot.carts[shop_id] = std::move(counts);
    }
    for (const auto& [shop_id, orders] : session.orders) {
        for (const Order& order : orders) {
            ItemCounts counts;
            for (const LineItem& item : order.items)
                counts[item.offer_id] += item.quantity;
            snapshot.orders[shop_id].push_back(std::move(counts));
        }
    }
    return snapshot;
}

} // namespace webmall
