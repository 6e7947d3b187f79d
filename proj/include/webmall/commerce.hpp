#pragma once

#include "webmall/catalog.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace webmall {

struct LineItem {
    std::string offer_id;
    long long quantity = 0;
    long long unit_price_cents = 0;
};

struct ShippingInfo {
    std::string name;
    std::string street;
    std::string city;
    std::string postal_code;
    std::string country;
};

struct CartLine {
    std::string offer_id;
    std::string title;
    long long quantity = 0;
    long long unit_price_cents = 0;
    long long subtotal_cents = 0;
};

struct CartView {
    std::string shop_id;
    std::vector<CartLine> lines;
    long long total_cents = 0;
};

struct Order {
    std::string order_id;
    std::string shop_id;
    std::vector<LineItem> items;
    ShippingInfo shipping;
    std::string card_last4;
    long long total_cents = 0;
    std::string created_at;
};

// offer_id -> quantity
using ItemCounts = std::map<std::string, long long>;

struct StateSnapshot {
    std::map<std::string, ItemCounts> carts;               // shop -> cart items
    std::map<std::string, std::vector<ItemCounts>> orders; // shop -> one entry per order
    bool operator==(const StateSnapshot&) const = default;
    bool empty() const { return carts.empty() && orders.empty(); }
};

// Session-scoped cart and order state shared by every shop interface. A
// single lock guards the store; all operations are serialized, which keeps
// snapshots consistent under concurrent requests.
class CommerceEngine {
public:
    explicit CommerceEngine(const Catalog& catalog);

    std::string create_session();
    bool has_session(const std::string& session_id) const;

    CartView add_to_cart(const std::string& session_id, const std::string& shop_id,
                         const std::string& offer_id, long long quantity);
    CartView view_cart(const std::string& session_id, const std::string& shop_id) const;
    Order checkout(const std::string& session_id, const std::string& shop_id,
                   const ShippingInfo& shipping, const std::string& card_number);
    std::optional<Order> find_order(const std::string& session_id,
                                    const std::string& order_id) const;
    StateSnapshot snapshot_state(const std::string& session_id) const;

private:
    struct SessionState {
        std::map<std::string, std::vector<LineItem>> carts;
        std::map<std::string, std::vector<Order>> orders;
    };

    const SessionState& session_or_throw(const std::string& session_id) const;
    CartView render_cart(const std::string& shop_id,
                         const std::vector<LineItem>& items) const;

    const Catalog& catalog_;
    mutable std::mutex mu_;
    std::uint64_t next_session_ = 0;
    std::uint64_t next_order_ = 0;
    std::map<std::string, SessionState> sessions_;
};

} // namespace webmall
