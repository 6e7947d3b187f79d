#pragma once

#include "webmall/catalog.hpp"
#include "webmall/commerce.hpp"
#include "webmall/jsonrpc.hpp"
#include "webmall/search_index.hpp"

#include <memory>
#include <string>

namespace webmall {

// Deliberately heterogeneous tool APIs: each shop names its tools and
// shapes its results differently, so a caller has to reconcile four
// vocabularies. Every shop exposes the same five capabilities under the
// hood: search, product detail, session creation, add-to-cart, checkout.
//
//   shop1  search_products(query, max_results) -> {items:[{product_id,
//          name, price_usd, url}]}; get_product; create_session; add_item;
//          checkout(session, shipping{name,street,city,postal_code,country},
//          card)
//   shop2  find_offers(q, top_k) -> {results:[{id, title, cost_cents,
//          currency, link}]}; offer_details; new_cart; put_in_cart;
//          purchase(cart, ship_to{recipient,address_line1,city,postal,
//          country}, payment{card_number})
//   shop3  product_search(text, limit) -> {hits:[{sku, label, price,
//          page}]}; lookup; open_session; cart_add; finalize(sid,
//          address{name,street,city,zip,country}, card_no)
//   shop4  query_catalog(keywords, n) -> {matches:[{ref, title,
//          price:{amount,currency}, href}]}; describe; begin; add;
//          complete_order(token, delivery{to,street,city,postcode,country},
//          pay{number})
//
// Price units differ on purpose: decimal dollars (shop1), integer cents
// (shop2), decimal string (shop3), {amount, currency} object (shop4).
ToolRegistry build_mcp_tools(const std::string& shop_id, const Catalog& catalog,
                             CommerceEngine& commerce,
                             std::shared_ptr<const SearchIndex> offer_index);

} // namespace webmall
