#pragma once

#include "webmall/catalog.hpp"
#include "webmall/commerce.hpp"
#include "webmall/jsonrpc.hpp"
#include "webmall/search_index.hpp"

#include <memory>
#include <string>

namespace webmall {

// Natural-language endpoint with one shared vocabulary: "ask" takes a
// free-text query and returns schema.org Product items, and the transaction
// tools (create_session, add_to_cart, view_cart, checkout) are named and
// shaped identically on every shop. add_to_cart is keyed by product URL.
// ask answers from the same per-shop offer index as the shop's own API, so
// the two interfaces return identical result sequences.
ToolRegistry build_nlweb_tools(const std::string& shop_id, const Catalog& catalog,
                               CommerceEngine& commerce,
                               std::shared_ptr<const SearchIndex> offer_index);

// schema.org Product rendering shared by ask results and tests.
nlohmann::json schema_org_product(const Offer& offer);

} // namespace webmall
