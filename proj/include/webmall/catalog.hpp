#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace webmall {

// One product offer in one shop. `url` is the canonical identity used by
// gold answers, lookups, and scoring; it always lies under the owning
// shop's base URL.
struct Offer {
    std::string offer_id;
    std::string shop_id;
    std::string title;
    std::string description;
    std::vector<std::string> category_path;
    long long price_cents = 0;
    std::string currency;
    std::string url;
    std::map<std::string, std::string> attributes;
};

struct Shop {
    std::string shop_id;
    std::string display_name;
    std::string base_url; // absolute, no trailing slash
};

struct CatalogStats {
    std::map<std::string, std::size_t> offers_per_shop;
    std::size_t median_title_length = 0;
    std::size_t median_description_length = 0;
};

// Immutable after load; safe for unrestricted concurrent reads.
class Catalog {
public:
    Catalog(std::vector<Shop> shops, std::vector<Offer> offers);

    const std::vector<Shop>& shops() const { return shops_; }
    const std::vector<Offer>& offers() const { return offers_; }

    const Shop* shop(const std::string& shop_id) const;
    const Offer* offer_by_id(const std::string& offer_id) const;

    // Looks up by normalize_url(url); returns nullptr when absent or when
    // the input is not parseable as a URL.
    const Offer* offer_by_url(const std::string& url) const;

    // Offers of one shop in catalog file order.
    std::vector<const Offer*> shop_offers(const std::string& shop_id) const;

    // Shop owning this URL (by base-url prefix), independent of whether an
    // offer lives at it.
    const Shop* shop_for_url(const std::string& url) const;

private:
    std::vector<Shop> shops_;
    std::vector<Offer> offers_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> by_url_;
};

// The four standard shops.
std::vector<Shop> standard_shops();

// Canonical product URL scheme: {base_url}/product/{offer_id}.
std::string offer_url(const Shop& shop, const std::string& offer_id);

// Loads a line-delimited JSON catalog (one offer object per line) against
// the standard shop set. Throws CatalogError with the offending line number
// on malformed records, duplicate offer ids, unknown shop ids, and URLs
// outside the owning shop's base URL.
std::shared_ptr<const Catalog> load_catalog(const std::string& path);
std::shared_ptr<const Catalog> load_catalog(const std::string& path, std::vector<Shop> shops);

CatalogStats catalog_stats(const Catalog& catalog);

} // namespace webmall
