#include "webmall/catalog.hpp"

#include "webmall/errors.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace webmall {

using nlohmann::json;

std::vector<Shop> standard_shops() {
    return {
        {"shop1", "TechDepot", "http://shop1.webmall.local"},
        {"shop2", "VoltByte Electronics", "http://shop2.webmall.local"},
        {"shop3", "CoreParts Outlet", "http://shop3.webmall.local"},
        {"shop4", "GigaMart", "http://shop4.webmall.local"},
    };
}

std::string offer_url(const Shop& shop, const std::string& offer_id) {
    return shop.base_url + "/product/" + offer_id;
}

Catalog::Catalog(std::vector<Shop> shops, std::vector<Offer> offers)
    : shops_(std::move(shops)), offers_(std::move(offers)) {
    for (std::size_t i = 0; i < offers_.size(); ++i) {
        by_id_.emplace(offers_[i].offer_id, i);
        by_url_.emplace(normalize_url(offers_[i].url), i);
    }
}

const Shop* Catalog::shop(const std::string& shop_id) const {
    for (const auto& s : shops_)
        if (s.shop_id == shop_id) return &s;
    return nullptr;
}

const Offer* Catalog::offer_by_id(const std::string& offer_id) const {
    auto it = by_id_.find(offer_id);
    return it == by_id_.end() ? nullptr : &offers_[it->second];
}

const Offer* Catalog::offer_by_url(const std::string& url) const {
    std::string norm;
    try {
        norm = normalize_url(url);
    } catch (const UrlError&) {
        return nullptr;
    }
    auto it = by_url_.find(norm);
    return it == by_url_.end() ? nullptr : &offers_[it->second];
}

std::vector<const Offer*> Catalog::shop_offers(const std::string& shop_id) const {
    std::vector<const Offer*> out;
    for (const auto& o : offers_)
        if (o.shop_id == shop_id) out.push_back(&o);
    return out;
}

const Shop* Catalog::shop_for_url(const std::string& url) const {
    std::string norm;
    try {
        norm = normalize_url(url);
    } catch (const UrlError&) {
        return nullptr;
    }
    for (const auto& s : shops_) {
        std::string base = normalize_url(s.base_url);
        if (norm == base || util::starts_with(norm, base + "/")) return &s;
    }
    return nullptr;
}

namespace {

std::string require_string(const json& rec, const char* key, std::size_t line_no) {
    if (!rec.contains(key) || !rec[key].is_string() || rec[key].get<std::string>().empty())
        throw CatalogError("line " + std::to_string(line_no) + ": missing or empty field '" +
                           key + "'");
    return rec[key].get<std::string>();
}

Offer parse_offer(const json& rec, std::size_t line_no) {
    if (!rec.is_object())
        throw CatalogError("line " + std::to_string(line_no) + ": record is not a JSON object");

    Offer o;
    o.offer_id = require_string(rec, "offer_id", line_no);
    o.shop_id = require_string(rec, "shop_id", line_no);
    o.title = require_string(rec, "name", line_no);
    if (rec.contains("description") && rec["description"].is_string())
        o.description = rec["description"].get<std::string>();

    if (rec.contains("category")) {
        if (!rec["category"].is_array())
            throw CatalogError("line " + std::to_string(line_no) + ": 'category' must be an array");
        for (const auto& c : rec["category"]) {
            if (!c.is_string())
                throw CatalogError("line " + std::to_string(line_no) +
                                   ": 'category' entries must be strings");
            o.category_path.push_back(c.get<std::string>());
        }
    }

    if (!rec.contains("price"))
        throw CatalogError("line " + std::to_string(line_no) + ": missing field 'price'");
    try {
        const auto& price = rec["price"];
        if (price.is_string())
            o.price_cents = util::decimal_to_cents(price.get<std::string>());
        else if (price.is_number())
            o.price_cents = util::decimal_to_cents(price.dump());
        else
            throw std::invalid_argument("price must be a decimal string");
    } catch (const std::invalid_argument& e) {
        throw CatalogError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (o.price_cents < 0)
        throw CatalogError("line " + std::to_string(line_no) + ": negative price");

    o.currency = rec.contains("priceCurrency") && rec["priceCurrency"].is_string() &&
                         !rec["priceCurrency"].get<std::string>().empty()
                     ? rec["priceCurrency"].get<std::string>()
                     : "USD";

    if (rec.contains("url")) {
        if (!rec["url"].is_string())
            throw CatalogError("line " + std::to_string(line_no) + ": 'url' must be a string");
        o.url = rec["url"].get<std::string>();
    }

    if (rec.contains("attributes")) {
        if (!rec["attributes"].is_object())
            throw CatalogError("line " + std::to_string(line_no) +
                               ": 'attributes' must be an object");
        for (auto it = rec["attributes"].begin(); it != rec["attributes"].end(); ++it) {
            const auto& v = it.value();
            o.attributes[it.key()] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    }
    return o;
}

} // namespace

std::shared_ptr<const Catalog> load_catalog(const std::string& path) {
    return load_catalog(path, standard_shops());
}

std::shared_ptr<const Catalog> load_catalog(const std::string& path, std::vector<Shop> shops) {
    std::ifstream in(path);
    if (!in) throw CatalogError("cannot open catalog file: " + path);

    std::vector<Offer> offers;
    std::unordered_map<std::string, std::size_t> seen_ids;
    std::unordered_map<std::string, std::string> seen_urls; // normalized url -> offer_id

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = util::trim(line);
        if (trimmed.empty()) continue;

        json rec;
        try {
            rec = json::parse(trimmed);
        } catch (const json::parse_error& e) {
            throw CatalogError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        Offer o = parse_offer(rec, line_no);

        auto shop_it = std::find_if(shops.begin(), shops.end(),
                                    [&](const Shop& s) { return s.shop_id == o.shop_id; });
        if (shop_it == shops.end())
            throw CatalogError("line " + std::to_string(line_no) + ": offer '" + o.offer_id +
                               "' references unknown shop '" + o.shop_id + "'");

        if (o.url.empty()) {
            o.url = offer_url(*shop_it, o.offer_id);
        } else {
            std::string norm;
            try {
                norm = normalize_url(o.url);
            } catch (const UrlError& e) {
                throw CatalogError("line " + std::to_string(line_no) + ": " + e.what());
            }
            std::string base = normalize_url(shop_it->base_url);
            if (!(norm == base || util::starts_with(norm, base + "/")))
                throw CatalogError("line " + std::to_string(line_no) + ": url '" + o.url +
                                   "' is not under base url of shop '" + o.shop_id + "'");
        }

        if (!seen_ids.emplace(o.offer_id, line_no).second)
            throw CatalogError("line " + std::to_string(line_no) + ": duplicate offer_id '" +
                               o.offer_id + "'");
        std::string norm_url = normalize_url(o.url);
        auto [it, inserted] = seen_urls.emplace(norm_url, o.offer_id);
        if (!inserted)
            throw CatalogError("line " + std::to_string(line_no) + ": url of offer '" +
                               o.offer_id + "' collides with offer '" + it->second + "'");

        offers.push_back(std::move(o));
    }

    return std::make_shared<Catalog>(std::move(shops), std::move(offers));
}

namespace {

std::size_t lower_median(std::vector<std::size_t> values) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    // even count takes the lower of the two middle values
    return values[(values.size() - 1) / 2];
}

} // namespace

CatalogStats catalog_stats(const Catalog& catalog) {
    CatalogStats stats;
    for (const auto& shop : catalog.shops()) stats.offers_per_shop[shop.shop_id] = 0;
    std::vector<std::size_t> title_lengths, description_lengths;
    for (const auto& offer : catalog.offers()) {
        stats.offers_per_shop[offer.shop_id] += 1;
        title_lengths.push_back(offer.title.size());
        description_lengths.push_back(offer.description.size());
    }
    stats.median_title_length = lower_median(std::move(title_lengths));
    stats.median_description_length = lower_median(std::move(description_lengths));
    return stats;
}

} // namespace webmall
