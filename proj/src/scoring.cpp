#include "webmall/scoring.hpp"

#include "webmall/errors.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace webmall {

using nlohmann::json;

namespace {

std::string safe_normalize(const std::string& url) {
    try {
        return normalize_url(url);
    } catch (const UrlError&) {
        return url;
    }
}

std::set<std::string> to_url_set(const std::vector<std::string>& urls) {
    std::set<std::string> out;
    for (const std::string& url : urls) out.insert(safe_normalize(url));
    return out;
}

Score score_sets(const std::set<std::string>& returned,
                 const std::set<std::string>& gold) {
    Score score;
    score.cr = returned == gold ? 1.0 : 0.0;
    if (returned.empty() && gold.empty()) {
        score.precision = score.recall = score.f1 = 1.0;
        return score;
    }
    std::size_t hits = 0;
    for (const std::string& url : returned) hits += gold.count(url);
    score.precision = returned.empty() ? 0.0 : double(hits) / double(returned.size());
    score.recall = gold.empty() ? 0.0 : double(hits) / double(gold.size());
    double denom = score.precision + score.recall;
    score.f1 = denom == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / denom;
    return score;
}

using LineTriple = std::tuple<std::string, std::string, long long>;

std::set<std::string> state_elements(const StateSnapshot& state) {
    std::set<std::string> elements;
    for (const auto& [shop_id, counts] : state.carts)
        for (const auto& [offer_id, qty] : counts)
            elements.insert("cart|" + shop_id + "|" + offer_id + "|" +
                            std::to_string(qty));
    for (const auto& [shop_id, orders] : state.orders)
        for (const ItemCounts& counts : orders)
            for (const auto& [offer_id, qty] : counts)
                elements.insert("order|" + shop_id + "|" + offer_id + "|" +
                                std::to_string(qty));
    return elements;
}

StateSnapshot canonical_state(const StateSnapshot& state) {
    StateSnapshot out = state;
    for (auto it = out.carts.begin(); it != out.carts.end();)
        it = it->second.empty() ? out.carts.erase(it) : std::next(it);
    for (auto it = out.orders.begin(); it != out.orders.end();) {
        if (it->second.empty()) {
            it = out.orders.erase(it);
            continue;
        }
        std::sort(it->second.begin(), it->second.end());
        ++it;
    }
    return out;
}

} // namespace

Score score_retrieval(const std::vector<std::string>& returned,
                      const std::vector<std::string>& gold) {
    return score_sets(to_url_set(returned), to_url_set(gold));
}

Score score_transaction(const StateSnapshot& snapshot, const StateSnapshot& gold) {
    Score score = score_sets(state_elements(snapshot), state_elements(gold));
    score.cr = canonical_state(snapshot) == canonical_state(gold) ? 1.0 : 0.0;
    return score;
}

PricingTable PricingTable::defaults() {
    PricingTable table;
    auto add = [&table](const char* full, const char* alias, double in, double out) {
        table.set(full, {in, out});
        table.set(alias, {in, out});
    };
    add("gpt-4.1-2025-04-14", "gpt-4.1", 2.00, 8.00);
    add("gpt-5-2025-08-07", "gpt-5", 1.25, 10.00);
    add("gpt-5-mini-2025-08-07", "gpt-5-mini", 0.25, 2.00);
    add("claude-sonnet-4-20250514", "claude-sonnet-4", 3.00, 15.00);
    // Replayed runs carry no real model; bill them at a flat $1/$1 so cost
    // stays proportional to token counts.
    table.set("scripted", {1.00, 1.00});
    return table;
}

PricingTable PricingTable::from_file(const std::string& path) {
    PricingTable table;
    table.load_file(path);
    return table;
}

void PricingTable::load_file(const std::string& path) {
    json parsed = json::parse(util::read_file(path), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
        throw ConfigError(path + ": pricing file must be a JSON object");
    for (auto& [model, entry] : parsed.items()) {
        if (!entry.is_object() || !entry.contains("input") ||
            !entry.contains("output"))
            throw ConfigError(path + ": " + model +
                              " must carry input and output rates");
        PricingRate rate{entry["input"].get<double>(),
                         entry["output"].get<double>()};
        set(model, rate);
    }
}

void PricingTable::set(const std::string& model, PricingRate rate) {
    if (rate.input_per_mtok <= 0.0 || rate.output_per_mtok <= 0.0)
        throw ConfigError("pricing rates for " + model + " must be positive");
    rates_[model] = rate;
}

bool PricingTable::has(const std::string& model) const {
    return rates_.count(model) > 0;
}

PricingRate PricingTable::rate(const std::string& model) const {
    auto it = rates_.find(model);
    if (it == rates_.end())
        throw EvalError("no pricing for model: " + model);
    return it->second;
}

double compute_cost(long long input_tokens, long long output_tokens,
                    const std::string& model, const PricingTable& pricing) {
    PricingRate rate = pricing.rate(model);
    return (double(input_tokens) * rate.input_per_mtok +
            double(output_tokens) * rate.output_per_mtok) /
           1e6;
}

std::map<std::string, std::string>
classify_false_negatives(const std::vector<std::string>& missed,
                         const std::vector<std::string>& observed) {
    std::set<std::string> seen = to_url_set(observed);
    std::map<std::string, std::string> out;
    for (const std::string& url : missed) {
        std::string normalized = safe_normalize(url);
        out[normalized] = seen.count(normalized) ? "retrieved" : "non-retrieved";
    }
    return out;
}

json task_result_to_json(const TaskResult& result) {
    json out;
    out["task_id"] = result.task_id;
    out["category"] = result.category;
    out["interface"] = result.interface_kind;
    out["model"] = result.model;
    out["returned_urls"] = result.returned_urls;
    out["cr"] = result.cr;
    out["precision"] = result.precision;
    out["recall"] = result.recall;
    out["f1"] = result.f1;
    out["input_tokens"] = result.input_tokens;
    out["output_tokens"] = result.output_tokens;
    out["cost"] = result.cost;
    out["runtime_seconds"] = result.runtime_seconds;
    out["fn_classification"] = result.fn_classification;
    return out;
}

TaskResult task_result_from_json(const json& value) {
    TaskResult result;
    result.task_id = value.value("task_id", "");
    result.category = value.value("category", "");
    result.interface_kind = value.value("interface", "");
    result.model = value.value("model", "");
    for (const json& url : value.value("returned_urls", json::array()))
        result.returned_urls.push_back(url.get<std::string>());
    result.cr = value.value("cr", 0.0);
    result.precision = value.value("precision", 0.0);
    result.recall = value.value("recall", 0.0);
    result.f1 = value.value("f1", 0.0);
    result.input_tokens = value.value("input_tokens", 0LL);
    result.output_tokens = value.value("output_tokens", 0LL);
    result.cost = value.value("cost", 0.0);
    result.runtime_seconds = value.value("runtime_seconds", 0.0);
    if (value.contains("fn_classification"))
        for (auto& [url, label] : value["fn_classification"].items())
            result.fn_classification[url] = label.get<std::string>();
    return result;
}

TaskResult score_task(const TaskSpec& task, const Transcript& transcript,
                      const PricingTable& pricing) {
    TaskResult result;
    result.task_id = task.task_id;
    result.category = task.category;
    result.interface_kind = to_string(transcript.interface_kind);
    result.model = transcript.model;
    result.input_tokens = transcript.input_tokens;
    result.output_tokens = transcript.output_tokens;
    result.cost = compute_cost(result.input_tokens, result.output_tokens,
                               transcript.model, pricing);
    result.runtime_seconds = transcript.wall_seconds;

    Score score;
    if (task.transactional) {
        score = score_transaction(transcript.final_state, task.gold_state);
    } else {
        result.returned_urls = transcript.answer.urls;
        score = score_retrieval(transcript.answer.urls, task.gold_urls);
        std::set<std::string> returned = to_url_set(transcript.answer.urls);
        std::vector<std::string> missed;
        for (const std::string& url : task.gold_urls)
            if (!returned.count(safe_normalize(url))) missed.push_back(url);
        result.fn_classification =
            classify_false_negatives(missed, transcript.observed_urls);
    }
    result.cr = score.cr;
    result.precision = score.precision;
    result.recall = score.recall;
    result.f1 = score.f1;
    return result;
}

} // namespace webmall
