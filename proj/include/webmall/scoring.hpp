#pragma once

#include "webmall/commerce.hpp"
#include "webmall/tasks.hpp"
#include "webmall/transcript.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace webmall {

struct Score {
    double cr = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Set-based scoring of returned URLs against gold URLs. Inputs are
// normalized and deduplicated first. Conventions for empty sets: both empty
// scores perfect; an empty answer against non-empty gold scores zero; a
// non-empty answer against empty gold scores zero.
Score score_retrieval(const std::vector<std::string>& returned,
                      const std::vector<std::string>& gold);

// CR=1 iff the final state equals the target state exactly (order lists
// compared as multisets). Partial credit treats each (shop, offer, quantity)
// line item, from carts and orders alike, as one set element.
Score score_transaction(const StateSnapshot& snapshot, const StateSnapshot& gold);

struct PricingRate {
    double input_per_mtok = 0.0;
    double output_per_mtok = 0.0;
};

class PricingTable {
public:
    static PricingTable defaults();
    // JSON file: {"model-id": {"input": 2.0, "output": 8.0}, ...}
    static PricingTable from_file(const std::string& path);

    void set(const std::string& model, PricingRate rate);
    // Overlays entries from a pricing file onto this table.
    void load_file(const std::string& path);
    bool has(const std::string& model) const;
    PricingRate rate(const std::string& model) const; // throws EvalError

private:
    std::map<std::string, PricingRate> rates_;
};

// Dollars for a token pair under a model's rates. Unrounded; rounding is a
// display concern.
double compute_cost(long long input_tokens, long long output_tokens,
                    const std::string& model, const PricingTable& pricing);

// For each missed gold URL: "retrieved" when it appeared among the run's
// observed URLs, else "non-retrieved".
std::map<std::string, std::string>
classify_false_negatives(const std::vector<std::string>& missed,
                         const std::vector<std::string>& observed);

struct TaskResult {
    std::string task_id;
    std::string category;
    std::string interface_kind;
    std::string model;
    std::vector<std::string> returned_urls;
    double cr = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long long input_tokens = 0;
    long long output_tokens = 0;
    double cost = 0.0;
    double runtime_seconds = 0.0;
    std::map<std::string, std::string> fn_classification;
};

nlohmann::json task_result_to_json(const TaskResult& result);
TaskResult task_result_from_json(const nlohmann::json& value);

// Scores one finished run against its task, including cost and FN labels.
TaskResult score_task(const TaskSpec& task, const Transcript& transcript,
                      const PricingTable& pricing);

} // namespace webmall
