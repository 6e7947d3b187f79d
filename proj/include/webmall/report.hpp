#pragma once

#include "webmall/scoring.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace webmall {

// Micro-averages over the tasks of one interface×model cell.
struct CellStats {
    std::string interface_kind;
    std::string model;
    std::size_t tasks = 0;
    double cr = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double input_tokens = 0.0;
    double output_tokens = 0.0;
    double cost = 0.0;
    double runtime_seconds = 0.0;
    bool operator==(const CellStats&) const = default;
};

// Unweighted mean of an interface's cell values across models.
struct InterfaceStats {
    std::string interface_kind;
    std::size_t models = 0;
    double cr = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double input_tokens = 0.0;
    double output_tokens = 0.0;
    double cost = 0.0;
    double runtime_seconds = 0.0;
    bool operator==(const InterfaceStats&) const = default;
};

struct Report {
    std::vector<CellStats> cells;
    std::vector<InterfaceStats> interfaces;
    std::map<std::string, std::vector<CellStats>> by_category;
    bool operator==(const Report&) const = default;
};

// Groups task results into interface×model cells (micro), interface rows
// (macro across models), and per-category breakdowns. Throws EvalError when
// results is empty.
Report aggregate(const std::vector<TaskResult>& results);

nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& value);

std::string render_markdown(const Report& report);
std::string render_scatter_csv(const Report& report);

// Writes report.json, report.md, and scatter.csv into out_dir.
void render_report(const Report& report, const std::string& out_dir);

} // namespace webmall
