#include "webmall/report.hpp"

#include "webmall/errors.hpp"
#include "webmall/util.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace webmall {

using nlohmann::json;

namespace {

int interface_rank(const std::string& kind) {
    if (kind == "html") return 0;
    if (kind == "rag") return 1;
    if (kind == "mcp") return 2;
    if (kind == "nlweb") return 3;
    return 4;
}

std::vector<CellStats> build_cells(const std::vector<TaskResult>& results) {
    std::map<std::pair<std::string, std::string>, std::vector<const TaskResult*>>
        groups;
    for (const TaskResult& result : results)
        groups[{result.interface_kind, result.model}].push_back(&result);

    std::vector<CellStats> cells;
    for (const auto& [key, members] : groups) {
        CellStats cell;
        cell.interface_kind = key.first;
        cell.model = key.second;
        cell.tasks = members.size();
        for (const TaskResult* result : members) {
            cell.cr += result->cr;
            cell.precision += result->precision;
            cell.recall += result->recall;
            cell.f1 += result->f1;
            cell.input_tokens += double(result->input_tokens);
            cell.output_tokens += double(result->output_tokens);
            cell.cost += result->cost;
            cell.runtime_seconds += result->runtime_seconds;
        }
        double n = double(cell.tasks);
        cell.cr /= n;
        cell.precision /= n;
        cell.recall /= n;
        cell.f1 /= n;
        cell.input_tokens /= n;
        cell.output_tokens /= n;
        cell.cost /= n;
        cell.runtime_seconds /= n;
        cells.push_back(std::move(cell));
    }
    std::sort(cells.begin(), cells.end(), [](const CellStats& a, const CellStats& b) {
        int ra = interface_rank(a.interface_kind), rb = interface_rank(b.interface_kind);
        if (ra != rb) return ra < rb;
        if (a.interface_kind != b.interface_kind)
            return a.interface_kind < b.interface_kind;
        return a.model < b.model;
    });
    return cells;
}

std::vector<InterfaceStats> build_interfaces(const std::vector<CellStats>& cells) {
    std::vector<InterfaceStats> interfaces;
    for (const CellStats& cell : cells) {
        InterfaceStats* row = nullptr;
        for (InterfaceStats& existing : interfaces)
            if (existing.interface_kind == cell.interface_kind) row = &existing;
        if (!row) {
            interfaces.push_back(InterfaceStats{});
            row = &interfaces.back();
            row->interface_kind = cell.interface_kind;
        }
        row->models += 1;
        row->cr += cell.cr;
        row->precision += cell.precision;
        row->recall += cell.recall;
        row->f1 += cell.f1;
        row->input_tokens += cell.input_tokens;
        row->output_tokens += cell.output_tokens;
        row->cost += cell.cost;
        row->runtime_seconds += cell.runtime_seconds;
    }
    for (InterfaceStats& row : interfaces) {
        double n = double(row.models);
        row.cr /= n;
        row.precision /= n;
        row.recall /= n;
        row.f1 /= n;
        row.input_tokens /= n;
        row.output_tokens /= n;
        row.cost /= n;
        row.runtime_seconds /= n;
    }
    return interfaces;
}

std::string fixed(double value, int places) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, value);
    return buf;
}

void cell_table(std::ostringstream& out, const std::vector<CellStats>& cells) {
    out << "| Interface | Model | Tasks | CR | Precision | Recall | F1 | "
           "Input tok | Output tok | Cost $ | Runtime s |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const CellStats& cell : cells) {
        out << "| " << cell.interface_kind << " | " << cell.model << " | "
            << cell.tasks << " | " << fixed(cell.cr, 3) << " | "
            << fixed(cell.precision, 3) << " | " << fixed(cell.recall, 3) << " | "
            << fixed(cell.f1, 3) << " | " << fixed(cell.input_tokens, 1) << " | "
            << fixed(cell.output_tokens, 1) << " | " << fixed(cell.cost, 4)
            << " | " << fixed(cell.runtime_seconds, 2) << " |\n";
    }
}

json cell_to_json(const CellStats& cell) {
    return json{{"interface", cell.interface_kind},
                {"model", cell.model},
                {"tasks", cell.tasks},
                {"cr", cell.cr},
                {"precision", cell.precision},
                {"recall", cell.recall},
                {"f1", cell.f1},
                {"input_tokens", cell.input_tokens},
                {"output_tokens", cell.output_tokens},
                {"cost", cell.cost},
                {"runtime_seconds", cell.runtime_seconds}};
}

CellStats cell_from_json(const json& value) {
    CellStats cell;
    cell.interface_kind = value.value("interface", "");
    cell.model = value.value("model", "");
    cell.tasks = value.value("tasks", std::size_t(0));
    cell.cr = value.value("cr", 0.0);
    cell.precision = value.value("precision", 0.0);
    cell.recall = value.value("recall", 0.0);
    cell.f1 = value.value("f1", 0.0);
    cell.input_tokens = value.value("input_tokens", 0.0);
    cell.output_tokens = value.value("output_tokens", 0.0);
    cell.cost = value.value("cost", 0.0);
    cell.runtime_seconds = value.value("runtime_seconds", 0.0);
    return cell;
}

} // namespace

Report aggregate(const std::vector<TaskResult>& results) {
    if (results.empty()) throw EvalError("cannot aggregate zero results");
    Report report;
    report.cells = build_cells(results);
    report.interfaces = build_interfaces(report.cells);

    std::map<std::string, std::vector<TaskResult>> by_category;
    for (const TaskResult& result : results)
        by_category[result.category].push_back(result);
    for (const auto& [category, members] : by_category)
        report.by_category[category] = build_cells(members);
    return report;
}

json report_to_json(const Report& report) {
    json cells = json::array();
    for (const CellStats& cell : report.cells) cells.push_back(cell_to_json(cell));

    json interfaces = json::array();
    for (const InterfaceStats& row : report.interfaces)
        interfaces.push_back(json{{"interface", row.interface_kind},
                                  {"models", row.models},
                                  {"cr", row.cr},
                                  {"precision", row.precision},
                                  {"recall", row.recall},
                                  {"f1", row.f1},
                                  {"input_tokens", row.input_tokens},
                                  {"output_tokens", row.output_tokens},
                                  {"cost", row.cost},
                                  {"runtime_seconds", row.runtime_seconds}});

    json categories = json::object();
    for (const auto& [category, cells_in_category] : report.by_category) {
        json arr = json::array();
        for (const CellStats& cell : cells_in_category)
            arr.push_back(cell_to_json(cell));
        categories[category] = std::move(arr);
    }
    return json{{"cells", std::move(cells)},
                {"interfaces", std::move(interfaces)},
                {"by_category", std::move(categories)}};
}

Report report_from_json(const json& value) {
    Report report;
    for (const json& cell : value.value("cells", json::array()))
        report.cells.push_back(cell_from_json(cell));
    for (const json& row : value.value("interfaces", json::array())) {
        InterfaceStats stats;
        stats.interface_kind = row.value("interface", "");
        stats.models = row.value("models", std::size_t(0));
        stats.cr = row.value("cr", 0.0);
        stats.precision = row.value("precision", 0.0);
        stats.recall = row.value("recall", 0.0);
        stats.f1 = row.value("f1", 0.0);
        stats.input_tokens = row.value("input_tokens", 0.0);
        stats.output_tokens = row.value("output_tokens", 0.0);
        stats.cost = row.value("cost", 0.0);
        stats.runtime_seconds = row.value("runtime_seconds", 0.0);
        report.interfaces.push_back(std::move(stats));
    }
    if (value.contains("by_category"))
        for (auto& [category, cells] : value["by_category"].items()) {
            std::vector<CellStats> parsed;
            for (const json& cell : cells) parsed.push_back(cell_from_json(cell));
            report.by_category[category] = std::move(parsed);
        }
    return report;
}

std::string render_markdown(const Report& report) {
    std::ostringstream out;
    out << "# Evaluation report\n\n";
    out << "## Per interface and model (micro-averages over tasks)\n\n";
    cell_table(out, report.cells);

    out << "\n## Per interface (macro-averaged across models)\n\n";
    out << "| Interface | Models | CR | Precision | Recall | F1 | Cost $ | "
           "Runtime s |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const InterfaceStats& row : report.interfaces) {
        out << "| " << row.interface_kind << " | " << row.models << " | "
            << fixed(row.cr, 3) << " | " << fixed(row.precision, 3) << " | "
            << fixed(row.recall, 3) << " | " << fixed(row.f1, 3) << " | "
            << fixed(row.cost, 4) << " | " << fixed(row.runtime_seconds, 2)
            << " |\n";
    }

    for (const auto& [category, cells] : report.by_category) {
        out << "\n## Task set: " << category << "\n\n";
        cell_table(out, cells);
    }
    return out.str();
}

std::string render_scatter_csv(const Report& report) {
    std::ostringstream out;
    out << "interface,model,cost,f1\n";
    for (const CellStats& cell : report.cells)
        out << cell.interface_kind << "," << cell.model << ","
            << json(cell.cost).dump() << "," << json(cell.f1).dump() << "\n";
    return out.str();
}

void render_report(const Report& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    util::write_file(out_dir + "/report.json", report_to_json(report).dump(2) + "\n");
    util::write_file(out_dir + "/report.md", render_markdown(report));
    util::write_file(out_dir + "/scatter.csv", render_scatter_csv(report));
}

} // namespace webmall
