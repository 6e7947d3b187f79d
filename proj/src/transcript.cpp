#include "webmall/transcript.hpp"

#include "webmall/errors.hpp"
#include "webmall/server.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

namespace webmall {

using nlohmann::json;

std::string to_string(InterfaceKind kind) {
    switch (kind) {
    case InterfaceKind::Html: return "html";
    case InterfaceKind::Rag: return "rag";
    case InterfaceKind::Mcp: return "mcp";
    case InterfaceKind::Nlweb: return "nlweb";
    }
    return "html";
}

InterfaceKind interface_from_string(const std::string& name) {
    if (name == "html") return InterfaceKind::Html;
    if (name == "rag") return InterfaceKind::Rag;
    if (name == "mcp") return InterfaceKind::Mcp;
    if (name == "nlweb") return InterfaceKind::Nlweb;
    throw ConfigError("unknown interface: " + name);
}

void Transcript::add_observed(const std::string& url) {
    auto it = std::lower_bound(observed_urls.begin(), observed_urls.end(), url);
    if (it == observed_urls.end() || *it != url) observed_urls.insert(it, url);
}

bool Transcript::observed(const std::string& url) const {
    return std::binary_search(observed_urls.begin(), observed_urls.end(), url);
}

std::string transcript_to_jsonl(const Transcript& transcript) {
    std::ostringstream out;
    json header;
    header["type"] = "header";
    header["task_id"] = transcript.task_id;
    header["interface"] = to_string(transcript.interface_kind);
    header["model"] = transcript.model;
    out << header.dump() << "\n";

    for (const TranscriptStep& step : transcript.steps) {
        json line;
        line["type"] = "step";
        line["index"] = step.index;
        line["observation"] = step.observation;
        json action = json::parse(step.action_json, nullptr, false);
        line["action"] = action.is_discarded() ? json(step.action_json) : action;
        line["result"] = step.result;
        line["usage"] = {{"input_tokens", step.input_tokens},
                         {"output_tokens", step.output_tokens}};
        line["valid"] = step.valid;
        out << line.dump() << "\n";
    }

    json footer;
    footer["type"] = "totals";
    footer["input_tokens"] = transcript.input_tokens;
    footer["output_tokens"] = transcript.output_tokens;
    footer["wall_seconds"] = transcript.wall_seconds;
    footer["answer"] = {{"urls", transcript.answer.urls},
                        {"done", transcript.answer.done}};
    footer["observed_urls"] = transcript.observed_urls;
    footer["final_state"] = snapshot_to_json(transcript.final_state);
    footer["error"] = transcript.error;
    out << footer.dump() << "\n";
    return out.str();
}

Transcript transcript_from_jsonl(const std::string& content) {
    Transcript transcript;
    std::istringstream in(content);
    std::string line;
    bool have_header = false, have_footer = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object())
            throw EvalError("transcript line " + std::to_string(line_no) +
                            ": invalid JSON");
        std::string type = record.value("type", "");
        if (type == "header") {
            transcript.task_id = record.value("task_id", "");
            transcript.interface_kind =
                interface_from_string(record.value("interface", "html"));
            transcript.model = record.value("model", "");
            have_header = true;
        } else if (type == "step") {
            TranscriptStep step;
            step.index = record.value("index", 0);
            step.observation = record.value("observation", "");
            step.action_json = record.contains("action")
                                   ? record["action"].dump()
                                   : std::string("{}");
            step.result = record.value("result", "");
            if (record.contains("usage")) {
                step.input_tokens = record["usage"].value("input_tokens", 0LL);
                step.output_tokens = record["usage"].value("output_tokens", 0LL);
            }
            step.valid = record.value("valid", true);
            transcript.steps.push_back(std::move(step));
        } else if (type == "totals") {
            transcript.input_tokens = record.value("input_tokens", 0LL);
            transcript.output_tokens = record.value("output_tokens", 0LL);
            transcript.wall_seconds = record.value("wall_seconds", 0.0);
            if (record.contains("answer")) {
                for (const json& url : record["answer"].value("urls", json::array()))
                    transcript.answer.urls.push_back(url.get<std::string>());
                transcript.answer.done = record["answer"].value("done", false);
            }
            for (const json& url : record.value("observed_urls", json::array()))
                transcript.observed_urls.push_back(url.get<std::string>());
            if (record.contains("final_state"))
                transcript.final_state = snapshot_from_json(record["final_state"]);
            transcript.error = record.value("error", "");
            have_footer = true;
        } else {
            throw EvalError("transcript line " + std::to_string(line_no) +
                            ": unknown record type '" + type + "'");
        }
    }
    if (!have_header) throw EvalError("transcript is missing its header record");
    if (!have_footer) throw EvalError("transcript is missing its totals record");
    return transcript;
}

} // namespace webmall
