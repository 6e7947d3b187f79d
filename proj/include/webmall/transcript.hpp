#pragma once

#include "webmall/commerce.hpp"

#include <string>
#include <vector>

namespace webmall {

enum class InterfaceKind { Html, Rag, Mcp, Nlweb };

std::string to_string(InterfaceKind kind);
InterfaceKind interface_from_string(const std::string& name);

struct TranscriptStep {
    int index = 0;
    std::string observation; // digest the policy saw
    std::string action_json; // the decided action, serialized
    std::string result;      // digest of what executing it produced
    long long input_tokens = 0;
    long long output_tokens = 0;
    bool valid = true; // false when the action was rejected for this interface
};

struct FinalAnswer {
    std::vector<std::string> urls; // retrieval answer
    bool done = false;             // transactional completion marker
};

struct Transcript {
    std::string task_id;
    InterfaceKind interface_kind = InterfaceKind::Html;
    std::string model;
    std::vector<TranscriptStep> steps;
    std::vector<std::string> observed_urls; // sorted, unique, canonical
    long long input_tokens = 0;
    long long output_tokens = 0;
    double wall_seconds = 0.0;
    FinalAnswer answer;
    StateSnapshot final_state; // commerce state at run end, for offline scoring
    std::string error;         // set when the run aborted

    void add_observed(const std::string& url);
    bool observed(const std::string& url) const;
};

// Line-JSON: a header record, one record per step, and a totals footer that
// carries the answer, observed URLs, and final state. Round-trips exactly.
std::string transcript_to_jsonl(const Transcript& transcript);
Transcript transcript_from_jsonl(const std::string& content);

} // namespace webmall
