#pragma once

#include <functional>
#include <string>

namespace webmall {

struct ServeArgs {
    std::string catalog_path;
    int ports_base = 0;
    std::string admin_token;
};

struct IndexArgs {
    std::string catalog_path;
    std::string out_dir = "index";
    int ports_base = 0;
};

struct RunArgs {
    std::string catalog_path;
    std::string tasks_path;
    std::string interfaces = "all"; // html, rag, mcp, nlweb, or all
    std::string policy = "live";    // "live" or "script:<dir>"
    std::string model;              // live default $LLM_MODEL; scripts default "scripted"
    std::string pricing_path;       // overlays the built-in pricing table
    std::string out_dir = "out";
    int parallel = 1;
    int ports_base = 0; // 0 binds ephemeral ports
    unsigned long long seed = 0;
};

struct ScoreArgs {
    std::string tasks_path;
    std::string transcripts_dir;
    std::string pricing_path;
    std::string out_path = "results.jsonl";
};

struct ReportArgs {
    std::string results_path;
    std::string out_dir = "out";
};

int cmd_serve(const ServeArgs& args);
int cmd_index(const IndexArgs& args);
int cmd_run(const RunArgs& args);
int cmd_score(const ScoreArgs& args);
int cmd_report(const ReportArgs& args);

// Runs a command body and maps failures onto process exit codes:
// 2 configuration, 3 network, 4 data and scoring.
int run_command(const std::function<int()>& body);

} // namespace webmall
