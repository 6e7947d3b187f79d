#include "webmall/cli_commands.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Simulated shop cluster and agent evaluation harness"};
    app.require_subcommand(1);

    webmall::ServeArgs serve_args;
    CLI::App* serve = app.add_subcommand("serve", "Host the shops and block");
    serve->add_option("--catalog", serve_args.catalog_path, "Catalog jsonl file")
        ->required();
    serve->add_option("--ports-base", serve_args.ports_base,
                      "First port; shop N binds base+N-1 (0 = ephemeral)");
    serve->add_option("--admin-token", serve_args.admin_token,
                      "Bearer token required by the admin snapshot route");

    webmall::IndexArgs index_args;
    CLI::App* index = app.add_subcommand("index", "Crawl the shops and build indexes");
    index->add_option("--catalog", index_args.catalog_path, "Catalog jsonl file")
        ->required();
    index->add_option("--out", index_args.out_dir, "Output directory");
    index->add_option("--ports-base", index_args.ports_base,
                      "First port for the temporary shop cluster");

    webmall::RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run tasks against the shops");
    run->add_option("--catalog", run_args.catalog_path, "Catalog jsonl file")
        ->required();
    run->add_option("--tasks", run_args.tasks_path, "Task jsonl file")->required();
    run->add_option("--interface", run_args.interfaces,
                    "html, rag, mcp, nlweb, or all");
    run->add_option("--policy", run_args.policy,
                    "live (chat endpoint from LLM_* env) or script:<dir>");
    run->add_option("--model", run_args.model, "Model id for pricing and transcripts");
    run->add_option("--pricing", run_args.pricing_path,
                    "Pricing JSON overlaying the built-in table");
    run->add_option("--out", run_args.out_dir, "Output directory");
    run->add_option("--parallel", run_args.parallel, "Concurrent runs");
    run->add_option("--ports-base", run_args.ports_base,
                    "First port; shop N binds base+N-1 (0 = ephemeral)");
    run->add_option("--seed", run_args.seed, "Run seed recorded for reproducibility");

    webmall::ScoreArgs score_args;
    CLI::App* score = app.add_subcommand("score", "Score saved transcripts");
    score->add_option("--tasks", score_args.tasks_path, "Task jsonl file")->required();
    score->add_option("--transcripts", score_args.transcripts_dir,
                      "Directory of transcript jsonl files")
        ->required();
    score->add_option("--pricing", score_args.pricing_path,
                      "Pricing JSON overlaying the built-in table");
    score->add_option("--out", score_args.out_path, "Results jsonl path");

    webmall::ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Aggregate results into a report");
    report->add_option("--results", report_args.results_path, "Results jsonl file")
        ->required();
    report->add_option("--out", report_args.out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    return webmall::run_command([&]() -> int {
        if (serve->parsed()) return webmall::cmd_serve(serve_args);
        if (index->parsed()) return webmall::cmd_index(index_args);
        if (run->parsed()) return webmall::cmd_run(run_args);
        if (score->parsed()) return webmall::cmd_score(score_args);
        if (report->parsed()) return webmall::cmd_report(report_args);
        return 2;
    });
}
