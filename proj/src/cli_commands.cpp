#include "webmall/cli_commands.hpp"

#include "webmall/agents.hpp"
#include "webmall/catalog.hpp"
#include "webmall/crawler.hpp"
#include "webmall/errors.hpp"
#include "webmall/policy.hpp"
#include "webmall/report.hpp"
#include "webmall/scoring.hpp"
#include "webmall/server.hpp"
#include "webmall/tasks.hpp"
#include "webmall/transcript.hpp"
#include "webmall/util.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace webmall {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::atomic<bool> g_shutdown{false};

void on_signal(int) { g_shutdown = true; }

std::vector<InterfaceKind> parse_interfaces(const std::string& spec) {
    if (spec == "all")
        return {InterfaceKind::Html, InterfaceKind::Rag, InterfaceKind::Mcp,
                InterfaceKind::Nlweb};
    return {interface_from_string(spec)};
}

PricingTable load_pricing(const std::string& path) {
    PricingTable pricing = PricingTable::defaults();
    if (!path.empty()) pricing.load_file(path);
    return pricing;
}

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? value : "";
}

std::string transcript_filename(const std::string& task_id, InterfaceKind kind) {
    return task_id + "." + to_string(kind) + ".jsonl";
}

std::unique_ptr<Policy> make_policy(const RunArgs& args, const TaskSpec& task,
                                    InterfaceKind kind, std::string& model_out) {
    if (args.policy == "live") {
        std::string base = env_or_empty("LLM_BASE_URL");
        if (base.empty())
            throw ConfigError("the live policy needs LLM_BASE_URL to be set");
        std::string model = !args.model.empty() ? args.model : env_or_empty("LLM_MODEL");
        if (model.empty())
            throw ConfigError("the live policy needs --model or LLM_MODEL");
        model_out = model;
        return std::make_unique<LiveChatPolicy>(base, env_or_empty("LLM_API_KEY"),
                                                model);
    }
    if (args.policy.rfind("script:", 0) == 0) {
        fs::path dir = args.policy.substr(7);
        fs::path path = dir / transcript_filename(task.task_id, kind);
        if (!fs::exists(path))
            throw ConfigError("no script for " + task.task_id + " on " +
                              to_string(kind) + ": " + path.string());
        model_out = args.model.empty() ? "scripted" : args.model;
        return std::make_unique<ScriptedPolicy>(path.string());
    }
    throw ConfigError("unknown policy \"" + args.policy +
                      "\" (expected live or script:<dir>)");
}

} // namespace

int cmd_serve(const ServeArgs& args) {
    auto catalog = load_catalog(args.catalog_path);
    TestbedServer server(*catalog, args.ports_base, args.admin_token);
    server.start();
    for (const ShopEndpoints& ep : server.endpoints()) {
        const Shop* shop = catalog->shop(ep.shop_id);
        std::cout << ep.shop_id << " (" << (shop ? shop->display_name : "") << ") "
                  << ep.local_url << " serving " << ep.base_url << "\n";
    }
    std::cout << "mcp at POST <shop>/mcp, natural-language at POST <shop>/nlweb; "
                 "Ctrl-C stops.\n"
              << std::flush;

    g_shutdown = false;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_shutdown)
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
    server.stop();
    std::cout << "stopped\n";
    return 0;
}

int cmd_index(const IndexArgs& args) {
    auto catalog = load_catalog(args.catalog_path);
    TestbedServer server(*catalog, args.ports_base);
    server.start();
    UrlResolver resolver = server.resolver();
    std::vector<CrawledPage> pages = crawl_shops(*catalog, resolver);
    server.stop();

    std::shared_ptr<const Embedder> embedder(make_default_embedder());
    SearchIndex rag = build_rag_index(pages, embedder);

    fs::create_directories(args.out_dir);
    rag.save((fs::path(args.out_dir) / "rag_index.jsonl").string());
    std::size_t offers = 0;
    for (const Shop& shop : catalog->shops()) {
        SearchIndex index = build_offer_index(*catalog, shop.shop_id, embedder);
        offers += index.size();
        index.save(
            (fs::path(args.out_dir) / ("offers_" + shop.shop_id + ".jsonl")).string());
    }
    std::cout << "crawled " << pages.size() << " pages, indexed " << offers
              << " offers into " << args.out_dir << "\n";
    return 0;
}

int cmd_run(const RunArgs& args) {
    auto catalog = load_catalog(args.catalog_path);
    std::vector<TaskSpec> tasks = load_tasks(args.tasks_path);
    std::vector<InterfaceKind> kinds = parse_interfaces(args.interfaces);
    PricingTable pricing = load_pricing(args.pricing_path);
    if (args.parallel < 1) throw ConfigError("--parallel must be at least 1");

    TestbedServer server(*catalog, args.ports_base);
    server.start();
    UrlResolver resolver = server.resolver();

    std::unique_ptr<SearchIndex> rag_index;
    if (std::find(kinds.begin(), kinds.end(), InterfaceKind::Rag) != kinds.end()) {
        std::vector<CrawledPage> pages = crawl_shops(*catalog, resolver);
        std::shared_ptr<const Embedder> embedder(make_default_embedder());
        rag_index = std::make_unique<SearchIndex>(build_rag_index(pages, embedder));
    }

    AgentEnvironment env;
    env.catalog = catalog;
    env.resolver = &resolver;
    env.commerce = &server.commerce();
    env.rag_index = rag_index.get();

    struct Job {
        const TaskSpec* task;
        InterfaceKind kind;
    };
    std::vector<Job> jobs;
    for (const TaskSpec& task : tasks)
        for (InterfaceKind kind : kinds) jobs.push_back({&task, kind});

    fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir / "transcripts");

    std::vector<TaskResult> results(jobs.size());
    std::vector<std::exception_ptr> failures(jobs.size());
    std::atomic<std::size_t> cursor{0};
    std::mutex io_mu;

    auto worker = [&]() {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            try {
                std::string model;
                std::unique_ptr<Policy> policy =
                    make_policy(args, *job.task, job.kind, model);
                RunOptions options;
                options.model = model;
                Transcript transcript =
                    run_agent(job.kind, *job.task, *policy, env, options);
                util::write_file((out_dir / "transcripts" /
                                  transcript_filename(job.task->task_id, job.kind))
                                     .string(),
                                 transcript_to_jsonl(transcript));
                results[i] = score_task(*job.task, transcript, pricing);
                std::lock_guard<std::mutex> lock(io_mu);
                std::cout << job.task->task_id << " " << to_string(job.kind)
                          << " cr=" << results[i].cr << " f1=" << results[i].f1
                          << " steps=" << transcript.steps.size();
                if (!transcript.error.empty())
                    std::cout << " error=" << transcript.error;
                std::cout << "\n";
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    std::size_t thread_count =
        std::min<std::size_t>(std::size_t(args.parallel), jobs.size());
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    server.stop();

    for (const std::exception_ptr& failure : failures)
        if (failure) std::rethrow_exception(failure);

    std::ostringstream lines;
    for (const TaskResult& result : results)
        lines << task_result_to_json(result).dump() << "\n";
    util::write_file((out_dir / "results.jsonl").string(), lines.str());
    std::cout << "wrote " << results.size() << " results to "
              << (out_dir / "results.jsonl").string() << "\n";
    return 0;
}

int cmd_score(const ScoreArgs& args) {
    std::vector<TaskSpec> tasks = load_tasks(args.tasks_path);
    std::map<std::string, const TaskSpec*> by_id;
    for (const TaskSpec& task : tasks) by_id[task.task_id] = &task;
    PricingTable pricing = load_pricing(args.pricing_path);

    if (!fs::is_directory(args.transcripts_dir))
        throw ConfigError(args.transcripts_dir + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(args.transcripts_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw ConfigError("no transcripts found in " + args.transcripts_dir);

    std::ostringstream lines;
    for (const fs::path& file : files) {
        Transcript transcript = transcript_from_jsonl(util::read_file(file.string()));
        auto it = by_id.find(transcript.task_id);
        if (it == by_id.end())
            throw EvalError(file.string() + ": no task named " + transcript.task_id);
        TaskResult result = score_task(*it->second, transcript, pricing);
        lines << task_result_to_json(result).dump() << "\n";
    }
    util::write_file(args.out_path, lines.str());
    std::cout << "scored " << files.size() << " transcripts into " << args.out_path
              << "\n";
    return 0;
}

int cmd_report(const ReportArgs& args) {
    std::istringstream in(util::read_file(args.results_path));
    std::vector<TaskResult> results;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = util::trim(line);
        if (trimmed.empty()) continue;
        json record = json::parse(trimmed, nullptr, false);
        if (record.is_discarded())
            throw EvalError(args.results_path + ":" + std::to_string(line_no) +
                            ": not valid JSON");
        results.push_back(task_result_from_json(record));
    }
    Report report = aggregate(results);
    render_report(report, args.out_dir);
    std::cout << "wrote " << (fs::path(args.out_dir) / "report.md").string()
              << ", report.json, scatter.csv\n";
    return 0;
}

int run_command(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

} // namespace webmall
