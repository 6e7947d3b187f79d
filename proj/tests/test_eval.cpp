#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "webmall/errors.hpp"
#include "webmall/report.hpp"
#include "webmall/scoring.hpp"
#include "webmall/tasks.hpp"
#include "webmall/transcript.hpp"
#include "webmall/util.hpp"

#include <cstdio>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

using namespace webmall;
using nlohmann::json;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        path = (std::filesystem::temp_directory_path() /
                ("eval_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++) + ".jsonl"))
                   .string();
        util::write_file(path, content);
    }
    ~TempFile() { std::remove(path.c_str()); }
    static int counter;
};
int TempFile::counter = 0;

TaskResult make_result(const std::string& task_id, const std::string& interface_kind,
                       const std::string& model, double f1, double cost,
                       const std::string& category = "specific") {
    TaskResult result;
    result.task_id = task_id;
    result.category = category;
    result.interface_kind = interface_kind;
    result.model = model;
    result.cr = f1 == 1.0 ? 1.0 : 0.0;
    result.precision = f1;
    result.recall = f1;
    result.f1 = f1;
    result.cost = cost;
    return result;
}

} // namespace

TEST_CASE("interface kind names round trip") {
    for (InterfaceKind kind : {InterfaceKind::Html, InterfaceKind::Rag,
                               InterfaceKind::Mcp, InterfaceKind::Nlweb})
        CHECK(interface_from_string(to_string(kind)) == kind);
    CHECK(to_string(InterfaceKind::Nlweb) == "nlweb");
    CHECK_THROWS_AS(interface_from_string("gopher"), ConfigError);
}

TEST_CASE("load_tasks parses retrieval and transactional tasks") {
    TempFile file(R"({"task_id":"R1","category":"specific","prompt":"find it","gold":{"urls":["HTTP://shop1.webmall.local:80/product/D-003/"]}}
{"task_id":"X1","category":"transactional","prompt":"buy it","gold":{"state":{"carts":{"shop1":{"D-003":1}},"orders":{}}}}
{"task_id":"E1","category":"vague","prompt":"none exist","empty_ok":true,"gold":{"urls":[]}}
)");
    std::vector<TaskSpec> tasks = load_tasks(file.path);
    REQUIRE(tasks.size() == 3);

    CHECK(tasks[0].task_id == "R1");
    CHECK_FALSE(tasks[0].transactional);
    REQUIRE(tasks[0].gold_urls.size() == 1);
    // Normalized at load time.
    CHECK(tasks[0].gold_urls[0] == "http://shop1.webmall.local/product/D-003");

    CHECK(tasks[1].transactional);
    CHECK(tasks[1].gold_state.carts.at("shop1").at("D-003") == 1);
    CHECK(tasks[1].gold_urls.empty());

    CHECK(tasks[2].empty_answer_ok);
    CHECK(tasks[2].gold_urls.empty());
}

TEST_CASE("load_tasks rejects malformed records with the line number") {
    SUBCASE("missing gold") {
        TempFile file(R"({"task_id":"B1","category":"specific","prompt":"x"}
)");
        CHECK_THROWS_WITH_AS(load_tasks(file.path),
                             doctest::Contains(":1"), TaskError);
    }
    SUBCASE("empty gold urls without empty_ok") {
        TempFile file(R"({"task_id":"B2","category":"specific","prompt":"x","gold":{"urls":[]}}
)");
        CHECK_THROWS_AS(load_tasks(file.path), TaskError);
    }
    SUBCASE("bad json on a later line") {
        TempFile file(R"({"task_id":"G1","category":"specific","prompt":"x","gold":{"urls":["http://shop1.webmall.local/product/D-001"]}}
garbage
)");
        CHECK_THROWS_WITH_AS(load_tasks(file.path),
                             doctest::Contains(":2"), TaskError);
    }
    SUBCASE("duplicate task ids") {
        TempFile file(R"({"task_id":"D1","category":"specific","prompt":"x","gold":{"urls":["http://shop1.webmall.local/product/D-001"]}}
{"task_id":"D1","category":"specific","prompt":"y","gold":{"urls":["http://shop1.webmall.local/product/D-002"]}}
)");
        CHECK_THROWS_AS(load_tasks(file.path), TaskError);
    }
}

TEST_CASE("transcript jsonl round trips exactly") {
    Transcript transcript;
    transcript.task_id = "R1";
    transcript.interface_kind = InterfaceKind::Mcp;
    transcript.model = "scripted";
    transcript.steps.push_back({0, "obs one", R"({"type":"finish"})",
                                R"({"ok":true})", 120, 16, true});
    transcript.steps.push_back({1, "obs two", R"({"type":"click"})",
                                R"({"error":"nope"})", 90, 8, false});
    transcript.input_tokens = 210;
    transcript.output_tokens = 24;
    transcript.wall_seconds = 1.25;
    transcript.answer.urls = {"http://shop1.webmall.local/product/D-003"};
    transcript.answer.done = true;
    transcript.final_state.carts["shop1"] = {{"D-003", 1}};
    transcript.error = "";
    transcript.add_observed("http://shop1.webmall.local/product/D-003");
    transcript.add_observed("http://shop1.webmall.local/product/D-001");
    transcript.add_observed("http://shop1.webmall.local/product/D-003");

    // Observed URLs stay sorted and unique.
    REQUIRE(transcript.observed_urls.size() == 2);
    CHECK(transcript.observed_urls[0] == "http://shop1.webmall.local/product/D-001");
    CHECK(transcript.observed("http://shop1.webmall.local/product/D-003"));
    CHECK_FALSE(transcript.observed("http://shop1.webmall.local/product/D-999"));

    std::string serialized = transcript_to_jsonl(transcript);
    Transcript parsed = transcript_from_jsonl(serialized);

    CHECK(parsed.task_id == transcript.task_id);
    CHECK(parsed.interface_kind == transcript.interface_kind);
    CHECK(parsed.model == transcript.model);
    REQUIRE(parsed.steps.size() == 2);
    CHECK(parsed.steps[0].observation == "obs one");
    CHECK(parsed.steps[0].action_json == R"({"type":"finish"})");
    CHECK(parsed.steps[1].valid == false);
    CHECK(parsed.steps[1].input_tokens == 90);
    CHECK(parsed.input_tokens == 210);
    CHECK(parsed.output_tokens == 24);
    CHECK(parsed.wall_seconds == doctest::Approx(1.25));
    CHECK(parsed.answer.urls == transcript.answer.urls);
    CHECK(parsed.answer.done);
    CHECK(parsed.final_state == transcript.final_state);
    CHECK(parsed.observed_urls == transcript.observed_urls);
    CHECK(parsed.error.empty());

    // Serializing the parse reproduces the bytes.
    CHECK(transcript_to_jsonl(parsed) == serialized);
}

TEST_CASE("score_retrieval conventions") {
    using V = std::vector<std::string>;
    const std::string a = "http://shop1.webmall.local/product/A";
    const std::string b = "http://shop1.webmall.local/product/B";
    const std::string c = "http://shop1.webmall.local/product/C";
    const std::string d = "http://shop1.webmall.local/product/D";

    SUBCASE("perfect match") {
        Score score = score_retrieval({a, b}, {b, a});
        CHECK(score.cr == 1.0);
        CHECK(score.precision == 1.0);
        CHECK(score.recall == 1.0);
        CHECK(score.f1 == 1.0);
    }
    SUBCASE("partial overlap") {
        Score score = score_retrieval({a, b, c}, {b, c, d});
        CHECK(score.cr == 0.0);
        CHECK(score.precision == doctest::Approx(2.0 / 3.0));
        CHECK(score.recall == doctest::Approx(2.0 / 3.0));
        CHECK(score.f1 == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("both empty is a success") {
        Score score = score_retrieval({}, {});
        CHECK(score.cr == 1.0);
        CHECK(score.f1 == 1.0);
    }
    SUBCASE("one side empty scores zero") {
        Score empty_answer = score_retrieval({}, {a});
        CHECK(empty_answer.cr == 0.0);
        CHECK(empty_answer.precision == 0.0);
        CHECK(empty_answer.recall == 0.0);
        CHECK(empty_answer.f1 == 0.0);

        Score empty_gold = score_retrieval(V{a}, V{});
        CHECK(empty_gold.cr == 0.0);
        CHECK(empty_gold.f1 == 0.0);
    }
    SUBCASE("duplicates and URL variants collapse") {
        Score score = score_retrieval(
            {"HTTP://shop1.webmall.local:80/product/A/", a, a}, {a});
        CHECK(score.cr == 1.0);
        CHECK(score.precision == 1.0);
    }
    SUBCASE("unparseable strings compare literally") {
        Score score = score_retrieval({"not a url"}, {"not a url"});
        CHECK(score.cr == 1.0);
    }
}

TEST_CASE("score_transaction compares canonical states") {
    StateSnapshot gold;
    gold.carts["shop1"] = {{"D-003", 1}};

    SUBCASE("exact match") {
        StateSnapshot state = gold;
        Score score = score_transaction(state, gold);
        CHECK(score.cr == 1.0);
        CHECK(score.f1 == 1.0);
    }
    SUBCASE("empty cart entries do not break equality") {
        StateSnapshot state = gold;
        state.carts["shop2"] = {};
        state.orders["shop3"] = {};
        CHECK(score_transaction(state, gold).cr == 1.0);
    }
    SUBCASE("wrong quantity fails CR but earns no partial credit either") {
        StateSnapshot state;
        state.carts["shop1"] = {{"D-003", 2}};
        Score score = score_transaction(state, gold);
        CHECK(score.cr == 0.0);
        CHECK(score.f1 == 0.0);
    }
    SUBCASE("extra item keeps recall but costs precision") {
        StateSnapshot state = gold;
        state.carts["shop2"] = {{"D-017", 1}};
        Score score = score_transaction(state, gold);
        CHECK(score.cr == 0.0);
        CHECK(score.precision == doctest::Approx(0.5));
        CHECK(score.recall == doctest::Approx(1.0));
    }
    SUBCASE("order lists compare as multisets") {
        StateSnapshot two_orders;
        two_orders.orders["shop2"] = {{{"D-017", 1}}, {{"D-025", 2}}};
        StateSnapshot swapped;
        swapped.orders["shop2"] = {{{"D-025", 2}}, {{"D-017", 1}}};
        CHECK(score_transaction(swapped, two_orders).cr == 1.0);
    }
    SUBCASE("both empty is a success") {
        Score score = score_transaction({}, {});
        CHECK(score.cr == 1.0);
        CHECK(score.f1 == 1.0);
    }
    SUBCASE("cart and order lines are distinct elements") {
        StateSnapshot ordered;
        ordered.orders["shop1"] = {{{"D-003", 1}}};
        Score score = score_transaction(ordered, gold);
        CHECK(score.cr == 0.0);
        CHECK(score.f1 == 0.0);
    }
}

TEST_CASE("pricing and cost") {
    PricingTable pricing = PricingTable::defaults();
    CHECK(pricing.has("gpt-4.1"));
    CHECK(pricing.has("gpt-4.1-2025-04-14"));
    CHECK(pricing.has("scripted"));

    SUBCASE("known rate math") {
        // 100k input at $2/MTok plus 10k output at $8/MTok.
        CHECK(compute_cost(100000, 10000, "gpt-4.1", pricing) == 0.28);
        CHECK(compute_cost(0, 0, "gpt-4.1", pricing) == 0.0);
        CHECK(compute_cost(1000, 0, "scripted", pricing) == doctest::Approx(0.001));
    }
    SUBCASE("unknown model throws") {
        CHECK_THROWS_AS(compute_cost(1, 1, "mystery-lm", pricing), EvalError);
    }
    SUBCASE("file overlay wins over defaults") {
        TempFile file(R"({"gpt-4.1":{"input":4.0,"output":16.0},"local-llm":{"input":0.5,"output":0.5}})");
        pricing.load_file(file.path);
        CHECK(compute_cost(1000000, 0, "gpt-4.1", pricing) == 4.0);
        CHECK(pricing.has("local-llm"));
        CHECK(pricing.has("gpt-5")); // defaults survive
    }
    SUBCASE("bad pricing files are rejected") {
        TempFile not_object("[1,2]");
        CHECK_THROWS_AS(PricingTable::from_file(not_object.path), ConfigError);
        TempFile missing_rate(R"({"m":{"input":1.0}})");
        CHECK_THROWS_AS(PricingTable::from_file(missing_rate.path), ConfigError);
        PricingRate zero_rate{0.0, 1.0};
        CHECK_THROWS_AS(pricing.set("free", zero_rate), ConfigError);
    }
}

TEST_CASE("false negative classification partitions the missed set") {
    std::vector<std::string> missed = {
        "http://shop1.webmall.local/product/A",
        "http://shop2.webmall.local/product/B",
        "http://shop3.webmall.local/product/C"};
    std::vector<std::string> observed = {
        "HTTP://shop1.webmall.local:80/product/A",
        "http://shop4.webmall.local/product/Z"};

    std::map<std::string, std::string> labels =
        classify_false_negatives(missed, observed);
    REQUIRE(labels.size() == missed.size());
    CHECK(labels.at("http://shop1.webmall.local/product/A") == "retrieved");
    CHECK(labels.at("http://shop2.webmall.local/product/B") == "non-retrieved");
    CHECK(labels.at("http://shop3.webmall.local/product/C") == "non-retrieved");
    for (const auto& [url, label] : labels)
        CHECK((label == "retrieved" || label == "non-retrieved"));

    CHECK(classify_false_negatives({}, observed).empty());
}

TEST_CASE("score_task assembles the full result") {
    PricingTable pricing = PricingTable::defaults();

    TaskSpec task;
    task.task_id = "R1";
    task.category = "specific";
    task.prompt = "find";
    task.gold_urls = {"http://shop1.webmall.local/product/D-003",
                      "http://shop1.webmall.local/product/D-001"};

    Transcript transcript;
    transcript.task_id = "R1";
    transcript.interface_kind = InterfaceKind::Rag;
    transcript.model = "scripted";
    transcript.input_tokens = 2000;
    transcript.output_tokens = 100;
    transcript.wall_seconds = 0.5;
    transcript.answer.urls = {"http://shop1.webmall.local/product/D-003"};
    transcript.add_observed("http://shop1.webmall.local/product/D-001");

    TaskResult result = score_task(task, transcript, pricing);
    CHECK(result.task_id == "R1");
    CHECK(result.interface_kind == "rag");
    CHECK(result.cr == 0.0);
    CHECK(result.precision == 1.0);
    CHECK(result.recall == 0.5);
    CHECK(result.cost == doctest::Approx(0.0021));
    // The missed URL was seen in a search result, so it is a retrieval miss
    // the agent did reach.
    CHECK(result.fn_classification.at("http://shop1.webmall.local/product/D-001") ==
          "retrieved");

    SUBCASE("task result json codec round trips") {
        TaskResult parsed = task_result_from_json(task_result_to_json(result));
        CHECK(parsed.task_id == result.task_id);
        CHECK(parsed.interface_kind == result.interface_kind);
        CHECK(parsed.f1 == result.f1);
        CHECK(parsed.fn_classification == result.fn_classification);
        CHECK(parsed.returned_urls == result.returned_urls);
    }

    SUBCASE("transactional scoring uses the final state") {
        TaskSpec buy;
        buy.task_id = "T9";
        buy.category = "transactional";
        buy.transactional = true;
        buy.gold_state.carts["shop1"] = {{"D-003", 1}};

        Transcript done = transcript;
        done.answer.urls.clear();
        done.answer.done = true;
        done.final_state.carts["shop1"] = {{"D-003", 1}};
        TaskResult bought = score_task(buy, done, pricing);
        CHECK(bought.cr == 1.0);
        CHECK(bought.fn_classification.empty());
        CHECK(bought.returned_urls.empty());
    }
}

TEST_CASE("aggregate builds micro cells and macro interface rows") {
    std::vector<TaskResult> results;
    // html: model-a scores 1.0 and 0.5, model-b scores 0.0.
    results.push_back(make_result("t1", "html", "model-a", 1.0, 0.10));
    results.push_back(make_result("t2", "html", "model-a", 0.5, 0.30, "vague"));
    results.push_back(make_result("t1", "html", "model-b", 0.0, 0.02));
    // rag: one model.
    results.push_back(make_result("t1", "rag", "model-a", 1.0, 0.05));

    Report report = aggregate(results);

    REQUIRE(report.cells.size() == 3);
    // Interface display order is fixed: html before rag.
    CHECK(report.cells[0].interface_kind == "html");
    CHECK(report.cells[0].model == "model-a");
    CHECK(report.cells[0].tasks == 2);
    CHECK(report.cells[0].f1 == doctest::Approx(0.75));
    CHECK(report.cells[0].cost == doctest::Approx(0.20));
    CHECK(report.cells[1].model == "model-b");
    CHECK(report.cells[2].interface_kind == "rag");

    REQUIRE(report.interfaces.size() == 2);
    CHECK(report.interfaces[0].interface_kind == "html");
    CHECK(report.interfaces[0].models == 2);
    // Macro mean over model cells: (0.75 + 0.0) / 2.
    CHECK(report.interfaces[0].f1 == doctest::Approx(0.375));
    CHECK(report.interfaces[1].interface_kind == "rag");
    CHECK(report.interfaces[1].f1 == doctest::Approx(1.0));

    CHECK(report.by_category.count("specific"));
    CHECK(report.by_category.count("vague"));
    CHECK(report.by_category.at("vague")[0].tasks == 1);

    CHECK_THROWS_AS(aggregate({}), EvalError);

    SUBCASE("macro averaging is the unweighted mean of model cells") {
        std::vector<TaskResult> rows;
        double values[] = {0.86, 0.96, 0.93, 0.91};
        int i = 0;
        for (double f1 : values)
            rows.push_back(make_result("t1", "rag", "model-" + std::to_string(i++), f1, 0.0));
        Report macro = aggregate(rows);
        REQUIRE(macro.interfaces.size() == 1);
        CHECK(macro.interfaces[0].f1 == doctest::Approx(0.915).epsilon(1e-9));
    }

    SUBCASE("report json round trips") {
        Report parsed = report_from_json(report_to_json(report));
        CHECK(parsed == report);
    }

    SUBCASE("renderers cover every cell") {
        std::string markdown = render_markdown(report);
        CHECK(markdown.find("| html | model-a | 2 |") != std::string::npos);
        CHECK(markdown.find("macro-averaged") != std::string::npos);
        CHECK(markdown.find("Task set: vague") != std::string::npos);

        std::string csv = render_scatter_csv(report);
        CHECK(csv.find("interface,model,cost,f1") == 0);
        CHECK(csv.find("html,model-a,") != std::string::npos);
        CHECK(csv.find("rag,model-a,") != std::string::npos);
    }

    SUBCASE("render_report writes the three artifacts") {
        std::string dir = (std::filesystem::temp_directory_path() /
                           ("report_test_" + std::to_string(::getpid())))
                              .string();
        render_report(report, dir);
        CHECK(std::filesystem::exists(dir + "/report.json"));
        CHECK(std::filesystem::exists(dir + "/report.md"));
        CHECK(std::filesystem::exists(dir + "/scatter.csv"));
        Report reread =
            report_from_json(json::parse(util::read_file(dir + "/report.json")));
        CHECK(reread == report);
        std::filesystem::remove_all(dir);
    }
}
