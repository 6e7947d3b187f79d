// Release gate. Each check prints one [PASS]/[FAIL] line; the binary exits
// non-zero if anything failed. The live-endpoint smoke check is skipped
// unless LLM_BASE_URL and LLM_MODEL are set.
#include "webmall/agents.hpp"
#include "webmall/catalog.hpp"
#include "webmall/cli_commands.hpp"
#include "webmall/crawler.hpp"
#include "webmall/embedding.hpp"
#include "webmall/errors.hpp"
#include "webmall/mcp_server.hpp"
#include "webmall/nlweb_server.hpp"
#include "webmall/policy.hpp"
#include "webmall/report.hpp"
#include "webmall/scoring.hpp"
#include "webmall/search_index.hpp"
#include "webmall/server.hpp"
#include "webmall/tasks.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace webmall;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CheckFailure {
    std::string message;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw CheckFailure{message};
}

struct Gate {
    int failed = 0;

    void run(const std::string& name, const std::function<void()>& body) {
        auto start = std::chrono::steady_clock::now();
        try {
            body();
            double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
            std::ostringstream line;
            line.setf(std::ios::fixed);
            line.precision(1);
            line << "[PASS] " << name << " (" << secs << "s)";
            std::cout << line.str() << std::endl;
        } catch (const CheckFailure& f) {
            std::cout << "[FAIL] " << name << ": " << f.message << std::endl;
            ++failed;
        } catch (const std::exception& e) {
            std::cout << "[FAIL] " << name << ": unexpected exception: "
                      << e.what() << std::endl;
            ++failed;
        }
    }

    void skip(const std::string& name, const std::string& why) {
        std::cout << "[SKIP] " << name << ": " << why << std::endl;
    }
};

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() /
                   ("webmall-gate-" + std::to_string(::getpid()) + "-" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// Retrieval scoring against an independent set-arithmetic oracle.

struct OracleScore {
    double cr, precision, recall, f1;
};

OracleScore oracle_retrieval(const std::vector<std::string>& returned,
                             const std::vector<std::string>& gold) {
    std::set<std::string> r, g;
    for (const std::string& u : returned) r.insert(normalize_url(u));
    for (const std::string& u : gold) g.insert(normalize_url(u));
    if (r.empty() && g.empty()) return {1.0, 1.0, 1.0, 1.0};
    if (r.empty() || g.empty()) return {0.0, 0.0, 0.0, 0.0};
    std::size_t inter = 0;
    for (const std::string& u : r) inter += g.count(u);
    double p = double(inter) / double(r.size());
    double rec = double(inter) / double(g.size());
    double f1 = (p + rec > 0.0) ? 2.0 * p * rec / (p + rec) : 0.0;
    return {r == g ? 1.0 : 0.0, p, rec, f1};
}

void check_retrieval_scoring() {
    auto start = std::chrono::steady_clock::now();
    // Mix canonical URLs with spellings that normalize onto them, so the
    // scorer's canonicalization and deduplication are both exercised.
    const std::vector<std::string> pool = {
        "http://shop1.webmall.local/product/D-001",
        "HTTP://SHOP1.WEBMALL.LOCAL:80/product/D-001",
        "http://shop1.webmall.local/product/D-002",
        "http://shop1.webmall.local/product/D-002#reviews",
        "http://shop2.webmall.local/product/D-017",
        "http://shop2.webmall.local/product/D-018",
        "http://shop3.webmall.local/product/D-031",
        "http://shop3.webmall.local/product/%44-032",
        "http://shop4.webmall.local/product/D-046",
        "http://shop4.webmall.local/product/D-047",
        "http://shop4.webmall.local/product/D-048",
        "http://shop1.webmall.local/product/D-005",
    };
    std::mt19937_64 rng(20260816);
    std::uniform_int_distribution<std::size_t> size_dist(0, 6);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    auto draw = [&]() {
        std::vector<std::string> out(size_dist(rng));
        for (std::string& u : out) u = pool[pick(rng)];
        return out;
    };
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<std::string> returned = draw();
        std::vector<std::string> gold = draw();
        OracleScore want = oracle_retrieval(returned, gold);
        Score got = score_retrieval(returned, gold);
        require(std::fabs(got.precision - want.precision) <= 1e-12 &&
                    std::fabs(got.recall - want.recall) <= 1e-12 &&
                    std::fabs(got.f1 - want.f1) <= 1e-12,
                "trial " + std::to_string(trial) + " disagrees with the oracle");
    }

    // CR must coincide with exact set equality; check every subset pair of a
    // five-URL universe, both sides.
    const std::vector<std::string> universe(pool.begin(), pool.begin() + 5);
    for (unsigned a = 0; a < 32; ++a) {
        for (unsigned b = 0; b < 32; ++b) {
            std::vector<std::string> returned, gold;
            for (unsigned bit = 0; bit < 5; ++bit) {
                if (a & (1u << bit)) returned.push_back(universe[bit]);
                if (b & (1u << bit)) gold.push_back(universe[bit]);
            }
            std::set<std::string> rs, gs;
            for (const std::string& u : returned) rs.insert(normalize_url(u));
            for (const std::string& u : gold) gs.insert(normalize_url(u));
            double want = rs == gs ? 1.0 : 0.0;
            require(score_retrieval(returned, gold).cr == want,
                    "CR mismatch on subset pair " + std::to_string(a) + "/" +
                        std::to_string(b));
        }
    }
    require(elapsed_since(start) < 10.0, "scoring sweep exceeded 10 seconds");
}

// ---------------------------------------------------------------------------
// Cost arithmetic.

void check_cost_arithmetic() {
    PricingTable pricing = PricingTable::defaults();
    double cost = compute_cost(100000, 10000, "gpt-4.1", pricing);
    require(cost == 0.28, "100k in + 10k out at $2/$8 per MTok should be exactly "
                          "$0.28, got " + std::to_string(cost));

    PricingRate rate = pricing.rate("gpt-4.1");
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long long> tokens(0, 5'000'000);
    for (int trial = 0; trial < 1000; ++trial) {
        long long in_a = tokens(rng), out_a = tokens(rng);
        long long in_b = tokens(rng), out_b = tokens(rng);
        double direct = (double(in_a) * rate.input_per_mtok +
                         double(out_a) * rate.output_per_mtok) /
                        1e6;
        double got = compute_cost(in_a, out_a, "gpt-4.1", pricing);
        require(std::fabs(got - direct) <= 1e-12,
                "cost formula mismatch at trial " + std::to_string(trial));
        double joint = compute_cost(in_a + in_b, out_a + out_b, "gpt-4.1", pricing);
        double split = got + compute_cost(in_b, out_b, "gpt-4.1", pricing);
        require(std::fabs(joint - split) <= 1e-9,
                "cost is not additive at trial " + std::to_string(trial));
    }
}

// ---------------------------------------------------------------------------
// Vector search against an exhaustive scan.

void check_search_exactness() {
    auto start = std::chrono::steady_clock::now();
    auto catalog = load_catalog("data/demo_catalog.jsonl");
    auto embedder = std::make_shared<HashingEmbedder>(256);
    SearchIndex index(embedder);
    std::set<std::string> vocab_set;
    for (const Offer& offer : catalog->offers()) {
        index.add(offer.offer_id, offer.shop_id, offer.url, offer.title,
                  offer_index_text(offer));
        for (const std::string& tok :
             util::tokenize(offer.title + " " + offer.description))
            vocab_set.insert(tok);
    }
    require(index.size() == 60, "expected the 60-offer demo catalog");
    std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());

    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> words(1, 4);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    const std::size_t ks[] = {1, 5, 20};

    for (int trial = 0; trial < 200; ++trial) {
        std::string query;
        std::size_t n = words(rng);
        for (std::size_t w = 0; w < n; ++w) {
            if (w) query += ' ';
            query += vocab[pick(rng)];
        }
        // Exhaustive scan: cosine against every document, ordered by score
        // descending with doc_id as the tie break.
        std::vector<float> q = embedder->embed(query);
        std::vector<std::pair<float, std::string>> scan;
        for (const IndexedDoc& doc : index.docs())
            scan.emplace_back(cosine_similarity(q, doc.embedding), doc.doc_id);
        std::sort(scan.begin(), scan.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t k : ks) {
            SearchOptions options;
            options.k = k;
            std::vector<SearchHit> hits = index.search(query, options);
            std::size_t expect = std::min(k, scan.size());
            require(hits.size() == expect,
                    "wrong result count for \"" + query + "\" at k=" +
                        std::to_string(k));
            for (std::size_t i = 0; i < expect; ++i) {
                require(hits[i].doc_id == scan[i].second,
                        "rank " + std::to_string(i) + " for \"" + query +
                            "\" returned " + hits[i].doc_id + ", scan says " +
                            scan[i].second);
                require(std::fabs(hits[i].score - scan[i].first) <= 1e-5f,
                        "score drift at rank " + std::to_string(i) + " for \"" +
                            query + "\"");
            }
        }
    }
    require(elapsed_since(start) < 30.0, "search sweep exceeded 30 seconds");
}

// ---------------------------------------------------------------------------
// Protocol envelopes and fuzzing over live endpoints.

bool valid_envelope(const json& body) {
    if (!body.is_object()) return false;
    if (body.value("jsonrpc", "") != "2.0") return false;
    if (!body.contains("id")) return false;
    bool has_result = body.contains("result");
    bool has_error = body.contains("error");
    if (has_result == has_error) return false;
    if (has_error) {
        const json& err = body["error"];
        if (!err.is_object()) return false;
        if (!err.contains("code") || !err["code"].is_number_integer())
            return false;
        if (!err.contains("message") || !err["message"].is_string())
            return false;
    }
    return true;
}

void check_protocol_robustness() {
    auto catalog = load_catalog("data/demo_catalog.jsonl");
    TestbedServer server(*catalog, 0, "");
    server.start();

    std::vector<std::pair<std::string, std::string>> targets;
    for (const ShopEndpoints& ep : server.endpoints()) {
        targets.emplace_back(ep.local_url, "/mcp");
        targets.emplace_back(ep.local_url, "/nlweb");
    }

    auto post = [&](std::size_t target, const std::string& body) {
        httplib::Client client(targets[target].first);
        client.set_read_timeout(10, 0);
        auto res = client.Post(targets[target].second, body, "application/json");
        require(res != nullptr, "endpoint dropped the connection");
        json parsed = json::parse(res->body, nullptr, false);
        require(!parsed.is_discarded(), "response body is not JSON");
        require(valid_envelope(parsed), "response is not a JSON-RPC envelope: " +
                                            res->body.substr(0, 200));
        return parsed;
    };

    json reply = post(0, R"({"jsonrpc":"2.0","id":1,"method":"no/such"})");
    require(reply["error"]["code"] == -32601, "unknown method must be -32601");
    reply = post(0, R"({"jsonrpc":"2.0","id":2,"method":"tools/call","params":{}})");
    require(reply["error"]["code"] == -32602, "missing tool name must be -32602");
    reply = post(0, "{not json at all");
    require(reply["error"]["code"] == -32700, "parse failure must be -32700");

    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> shape(0, 9);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<std::size_t> target(0, targets.size() - 1);
    auto garbage = [&](std::size_t len) {
        std::string s;
        for (std::size_t i = 0; i < len; ++i) s += char(byte(rng));
        return s;
    };
    std::uniform_int_distribution<int> printable(0x20, 0x7e);
    auto ascii_garbage = [&](std::size_t len) {
        std::string s;
        for (std::size_t i = 0; i < len; ++i) s += char(printable(rng));
        return s;
    };
    for (int trial = 0; trial < 1000; ++trial) {
        std::string body;
        switch (shape(rng)) {
        case 0: body = garbage(1 + trial % 64); break;
        case 1: body = ""; break;
        case 2: body = "[1,2,3]"; break;
        case 3: body = "\"just a string\""; break;
        case 4: body = R"({"jsonrpc":"1.0","id":1,"method":"tools/list"})"; break;
        case 5: body = R"({"jsonrpc":"2.0","id":{},"method":"tools/list"})"; break;
        case 6: body = R"({"jsonrpc":"2.0","id":1,"method":7})"; break;
        case 7:
            body = R"({"jsonrpc":"2.0","id":1,"method":"tools/call","params":)" +
                   json(ascii_garbage(8)).dump() + "}";
            break;
        case 8:
            body = R"({"jsonrpc":"2.0","id":1,"method":"tools/call","params":{"name":)" +
                   json(ascii_garbage(6)).dump() + R"(,"arguments":{"query":9}}})";
            break;
        default:
            body = R"({"jsonrpc":"2.0","id":)" + std::to_string(trial) +
                   R"(,"method":"tools/call","params":{"name":"search_products","arguments":{)" +
                   json(ascii_garbage(4)).dump() + ":null}}}";
            break;
        }
        post(target(rng), body);
    }
    server.stop();
}

// ---------------------------------------------------------------------------
// NLWeb ask mirrors each shop's own search tool.

void check_interface_parity() {
    auto catalog = load_catalog("data/demo_catalog.jsonl");
    CommerceEngine commerce(*catalog);

    struct ShopShape {
        std::string shop;
        std::string tool;
        std::string query_key;
        std::string cap_key;
        std::string list_key;
        std::string id_key;
    };
    const std::vector<ShopShape> shapes = {
        {"shop1", "search_products", "query", "max_results", "items", "product_id"},
        {"shop2", "find_offers", "q", "top_k", "results", "id"},
        {"shop3", "product_search", "text", "limit", "hits", "sku"},
        {"shop4", "query_catalog", "keywords", "n", "matches", "ref"},
    };

    std::set<std::string> vocab_set;
    for (const Offer& offer : catalog->offers())
        for (const std::string& tok :
             util::tokenize(offer.title + " " + offer.description))
            vocab_set.insert(tok);
    std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
    std::mt19937_64 rng(314159);
    std::uniform_int_distribution<std::size_t> words(1, 3);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);

    long long rpc_id = 0;
    auto call = [&](ToolRegistry& registry, const std::string& tool,
                    const json& args) {
        json request = {{"jsonrpc", "2.0"},
                        {"id", ++rpc_id},
                        {"method", "tools/call"},
                        {"params", {{"name", tool}, {"arguments", args}}}};
        json reply = json::parse(registry.handle_request(request.dump()));
        require(valid_envelope(reply) && reply.contains("result"),
                tool + " did not return a result envelope");
        require(reply["result"].value("isError", true) == false,
                tool + " reported an error");
        return reply["result"]["content"];
    };

    for (const ShopShape& shape : shapes) {
        auto offer_index = std::make_shared<SearchIndex>(
            build_offer_index(*catalog, shape.shop,
                              std::make_shared<HashingEmbedder>(256)));
        ToolRegistry mcp =
            build_mcp_tools(shape.shop, *catalog, commerce, offer_index);
        ToolRegistry nlweb =
            build_nlweb_tools(shape.shop, *catalog, commerce, offer_index);

        for (int trial = 0; trial < 50; ++trial) {
            std::string query;
            std::size_t n = words(rng);
            for (std::size_t w = 0; w < n; ++w) {
                if (w) query += ' ';
                query += vocab[pick(rng)];
            }

            json native = call(mcp, shape.tool,
                               {{shape.query_key, query}, {shape.cap_key, 10}});
            std::vector<std::string> native_ids;
            for (const json& row : native[shape.list_key])
                native_ids.push_back(row[shape.id_key].get<std::string>());

            json asked = call(nlweb, "ask", {{"query", query}, {"limit", 10}});
            std::vector<std::string> ask_ids;
            for (const json& product : asked) {
                const Offer* offer =
                    catalog->offer_by_url(product["url"].get<std::string>());
                require(offer != nullptr, "ask returned an unknown product URL");
                ask_ids.push_back(offer->offer_id);
            }

            require(native_ids == ask_ids,
                    shape.shop + " diverged on \"" + query + "\": native " +
                        json(native_ids).dump() + " vs ask " +
                        json(ask_ids).dump());
        }
    }
}

// ---------------------------------------------------------------------------
// Golden scripted runs across all four interfaces.

void check_golden_runs() {
    auto start = std::chrono::steady_clock::now();
    fs::path out = fresh_dir("golden");
    RunArgs args;
    args.catalog_path = "data/demo_catalog.jsonl";
    args.tasks_path = "data/sample_tasks.jsonl";
    args.interfaces = "all";
    args.policy = "script:data/scripts";
    args.out_dir = out.string();
    require(cmd_run(args) == 0, "run command returned non-zero");

    std::string content = util::read_file((out / "results.jsonl").string());
    std::istringstream in(content);
    std::string line;
    std::map<std::pair<std::string, std::string>, double> cr;
    while (std::getline(in, line)) {
        if (util::trim(line).empty()) continue;
        TaskResult result = task_result_from_json(json::parse(line));
        cr[{result.task_id, result.interface_kind}] = result.cr;
    }
    std::vector<TaskSpec> tasks = load_tasks(args.tasks_path);
    const std::vector<std::string> kinds = {"html", "rag", "mcp", "nlweb"};
    require(cr.size() == tasks.size() * kinds.size(),
            "expected " + std::to_string(tasks.size() * kinds.size()) +
                " results, found " + std::to_string(cr.size()));
    // The three bundled product-finding tasks and three purchase tasks must
    // complete perfectly on every interface; the remaining bundled tasks are
    // held to the same bar.
    for (const std::string& group : {"S1", "S2", "S3", "T1", "T2", "T3"})
        for (const std::string& kind : kinds)
            require(cr.count({group, kind}) == 1, group + " on " + kind +
                                                      " is missing");
    for (const auto& [key, value] : cr)
        require(value == 1.0, key.first + " on " + key.second +
                                  " scored cr=" + std::to_string(value));
    fs::remove_all(out);
    require(elapsed_since(start) < 120.0, "golden runs exceeded 2 minutes");
}

// ---------------------------------------------------------------------------
// False-negative classification.

void check_fn_classification() {
    TaskSpec task;
    task.task_id = "fn";
    task.category = "specific";
    task.prompt = "find";
    task.gold_urls = {"http://shop1.webmall.local/product/D-001",
                      "http://shop1.webmall.local/product/D-002",
                      "http://shop2.webmall.local/product/D-017"};

    Transcript t;
    t.task_id = "fn";
    t.interface_kind = InterfaceKind::Rag;
    t.model = "scripted";
    t.answer.urls = {"http://shop1.webmall.local/product/D-001"};
    // D-002 surfaced in a search step but was never answered; D-017 was
    // never seen at all.
    t.add_observed("http://shop1.webmall.local/product/D-001");
    t.add_observed("http://shop1.webmall.local/product/D-002");

    TaskResult result = score_task(task, t, PricingTable::defaults());
    require(result.fn_classification.size() == 2,
            "exactly the two missed URLs must be classified, got " +
                std::to_string(result.fn_classification.size()));
    require(result.fn_classification.at(
                "http://shop1.webmall.local/product/D-002") == "retrieved",
            "a missed URL the run observed must be 'retrieved'");
    require(result.fn_classification.at(
                "http://shop2.webmall.local/product/D-017") == "non-retrieved",
            "a missed URL the run never saw must be 'non-retrieved'");
    require(result.fn_classification.count(
                "http://shop1.webmall.local/product/D-001") == 0,
            "answered URLs are not false negatives");

    // The labels partition the missed set regardless of spelling variants.
    auto labels = classify_false_negatives(
        {"HTTP://shop1.webmall.local:80/product/D-002",
         "http://shop2.webmall.local/product/D-017"},
        {"http://shop1.webmall.local/product/D-002"});
    require(labels.size() == 2, "classification must cover every missed URL");
    for (const auto& [url, label] : labels)
        require(label == "retrieved" || label == "non-retrieved",
                "unknown label " + label + " for " + url);
}

// ---------------------------------------------------------------------------
// Macro averaging.

void check_macro_average() {
    const double f1s[] = {0.86, 0.96, 0.93, 0.91};
    std::vector<TaskResult> results;
    for (int i = 0; i < 4; ++i) {
        TaskResult r;
        r.task_id = "t" + std::to_string(i);
        r.category = "specific";
        r.interface_kind = "html";
        r.model = "model-" + std::to_string(i);
        r.f1 = f1s[i];
        results.push_back(r);
    }
    Report report = aggregate(results);
    require(report.interfaces.size() == 1, "expected one interface row");
    require(std::fabs(report.interfaces[0].f1 - 0.915) <= 0.0001,
            "macro of 0.86/0.96/0.93/0.91 should be 0.915, got " +
                std::to_string(report.interfaces[0].f1));
}

// ---------------------------------------------------------------------------
// Index command coverage.

void check_index_coverage() {
    fs::path out = fresh_dir("index");
    IndexArgs args;
    args.catalog_path = "data/demo_catalog.jsonl";
    args.out_dir = out.string();
    require(cmd_index(args) == 0, "index command returned non-zero");

    auto catalog = load_catalog("data/demo_catalog.jsonl");
    SearchIndex index = SearchIndex::load((out / "rag_index.jsonl").string(),
                                          std::make_shared<HashingEmbedder>(256));
    std::size_t covered = 0;
    std::vector<std::string> missing;
    for (const Offer& offer : catalog->offers()) {
        if (index.doc_by_id(offer.url))
            ++covered;
        else
            missing.push_back(offer.offer_id);
    }
    require(covered == 60, "crawl reached " + std::to_string(covered) +
                               "/60 offers; missing " + json(missing).dump());
    fs::remove_all(out);
}

// ---------------------------------------------------------------------------
// Optional live-endpoint smoke run.

void check_live_smoke(const std::string& base_url, const std::string& api_key,
                      const std::string& model) {
    auto catalog = load_catalog("data/demo_catalog.jsonl");
    TestbedServer server(*catalog, 0, "");
    server.start();
    UrlResolver resolver = server.resolver();

    std::vector<CrawledPage> pages = crawl_shops(*catalog, resolver);
    SearchIndex rag_index =
        build_rag_index(pages, std::make_shared<HashingEmbedder>(256));

    AgentEnvironment env;
    env.catalog = catalog;
    env.resolver = &resolver;
    env.commerce = &server.commerce();
    env.rag_index = &rag_index;

    std::vector<TaskSpec> tasks = load_tasks("data/sample_tasks.jsonl");
    const TaskSpec* task = nullptr;
    for (const TaskSpec& t : tasks)
        if (t.task_id == "S1") task = &t;
    require(task != nullptr, "sample task S1 not found");

    for (InterfaceKind kind : {InterfaceKind::Html, InterfaceKind::Rag,
                               InterfaceKind::Mcp, InterfaceKind::Nlweb}) {
        LiveChatPolicy policy(base_url, api_key, model);
        Transcript t = run_agent(kind, *task, policy, env);
        require(t.error.empty(),
                to_string(kind) + " run failed: " + t.error);
        require(!t.steps.empty(), to_string(kind) + " produced no steps");
        require(t.input_tokens > 0 && t.output_tokens > 0,
                to_string(kind) + " reported no token usage");
    }
    server.stop();
}

} // namespace

int main() {
    Gate gate;
    gate.run("retrieval scoring matches the set oracle on 10000 random pairs",
             check_retrieval_scoring);
    gate.run("token cost is exact and linear", check_cost_arithmetic);
    gate.run("vector search equals the exhaustive scan on 200 queries",
             check_search_exactness);
    gate.run("every endpoint answers fuzzed requests with a valid envelope",
             check_protocol_robustness);
    gate.run("nlweb ask returns each shop's native search sequence",
             check_interface_parity);
    gate.run("scripted policies complete every sample task on every interface",
             check_golden_runs);
    gate.run("false negatives split into retrieved and non-retrieved",
             check_fn_classification);
    gate.run("interface rows macro-average their model cells",
             check_macro_average);
    gate.run("the index command reaches all 60 demo offers",
             check_index_coverage);

    const char* base_url = std::getenv("LLM_BASE_URL");
    const char* model = std::getenv("LLM_MODEL");
    if (base_url && *base_url && model && *model) {
        const char* key = std::getenv("LLM_API_KEY");
        std::string api_key = key ? key : "";
        gate.run("live chat endpoint completes one task per interface",
                 [&] { check_live_smoke(base_url, api_key, model); });
    } else {
        gate.skip("live chat endpoint completes one task per interface",
                  "LLM_BASE_URL / LLM_MODEL not set");
    }

    if (gate.failed > 0) {
        std::cout << gate.failed << " check(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all checks passed" << std::endl;
    return 0;
}
