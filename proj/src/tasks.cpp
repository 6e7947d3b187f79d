#include "webmall/tasks.hpp"

#include "webmall/errors.hpp"
#include "webmall/server.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace webmall {

using nlohmann::json;

std::vector<TaskSpec> load_tasks(const std::string& path) {
    std::istringstream in(util::read_file(path));
    std::vector<TaskSpec> tasks;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        auto fail = [&](const std::string& message) -> void {
            throw TaskError(path + ":" + std::to_string(line_no) + ": " + message);
        };
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) fail("invalid JSON");

        TaskSpec task;
        if (!record.contains("task_id") || !record["task_id"].is_string())
            fail("task_id must be a string");
        task.task_id = record["task_id"].get<std::string>();
        if (task.task_id.empty()) fail("task_id must be non-empty");
        if (!seen_ids.insert(task.task_id).second)
            fail("duplicate task_id: " + task.task_id);

        if (!record.contains("category") || !record["category"].is_string())
            fail("category must be a string");
        task.category = record["category"].get<std::string>();

        if (!record.contains("prompt") || !record["prompt"].is_string())
            fail("prompt must be a string");
        task.prompt = record["prompt"].get<std::string>();

        if (!record.contains("gold") || !record["gold"].is_object())
            fail("gold must be an object");
        const json& gold = record["gold"];
        bool has_urls = gold.contains("urls");
        bool has_state = gold.contains("state");
        if (has_urls == has_state)
            fail("gold must carry exactly one of urls or state");

        if (has_urls) {
            if (!gold["urls"].is_array()) fail("gold.urls must be an array");
            for (const json& url : gold["urls"]) {
                if (!url.is_string()) fail("gold.urls entries must be strings");
                try {
                    task.gold_urls.push_back(normalize_url(url.get<std::string>()));
                } catch (const UrlError& e) {
                    fail(std::string("gold URL: ") + e.what());
                }
            }
            task.empty_answer_ok = record.value("empty_ok", false);
            if (task.gold_urls.empty() && !task.empty_answer_ok)
                fail("retrieval gold is empty; set empty_ok if intended");
        } else {
            task.transactional = true;
            try {
                task.gold_state = snapshot_from_json(gold["state"]);
            } catch (const json::exception& e) {
                fail(std::string("gold.state: ") + e.what());
            }
        }
        tasks.push_back(std::move(task));
    }
    if (tasks.empty()) throw TaskError(path + ": no tasks");
    return tasks;
}

} // namespace webmall
