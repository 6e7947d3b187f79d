#pragma once

#include "webmall/commerce.hpp"

#include <string>
#include <vector>

namespace webmall {

// One benchmark task. Retrieval tasks carry a gold URL set; transactional
// tasks carry the target commerce state. Exactly one of the two.
struct TaskSpec {
    std::string task_id;
    std::string category; // e.g. specific, vague, cheapest, transactional
    std::string prompt;
    bool transactional = false;
    std::vector<std::string> gold_urls; // normalized at load
    StateSnapshot gold_state;
    bool empty_answer_ok = false; // retrieval task whose gold is legitimately empty
};

// Loads line-JSON task files. Each line:
//   {"task_id":"S1","category":"specific","prompt":"...",
//    "gold":{"urls":["http://shop1.webmall.local/product/D-003"]}}
//   {"task_id":"T1","category":"transactional","prompt":"...",
//    "gold":{"state":{"carts":{"shop1":{"D-003":1}},"orders":{}}}}
// Throws TaskError with the line number on malformed records.
std::vector<TaskSpec> load_tasks(const std::string& path);

} // namespace webmall
