#pragma once

#include "webmall/catalog.hpp"
#include "webmall/commerce.hpp"
#include "webmall/policy.hpp"
#include "webmall/search_index.hpp"
#include "webmall/server.hpp"
#include "webmall/tasks.hpp"
#include "webmall/transcript.hpp"

#include <memory>
#include <string>

namespace webmall {

// Everything a run needs to reach the environment. The commerce engine must
// be the one behind the served shops, so transactional state is shared
// between interfaces and the final snapshot. rag_index is only consulted by
// RAG runs.
struct AgentEnvironment {
    std::shared_ptr<const Catalog> catalog;
    const UrlResolver* resolver = nullptr;
    CommerceEngine* commerce = nullptr;
    const SearchIndex* rag_index = nullptr;
};

struct RunOptions {
    std::string model = "scripted";
    int max_steps_html = 40;
    int max_steps_tools = 20;
};

// Built-in instructions handed to the policy for one interface.
std::string task_system_prompt(InterfaceKind kind);

// Drives one task with one policy over one interface and returns the full
// transcript. The runner owns session plumbing: it creates a default
// commerce session up front, captures session tokens out of tool results,
// and substitutes ${session} / ${session:shopN} placeholders into actions
// before executing them. Actions outside the interface's vocabulary are
// recorded as invalid and not executed. A policy or transport failure sets
// transcript.error and returns what was collected so far.
Transcript run_agent(InterfaceKind kind, const TaskSpec& task, Policy& policy,
                     const AgentEnvironment& env, const RunOptions& options = {});

} // namespace webmall
