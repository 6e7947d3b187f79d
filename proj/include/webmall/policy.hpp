#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace webmall {

// Everything an agent can decide to do. Which subset is legal depends on
// the interface the agent is driving; the runner enforces that.
struct AgentAction {
    enum class Type { Goto, Click, Fill, Remember, Search, ToolCall, Finish };
    Type type = Type::Finish;

    std::string url;        // Goto
    int link_index = -1;    // Click
    int form_index = -1;    // Fill
    std::map<std::string, std::string> fields; // Fill overrides
    std::string note;       // Remember
    std::string query;      // Search
    int k = 10;             // Search result cap
    std::string shop_id;    // ToolCall target shop
    std::string tool;       // ToolCall tool name
    nlohmann::json args = nlohmann::json::object(); // ToolCall arguments
    std::vector<std::string> answer_urls; // Finish (retrieval)
    bool done = false;      // Finish (transactional)
};

nlohmann::json action_to_json(const AgentAction& action);
AgentAction action_from_json(const nlohmann::json& value); // throws ConfigError

struct PolicyDecision {
    AgentAction action;
    long long input_tokens = 0;
    long long output_tokens = 0;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual void begin_task(const std::string& system_prompt,
                            const std::string& user_prompt,
                            const nlohmann::json& tools) = 0;
    virtual PolicyDecision decide(const std::string& observation) = 0;
};

// Replays decisions from a line-JSON file:
//   {"action":{"type":"search","query":"ryzen","k":5},
//    "usage":{"input_tokens":120,"output_tokens":16}}
// Once exhausted it finishes with an empty answer.
class ScriptedPolicy : public Policy {
public:
    explicit ScriptedPolicy(const std::string& path);
    static ScriptedPolicy from_string(const std::string& content,
                                      const std::string& name = "<inline>");

    void begin_task(const std::string&, const std::string&,
                    const nlohmann::json&) override {}
    PolicyDecision decide(const std::string& observation) override;

    std::size_t remaining() const { return decisions_.size() - next_; }

private:
    ScriptedPolicy() = default;
    void parse(const std::string& content, const std::string& name);

    std::vector<PolicyDecision> decisions_;
    std::size_t next_ = 0;
};

// Talks to a chat-completions endpoint with function calling. Each decide
// sends the running conversation plus the new observation and parses the
// reply (a tool call, or an action object in the content) into an
// AgentAction. Transport or parse failures are retried; after three failed
// attempts the policy throws NetError.
class LiveChatPolicy : public Policy {
public:
    LiveChatPolicy(std::string base_url, std::string api_key, std::string model);

    void begin_task(const std::string& system_prompt,
                    const std::string& user_prompt,
                    const nlohmann::json& tools) override;
    PolicyDecision decide(const std::string& observation) override;

    const std::string& model() const { return model_; }

private:
    std::string base_url_;
    std::string api_key_;
    std::string model_;
    nlohmann::json messages_ = nlohmann::json::array();
    nlohmann::json tools_ = nlohmann::json::array();
    std::string pending_tool_call_id_;
};

// The action vocabulary as chat-API tool declarations for one interface.
nlohmann::json action_tools_for(const std::string& interface_kind);

} // namespace webmall
