#include "webmall/policy.hpp"

#include "webmall/errors.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <httplib.h>
#include <sstream>

namespace webmall {

using nlohmann::json;

json action_to_json(const AgentAction& action) {
    json j = json::object();
    switch (action.type) {
    case AgentAction::Type::Goto:
        j["type"] = "goto";
        j["url"] = action.url;
        break;
    case AgentAction::Type::Click:
        j["type"] = "click";
        j["link"] = action.link_index;
        break;
    case AgentAction::Type::Fill:
        j["type"] = "fill";
        j["form"] = action.form_index;
        j["fields"] = action.fields;
        break;
    case AgentAction::Type::Remember:
        j["type"] = "remember";
        j["note"] = action.note;
        break;
    case AgentAction::Type::Search:
        j["type"] = "search";
        j["query"] = action.query;
        j["k"] = action.k;
        break;
    case AgentAction::Type::ToolCall:
        j["type"] = "tool_call";
        if (!action.shop_id.empty()) j["shop"] = action.shop_id;
        j["tool"] = action.tool;
        j["args"] = action.args;
        break;
    case AgentAction::Type::Finish:
        j["type"] = "finish";
        j["urls"] = action.answer_urls;
        j["done"] = action.done;
        break;
    }
    return j;
}

namespace {

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw ConfigError(std::string("action is missing string field \"") + key + "\"");
    return j[key].get<std::string>();
}

int require_int(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ConfigError(std::string("action is missing integer field \"") + key + "\"");
    return j[key].get<int>();
}

} // namespace

AgentAction action_from_json(const json& value) {
    if (!value.is_object())
        throw ConfigError("action must be a JSON object");
    std::string type = require_string(value, "type");

    AgentAction action;
    if (type == "goto") {
        action.type = AgentAction::Type::Goto;
        action.url = require_string(value, "url");
    } else if (type == "click") {
        action.type = AgentAction::Type::Click;
        action.link_index = require_int(value, "link");
    } else if (type == "fill") {
        action.type = AgentAction::Type::Fill;
        action.form_index = require_int(value, "form");
        if (value.contains("fields")) {
            if (!value["fields"].is_object())
                throw ConfigError("fill action field \"fields\" must be an object");
            for (const auto& [k, v] : value["fields"].items()) {
                if (v.is_string())
                    action.fields[k] = v.get<std::string>();
                else
                    action.fields[k] = v.dump();
            }
        }
    } else if (type == "remember") {
        action.type = AgentAction::Type::Remember;
        action.note = require_string(value, "note");
    } else if (type == "search") {
        action.type = AgentAction::Type::Search;
        action.query = require_string(value, "query");
        if (value.contains("k")) {
            if (!value["k"].is_number_integer())
                throw ConfigError("search action field \"k\" must be an integer");
            action.k = value["k"].get<int>();
        }
    } else if (type == "tool_call") {
        action.type = AgentAction::Type::ToolCall;
        action.tool = require_string(value, "tool");
        if (value.contains("shop")) action.shop_id = require_string(value, "shop");
        if (value.contains("args")) {
            if (!value["args"].is_object())
                throw ConfigError("tool_call action field \"args\" must be an object");
            action.args = value["args"];
        }
    } else if (type == "finish") {
        action.type = AgentAction::Type::Finish;
        if (value.contains("urls")) {
            if (!value["urls"].is_array())
                throw ConfigError("finish action field \"urls\" must be an array");
            for (const json& u : value["urls"]) {
                if (!u.is_string())
                    throw ConfigError("finish action urls must be strings");
                action.answer_urls.push_back(u.get<std::string>());
            }
        }
        if (value.contains("done")) {
            if (!value["done"].is_boolean())
                throw ConfigError("finish action field \"done\" must be a boolean");
            action.done = value["done"].get<bool>();
        }
    } else {
        throw ConfigError("unknown action type \"" + type + "\"");
    }
    return action;
}

ScriptedPolicy::ScriptedPolicy(const std::string& path) {
    parse(util::read_file(path), path);
}

ScriptedPolicy ScriptedPolicy::from_string(const std::string& content,
                                           const std::string& name) {
    ScriptedPolicy policy;
    policy.parse(content, name);
    return policy;
}

void ScriptedPolicy::parse(const std::string& content, const std::string& name) {
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = util::trim(line);
        if (trimmed.empty()) continue;
        json record = json::parse(trimmed, nullptr, false);
        if (record.is_discarded() || !record.is_object())
            throw ConfigError(name + ":" + std::to_string(line_no) +
                              ": script line is not a JSON object");
        if (!record.contains("action"))
            throw ConfigError(name + ":" + std::to_string(line_no) +
                              ": script line has no \"action\"");
        PolicyDecision decision;
        try {
            decision.action = action_from_json(record["action"]);
        } catch (const ConfigError& e) {
            throw ConfigError(name + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (record.contains("usage") && record["usage"].is_object()) {
            const json& usage = record["usage"];
            decision.input_tokens = usage.value("input_tokens", 0LL);
            decision.output_tokens = usage.value("output_tokens", 0LL);
        }
        decisions_.push_back(std::move(decision));
    }
}

PolicyDecision ScriptedPolicy::decide(const std::string&) {
    if (next_ < decisions_.size()) return decisions_[next_++];
    PolicyDecision decision;
    decision.action.type = AgentAction::Type::Finish;
    return decision;
}

LiveChatPolicy::LiveChatPolicy(std::string base_url, std::string api_key,
                               std::string model)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)),
      model_(std::move(model)) {
    if (base_url_.empty()) throw ConfigError("live policy needs a base URL");
    if (model_.empty()) throw ConfigError("live policy needs a model name");
}

void LiveChatPolicy::begin_task(const std::string& system_prompt,
                                const std::string& user_prompt,
                                const json& tools) {
    messages_ = json::array();
    if (!system_prompt.empty())
        messages_.push_back({{"role", "system"}, {"content", system_prompt}});
    messages_.push_back({{"role", "user"}, {"content", user_prompt}});
    tools_ = tools.is_array() ? tools : json::array();
    pending_tool_call_id_.clear();
}

namespace {

// Maps a chat tool call back onto the action vocabulary. Interface-level
// commerce tools (RAG's add_to_cart and friends) arrive under their own
// names and become tool_call actions.
AgentAction action_from_tool_call(const std::string& name, const json& args) {
    static const char* kCoreNames[] = {"goto",   "click",     "fill",  "remember",
                                       "search", "tool_call", "finish"};
    for (const char* core : kCoreNames) {
        if (name == core) {
            json j = args.is_object() ? args : json::object();
            j["type"] = name;
            return action_from_json(j);
        }
    }
    AgentAction action;
    action.type = AgentAction::Type::ToolCall;
    action.tool = name;
    action.args = args.is_object() ? args : json::object();
    if (action.args.contains("shop") && action.args["shop"].is_string())
        action.shop_id = action.args["shop"].get<std::string>();
    return action;
}

} // namespace

PolicyDecision LiveChatPolicy::decide(const std::string& observation) {
    if (pending_tool_call_id_.empty()) {
        messages_.push_back({{"role", "user"}, {"content", observation}});
    } else {
        messages_.push_back({{"role", "tool"},
                             {"tool_call_id", pending_tool_call_id_},
                             {"content", observation}});
        pending_tool_call_id_.clear();
    }

    UrlParts parts = parse_url(base_url_);
    std::string origin = parts.scheme + "://" + parts.authority();
    std::string path = parts.path;
    if (!path.empty() && path.back() == '/') path.pop_back();
    path += "/chat/completions";

    httplib::Client client(origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(180);

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    json request = {{"model", model_}, {"messages", messages_}};
    if (!tools_.empty()) {
        request["tools"] = tools_;
        request["tool_choice"] = "auto";
    }
    std::string body = request.dump();

    std::string last_error;
    for (int attempt = 0; attempt < 3; ++attempt) {
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_error = "no response from " + origin;
            continue;
        }
        if (res->status != 200) {
            last_error = "chat endpoint returned " + std::to_string(res->status);
            continue;
        }
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") ||
            !parsed["choices"].is_array() || parsed["choices"].empty()) {
            last_error = "chat endpoint returned an unexpected payload";
            continue;
        }
        const json& message = parsed["choices"][0].value("message", json::object());

        PolicyDecision decision;
        if (parsed.contains("usage") && parsed["usage"].is_object()) {
            decision.input_tokens = parsed["usage"].value("prompt_tokens", 0LL);
            decision.output_tokens = parsed["usage"].value("completion_tokens", 0LL);
        }

        if (message.contains("tool_calls") && message["tool_calls"].is_array() &&
            !message["tool_calls"].empty()) {
            const json& call = message["tool_calls"][0];
            const json& fn = call.value("function", json::object());
            std::string name = fn.value("name", "");
            json args = json::object();
            if (fn.contains("arguments")) {
                if (fn["arguments"].is_string()) {
                    args = json::parse(fn["arguments"].get<std::string>(), nullptr, false);
                    if (args.is_discarded()) {
                        last_error = "tool call arguments were not valid JSON";
                        continue;
                    }
                } else if (fn["arguments"].is_object()) {
                    args = fn["arguments"];
                }
            }
            try {
                decision.action = action_from_tool_call(name, args);
            } catch (const ConfigError& e) {
                last_error = e.what();
                continue;
            }
            messages_.push_back(message);
            pending_tool_call_id_ = call.value("id", "call_0");
            return decision;
        }

        std::string content;
        if (message.contains("content") && message["content"].is_string())
            content = message["content"].get<std::string>();
        json as_action = json::parse(content, nullptr, false);
        if (as_action.is_object() && as_action.contains("type")) {
            try {
                decision.action = action_from_json(as_action);
            } catch (const ConfigError& e) {
                last_error = e.what();
                continue;
            }
            messages_.push_back(message);
            return decision;
        }
        last_error = "model reply contained no tool call or action object";
    }
    throw NetError("chat request failed: " + last_error);
}

namespace {

json make_tool(const std::string& name, const std::string& description,
               const json& properties, const json& required) {
    return {{"type", "function"},
            {"function",
             {{"name", name},
              {"description", description},
              {"parameters",
               {{"type", "object"},
                {"properties", properties},
                {"required", required}}}}}};
}

json finish_tool() {
    return make_tool(
        "finish",
        "End the task. For product-finding tasks pass the product page URLs "
        "you are answering with; for checkout tasks pass done=true once the "
        "purchase is complete.",
        {{"urls",
          {{"type", "array"},
           {"items", {{"type", "string"}}},
           {"description", "Product page URLs that answer the task"}}},
         {"done",
          {{"type", "boolean"},
           {"description", "True when the requested transaction is finished"}}}},
        json::array());
}

} // namespace

json action_tools_for(const std::string& interface_kind) {
    json tools = json::array();
    if (interface_kind == "html") {
        tools.push_back(make_tool(
            "goto", "Load a page by URL.",
            {{"url", {{"type", "string"}, {"description", "Absolute URL to open"}}}},
            json::array({"url"})));
        tools.push_back(make_tool(
            "click", "Follow a numbered link from the current page.",
            {{"link", {{"type", "integer"}, {"description", "Link index shown on the page"}}}},
            json::array({"link"})));
        tools.push_back(make_tool(
            "fill",
            "Fill a numbered form on the current page and submit it.",
            {{"form", {{"type", "integer"}, {"description", "Form index shown on the page"}}},
             {"fields",
              {{"type", "object"},
               {"description", "Field values keyed by input name"}}}},
            json::array({"form"})));
        tools.push_back(make_tool(
            "remember", "Write a note to working memory.",
            {{"note", {{"type", "string"}}}}, json::array({"note"})));
    } else if (interface_kind == "rag") {
        tools.push_back(make_tool(
            "search", "Query the crawled product index.",
            {{"query", {{"type", "string"}}},
             {"k", {{"type", "integer"}, {"description", "Number of results, default 10"}}}},
            json::array({"query"})));
        tools.push_back(make_tool(
            "add_to_cart", "Put a product in its shop's cart, by product URL.",
            {{"url", {{"type", "string"}, {"description", "Product page URL"}}},
             {"quantity", {{"type", "integer"}, {"description", "Default 1"}}}},
            json::array({"url"})));
        tools.push_back(make_tool(
            "view_cart", "Show the current cart for one shop.",
            {{"shop", {{"type", "string"}, {"description", "Shop id, e.g. shop2"}}}},
            json::array({"shop"})));
        tools.push_back(make_tool(
            "checkout", "Buy everything in one shop's cart.",
            {{"shop", {{"type", "string"}}},
             {"shipping",
              {{"type", "object"},
               {"description",
                "Object with name, street, city, postal_code, country"}}},
             {"card_number", {{"type", "string"}}}},
            json::array({"shop", "shipping", "card_number"})));
    } else if (interface_kind == "mcp" || interface_kind == "nlweb") {
        tools.push_back(make_tool(
            "tool_call",
            interface_kind == "mcp"
                ? "Invoke one of a shop's tools, as advertised by tools/list."
                : "Invoke a shop endpoint: ask, create_session, add_to_cart, "
                  "view_cart, or checkout.",
            {{"shop", {{"type", "string"}, {"description", "Shop id, e.g. shop1"}}},
             {"tool", {{"type", "string"}}},
             {"args", {{"type", "object"}, {"description", "Tool arguments"}}}},
            json::array({"shop", "tool"})));
    } else {
        throw ConfigError("unknown interface \"" + interface_kind + "\"");
    }
    tools.push_back(finish_tool());
    return tools;
}

} // namespace webmall
