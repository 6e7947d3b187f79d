#include "webmall/jsonrpc.hpp"

#include "webmall/errors.hpp"

namespace webmall {

using nlohmann::json;

namespace jsonrpc {

json make_result(const json& id, json result) {
    json response;
    response["jsonrpc"] = "2.0";
    response["id"] = id;
    response["result"] = std::move(result);
    return response;
}

json make_error(const json& id, int code, const std::string& message) {
    json response;
    response["jsonrpc"] = "2.0";
    response["id"] = id;
    response["error"] = {{"code", code}, {"message", message}};
    return response;
}

} // namespace jsonrpc

json ToolDescriptor::input_schema() const {
    json properties = json::object();
    json required = json::array();
    for (const ToolParam& param : params) {
        json prop;
        prop["type"] = param.type;
        if (!param.description.empty()) prop["description"] = param.description;
        properties[param.name] = std::move(prop);
        if (param.required) required.push_back(param.name);
    }
    json schema;
    schema["type"] = "object";
    schema["properties"] = std::move(properties);
    schema["required"] = std::move(required);
    return schema;
}

void ToolRegistry::register_tool(ToolDescriptor descriptor, ToolFn fn) {
    if (tools_.count(descriptor.name))
        throw ConfigError("duplicate tool name: " + descriptor.name);
    tools_[descriptor.name] = std::move(fn);
    descriptors_.push_back(std::move(descriptor));
}

json ToolRegistry::list_tools() const {
    json tools = json::array();
    for (const ToolDescriptor& descriptor : descriptors_) {
        json tool;
        tool["name"] = descriptor.name;
        tool["description"] = descriptor.description;
        tool["inputSchema"] = descriptor.input_schema();
        tools.push_back(std::move(tool));
    }
    return json{{"tools", std::move(tools)}};
}

namespace {

bool type_matches(const std::string& type, const json& value) {
    if (type == "string") return value.is_string();
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    if (type == "object") return value.is_object();
    if (type == "boolean") return value.is_boolean();
    if (type == "array") return value.is_array();
    return true;
}

} // namespace

json ToolRegistry::call_tool(const std::string& name, const json& arguments) const {
    auto it = tools_.find(name);
    if (it == tools_.end()) throw UnknownToolError("unknown tool: " + name);

    const ToolDescriptor* descriptor = nullptr;
    for (const ToolDescriptor& d : descriptors_)
        if (d.name == name) descriptor = &d;
    if (!arguments.is_object())
        throw InvalidParamsError("arguments must be an object");
    for (const ToolParam& param : descriptor->params) {
        auto arg = arguments.find(param.name);
        if (arg == arguments.end()) {
            if (param.required)
                throw InvalidParamsError("missing required parameter: " + param.name);
            continue;
        }
        if (!type_matches(param.type, *arg))
            throw InvalidParamsError("parameter " + param.name + " must be a " +
                                     param.type);
    }

    try {
        json content = it->second(arguments);
        return json{{"content", std::move(content)}, {"isError", false}};
    } catch (const ToolError& e) {
        return json{{"content", json{{"error", e.what()}}}, {"isError", true}};
    } catch (const CommerceError& e) {
        return json{{"content", json{{"error", e.what()}}}, {"isError", true}};
    }
}

json ToolRegistry::dispatch(const json& request) const {
    if (!request.is_object())
        return jsonrpc::make_error(nullptr, jsonrpc::kInvalidRequest,
                                   "request must be an object");

    json id = nullptr;
    if (request.contains("id")) {
        const json& raw = request["id"];
        if (!raw.is_string() && !raw.is_number() && !raw.is_null())
            return jsonrpc::make_error(nullptr, jsonrpc::kInvalidRequest,
                                       "id must be a string, number, or null");
        id = raw;
    }

    if (!request.contains("jsonrpc") || request["jsonrpc"] != "2.0")
        return jsonrpc::make_error(id, jsonrpc::kInvalidRequest,
                                   "jsonrpc must be \"2.0\"");
    if (!request.contains("method") || !request["method"].is_string())
        return jsonrpc::make_error(id, jsonrpc::kInvalidRequest,
                                   "method must be a string");
    if (request.contains("params") && !request["params"].is_object() &&
        !request["params"].is_array())
        return jsonrpc::make_error(id, jsonrpc::kInvalidRequest,
                                   "params must be structured");

    std::string method = request["method"].get<std::string>();
    json params =
        request.contains("params") ? request["params"] : json::object();

    if (method == "tools/list") return jsonrpc::make_result(id, list_tools());

    if (method == "tools/call") {
        if (!params.is_object() || !params.contains("name") ||
            !params["name"].is_string())
            return jsonrpc::make_error(id, jsonrpc::kInvalidParams,
                                       "params.name must name a tool");
        json arguments = params.contains("arguments") ? params["arguments"]
                                                      : json::object();
        try {
            return jsonrpc::make_result(
                id, call_tool(params["name"].get<std::string>(), arguments));
        } catch (const UnknownToolError& e) {
            return jsonrpc::make_error(id, jsonrpc::kMethodNotFound, e.what());
        } catch (const InvalidParamsError& e) {
            return jsonrpc::make_error(id, jsonrpc::kInvalidParams, e.what());
        } catch (const std::exception& e) {
            return jsonrpc::make_error(id, jsonrpc::kInternalError, e.what());
        }
    }

    return jsonrpc::make_error(id, jsonrpc::kMethodNotFound,
                               "unknown method: " + method);
}

std::string ToolRegistry::handle_request(const std::string& body) const {
    json request = json::parse(body, nullptr, false);
    if (request.is_discarded())
        return jsonrpc::make_error(nullptr, jsonrpc::kParseError, "parse error")
            .dump();
    return dispatch(request).dump();
}

} // namespace webmall
