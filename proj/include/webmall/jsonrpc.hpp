#pragma once

#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace webmall {

// Thrown by tool implementations for domain failures (unknown product,
// commerce rule violations). Surfaces as an isError tool result, not as a
// protocol error.
class ToolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Protocol-level failures raised by the registry itself.
class UnknownToolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParamsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace jsonrpc {

constexpr int kParseError = -32700;
constexpr int kInvalidRequest = -32600;
constexpr int kMethodNotFound = -32601;
constexpr int kInvalidParams = -32602;
constexpr int kInternalError = -32603;

nlohmann::json make_result(const nlohmann::json& id, nlohmann::json result);
nlohmann::json make_error(const nlohmann::json& id, int code,
                          const std::string& message);

} // namespace jsonrpc

struct ToolParam {
    std::string name;
    std::string type; // "string", "integer", "number", "object"
    bool required = false;
    std::string description;
};

struct ToolDescriptor {
    std::string name;
    std::string description;
    std::vector<ToolParam> params;
    nlohmann::json input_schema() const;
};

// JSON-RPC 2.0 endpoint exposing "tools/list" and "tools/call". Domain
// failures become {content, isError:true} results; protocol violations
// become JSON-RPC error envelopes. Any input yields a valid envelope.
class ToolRegistry {
public:
    using ToolFn = std::function<nlohmann::json(const nlohmann::json& args)>;

    void register_tool(ToolDescriptor descriptor, ToolFn fn);

    nlohmann::json list_tools() const;
    const std::vector<ToolDescriptor>& descriptors() const { return descriptors_; }

    // Full transport entry point: body in, serialized response out.
    std::string handle_request(const std::string& body) const;

    // Direct invocation used by handle_request and by in-process callers.
    // Throws ToolError wrapped as isError only via handle; here a missing
    // tool or bad params throw Invalid* exceptions for the caller to map.
    nlohmann::json call_tool(const std::string& name,
                             const nlohmann::json& arguments) const;

private:
    nlohmann::json dispatch(const nlohmann::json& request) const;

    std::vector<ToolDescriptor> descriptors_;
    std::map<std::string, ToolFn> tools_;
};

} // namespace webmall
