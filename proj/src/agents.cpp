#include "webmall/agents.hpp"

#include "webmall/errors.hpp"
#include "webmall/page_model.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <chrono>
#include <httplib.h>
#include <map>
#include <memory>
#include <optional>
#include <set>

namespace webmall {

using nlohmann::json;

namespace {

using VarMap = std::map<std::string, std::string>;

std::string substitute_vars(const std::string& text, const VarMap& vars) {
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t open = text.find("${", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        std::size_t close = text.find('}', open + 2);
        if (close == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        std::string key = text.substr(open + 2, close - open - 2);
        auto it = vars.find(key);
        if (it != vars.end())
            out += it->second;
        else
            out.append(text, open, close - open + 1);
        pos = close + 1;
    }
    return out;
}

json substitute_json(const json& value, const VarMap& vars) {
    if (value.is_string()) return substitute_vars(value.get<std::string>(), vars);
    if (value.is_object()) {
        json out = json::object();
        for (const auto& [k, v] : value.items()) out[k] = substitute_json(v, vars);
        return out;
    }
    if (value.is_array()) {
        json out = json::array();
        for (const json& v : value) out.push_back(substitute_json(v, vars));
        return out;
    }
    return value;
}

AgentAction substitute_action(const AgentAction& action, const VarMap& vars) {
    AgentAction out = action;
    out.url = substitute_vars(out.url, vars);
    out.query = substitute_vars(out.query, vars);
    out.note = substitute_vars(out.note, vars);
    for (auto& [k, v] : out.fields) v = substitute_vars(v, vars);
    out.args = substitute_json(out.args, vars);
    return out;
}

json error_json(const std::string& message) { return json{{"error", message}}; }

void collect_offer_urls(const json& value, const Catalog& catalog, Transcript& t) {
    if (value.is_string()) {
        const Offer* offer = catalog.offer_by_url(value.get<std::string>());
        if (offer) t.add_observed(offer->url);
    } else if (value.is_object()) {
        for (const auto& [k, v] : value.items()) collect_offer_urls(v, catalog, t);
    } else if (value.is_array()) {
        for (const json& v : value) collect_offer_urls(v, catalog, t);
    }
}

// Tool results carry session handles under shop-specific names. Any string
// under one of these keys becomes the shop's current ${session:shopN} value.
void capture_session_tokens(const json& value, const std::string& shop_id,
                            VarMap& vars) {
    static const std::set<std::string> kKeys = {"session", "cart", "sid", "token"};
    if (value.is_object()) {
        for (const auto& [k, v] : value.items()) {
            if (v.is_string() && kKeys.count(k))
                vars["session:" + shop_id] = v.get<std::string>();
            else
                capture_session_tokens(v, shop_id, vars);
        }
    } else if (value.is_array()) {
        for (const json& v : value) capture_session_tokens(v, shop_id, vars);
    }
}

json cart_view_json(const CartView& cart, const Catalog& catalog) {
    json items = json::array();
    for (const CartLine& line : cart.lines) {
        json item = {{"offer_id", line.offer_id},
                     {"title", line.title},
                     {"quantity", line.quantity},
                     {"unit_price", util::cents_to_decimal(line.unit_price_cents)},
                     {"subtotal", util::cents_to_decimal(line.subtotal_cents)}};
        if (const Offer* offer = catalog.offer_by_id(line.offer_id))
            item["url"] = offer->url;
        items.push_back(std::move(item));
    }
    return {{"shop", cart.shop_id},
            {"items", items},
            {"total", util::cents_to_decimal(cart.total_cents)}};
}

json order_json(const Order& order, const Catalog& catalog) {
    json items = json::array();
    for (const LineItem& line : order.items) {
        json item = {{"offer_id", line.offer_id},
                     {"quantity", line.quantity},
                     {"unit_price", util::cents_to_decimal(line.unit_price_cents)}};
        if (const Offer* offer = catalog.offer_by_id(line.offer_id))
            item["url"] = offer->url;
        items.push_back(std::move(item));
    }
    return {{"order_id", order.order_id},
            {"shop", order.shop_id},
            {"items", items},
            {"total", util::cents_to_decimal(order.total_cents)}};
}

ShippingInfo shipping_from_json(const json& value) {
    ShippingInfo info;
    if (!value.is_object()) return info;
    info.name = value.value("name", "");
    info.street = value.value("street", "");
    info.city = value.value("city", "");
    info.postal_code = value.value("postal_code", "");
    info.country = value.value("country", "");
    return info;
}

// HTTP over the resolver: canonical shop URLs in, loopback requests out.
class HttpFetcher {
public:
    explicit HttpFetcher(const UrlResolver* resolver) : resolver_(resolver) {}

    httplib::Result get(const std::string& url, const httplib::Headers& headers) {
        UrlParts parts = local_parts(url);
        return client_for(parts).Get(target_of(parts), headers);
    }

    httplib::Result post(const std::string& url, const httplib::Headers& headers,
                         const std::string& body, const std::string& content_type) {
        UrlParts parts = local_parts(url);
        return client_for(parts).Post(target_of(parts), headers, body, content_type);
    }

private:
    UrlParts local_parts(const std::string& url) const {
        std::string local = resolver_ ? resolver_->to_local(url) : url;
        return parse_url(local);
    }

    static std::string target_of(const UrlParts& parts) {
        std::string target = parts.path.empty() ? "/" : parts.path;
        if (!parts.query.empty()) target += "?" + parts.query;
        return target;
    }

    httplib::Client& client_for(const UrlParts& parts) {
        std::string origin = parts.scheme + "://" + parts.authority();
        auto it = clients_.find(origin);
        if (it == clients_.end()) {
            auto client = std::make_unique<httplib::Client>(origin);
            client->set_connection_timeout(5);
            client->set_read_timeout(30);
            it = clients_.emplace(origin, std::move(client)).first;
        }
        return *it->second;
    }

    const UrlResolver* resolver_;
    std::map<std::string, std::unique_ptr<httplib::Client>> clients_;
};

class Runner {
public:
    Runner(InterfaceKind kind, const TaskSpec& task, Policy& policy,
           const AgentEnvironment& env, const RunOptions& options, Transcript& t)
        : kind_(kind), task_(task), policy_(policy), env_(env), options_(options),
          t_(t), fetch_(env.resolver) {}

    void run() {
        if (!env_.catalog) throw ConfigError("agent environment has no catalog");
        if (!env_.commerce) throw ConfigError("agent environment has no commerce engine");
        if (kind_ == InterfaceKind::Rag && !env_.rag_index)
            throw ConfigError("RAG runs need a crawled index");
        if (kind_ != InterfaceKind::Rag && !env_.resolver)
            throw ConfigError("agent environment has no URL resolver");

        default_session_ = env_.commerce->create_session();
        vars_["session"] = default_session_;
        policy_.begin_task(task_system_prompt(kind_), task_.prompt,
                           action_tools_for(to_string(kind_)));

        int budget = kind_ == InterfaceKind::Html ? options_.max_steps_html
                                                  : options_.max_steps_tools;
        std::string obs = initial_observation();
        for (int i = 0; i < budget; ++i) {
            PolicyDecision decision = policy_.decide(obs);
            TranscriptStep step;
            step.index = i;
            step.observation = obs;
            step.action_json = action_to_json(decision.action).dump();
            step.input_tokens = decision.input_tokens;
            step.output_tokens = decision.output_tokens;
            t_.input_tokens += decision.input_tokens;
            t_.output_tokens += decision.output_tokens;

            AgentAction action = substitute_action(decision.action, vars_);
            if (action.type == AgentAction::Type::Finish) {
                t_.answer.urls = action.answer_urls;
                t_.answer.done = action.done;
                step.result = json{{"finished", true}}.dump();
                t_.steps.push_back(std::move(step));
                return;
            }
            json result = execute(action, step.valid);
            step.result = result.dump();
            obs = step.result;
            t_.steps.push_back(std::move(step));
        }
        // Out of steps: the task ends with an empty answer and no extra
        // transcript entry for the forced stop.
    }

    // Merge the default session with every captured shop session into the
    // snapshot that transactional scoring reads.
    void collect_final_state() {
        if (!env_.commerce || default_session_.empty()) return;
        std::set<std::string> seen;
        StateSnapshot merged;
        auto absorb = [&](const std::string& session_id) {
            if (session_id.empty() || !seen.insert(session_id).second) return;
            if (!env_.commerce->has_session(session_id)) return;
            StateSnapshot s = env_.commerce->snapshot_state(session_id);
            for (const auto& [shop, items] : s.carts)
                for (const auto& [offer, qty] : items) merged.carts[shop][offer] += qty;
            for (const auto& [shop, orders] : s.orders)
                for (const ItemCounts& order : orders)
                    merged.orders[shop].push_back(order);
        };
        absorb(default_session_);
        for (const auto& [key, value] : vars_)
            if (key.rfind("session:", 0) == 0) absorb(value);
        t_.final_state = std::move(merged);
    }

private:
    std::string initial_observation() {
        switch (kind_) {
        case InterfaceKind::Html: {
            json shops = json::array();
            for (const Shop& shop : env_.catalog->shops())
                shops.push_back({{"shop", shop.shop_id},
                                 {"name", shop.display_name},
                                 {"url", shop.base_url}});
            return json{{"message", "No page is loaded. Use goto with a shop URL."},
                        {"shops", shops}}
                .dump();
        }
        case InterfaceKind::Rag:
            return json{{"message",
                         "Query the crawled product index with search. add_to_cart, "
                         "view_cart, and checkout execute purchases directly."}}
                .dump();
        case InterfaceKind::Mcp: {
            json shops = json::object();
            for (const Shop& shop : env_.catalog->shops()) {
                json envelope = rpc_call(shop.shop_id, "/mcp", "tools/list",
                                         json::object());
                shops[shop.shop_id] = envelope.value("result", json::object());
            }
            return json{{"message",
                         "Call shop tools with tool_call{shop,tool,args}. Each shop "
                         "names its tools differently; the schemas are below."},
                        {"shops", shops}}
                .dump();
        }
        case InterfaceKind::Nlweb: {
            json shops = json::array();
            for (const Shop& shop : env_.catalog->shops())
                shops.push_back(shop.shop_id);
            return json{{"message",
                         "Every shop answers the same tools: ask{query,limit}, "
                         "create_session, add_to_cart{session,url,quantity}, "
                         "view_cart{session}, checkout{session,shipping,payment}. "
                         "Call them with tool_call{shop,tool,args}."},
                        {"shops", shops}}
                .dump();
        }
        }
        return "{}";
    }

    json execute(const AgentAction& action, bool& valid) {
        switch (kind_) {
        case InterfaceKind::Html:
            return exec_html(action, valid);
        case InterfaceKind::Rag:
            return exec_rag(action, valid);
        case InterfaceKind::Mcp:
            return exec_tool_call(action, valid, "/mcp");
        case InterfaceKind::Nlweb:
            return exec_tool_call(action, valid, "/nlweb");
        }
        valid = false;
        return error_json("unknown interface");
    }

    json exec_html(const AgentAction& action, bool& valid) {
        switch (action.type) {
        case AgentAction::Type::Goto:
            return open_url(action.url);
        case AgentAction::Type::Click: {
            if (!page_) return error_json("no page is loaded");
            if (action.link_index < 0 ||
                std::size_t(action.link_index) >= page_->links.size())
                return error_json("no link with index " +
                                  std::to_string(action.link_index));
            return open_url(page_->links[action.link_index].href);
        }
        case AgentAction::Type::Fill: {
            if (!page_) return error_json("no page is loaded");
            if (action.form_index < 0 ||
                std::size_t(action.form_index) >= page_->forms.size())
                return error_json("no form with index " +
                                  std::to_string(action.form_index));
            const PageForm& form = page_->forms[action.form_index];
            std::vector<std::pair<std::string, std::string>> values;
            std::set<std::string> named;
            for (const FormField& field : form.fields) {
                named.insert(field.name);
                auto it = action.fields.find(field.name);
                values.emplace_back(field.name,
                                    it != action.fields.end() ? it->second : field.value);
            }
            for (const auto& [k, v] : action.fields)
                if (!named.count(k)) values.emplace_back(k, v);
            if (form.method == "post")
                return open_post(form.action, util::form_encode(values));
            std::string url = form.action +
                              (form.action.find('?') == std::string::npos ? "?" : "&") +
                              util::form_encode(values);
            return open_url(url);
        }
        case AgentAction::Type::Remember:
            notes_.push_back(action.note);
            return json{{"noted", action.note}};
        default:
            valid = false;
            return error_json("action not available on the html interface");
        }
    }

    json exec_rag(const AgentAction& action, bool& valid) {
        switch (action.type) {
        case AgentAction::Type::Search: {
            SearchOptions options;
            options.k = action.k < 0 ? 0 : std::size_t(action.k);
            json results = json::array();
            for (const SearchHit& hit : env_.rag_index->search(action.query, options))
                results.push_back({{"url", hit.url},
                                   {"title", hit.title},
                                   {"shop", hit.shop_id},
                                   {"score", hit.score}});
            json out = {{"results", results}};
            collect_offer_urls(out, *env_.catalog, t_);
            return out;
        }
        case AgentAction::Type::ToolCall:
            return exec_rag_tool(action, valid);
        default:
            valid = false;
            return error_json("action not available on the rag interface");
        }
    }

    json exec_rag_tool(const AgentAction& action, bool& valid) {
        try {
            if (action.tool == "add_to_cart") {
                std::string url = action.args.value("url", "");
                if (url.empty()) return error_json("add_to_cart needs a url");
                const Offer* offer = env_.catalog->offer_by_url(url);
                if (!offer) return error_json("unknown product: " + url);
                long long qty = action.args.value("quantity", 1LL);
                CartView cart = env_.commerce->add_to_cart(
                    default_session_, offer->shop_id, offer->offer_id, qty);
                json out = cart_view_json(cart, *env_.catalog);
                collect_offer_urls(out, *env_.catalog, t_);
                return out;
            }
            if (action.tool == "view_cart") {
                std::string shop = action.args.value("shop", "");
                CartView cart = env_.commerce->view_cart(default_session_, shop);
                json out = cart_view_json(cart, *env_.catalog);
                collect_offer_urls(out, *env_.catalog, t_);
                return out;
            }
            if (action.tool == "checkout") {
                std::string shop = action.args.value("shop", "");
                ShippingInfo shipping =
                    shipping_from_json(action.args.value("shipping", json::object()));
                std::string card = action.args.value("card_number", "");
                Order order = env_.commerce->checkout(default_session_, shop,
                                                      shipping, card);
                json out = order_json(order, *env_.catalog);
                collect_offer_urls(out, *env_.catalog, t_);
                return out;
            }
        } catch (const CommerceError& e) {
            return error_json(e.what());
        } catch (const json::exception& e) {
            return error_json(std::string("bad arguments: ") + e.what());
        }
        valid = false;
        return error_json("tool not available on the rag interface: " + action.tool);
    }

    json exec_tool_call(const AgentAction& action, bool& valid,
                        const std::string& path) {
        if (action.type != AgentAction::Type::ToolCall) {
            valid = false;
            return error_json("only tool_call and finish are available on the " +
                              to_string(kind_) + " interface");
        }
        if (action.shop_id.empty())
            return error_json("tool_call needs a shop id");
        if (!env_.catalog->shop(action.shop_id))
            return error_json("unknown shop: " + action.shop_id);
        json params = {{"name", action.tool}, {"arguments", action.args}};
        json envelope = rpc_call(action.shop_id, path, "tools/call", params);
        if (envelope.contains("error"))
            return json{{"error", envelope["error"]}};
        json result = envelope.value("result", json::object());
        collect_offer_urls(result, *env_.catalog, t_);
        if (!result.value("isError", false))
            capture_session_tokens(result.value("content", json()), action.shop_id,
                                   vars_);
        return result;
    }

    json rpc_call(const std::string& shop_id, const std::string& path,
                  const std::string& method, const json& params) {
        const Shop* shop = env_.catalog->shop(shop_id);
        if (!shop) throw ConfigError("unknown shop: " + shop_id);
        std::string url = shop->base_url + path;
        json request = {{"jsonrpc", "2.0"},
                        {"id", ++rpc_id_},
                        {"method", method},
                        {"params", params}};
        auto res = fetch_.post(url, {}, request.dump(), "application/json");
        if (!res) throw NetError("no response from " + shop_id + " at " + url);
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded())
            throw NetError("malformed rpc response from " + shop_id);
        return parsed;
    }

    json open_url(const std::string& url) {
        std::string normalized;
        try {
            normalized = normalize_url(url);
        } catch (const UrlError& e) {
            return error_json(std::string("bad url: ") + e.what());
        }
        if (!env_.catalog->shop_for_url(normalized))
            return error_json("url is outside the shops: " + normalized);
        httplib::Headers headers{{"Cookie", "wm_session=" + default_session_}};
        auto res = fetch_.get(normalized, headers);
        if (!res) throw NetError("no response from " + normalized);
        return load_page(normalized, res->status, res->body);
    }

    json open_post(const std::string& url, const std::string& body) {
        std::string normalized;
        try {
            normalized = normalize_url(url);
        } catch (const UrlError& e) {
            return error_json(std::string("bad url: ") + e.what());
        }
        if (!env_.catalog->shop_for_url(normalized))
            return error_json("url is outside the shops: " + normalized);
        httplib::Headers headers{{"Cookie", "wm_session=" + default_session_}};
        auto res = fetch_.post(normalized, headers, body,
                               "application/x-www-form-urlencoded");
        if (!res) throw NetError("no response from " + normalized);
        return load_page(normalized, res->status, res->body);
    }

    json load_page(const std::string& url, int status, const std::string& body) {
        PageModel model = extract_page_model(body, url);
        if (const Offer* offer = env_.catalog->offer_by_url(model.url))
            t_.add_observed(offer->url);
        for (const PageLink& link : model.links)
            if (const Offer* offer = env_.catalog->offer_by_url(link.href))
                t_.add_observed(offer->url);
        json digest = json::parse(page_model_digest(model));
        digest["status"] = status;
        page_ = std::move(model);
        return digest;
    }

    InterfaceKind kind_;
    const TaskSpec& task_;
    Policy& policy_;
    const AgentEnvironment& env_;
    const RunOptions& options_;
    Transcript& t_;
    HttpFetcher fetch_;
    VarMap vars_;
    std::string default_session_;
    std::vector<std::string> notes_;
    std::optional<PageModel> page_;
    long long rpc_id_ = 0;
};

} // namespace

std::string task_system_prompt(InterfaceKind kind) {
    switch (kind) {
    case InterfaceKind::Html:
        return "You control a text browser over four online shops. Observations "
               "are JSON digests of the current page: numbered links, numbered "
               "forms with their fields, headings, and visible text. goto opens "
               "a URL, click follows a numbered link, fill submits a numbered "
               "form with field values, remember keeps a note. For "
               "product-finding tasks, call finish with the product page URLs "
               "that answer the task. For purchase tasks, add the items to the "
               "cart, submit the checkout form with the shipping details and "
               "card number from the task, then call finish with done=true.";
    case InterfaceKind::Rag:
        return "You answer shopping tasks from a crawled snapshot of four "
               "online shops. search queries the snapshot's product index and "
               "returns product URLs; you cannot browse the live pages. "
               "add_to_cart puts a product in its shop's cart by URL, view_cart "
               "shows a shop's cart, and checkout buys one shop's cart with "
               "shipping details and a card number. For product-finding tasks, "
               "call finish with the product page URLs. For purchase tasks, "
               "call finish with done=true after checkout.";
    case InterfaceKind::Mcp:
        return "You work four online shops through their tool APIs. The first "
               "observation lists each shop's tools and schemas; shops name "
               "similar operations differently. Call tool_call with the shop "
               "id, tool name, and arguments. Where a shop requires a session "
               "or cart handle, create one with its session tool and pass the "
               "returned value in later calls. For product-finding tasks, call "
               "finish with the product page URLs from the results. For "
               "purchase tasks, call finish with done=true once the order is "
               "confirmed.";
    case InterfaceKind::Nlweb:
        return "You work four online shops through one uniform endpoint. Every "
               "shop answers the same tools: ask{query,limit} returns matching "
               "products as schema.org records with URLs and prices; "
               "create_session, add_to_cart{session,url,quantity}, "
               "view_cart{session}, and checkout{session,shipping,payment} "
               "manage purchases. Call them with tool_call{shop,tool,args}. "
               "For product-finding tasks, call finish with the product page "
               "URLs. For purchase tasks, call finish with done=true after "
               "checkout.";
    }
    return "";
}

Transcript run_agent(InterfaceKind kind, const TaskSpec& task, Policy& policy,
                     const AgentEnvironment& env, const RunOptions& options) {
    Transcript transcript;
    transcript.task_id = task.task_id;
    transcript.interface_kind = kind;
    transcript.model = options.model;

    auto start = std::chrono::steady_clock::now();
    Runner runner(kind, task, policy, env, options, transcript);
    try {
        runner.run();
    } catch (const std::exception& e) {
        transcript.error = e.what();
    }
    try {
        runner.collect_final_state();
    } catch (const std::exception&) {
        // state collection must not mask the original failure
    }
    transcript.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return transcript;
}

} // namespace webmall
