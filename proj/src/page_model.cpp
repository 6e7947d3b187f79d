#include "webmall/page_model.hpp"

#include "webmall/errors.hpp"
#include "webmall/html_text.hpp"
#include "webmall/url.hpp"
#include "webmall/util.hpp"

#include <cctype>
#include <map>
#include <nlohmann/json.hpp>

namespace webmall {

using nlohmann::json;

namespace {

struct Tag {
    std::string name;   // lowercase
    bool closing = false;
    std::map<std::string, std::string> attrs;
    size_t end = 0; // index just past '>'
};

std::string decode_attr(std::string_view raw) {
    std::string out;
    size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] == '&') {
            size_t semi = raw.find(';', i + 1);
            if (semi != std::string_view::npos && semi - i <= 8) {
                std::string_view ent = raw.substr(i, semi - i + 1);
                if (ent == "&amp;") { out += '&'; i = semi + 1; continue; }
                if (ent == "&lt;") { out += '<'; i = semi + 1; continue; }
                if (ent == "&gt;") { out += '>'; i = semi + 1; continue; }
                if (ent == "&quot;") { out += '"'; i = semi + 1; continue; }
                if (ent == "&apos;" || ent == "&#39;") { out += '\''; i = semi + 1; continue; }
            }
        }
        out += raw[i++];
    }
    return out;
}

// Parses the tag starting at html[pos] ('<'). Returns false for comments
// and truncated markup.
bool parse_tag(std::string_view html, size_t pos, Tag& tag) {
    size_t close = html.find('>', pos + 1);
    if (close == std::string_view::npos) return false;
    std::string_view body = html.substr(pos + 1, close - pos - 1);
    tag.end = close + 1;
    tag.attrs.clear();
    tag.closing = false;
    if (!body.empty() && body[0] == '/') {
        tag.closing = true;
        body = body.substr(1);
    }
    size_t i = 0;
    while (i < body.size() && (std::isalnum((unsigned char)body[i]) || body[i] == '-'))
        ++i;
    tag.name = util::to_lower(body.substr(0, i));
    if (tag.name.empty()) return false;

    while (i < body.size()) {
        while (i < body.size() && (std::isspace((unsigned char)body[i]) || body[i] == '/'))
            ++i;
        size_t name_start = i;
        while (i < body.size() && body[i] != '=' && body[i] != '/' &&
               !std::isspace((unsigned char)body[i]))
            ++i;
        if (i == name_start) break;
        std::string attr_name = util::to_lower(body.substr(name_start, i - name_start));
        std::string attr_value;
        while (i < body.size() && std::isspace((unsigned char)body[i])) ++i;
        if (i < body.size() && body[i] == '=') {
            ++i;
            while (i < body.size() && std::isspace((unsigned char)body[i])) ++i;
            if (i < body.size() && (body[i] == '"' || body[i] == '\'')) {
                char quote = body[i++];
                size_t val_start = i;
                while (i < body.size() && body[i] != quote) ++i;
                attr_value = decode_attr(body.substr(val_start, i - val_start));
                if (i < body.size()) ++i;
            } else {
                size_t val_start = i;
                while (i < body.size() && !std::isspace((unsigned char)body[i]) &&
                       body[i] != '/')
                    ++i;
                attr_value = decode_attr(body.substr(val_start, i - val_start));
            }
        }
        if (!attr_name.empty()) tag.attrs[attr_name] = attr_value;
    }
    return true;
}

// Visible text between `from` and the matching close tag of `name`;
// returns the index just past that close tag.
std::string inner_text(std::string_view html, size_t from, const std::string& name,
                       size_t& resume) {
    std::string text;
    size_t i = from;
    int depth = 1;
    while (i < html.size()) {
        if (html[i] == '<') {
            Tag tag;
            if (!parse_tag(html, i, tag)) {
                size_t close = html.find('>', i);
                i = close == std::string_view::npos ? html.size() : close + 1;
                continue;
            }
            if (tag.name == name) depth += tag.closing ? -1 : 1;
            if (depth == 0) {
                resume = tag.end;
                return util::collapse_whitespace(clean_html(html.substr(from, i - from)));
            }
            i = tag.end;
            continue;
        }
        ++i;
    }
    resume = html.size();
    return util::collapse_whitespace(clean_html(html.substr(from)));
}

std::string resolve(const std::string& base, const std::string& href) {
    if (href.empty()) return base;
    try {
        return normalize_url(resolve_href(base, href));
    } catch (const UrlError&) {
        return href; // external or unparseable: keep verbatim
    }
}

} // namespace

PageModel extract_page_model(std::string_view html, const std::string& url) {
    PageModel page;
    page.url = url;
    page.text = clean_html(html);

    size_t i = 0;
    PageForm* open_form = nullptr;
    PageForm current_form;
    while (i < html.size()) {
        if (html[i] != '<') {
            ++i;
            continue;
        }
        if (html.substr(i, 4) == "<!--") {
            size_t end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        Tag tag;
        if (!parse_tag(html, i, tag)) {
            size_t close = html.find('>', i);
            i = close == std::string_view::npos ? html.size() : close + 1;
            continue;
        }
        i = tag.end;

        if (tag.closing) {
            if (tag.name == "form" && open_form) {
                page.forms.push_back(current_form);
                open_form = nullptr;
            }
            continue;
        }

        if (tag.name == "script" || tag.name == "style") {
            size_t resume = i;
            inner_text(html, i, tag.name, resume);
            i = resume;
            continue;
        }
        if (tag.name == "title") {
            size_t resume = i;
            page.title = inner_text(html, i, "title", resume);
            i = resume;
            continue;
        }
        if (tag.name.size() == 2 && tag.name[0] == 'h' && tag.name[1] >= '1' &&
            tag.name[1] <= '6') {
            size_t resume = i;
            std::string text = inner_text(html, i, tag.name, resume);
            if (!text.empty()) page.headings.push_back(text);
            i = resume;
            continue;
        }
        if (tag.name == "a") {
            auto href_it = tag.attrs.find("href");
            size_t resume = i;
            std::string text = inner_text(html, i, "a", resume);
            i = resume;
            if (href_it != tag.attrs.end())
                page.links.push_back({text, resolve(url, href_it->second)});
            continue;
        }
        if (tag.name == "form") {
            if (open_form) page.forms.push_back(current_form);
            current_form = PageForm{};
            auto action = tag.attrs.find("action");
            current_form.action =
                action == tag.attrs.end() ? url : resolve(url, action->second);
            auto method = tag.attrs.find("method");
            current_form.method =
                method == tag.attrs.end() ? "get" : util::to_lower(method->second);
            open_form = &current_form;
            continue;
        }
        if (open_form) {
            if (tag.name == "input") {
                auto name = tag.attrs.find("name");
                if (name != tag.attrs.end()) {
                    FormField field;
                    field.name = name->second;
                    auto type = tag.attrs.find("type");
                    field.type = type == tag.attrs.end() ? "text"
                                                         : util::to_lower(type->second);
                    auto value = tag.attrs.find("value");
                    if (value != tag.attrs.end()) field.value = value->second;
                    current_form.fields.push_back(std::move(field));
                }
            } else if (tag.name == "select" || tag.name == "textarea") {
                auto name = tag.attrs.find("name");
                size_t resume = i;
                std::string text = inner_text(html, i, tag.name, resume);
                i = resume;
                if (name != tag.attrs.end()) {
                    FormField field;
                    field.name = name->second;
                    field.type = tag.name;
                    if (tag.name == "textarea") field.value = text;
                    current_form.fields.push_back(std::move(field));
                }
            }
        }
    }
    if (open_form) page.forms.push_back(current_form);
    return page;
}

std::string page_model_digest(const PageModel& page) {
    json digest;
    digest["url"] = page.url;
    digest["title"] = page.title;
    digest["headings"] = page.headings;
    json links = json::array();
    for (size_t idx = 0; idx < page.links.size(); ++idx) {
        json link;
        link["index"] = idx;
        link["text"] = page.links[idx].text;
        link["href"] = page.links[idx].href;
        links.push_back(std::move(link));
    }
    digest["links"] = std::move(links);
    json forms = json::array();
    for (size_t idx = 0; idx < page.forms.size(); ++idx) {
        const PageForm& form = page.forms[idx];
        json form_json;
        form_json["index"] = idx;
        form_json["action"] = form.action;
        form_json["method"] = form.method;
        json fields = json::array();
        for (const FormField& field : form.fields) {
            json field_json;
            field_json["name"] = field.name;
            field_json["type"] = field.type;
            if (!field.value.empty()) field_json["value"] = field.value;
            fields.push_back(std::move(field_json));
        }
        form_json["fields"] = std::move(fields);
        forms.push_back(std::move(form_json));
    }
    digest["forms"] = std::move(forms);
    digest["text"] = page.text;
    return digest.dump();
}

} // namespace webmall
