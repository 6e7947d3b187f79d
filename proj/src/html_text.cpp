#include "webmall/html_text.hpp"

#include "webmall/util.hpp"

#include <cctype>
#include <vector>

namespace webmall {

namespace {

bool is_inline_tag(const std::string& tag) {
    static const char* inline_tags[] = {"a",     "b",    "i",    "em",   "strong", "span",
                                        "code",  "small", "sub",  "sup",  "u",      "abbr",
                                        "time",  "label", "mark", "q",    "s",      "wbr"};
    for (const char* t : inline_tags)
        if (tag == t) return true;
    return false;
}

bool is_suppressed_tag(const std::string& tag) {
    return tag == "nav" || tag == "header" || tag == "footer";
}

// Decodes entities, except those whose value is '<' or '>' which stay escaped.
void append_entity(std::string& out, std::string_view entity) {
    if (entity == "&amp;") { out += "&"; return; }
    if (entity == "&quot;") { out += "\""; return; }
    if (entity == "&apos;" || entity == "&#39;") { out += "'"; return; }
    if (entity == "&nbsp;") { out += " "; return; }
    if (entity.size() > 3 && entity[1] == '#') {
        int code = 0;
        bool ok = true;
        if (entity[2] == 'x' || entity[2] == 'X') {
            for (size_t i = 3; i + 1 < entity.size(); ++i) {
                char c = entity[i];
                int v = std::isdigit((unsigned char)c) ? c - '0'
                        : (c >= 'a' && c <= 'f')       ? c - 'a' + 10
                        : (c >= 'A' && c <= 'F')       ? c - 'A' + 10
                                                       : -1;
                if (v < 0 || code > 0x10FFFF) { ok = false; break; }
                code = code * 16 + v;
            }
        } else {
            for (size_t i = 2; i + 1 < entity.size(); ++i) {
                if (!std::isdigit((unsigned char)entity[i]) || code > 0x10FFFF) { ok = false; break; }
                code = code * 10 + (entity[i] - '0');
            }
        }
        if (ok && code >= 32 && code < 127 && code != '<' && code != '>') {
            out.push_back(static_cast<char>(code));
            return;
        }
    }
    out += std::string(entity); // unknown or would produce markup chars
}

// Case-insensitive search for `needle` (lowercase) at or after `pos`.
size_t ifind(std::string_view hay, std::string_view needle, size_t pos) {
    if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
    for (size_t i = pos; i + needle.size() <= hay.size(); ++i) {
        bool match = true;
        for (size_t j = 0; j < needle.size(); ++j) {
            if (std::tolower((unsigned char)hay[i + j]) != needle[j]) {
                match = false;
                break;
            }
        }
        if (match) return i;
    }
    return std::string_view::npos;
}

} // namespace

std::string clean_html(std::string_view html) {
    std::string out;
    out.reserve(html.size() / 2);
    int suppress_depth = 0; // nesting depth inside nav/header/footer

    size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c == '<') {
            // comment
            if (html.substr(i).size() >= 4 && html.substr(i, 4) == "<!--") {
                size_t end = html.find("-->", i + 4);
                i = end == std::string_view::npos ? html.size() : end + 3;
                continue;
            }
            size_t close = html.find('>', i + 1);
            if (close == std::string_view::npos) break; // truncated tag: drop the rest

            std::string_view tag_body = html.substr(i + 1, close - i - 1);
            bool closing = !tag_body.empty() && tag_body[0] == '/';
            if (closing) tag_body = tag_body.substr(1);
            size_t name_end = 0;
            while (name_end < tag_body.size() &&
                   (std::isalnum((unsigned char)tag_body[name_end]) || tag_body[name_end] == '-'))
                ++name_end;
            std::string tag = util::to_lower(tag_body.substr(0, name_end));
            bool self_closing = !tag_body.empty() && tag_body.back() == '/';

            if (!closing && (tag == "script" || tag == "style")) {
                size_t end = ifind(html, "</" + tag, close + 1);
                if (end == std::string_view::npos) break;
                size_t end_close = html.find('>', end);
                i = end_close == std::string_view::npos ? html.size() : end_close + 1;
                continue;
            }

            if (is_suppressed_tag(tag) && !self_closing) {
                if (closing) {
                    if (suppress_depth > 0) --suppress_depth;
                } else {
                    ++suppress_depth;
                }
            }

            if (!is_inline_tag(tag) && suppress_depth == 0) out.push_back(' ');
            i = close + 1;
            continue;
        }

        if (suppress_depth > 0) {
            ++i;
            continue;
        }

        if (c == '&') {
            size_t semi = html.find(';', i + 1);
            if (semi != std::string_view::npos && semi - i <= 10) {
                append_entity(out, html.substr(i, semi - i + 1));
                i = semi + 1;
                continue;
            }
        }

        out.push_back(c);
        ++i;
    }

    return util::collapse_whitespace(out);
}

} // namespace webmall
