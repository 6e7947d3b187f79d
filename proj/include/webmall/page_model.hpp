#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace webmall {

struct PageLink {
    std::string text;
    std::string href; // absolute, normalized
};

struct FormField {
    std::string name;
    std::string type;  // input type, "select", or "textarea"
    std::string value; // pre-filled value if any
};

struct PageForm {
    std::string action; // absolute, normalized
    std::string method; // "get" or "post"
    std::vector<FormField> fields;
};

// Simplified page observation handed to the browsing agent: the document
// structure it can act on (links to follow, forms to fill) plus the visible
// text. Hrefs and form actions are resolved against the page URL.
struct PageModel {
    std::string url;
    std::string title;
    std::vector<std::string> headings;
    std::vector<PageLink> links;
    std::vector<PageForm> forms;
    std::string text;
};

PageModel extract_page_model(std::string_view html, const std::string& url);

// Compact JSON rendering used as the agent observation and transcript digest.
std::string page_model_digest(const PageModel& page);

} // namespace webmall
