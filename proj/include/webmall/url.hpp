#pragma once

#include <string>
#include <string_view>

namespace webmall {

// Decomposed absolute URL. `port` is -1 when the authority carries no
// explicit port.
struct UrlParts {
    std::string scheme;
    std::string host;
    int port = -1;
    std::string path;     // starts with '/' or empty
    std::string query;    // without '?'
    std::string fragment; // without '#'

    std::string authority() const; // host[:port]
    std::string str() const;
};

// Throws UrlError when the input is not an absolute scheme://host... URL.
UrlParts parse_url(std::string_view url);

// Canonical form used for all URL identity in the testbed:
//   - scheme and host lowercased
//   - default ports removed (http:80, https:443)
//   - fragment stripped
//   - trailing slash stripped from non-root paths
//   - percent-escapes of unreserved characters decoded (path and query)
// Idempotent. Throws UrlError on unparseable input.
std::string normalize_url(std::string_view url);

// Resolves `href` against `base_url` (absolute). Handles absolute URLs,
// scheme-relative, path-absolute, relative paths, queries, and fragments.
std::string resolve_href(const std::string& base_url, std::string_view href);

} // namespace webmall
