#include "webmall/url.hpp"

#include "webmall/errors.hpp"
#include "webmall/util.hpp"

#include <cctype>
#include <vector>

namespace webmall {

std::string UrlParts::authority() const {
    if (port < 0) return host;
    return host + ":" + std::to_string(port);
}

std::string UrlParts::str() const {
    std::string out = scheme + "://" + authority() + path;
    if (!query.empty()) out += "?" + query;
    if (!fragment.empty()) out += "#" + fragment;
    return out;
}

UrlParts parse_url(std::string_view url) {
    UrlParts p;
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0)
        throw UrlError("not an absolute URL: " + std::string(url));
    p.scheme = std::string(url.substr(0, scheme_end));
    for (unsigned char c : p.scheme)
        if (!std::isalnum(c) && c != '+' && c != '-' && c != '.')
            throw UrlError("bad scheme in URL: " + std::string(url));

    std::string_view rest = url.substr(scheme_end + 3);
    size_t auth_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, auth_end);
    if (authority.empty()) throw UrlError("missing host in URL: " + std::string(url));

    size_t colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        std::string_view port_str = authority.substr(colon + 1);
        if (port_str.empty()) throw UrlError("empty port in URL: " + std::string(url));
        int port = 0;
        for (unsigned char c : port_str) {
            if (!std::isdigit(c)) throw UrlError("bad port in URL: " + std::string(url));
            port = port * 10 + (c - '0');
            if (port > 65535) throw UrlError("port out of range in URL: " + std::string(url));
        }
        p.host = std::string(authority.substr(0, colon));
        p.port = port;
    } else {
        p.host = std::string(authority);
    }
    if (p.host.empty()) throw UrlError("missing host in URL: " + std::string(url));

    if (auth_end == std::string_view::npos) return p;
    std::string_view tail = rest.substr(auth_end);

    size_t frag = tail.find('#');
    if (frag != std::string_view::npos) {
        p.fragment = std::string(tail.substr(frag + 1));
        tail = tail.substr(0, frag);
    }
    size_t q = tail.find('?');
    if (q != std::string_view::npos) {
        p.query = std::string(tail.substr(q + 1));
        tail = tail.substr(0, q);
    }
    p.path = std::string(tail);
    return p;
}

namespace {

bool is_unreserved(unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~';
}

int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// Decodes only %XX escapes that denote unreserved characters; all other
// escapes are kept verbatim so the transform stays idempotent.
std::string decode_unreserved(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            int hi = hex_val(s[i + 1]), lo = hex_val(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                auto c = static_cast<unsigned char>(hi * 16 + lo);
                if (is_unreserved(c)) {
                    out.push_back(static_cast<char>(c));
                    i += 2;
                    continue;
                }
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

} // namespace

std::string normalize_url(std::string_view url) {
    UrlParts p = parse_url(url);
    p.scheme = util::to_lower(p.scheme);
    p.host = util::to_lower(p.host);
    if ((p.scheme == "http" && p.port == 80) || (p.scheme == "https" && p.port == 443))
        p.port = -1;
    p.fragment.clear();
    p.path = decode_unreserved(p.path);
    p.query = decode_unreserved(p.query);
    if (p.path.size() > 1 && p.path.back() == '/') p.path.pop_back();
    return p.str();
}

std::string resolve_href(const std::string& base_url, std::string_view href) {
    if (href.empty()) return base_url;
    if (href.find("://") != std::string_view::npos) return std::string(href);

    UrlParts base = parse_url(base_url);
    base.fragment.clear();

    if (util::starts_with(href, "//")) return base.scheme + ":" + std::string(href);
    if (href[0] == '#') {
        base.query.clear();
        // fragment-only reference points at the same resource
        return base.str();
    }
    if (href[0] == '?') {
        base.query = std::string(href.substr(1));
        return base.str();
    }

    std::string_view path_part = href;
    std::string query;
    size_t frag = path_part.find('#');
    if (frag != std::string_view::npos) path_part = path_part.substr(0, frag);
    size_t q = path_part.find('?');
    if (q != std::string_view::npos) {
        query = std::string(path_part.substr(q + 1));
        path_part = path_part.substr(0, q);
    }

    std::string path;
    if (!path_part.empty() && path_part[0] == '/') {
        path = std::string(path_part);
    } else {
        std::string dir = base.path;
        size_t slash = dir.rfind('/');
        dir = slash == std::string::npos ? "/" : dir.substr(0, slash + 1);
        path = dir + std::string(path_part);
    }

    // collapse "." and ".." segments
    std::vector<std::string> segs;
    size_t pos = 0;
    while (pos <= path.size()) {
        size_t next = path.find('/', pos);
        std::string seg = next == std::string::npos ? path.substr(pos)
                                                    : path.substr(pos, next - pos);
        if (seg == "..") {
            if (!segs.empty()) segs.pop_back();
        } else if (!seg.empty() && seg != ".") {
            segs.push_back(seg);
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    std::string joined = "/";
    for (size_t i = 0; i < segs.size(); ++i) {
        joined += segs[i];
        if (i + 1 < segs.size()) joined += "/";
    }
    if (!path.empty() && path.back() == '/' && joined.size() > 1) joined += "/";

    base.path = joined;
    base.query = query;
    return base.str();
}

} // namespace webmall
