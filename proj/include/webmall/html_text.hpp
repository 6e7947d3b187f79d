#pragma once

#include <string>
#include <string_view>

namespace webmall {

// Extracts the visible text of an HTML document for indexing. Tags are
// dropped, script/style/comment contents are skipped, and everything under
// navigation landmarks (nav, header, footer) is removed. Whitespace runs
// collapse to single spaces. Malformed input is handled best-effort.
//
// The output never contains '<' or '>'; entity references that would decode
// to those characters are kept in their escaped form.
std::string clean_html(std::string_view html);

} // namespace webmall
