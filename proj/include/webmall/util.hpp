#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace webmall::util {

std::string to_lower(std::string_view s);

// Splits into lowercase alphanumeric runs. "AMD Ryzen-9" -> {"amd","ryzen","9"}
std::vector<std::string> tokenize(std::string_view text);

bool starts_with(std::string_view s, std::string_view prefix);

std::string trim(std::string_view s);

// Collapses whitespace runs to single spaces and trims both ends.
std::string collapse_whitespace(std::string_view s);

// FNV-1a 64-bit. Stable across platforms; used by the hashing embedder.
std::uint64_t fnv1a64(std::string_view s);

// "19900", "USD" -> "$199.00"; unknown currencies fall back to "199.00 XXX".
std::string format_price(long long cents, const std::string& currency);

// Cents to a plain decimal string: 19900 -> "199.00".
std::string cents_to_decimal(long long cents);

// Decimal money string to cents: "199", "199.9", "199.99" -> cents.
// Throws std::invalid_argument on malformed input or more than 2 decimals.
long long decimal_to_cents(std::string_view text);

// application/x-www-form-urlencoded codec.
std::string form_encode(const std::vector<std::pair<std::string, std::string>>& fields);
std::vector<std::pair<std::string, std::string>> form_decode(std::string_view body);

std::string percent_encode(std::string_view s);
std::string percent_decode(std::string_view s);

// Escapes &, <, >, ", ' for HTML text and attribute contexts.
std::string html_escape(std::string_view s);

// Lowercase, non-alphanumerics to single hyphens: "PC Components" -> "pc-components".
std::string slugify(std::string_view s);

bool luhn_valid(std::string_view card_number);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace webmall::util
