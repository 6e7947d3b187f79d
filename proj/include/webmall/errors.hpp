#pragma once

#include <stdexcept>
#include <string>

namespace webmall {

// Base class for all testbed errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent catalog input.
class CatalogError : public Error {
public:
    explicit CatalogError(const std::string& what) : Error(what) {}
};

// Input string is not a parseable URL.
class UrlError : public Error {
public:
    explicit UrlError(const std::string& what) : Error(what) {}
};

// Index construction or persistence failure.
class IndexError : public Error {
public:
    explicit IndexError(const std::string& what) : Error(what) {}
};

// Transactional state machine rejections, carrying a machine-readable kind
// so the shop frontends can map them to their own error payloads.
class CommerceError : public Error {
public:
    enum class Kind {
        UnknownSession,
        UnknownShop,
        UnknownOffer,
        ShopMismatch,
        BadQuantity,
        EmptyCart,
        MissingShipping,
        InvalidCard,
    };

    CommerceError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Task file problems.
class TaskError : public Error {
public:
    explicit TaskError(const std::string& what) : Error(what) {}
};

// Scoring / aggregation problems (empty result sets, unknown model ids).
class EvalError : public Error {
public:
    explicit EvalError(const std::string& what) : Error(what) {}
};

// Remote endpoints unreachable or misbehaving.
class NetError : public Error {
public:
    explicit NetError(const std::string& what) : Error(what) {}
};

// Bad CLI / run configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

} // namespace webmall
