#pragma once

#include <exception>
#include <string>
#include <string_view>

namespace causalrag {

// Base error carrying a stage-tag chain so pipeline failures report where
// they happened ("retrieve: ...", "discover: ...").
class Error : public std::exception {
public:
    explicit Error(std::string message) : message_(std::move(message)) {}
    const char* what() const noexcept override { return message_.c_str(); }
    void add_stage(std::string_view stage) {
        message_.insert(0, std::string(stage) + ": ");
    }

private:
    std::string message_;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};
class ContractError : public Error {
public:
    using Error::Error;
};
class DegenerateInputError : public Error {
public:
    using Error::Error;
};
class CorruptionError : public Error {
public:
    using Error::Error;
};
class FormatError : public Error {
public:
    using Error::Error;
};
class TransportError : public Error {
public:
    using Error::Error;
};
class AuthError : public Error {
public:
    using Error::Error;
};
class ProtocolError : public Error {
public:
    using Error::Error;
};
class MockMissError : public Error {
public:
    using Error::Error;
};
class ExtractionFailedError : public Error {
public:
    using Error::Error;
};
class DiscoveryFailedError : public Error {
public:
    using Error::Error;
};
class EmptyIndexError : public Error {
public:
    using Error::Error;
};

// Failures that originate in the model/provider layer (CLI exit code 3).
inline bool is_provider_error(const Error& e) {
    return dynamic_cast<const TransportError*>(&e) != nullptr ||
           dynamic_cast<const AuthError*>(&e) != nullptr ||
           dynamic_cast<const ProtocolError*>(&e) != nullptr ||
           dynamic_cast<const MockMissError*>(&e) != nullptr;
}

// Runs f, prefixing any causalrag::Error thrown with the stage name.
template <typename F>
auto with_stage(std::string_view stage, F&& f) -> decltype(f()) {
    try {
        return std::forward<F>(f)();
    } catch (Error& e) {
        e.add_stage(stage);
        throw;
    }
}

}  // namespace causalrag
