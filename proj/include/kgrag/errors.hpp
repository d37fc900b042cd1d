#pragma once

#include <stdexcept>
#include <string>

namespace kgrag {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Connection-level failure (no HTTP status available).
class TransportError : public Error {
public:
    using Error::Error;
};

// Retryable failures persisted through every allowed attempt.
class RetryExhaustedError : public Error {
public:
    RetryExhaustedError(int attempts, const std::string& last_error)
        : Error("retries exhausted after " + std::to_string(attempts) +
                " attempts: " + last_error),
          attempts_(attempts) {}

    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

// Non-retryable HTTP status (4xx other than 429).
class HttpStatusError : public Error {
public:
    HttpStatusError(int status, std::string body_excerpt)
        : Error("HTTP " + std::to_string(status) + ": " + body_excerpt),
          status_(status),
          body_excerpt_(std::move(body_excerpt)) {}

    int status() const noexcept { return status_; }
    const std::string& body_excerpt() const noexcept { return body_excerpt_; }

private:
    int status_;
    std::string body_excerpt_;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

class ProviderContractError : public Error {
public:
    using Error::Error;
};

class ExtractionParseError : public Error {
public:
    ExtractionParseError(const std::string& what, std::string raw)
        : Error(what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

class RetrievalError : public Error {
public:
    using Error::Error;
};

class AggregationError : public Error {
public:
    using Error::Error;
};

class LoadError : public Error {
public:
    LoadError(const std::string& what, std::size_t line)
        : Error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

} // namespace kgrag
