#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace squill {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Syntax error with the byte offset of the offending token and a hint about
// what the parser expected there.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset, std::string expected)
        : Error(message + " at byte " + std::to_string(offset) +
                (expected.empty() ? "" : " (expected " + expected + ")")),
          offset_(offset),
          expected_(std::move(expected)) {}

    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

class UnknownPatternError : public Error {
public:
    using Error::Error;
};

class DatabaseError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class EmbeddingBackendError : public Error {
public:
    using Error::Error;
};

// Raised when no sample of a backend response yields a parseable payload.
class LlmOutputMalformedError : public Error {
public:
    using Error::Error;
};

class TagMissingError : public Error {
public:
    using Error::Error;
};

// Transient transport failure; the gateway retries these.
class TransportError : public Error {
public:
    using Error::Error;
};

class BackendUnavailableError : public Error {
public:
    using Error::Error;
};

class AllLinkersFailedError : public Error {
public:
    using Error::Error;
};

class AllGeneratorsFailedError : public Error {
public:
    using Error::Error;
};

class NoExecutableCandidateError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace squill
