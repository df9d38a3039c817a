#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mfgnet {

enum class ErrorCode {
    invalid_argument,
    parse,
    validation,
    solve,
    io,
    not_converged,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

/// List of human-readable invariant violations; empty means admissible.
struct ValidationReport {
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    void add(std::string message) { violations.push_back(std::move(message)); }
};

}  // namespace mfgnet
