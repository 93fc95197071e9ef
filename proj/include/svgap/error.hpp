#pragma once

#include <stdexcept>
#include <string>

namespace svgap {

/// Failure raised by any svgap operation.
///
/// `code()` is a stable machine-readable identifier (e.g. "rate_mismatch",
/// "bad_header"); `field()` names the offending input when there is one, so
/// front ends can map it back to a flag or column.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string field = {})
        : std::runtime_error(message), code_(std::move(code)), field_(std::move(field)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string code_;
    std::string field_;
};

}  // namespace svgap
