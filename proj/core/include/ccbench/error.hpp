#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccbench {

enum class ErrorCode {
  InputDomain,
  DegenerateIlluminant,
  InsufficientSupport,
  DegenerateScene,
  Parse,
  DuplicateId,
  MissingFile,
  Invariant,
  MissingId,
  ExtraId,
  MixedKinds,
  IncompleteGrid,
  Io,
  Config,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (the CLI in
// particular) can map it to a stable exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ccbench
