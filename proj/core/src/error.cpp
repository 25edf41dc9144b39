#include "ccbench/error.hpp"

namespace ccbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InputDomain: return "input-domain";
    case ErrorCode::DegenerateIlluminant: return "degenerate-illuminant";
    case ErrorCode::InsufficientSupport: return "insufficient-support";
    case ErrorCode::DegenerateScene: return "degenerate-scene";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::DuplicateId: return "duplicate-id";
    case ErrorCode::MissingFile: return "missing-file";
    case ErrorCode::Invariant: return "invariant";
    case ErrorCode::MissingId: return "missing-id";
    case ErrorCode::ExtraId: return "extra-id";
    case ErrorCode::MixedKinds: return "mixed-kinds";
    case ErrorCode::IncompleteGrid: return "incomplete-grid";
    case ErrorCode::Io: return "io";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

}  // namespace ccbench
