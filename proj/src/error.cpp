#include "hdod/error.hpp"

namespace hdod {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvalidCounts: return "InvalidCounts";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyOutcomes: return "EmptyOutcomes";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace hdod
