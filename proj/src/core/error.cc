#include "arthro/error.h"

namespace arthro {

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInput: return "input";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kOrder: return "order";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kTruncation: return "truncation";
    case ErrorCategory::kRange: return "range";
    case ErrorCategory::kBehindCamera: return "behind-camera";
    case ErrorCategory::kInsufficientData: return "insufficient-data";
    case ErrorCategory::kDegenerateView: return "degenerate-view";
    case ErrorCategory::kDegenerateMotion: return "degenerate-motion";
    case ErrorCategory::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorCategory::kNoConsensus: return "no-consensus";
    case ErrorCategory::kNoOverlap: return "no-overlap";
    case ErrorCategory::kFusion: return "fusion";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInput: return 2;
    case ErrorCategory::kConfig: return 3;
    case ErrorCategory::kIo: return 4;
    case ErrorCategory::kParse: return 10;
    case ErrorCategory::kOrder: return 11;
    case ErrorCategory::kFormat: return 12;
    case ErrorCategory::kTruncation: return 13;
    case ErrorCategory::kRange: return 20;
    case ErrorCategory::kBehindCamera: return 21;
    case ErrorCategory::kInsufficientData: return 30;
    case ErrorCategory::kDegenerateView: return 31;
    case ErrorCategory::kDegenerateMotion: return 32;
    case ErrorCategory::kDegenerateGeometry: return 33;
    case ErrorCategory::kNoConsensus: return 40;
    case ErrorCategory::kNoOverlap: return 41;
    case ErrorCategory::kFusion: return 42;
  }
  return 1;
}

}  // namespace arthro
