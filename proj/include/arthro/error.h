#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace arthro {

// Every failure the toolkit reports falls into exactly one category. The CLI
// maps each category to its own exit code and a stable string so scripts can
// branch on the failure type.
enum class ErrorCategory {
  kInput,
  kConfig,
  kIo,
  kParse,
  kOrder,
  kFormat,
  kTruncation,
  kRange,
  kBehindCamera,
  kInsufficientData,
  kDegenerateView,
  kDegenerateMotion,
  kDegenerateGeometry,
  kNoConsensus,
  kNoOverlap,
  kFusion,
};

std::string_view category_name(ErrorCategory category);
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  using Context = std::map<std::string, std::string>;

  Error(ErrorCategory category, const std::string& message, Context context = {})
      : std::runtime_error(message), category_(category), context_(std::move(context)) {}

  ErrorCategory category() const noexcept { return category_; }
  const Context& context() const noexcept { return context_; }

 private:
  ErrorCategory category_;
  Context context_;
};

}  // namespace arthro
