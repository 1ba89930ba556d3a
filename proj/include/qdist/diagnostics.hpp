#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace qdist {

using WarningSink = std::function<void(const std::string&)>;

// Non-fatal conditions (clamped inputs, skipped grid points) are routed to a
// process-wide sink. The default sink writes to stderr.
void warn(const std::string& message);

// Replaces the sink, returning the previous one. Thread-safe.
WarningSink set_warning_sink(WarningSink sink);

/// Collects warnings emitted while alive; restores the previous sink on exit.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  std::vector<std::string> messages() const;
  std::size_t count() const;
  bool contains(const std::string& fragment) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
  WarningSink previous_;
};

}  // namespace qdist
