#include "qdist/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace qdist {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& current_sink() {
  static WarningSink sink = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return sink;
}

}  // namespace

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(message);
}

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  WarningSink previous = std::move(current_sink());
  current_sink() = std::move(sink);
  return previous;
}

struct ScopedWarningCapture::State {
  std::vector<std::string> messages;
};

// The sink is invoked under sink_mutex, so State needs no lock of its own as
// long as readers also take it.
ScopedWarningCapture::ScopedWarningCapture() : state_(std::make_unique<State>()) {
  State* s = state_.get();
  previous_ = set_warning_sink([s](const std::string& msg) { s->messages.push_back(msg); });
}

ScopedWarningCapture::~ScopedWarningCapture() {
  set_warning_sink(std::move(previous_));
}

std::vector<std::string> ScopedWarningCapture::messages() const {
  std::lock_guard lock(sink_mutex());
  return state_->messages;
}

std::size_t ScopedWarningCapture::count() const {
  std::lock_guard lock(sink_mutex());
  return state_->messages.size();
}

bool ScopedWarningCapture::contains(const std::string& fragment) const {
  std::lock_guard lock(sink_mutex());
  for (const auto& m : state_->messages)
    if (m.find(fragment) != std::string::npos) return true;
  return false;
}

}  // namespace qdist
