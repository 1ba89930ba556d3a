#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qdist/serialize.hpp"

namespace qdist::cli {

/// Flat dotted-key configuration ("soqfr.basis_size"). Every key has a
/// default; unknown keys are rejected so typos fail fast.
class RunConfig {
 public:
  RunConfig();

  /// Merges a JSON object of dotted keys. A run manifest (an object with a
  /// "config" member) is accepted and its config used.
  void merge_file(const std::filesystem::path& path);
  void merge(const Json& object, const std::string& source);
  /// Sets one key from command-line text; the text is read as JSON when it
  /// parses (numbers, booleans, arrays, null), otherwise as a string.
  void set(const std::string& key, const std::string& text);

  bool is_null(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// Array of strings, or a comma-separated string.
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  const Json& raw(const std::string& key) const;

  /// Resolved configuration, excluding where outputs are written.
  Json resolved() const;

 private:
  Json values_;
};

}  // namespace qdist::cli
