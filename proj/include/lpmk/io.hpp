#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace lpmk {

/// Every floating-point value in emitted artifacts is formatted with 17
/// significant digits so identical runs produce byte-identical files.
std::string format_double(double v);

/// Order-preserving JSON tree for result emission. Keys appear in insertion
/// order and numbers use format_double, which keeps outputs deterministic
/// across runs and worker counts.
class JsonValue {
 public:
  static JsonValue object();
  static JsonValue array();
  static JsonValue number(double v);
  static JsonValue integer(long long v);
  static JsonValue boolean(bool v);
  static JsonValue string(std::string v);

  /// Append a key to an object (throws std::invalid_argument otherwise).
  JsonValue& add(const std::string& key, JsonValue v);
  /// Append an element to an array (throws std::invalid_argument otherwise).
  JsonValue& push(JsonValue v);
  /// Convenience for arrays of numbers.
  static JsonValue number_array(const std::vector<double>& values);

  std::string dump(int indent = 2) const;

 private:
  enum class Kind { kObject, kArray, kNumber, kInteger, kBoolean, kString };
  explicit JsonValue(Kind kind) : kind_(kind) {}
  void dump_to(std::string& out, int indent, int depth) const;

  Kind kind_;
  double number_ = 0.0;
  long long integer_ = 0;
  bool boolean_ = false;
  std::string string_;
  std::vector<std::pair<std::string, JsonValue>> members_;
  std::vector<JsonValue> elements_;
};

/// Comma-separated table with a header row and '.' decimal separator.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  /// Row length must match the header (throws std::invalid_argument).
  void add_row(const std::vector<double>& values);
  std::string dump() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Write content to path, throwing std::runtime_error on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace lpmk
