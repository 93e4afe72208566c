#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tcost::cli {

using Value = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

/// Ordered key/value fields plus named tables; every output format renders
/// the same object, so JSON and CSV always carry identical numbers.
class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  void set(const std::string& key, Value v);
  Table& add_table(std::string name, std::vector<std::string> columns);
  void warn(std::string message) { warnings_.push_back(std::move(message)); }

  [[nodiscard]] const std::string& command() const noexcept { return command_; }
  [[nodiscard]] const std::vector<std::pair<std::string, Value>>& fields() const noexcept {
    return fields_;
  }
  [[nodiscard]] const std::deque<Table>& tables() const noexcept { return tables_; }
  [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::string command_;
  std::vector<std::pair<std::string, Value>> fields_;
  std::deque<Table> tables_;
  std::vector<std::string> warnings_;
};

inline constexpr const char* kSchemaVersion = "1.0";

enum class Format { Json, Csv, Human };

[[nodiscard]] std::string render(const Report& report, Format format);
[[nodiscard]] std::string render_json(const Report& report);
[[nodiscard]] std::string render_csv(const Report& report);
[[nodiscard]] std::string render_human(const Report& report);

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_double(double x);

}  // namespace tcost::cli
