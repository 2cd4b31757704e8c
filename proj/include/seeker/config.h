#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <seeker/ir.h>

namespace seeker {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

enum class SensorCategory { Motion, Position, Environment, Any };

std::string_view to_string(SensorCategory category);
std::optional<SensorCategory> parse_sensor_category(std::string_view text);

struct SensorType {
  std::int64_t constant = 0;
  std::string name; // e.g. TYPE_ACCELEROMETER
  SensorCategory category = SensorCategory::Motion;

  bool wildcard() const { return category == SensorCategory::Any; }
  bool operator==(const SensorType&) const = default;
};

/// Sensor type constants, symbolic names and categories. `TYPE_ALL` (-1) is
/// the only wildcard entry permitted.
class SensorTypeTable {
 public:
  SensorTypeTable() = default;
  /// Throws std::invalid_argument on duplicate constants or names.
  explicit SensorTypeTable(std::vector<SensorType> entries);

  /// The Android SDK `Sensor.TYPE_*` constants for the platform sensor types.
  static SensorTypeTable android_default();

  const std::vector<SensorType>& entries() const { return entries_; }
  const SensorType* by_constant(std::int64_t constant) const;
  const SensorType* by_name(std::string_view name) const;

  bool operator==(const SensorTypeTable&) const = default;

 private:
  std::vector<SensorType> entries_;
};

/// Taint-sensitive positions of a call: receiver or an argument index.
struct CallPosition {
  static constexpr int kReceiver = -1;
  static constexpr int kReturn = -2;

  int value = 0;

  static CallPosition receiver() { return {kReceiver}; }
  static CallPosition result() { return {kReturn}; }
  static CallPosition arg(int i) { return {i}; }

  bool is_receiver() const { return value == kReceiver; }
  bool is_return() const { return value == kReturn; }

  /// receiver, return, arg0, arg1, ...
  std::string str() const;
  static std::optional<CallPosition> parse(std::string_view text);

  auto operator<=>(const CallPosition&) const = default;
};

struct MethodSourceSpec {
  MethodSig signature;
  int line = 0;

  std::string id() const { return signature.key(); }
  bool operator==(const MethodSourceSpec& o) const {
    return signature == o.signature &&
        signature.return_type == o.signature.return_type;
  }
};

struct FieldSourceSpec {
  FieldRef field;
  int line = 0;

  std::string id() const { return field.key(); }
  bool array_valued() const;
  bool operator==(const FieldSourceSpec& o) const {
    return field == o.field && field.declared_type == o.field.declared_type;
  }
};

struct SinkSpec {
  MethodSig signature;
  std::set<CallPosition> positions;
  int line = 0;

  std::string id() const { return signature.key(); }
  bool operator==(const SinkSpec& o) const {
    return signature == o.signature &&
        signature.return_type == o.signature.return_type &&
        positions == o.positions;
  }
};

/// Explicit dataflow of an external method, replacing the default summary.
struct SummarySpec {
  MethodSig signature;
  std::vector<std::pair<CallPosition, CallPosition>> flows;
  int line = 0;

  bool operator==(const SummarySpec& o) const {
    return signature == o.signature &&
        signature.return_type == o.signature.return_type && flows == o.flows;
  }
};

struct SourceSinkConfig {
  std::vector<MethodSourceSpec> method_sources;
  std::vector<FieldSourceSpec> field_sources;
  std::vector<SinkSpec> sinks;
  std::vector<SummarySpec> summaries;
  SensorTypeTable sensor_table;
  std::vector<std::string> warnings;

  const MethodSourceSpec* find_method_source(const MethodSig& sig) const;
  const FieldSourceSpec* find_field_source(const FieldRef& field) const;
  const SinkSpec* find_sink(const MethodSig& sig) const;
  const SummarySpec* find_summary(const MethodSig& sig) const;

  /// Warnings are diagnostics and do not take part in equality.
  bool operator==(const SourceSinkConfig& o) const {
    return method_sources == o.method_sources &&
        field_sources == o.field_sources && sinks == o.sinks &&
        summaries == o.summaries && sensor_table == o.sensor_table;
  }
};

/// Parses the line-oriented sources/sinks format. Throws ConfigError.
SourceSinkConfig load_config(std::string_view text);
std::string print_config(const SourceSinkConfig& config);

/// Sensor sources, standard leak sinks, StringBuilder summaries and the
/// Android sensor table.
SourceSinkConfig default_sensor_config();
std::string_view default_sensor_config_text();

struct Classification {
  enum class Kind { None, MethodSource, FieldSource, Sink };

  Kind kind = Kind::None;
  const MethodSourceSpec* method_source = nullptr;
  const FieldSourceSpec* field_source = nullptr;
  const SinkSpec* sink = nullptr;

  bool operator==(const Classification&) const = default;
};

Classification classify_statement(const SourceSinkConfig& config,
                                  const IRStatement& statement);

} // namespace seeker
