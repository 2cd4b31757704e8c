#include <seeker/config.h>

#include <set>

namespace seeker {

std::string_view to_string(SensorCategory category) {
  switch (category) {
    case SensorCategory::Motion:
      return "Motion";
    case SensorCategory::Position:
      return "Position";
    case SensorCategory::Environment:
      return "Environment";
    case SensorCategory::Any:
      return "Any";
  }
  return "?";
}

std::optional<SensorCategory> parse_sensor_category(std::string_view text) {
  for (auto c : {SensorCategory::Motion, SensorCategory::Position,
                 SensorCategory::Environment, SensorCategory::Any}) {
    if (to_string(c) == text) {
      return c;
    }
  }
  return std::nullopt;
}

SensorTypeTable::SensorTypeTable(std::vector<SensorType> entries)
    : entries_(std::move(entries)) {
  std::set<std::int64_t> constants;
  std::set<std::string> names;
  for (const auto& e : entries_) {
    if (!constants.insert(e.constant).second) {
      throw std::invalid_argument(
          "duplicate sensor constant " + std::to_string(e.constant));
    }
    if (!names.insert(e.name).second) {
      throw std::invalid_argument("duplicate sensor name " + e.name);
    }
    if (e.wildcard() && e.constant != -1) {
      throw std::invalid_argument(
          "only constant -1 may use the Any category (" + e.name + ")");
    }
  }
}

SensorTypeTable SensorTypeTable::android_default() {
  using C = SensorCategory;
  // android.hardware.Sensor.TYPE_* values.
  return SensorTypeTable({
      {-1, "TYPE_ALL", C::Any},
      {1, "TYPE_ACCELEROMETER", C::Motion},
      {2, "TYPE_MAGNETIC_FIELD", C::Position},
      {3, "TYPE_ORIENTATION", C::Position},
      {4, "TYPE_GYROSCOPE", C::Motion},
      {5, "TYPE_LIGHT", C::Environment},
      {6, "TYPE_PRESSURE", C::Environment},
      {7, "TYPE_TEMPERATURE", C::Environment},
      {8, "TYPE_PROXIMITY", C::Position},
      {9, "TYPE_GRAVITY", C::Motion},
      {10, "TYPE_LINEAR_ACCELERATION", C::Motion},
      {11, "TYPE_ROTATION_VECTOR", C::Motion},
      {12, "TYPE_RELATIVE_HUMIDITY", C::Environment},
      {13, "TYPE_AMBIENT_TEMPERATURE", C::Environment},
      {14, "TYPE_MAGNETIC_FIELD_UNCALIBRATED", C::Position},
      {15, "TYPE_GAME_ROTATION_VECTOR", C::Position},
      {16, "TYPE_GYROSCOPE_UNCALIBRATED", C::Motion},
      {17, "TYPE_SIGNIFICANT_MOTION", C::Motion},
      {18, "TYPE_STEP_DETECTOR", C::Motion},
      {19, "TYPE_STEP_COUNTER", C::Motion},
      {20, "TYPE_GEOMAGNETIC_ROTATION_VECTOR", C::Position},
  });
}

const SensorType* SensorTypeTable::by_constant(std::int64_t constant) const {
  for (const auto& e : entries_) {
    if (e.constant == constant) {
      return &e;
    }
  }
  return nullptr;
}

const SensorType* SensorTypeTable::by_name(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) {
      return &e;
    }
  }
  return nullptr;
}

} // namespace seeker
