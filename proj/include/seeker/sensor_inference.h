#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <seeker/cfg.h>
#include <seeker/config.h>
#include <seeker/ir.h>
#include <seeker/taint.h>

namespace seeker {

enum class RegistrationApi { GetDefaultSensor, GetSensorList };

std::string_view to_string(RegistrationApi api);

/// A `SensorManager#getDefaultSensor(int)` or `getSensorList(int)` call.
struct SensorRegistration {
  std::string owner_class;
  StmtRef site;
  /// Known only when intraprocedural constant propagation resolves it.
  std::optional<std::int64_t> type_constant;
  RegistrationApi via = RegistrationApi::GetDefaultSensor;

  bool operator==(const SensorRegistration&) const = default;
};

enum class Verdict { Inferred, Ambiguous, Unknown };
enum class Evidence { SingleSensorRule, BranchGuard, TypeConstantArgument, None };

std::string_view to_string(Verdict verdict);
std::string_view to_string(Evidence evidence);
std::optional<Verdict> parse_verdict(std::string_view text);
std::optional<Evidence> parse_evidence(std::string_view text);

struct SensorAttribution {
  Verdict verdict = Verdict::Unknown;
  /// Exactly one name when Inferred; the sorted candidates when Ambiguous.
  std::vector<std::string> candidates;
  Evidence evidence = Evidence::None;
  /// Branch evidence overrode a disagreeing single-sensor rule.
  bool conflict = false;

  static SensorAttribution inferred(std::string name, Evidence evidence);
  static SensorAttribution unknown();

  /// The inferred sensor name, or empty.
  std::string sensor() const;

  bool operator==(const SensorAttribution&) const = default;
};

/// Integer constants of locals before each statement; nullopt in the map
/// means "not a single constant".
using ConstantState = std::map<std::string, std::optional<std::int64_t>>;

std::vector<std::optional<ConstantState>> propagate_constants(
    const IRMethod& method, const Cfg& cfg);

/// All registrations in the program, ordered by site.
std::vector<SensorRegistration> collect_registrations(
    const IRProgram& program, const std::vector<Cfg>& cfgs);

/// Inferred when the leak's class registers exactly one known, non-wildcard
/// sensor type and nothing unresolved; nullopt defers to branch inference.
std::optional<SensorAttribution> infer_single(
    const LeakFlow& leak,
    const IRProgram& program,
    const std::vector<SensorRegistration>& registrations,
    const SensorTypeTable& table);

/// Resolves the innermost guard on `getType()` of the event's sensor that
/// dominates the leak's origin.
SensorAttribution infer_branch(
    const LeakFlow& leak,
    const IRProgram& program,
    const Cfg& cfg,
    const std::vector<SensorRegistration>& registrations,
    const SensorTypeTable& table);

/// One attribution per flow, in order.
std::vector<SensorAttribution> attribute_all(const std::vector<LeakFlow>& flows,
                                             const IRProgram& program,
                                             const std::vector<Cfg>& cfgs,
                                             const SensorTypeTable& table);

} // namespace seeker
