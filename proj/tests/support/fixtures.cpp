#include "fixtures.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace seeker::testing {

std::filesystem::path corpus_dir() { return SEEKER_CORPUS_DIR; }

std::string read_corpus(const std::string& file_name) {
  std::ifstream in(corpus_dir() / file_name, std::ios::binary);
  if (!in) {
    throw std::runtime_error("missing corpus file " + file_name);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Analyzed analyze_text(std::string_view text,
                      const SourceSinkConfig& config,
                      const AnalysisOptions& options,
                      const EntryPointModel& entry_model) {
  Analyzed a;
  a.program = parse_program(text);
  a.graphs = build_graphs(a.program, entry_model);
  a.result = analyze(a.program, a.graphs, config, options);
  a.attributions = attribute_all(a.result.flows, a.program, a.graphs.cfgs,
                                 config.sensor_table);
  return a;
}

MethodId method_id(const IRProgram& program, std::string_view key) {
  for (MethodId m = 0; m < program.method_count(); ++m) {
    if (program.method(m).sig.key() == key) {
      return m;
    }
  }
  throw std::invalid_argument("no method " + std::string(key));
}

namespace {

auto tie(const ExpectedLeak& l) {
  return std::tie(l.source, l.origin_method, l.origin_index, l.sink,
                  l.sink_method, l.sink_index, l.position, l.sensor);
}

} // namespace

bool ExpectedLeak::operator<(const ExpectedLeak& o) const {
  return tie(*this) < tie(o);
}

bool ExpectedLeak::operator==(const ExpectedLeak& o) const {
  return tie(*this) == tie(o);
}

std::vector<ExpectedLeak> observed_leaks(const Analyzed& a) {
  std::vector<ExpectedLeak> out;
  for (std::size_t i = 0; i < a.result.flows.size(); ++i) {
    const auto& f = a.result.flows[i];
    out.push_back({f.source_id, a.program.method(f.origin.method).sig.key(),
                   f.origin.index, f.sink_id,
                   a.program.method(f.sink.method).sig.key(), f.sink.index,
                   f.position.str(), a.attributions[i].sensor()});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::string, std::vector<ExpectedLeak>>>
reference_expectations() {
  const std::string values = "android.hardware.SensorEvent#values";
  const std::string log_d =
      "android.util.Log#d(java.lang.String,java.lang.String)";
  const std::string log_v =
      "android.util.Log#v(java.lang.String,java.lang.String)";

  // The enumerating program only reads sensors; with a log call added, one
  // pressure leak.
  const std::string activity =
      "com.example.SensorActivity#onSensorChanged(android.hardware."
      "SensorEvent)";
  // The type switch: one leak per case; values is read at 4, 13 and 22, and
  // each case logs x at 10, 19 and 28.
  const std::string main =
      "com.example.MainActivity#onSensorChanged(android.hardware.SensorEvent)";
  // The values chain: three reads of values (0, 2, 4) reach the one Log.v at 15.
  const std::string listener =
      "a.b.b#onSensorChanged(android.hardware.SensorEvent)";
  // The dialog thread: the proximity value leaves through the worker
  // thread's handler.
  const std::string proximity =
      "com.tencent.pb.ProximityListener#onSensorChanged(android.hardware."
      "SensorEvent)";

  std::vector<std::pair<std::string, std::vector<ExpectedLeak>>> out{
      {"sensor_enum.ir", {}},
      {"sensor_enum_sink.ir",
       {{values, activity, 0, log_d, activity, 3, "arg1", "TYPE_PRESSURE"}}},
      {"type_switch.ir",
       {{values, main, 4, log_d, main, 10, "arg1", "TYPE_ACCELEROMETER"},
        {values, main, 13, log_d, main, 19, "arg1", "TYPE_GYROSCOPE"},
        {values, main, 22, log_d, main, 28, "arg1", "TYPE_ROTATION_VECTOR"}}},
      {"values_chain.ir",
       {{values, listener, 0, log_v, listener, 15, "arg1",
         "TYPE_ACCELEROMETER"},
        {values, listener, 2, log_v, listener, 15, "arg1",
         "TYPE_ACCELEROMETER"},
        {values, listener, 4, log_v, listener, 15, "arg1",
         "TYPE_ACCELEROMETER"}}},
      {"dialog_thread.ir",
       {{values, proximity, 0, "android.os.Handler#sendMessage(android.os."
                               "Message)",
         "com.tencent.pb.LogThread#run()", 3, "arg0", "TYPE_PROXIMITY"}}},
  };
  for (auto& [name, leaks] : out) {
    std::sort(leaks.begin(), leaks.end());
  }
  return out;
}

std::string describe(const ExpectedLeak& l) {
  return l.source + " @" + l.origin_method + ":" +
      std::to_string(l.origin_index) + " -> " + l.sink + " @" +
      l.sink_method + ":" + std::to_string(l.sink_index) + " " + l.position +
      " [" + (l.sensor.empty() ? "-" : l.sensor) + "]";
}

std::vector<SourceProbe> sensor_source_probes() {
  auto wrap = [](const std::string& statement) {
    return "class probe.P extends java.lang.Object {\n"
           "  method void run(android.hardware.SensorEvent e, "
           "android.hardware.Sensor s, android.hardware.SensorManager m) {\n"
           "    local java.lang.Object r\n"
           "    " + statement + "\n"
           "    return\n"
           "  }\n"
           "}\n";
  };
  auto field = [&](const std::string& cls, const std::string& name) {
    auto id = cls + "#" + name;
    return SourceProbe{id, SourceKind::Field, wrap("r = e." + id)};
  };
  auto method = [&](const std::string& cls, const std::string& name,
                    const std::string& params, const std::string& args,
                    const std::string& receiver) {
    auto id = cls + "#" + name + "(" + params + ")";
    auto with = args.empty() ? std::string() : " with (" + args + ")";
    return SourceProbe{id, SourceKind::Method,
                       wrap("r = invoke virtual " + id + " on " + receiver +
                            with)};
  };
  const std::string event = "android.hardware.SensorEvent";
  const std::string sensor = "android.hardware.Sensor";
  const std::string manager = "android.hardware.SensorManager";
  return {
      field(event, "values"),
      field(event, "timestamp"),
      method(sensor, "getName", "", "", "s"),
      method(sensor, "getVendor", "", "", "s"),
      method(sensor, "getVersion", "", "", "s"),
      method(manager, "getDefaultSensor", "int", "1", "m"),
      method(sensor, "getMaximumRange", "", "", "s"),
      method(manager, "getSensorList", "int", "-1", "m"),
      method(sensor, "getType", "", "", "s"),
      method(sensor, "getResolution", "", "", "s"),
      method(sensor, "getPower", "", "", "s"),
  };
}

} // namespace seeker::testing
