#include <seeker/config.h>

#include <charconv>
#include <regex>
#include <sstream>

#include "lexical.h"

namespace seeker {

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      line_(line) {}

std::string CallPosition::str() const {
  if (is_receiver()) {
    return "receiver";
  }
  if (is_return()) {
    return "return";
  }
  return "arg" + std::to_string(value);
}

std::optional<CallPosition> CallPosition::parse(std::string_view text) {
  if (text == "receiver") {
    return receiver();
  }
  if (text == "return") {
    return result();
  }
  if (text.substr(0, 3) != "arg" || text.size() == 3) {
    return std::nullopt;
  }
  int index = 0;
  auto digits = text.substr(3);
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || index < 0) {
    return std::nullopt;
  }
  return arg(index);
}

bool FieldSourceSpec::array_valued() const {
  const auto& t = field.declared_type;
  return t.size() >= 2 && t.compare(t.size() - 2, 2, "[]") == 0;
}

const MethodSourceSpec* SourceSinkConfig::find_method_source(
    const MethodSig& sig) const {
  for (const auto& s : method_sources) {
    if (s.signature == sig) {
      return &s;
    }
  }
  return nullptr;
}

const FieldSourceSpec* SourceSinkConfig::find_field_source(
    const FieldRef& field) const {
  for (const auto& s : field_sources) {
    if (s.field == field) {
      return &s;
    }
  }
  return nullptr;
}

const SinkSpec* SourceSinkConfig::find_sink(const MethodSig& sig) const {
  for (const auto& s : sinks) {
    if (s.signature == sig) {
      return &s;
    }
  }
  return nullptr;
}

const SummarySpec* SourceSinkConfig::find_summary(const MethodSig& sig) const {
  for (const auto& s : summaries) {
    if (s.signature == sig) {
      return &s;
    }
  }
  return nullptr;
}

namespace {

// <Class: rettype name(params)> [permissions] -> _KIND_ [extra]
const std::regex kMethodPattern(
    R"(^<([\w.$]+):\s*([\w.$\[\]]+)\s+([\w$<>]+)\(([^)]*)\)>(?:\s+[\w.$]+)*\s*->\s*(_SOURCE_|_SINK_|_SUMMARY_)(?:\s+(.*))?$)");
// <Class: type name> -> _SOURCE_
const std::regex kFieldPattern(
    R"(^<([\w.$]+):\s*([\w.$\[\]]+)\s+([\w$]+)>(?:\s+[\w.$]+)*\s*->\s*(_SOURCE_|_SINK_|_SUMMARY_)(?:\s+(.*))?$)");
// Class#name(params) -> _KIND_ [extra]
const std::regex kHashMethodPattern(
    R"(^([\w.$]+#[\w$<>]+\([^)]*\))\s*->\s*(_SOURCE_|_SINK_|_SUMMARY_)(?:\s+(.*))?$)");
// Class#field -> _SOURCE_
const std::regex kHashFieldPattern(
    R"(^([\w.$]+)#([\w$]+)\s*->\s*(_SOURCE_|_SINK_|_SUMMARY_)(?:\s+(.*))?$)");
// constant,name,category
const std::regex kSensorPattern(R"(^(-?\d+)\s*,\s*([\w$]+)\s*,\s*(\w+)$)");

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::string current;
  for (char c : text) {
    if (c == ',' || lexical::is_space(c)) {
      if (!current.empty()) {
        items.push_back(std::move(current));
        current.clear();
      }
    } else {
      current += c;
    }
  }
  if (!current.empty()) {
    items.push_back(std::move(current));
  }
  return items;
}

class ConfigLoader {
 public:
  SourceSinkConfig load(std::string_view text) {
    std::size_t start = 0;
    int line_no = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) {
        end = text.size();
      }
      ++line_no;
      auto line = lexical::trim(text.substr(start, end - start));
      if (!line.empty() && line.front() != '#' && line.front() != '%') {
        parse_line(std::string(line), line_no);
      }
      start = end + 1;
    }
    if (sensors_.has_value()) {
      try {
        config_.sensor_table = SensorTypeTable(std::move(*sensors_));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(sensors_line_, e.what());
      }
    } else {
      config_.sensor_table = SensorTypeTable::android_default();
    }
    if (config_.method_sources.empty() && config_.field_sources.empty()) {
      config_.warnings.push_back("configuration declares no sources");
    }
    if (config_.sinks.empty()) {
      config_.warnings.push_back("configuration declares no sinks");
    }
    return std::move(config_);
  }

 private:
  void parse_line(const std::string& line, int line_no) {
    if (line == "sensors:") {
      if (sensors_.has_value()) {
        throw ConfigError(line_no, "duplicate sensors: section");
      }
      sensors_.emplace();
      sensors_line_ = line_no;
      return;
    }
    std::smatch m;
    if (sensors_.has_value() && std::regex_match(line, m, kSensorPattern)) {
      std::int64_t constant = 0;
      auto text = m[1].str();
      auto [ptr, ec] =
          std::from_chars(text.data(), text.data() + text.size(), constant);
      if (ec != std::errc()) {
        throw ConfigError(line_no, "sensor constant out of range");
      }
      auto category = parse_sensor_category(m[3].str());
      if (!category) {
        throw ConfigError(line_no, "unknown sensor category " + m[3].str());
      }
      sensors_->push_back({constant, m[2].str(), *category});
      return;
    }
    if (std::regex_match(line, m, kMethodPattern)) {
      auto sig = MethodSig::parse(m[1].str() + "#" + m[3].str() + "(" +
                                  m[4].str() + ")");
      if (!sig) {
        throw ConfigError(line_no, "malformed method signature");
      }
      sig->return_type = m[2].str();
      add_method_rule(std::move(*sig), m[5].str(), m[6].str(), line_no);
      return;
    }
    if (std::regex_match(line, m, kFieldPattern)) {
      if (m[4].str() != "_SOURCE_") {
        throw ConfigError(line_no, "fields can only be sources");
      }
      FieldRef field{m[1].str(), m[3].str(), m[2].str()};
      add_field_source(std::move(field), m[5].str(), line_no);
      return;
    }
    if (std::regex_match(line, m, kHashMethodPattern)) {
      auto sig = MethodSig::parse(m[1].str());
      if (!sig) {
        throw ConfigError(line_no, "malformed method signature");
      }
      add_method_rule(std::move(*sig), m[2].str(), m[3].str(), line_no);
      return;
    }
    if (std::regex_match(line, m, kHashFieldPattern)) {
      if (m[3].str() != "_SOURCE_") {
        throw ConfigError(line_no, "fields can only be sources");
      }
      FieldRef field{m[1].str(), m[2].str(), ""};
      add_field_source(std::move(field), m[4].str(), line_no);
      return;
    }
    throw ConfigError(line_no, "malformed line '" + line + "'");
  }

  void add_field_source(FieldRef field, const std::string& extra, int line_no) {
    if (!lexical::trim(extra).empty()) {
      throw ConfigError(line_no, "unexpected text after _SOURCE_");
    }
    if (config_.find_field_source(field) != nullptr) {
      throw ConfigError(line_no, "duplicate field source " + field.key());
    }
    config_.field_sources.push_back({std::move(field), line_no});
  }

  void add_method_rule(MethodSig sig,
                       const std::string& kind,
                       const std::string& extra,
                       int line_no) {
    auto items = split_list(extra);
    auto key = sig.key();
    if (kind == "_SOURCE_") {
      if (!items.empty()) {
        throw ConfigError(line_no, "unexpected text after _SOURCE_");
      }
      if (config_.find_method_source(sig) != nullptr) {
        throw ConfigError(line_no, "duplicate source " + key);
      }
      if (config_.find_sink(sig) != nullptr) {
        throw ConfigError(line_no, key + " is both a source and a sink");
      }
      config_.method_sources.push_back({std::move(sig), line_no});
    } else if (kind == "_SINK_") {
      if (config_.find_sink(sig) != nullptr) {
        throw ConfigError(line_no, "duplicate sink " + key);
      }
      if (config_.find_method_source(sig) != nullptr) {
        throw ConfigError(line_no, key + " is both a source and a sink");
      }
      SinkSpec sink{std::move(sig), {}, line_no};
      for (const auto& item : items) {
        auto pos = CallPosition::parse(item);
        if (!pos || pos->is_return()) {
          throw ConfigError(line_no, "bad sink position '" + item + "'");
        }
        check_arity(sink.signature, *pos, line_no);
        sink.positions.insert(*pos);
      }
      if (items.empty()) {
        for (std::size_t i = 0; i < sink.signature.params.size(); ++i) {
          sink.positions.insert(CallPosition::arg(static_cast<int>(i)));
        }
      }
      config_.sinks.push_back(std::move(sink));
    } else {
      if (config_.find_summary(sig) != nullptr) {
        throw ConfigError(line_no, "duplicate summary " + key);
      }
      SummarySpec summary{std::move(sig), {}, line_no};
      if (items.size() == 1 && items.front() == "none") {
        items.clear();
      } else if (items.empty()) {
        throw ConfigError(line_no, "summary needs flows or 'none'");
      }
      for (const auto& item : items) {
        auto arrow = item.find("->");
        if (arrow == std::string::npos) {
          throw ConfigError(line_no, "bad summary flow '" + item + "'");
        }
        auto from = CallPosition::parse(item.substr(0, arrow));
        auto to = CallPosition::parse(item.substr(arrow + 2));
        if (!from || !to || from->is_return()) {
          throw ConfigError(line_no, "bad summary flow '" + item + "'");
        }
        check_arity(summary.signature, *from, line_no);
        check_arity(summary.signature, *to, line_no);
        summary.flows.emplace_back(*from, *to);
      }
      config_.summaries.push_back(std::move(summary));
    }
  }

  static void check_arity(const MethodSig& sig, CallPosition pos, int line_no) {
    if (pos.value >= 0 &&
        static_cast<std::size_t>(pos.value) >= sig.params.size()) {
      throw ConfigError(line_no,
                        "position " + pos.str() + " out of arity for " +
                            sig.key());
    }
  }

  SourceSinkConfig config_;
  std::optional<std::vector<SensorType>> sensors_;
  int sensors_line_ = 0;
};

std::string angle_form(const MethodSig& sig) {
  std::string params;
  for (std::size_t i = 0; i < sig.params.size(); ++i) {
    params += (i > 0 ? "," : "") + sig.params[i];
  }
  if (sig.return_type.empty()) {
    return sig.key();
  }
  return "<" + sig.class_name + ": " + sig.return_type + " " + sig.name + "(" +
      params + ")>";
}

} // namespace

SourceSinkConfig load_config(std::string_view text) {
  return ConfigLoader().load(text);
}

std::string print_config(const SourceSinkConfig& config) {
  std::ostringstream out;
  for (const auto& s : config.method_sources) {
    out << angle_form(s.signature) << " -> _SOURCE_\n";
  }
  for (const auto& s : config.field_sources) {
    if (s.field.declared_type.empty()) {
      out << s.field.key() << " -> _SOURCE_\n";
    } else {
      out << "<" << s.field.class_name << ": " << s.field.declared_type << " "
          << s.field.field_name << "> -> _SOURCE_\n";
    }
  }
  for (const auto& s : config.sinks) {
    out << angle_form(s.signature) << " -> _SINK_";
    std::string sep = " ";
    for (const auto& p : s.positions) {
      out << sep << p.str();
      sep = ",";
    }
    out << "\n";
  }
  for (const auto& s : config.summaries) {
    out << angle_form(s.signature) << " -> _SUMMARY_";
    if (s.flows.empty()) {
      out << " none";
    }
    std::string sep = " ";
    for (const auto& [from, to] : s.flows) {
      out << sep << from.str() << "->" << to.str();
      sep = ",";
    }
    out << "\n";
  }
  out << "sensors:\n";
  for (const auto& e : config.sensor_table.entries()) {
    out << e.constant << "," << e.name << "," << to_string(e.category) << "\n";
  }
  return out.str();
}

std::string_view default_sensor_config_text() {
  return R"(# Sensor sources: fields of SensorEvent and sensor getters.
<android.hardware.SensorEvent: float[] values> -> _SOURCE_
<android.hardware.SensorEvent: long timestamp> -> _SOURCE_
<android.hardware.Sensor: java.lang.String getName()> -> _SOURCE_
<android.hardware.Sensor: java.lang.String getVendor()> -> _SOURCE_
<android.hardware.Sensor: int getVersion()> -> _SOURCE_
<android.hardware.SensorManager: android.hardware.Sensor getDefaultSensor(int)> -> _SOURCE_
<android.hardware.Sensor: float getMaximumRange()> -> _SOURCE_
<android.hardware.SensorManager: java.util.List getSensorList(int)> -> _SOURCE_
<android.hardware.Sensor: int getType()> -> _SOURCE_
<android.hardware.Sensor: float getResolution()> -> _SOURCE_
<android.hardware.Sensor: float getPower()> -> _SOURCE_

# Logging: the message argument leaks.
<android.util.Log: int v(java.lang.String,java.lang.String)> -> _SINK_ arg1
<android.util.Log: int d(java.lang.String,java.lang.String)> -> _SINK_ arg1
<android.util.Log: int i(java.lang.String,java.lang.String)> -> _SINK_ arg1
<android.util.Log: int w(java.lang.String,java.lang.String)> -> _SINK_ arg1
<android.util.Log: int e(java.lang.String,java.lang.String)> -> _SINK_ arg1

# Network and IPC send.
<java.io.OutputStream: void write(byte[])> -> _SINK_
<java.net.URLConnection: void setRequestProperty(java.lang.String,java.lang.String)> -> _SINK_
<org.apache.http.client.HttpClient: org.apache.http.HttpResponse execute(org.apache.http.client.methods.HttpUriRequest)> -> _SINK_
<android.os.Handler: boolean sendMessage(android.os.Message)> -> _SINK_

# SMS.
<android.telephony.SmsManager: void sendTextMessage(java.lang.String,java.lang.String,java.lang.String,android.app.PendingIntent,android.app.PendingIntent)> -> _SINK_

# File write.
<java.io.FileOutputStream: void write(byte[])> -> _SINK_
<java.io.FileWriter: void write(java.lang.String)> -> _SINK_
<java.io.Writer: void write(java.lang.String)> -> _SINK_

# StringBuilder mutates its receiver as well as returning it.
<java.lang.StringBuilder: java.lang.StringBuilder append(java.lang.String)> -> _SUMMARY_ arg0->receiver,arg0->return,receiver->return
<java.lang.StringBuilder: java.lang.StringBuilder append(java.lang.Object)> -> _SUMMARY_ arg0->receiver,arg0->return,receiver->return
<java.lang.StringBuilder: java.lang.StringBuilder append(float)> -> _SUMMARY_ arg0->receiver,arg0->return,receiver->return
<java.lang.StringBuilder: java.lang.StringBuilder append(double)> -> _SUMMARY_ arg0->receiver,arg0->return,receiver->return
<java.lang.StringBuilder: java.lang.StringBuilder append(int)> -> _SUMMARY_ arg0->receiver,arg0->return,receiver->return
<java.lang.StringBuilder: java.lang.StringBuilder append(long)> -> _SUMMARY_ arg0->receiver,arg0->return,receiver->return
)";
}

SourceSinkConfig default_sensor_config() {
  return load_config(default_sensor_config_text());
}

Classification classify_statement(const SourceSinkConfig& config,
                                  const IRStatement& statement) {
  Classification c;
  if (const auto* load = statement.as<stmt::LoadField>()) {
    if (const auto* spec = config.find_field_source(load->field)) {
      c.kind = Classification::Kind::FieldSource;
      c.field_source = spec;
    }
  } else if (const auto* call = statement.as<stmt::Invoke>()) {
    if (const auto* spec = config.find_method_source(call->callee);
        spec != nullptr && call->result) {
      c.kind = Classification::Kind::MethodSource;
      c.method_source = spec;
    } else if (const auto* sink = config.find_sink(call->callee)) {
      c.kind = Classification::Kind::Sink;
      c.sink = sink;
    }
  }
  return c;
}

} // namespace seeker
