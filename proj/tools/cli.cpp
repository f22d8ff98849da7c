/* SPDX-License-Identifier: Apache-2.0 */

#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "dial/beacon.hpp"
#include "dial/error.hpp"
#include "dial/hunt.hpp"
#include "dial/metrics.hpp"
#include "dial/ndef.hpp"
#include "dial/reader.hpp"
#include "dial/server.hpp"
#include "dial/session.hpp"
#include "dial/world.hpp"

namespace dial {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

json parse_json(const std::string& text, const std::string& what) {
  auto j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorCode::ParseError, what + " is not valid JSON");
  return j;
}

/// A bundled name or a file path.
json scenario_document(const std::string& ref) {
  for (const auto& name : bundled_scenario_names()) {
    if (name == ref) return bundled_scenario(name);
  }
  return parse_json(read_file(ref), ref);
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::uint8_t parse_byte(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(text, &used, 0);
    if (used != text.size() || v > 0xFF) throw std::out_of_range(what);
    return static_cast<std::uint8_t>(v);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, what + " must be a byte (0-255 or 0x..)");
  }
}

struct Model {
  std::string label;
  dial::Model model;
};

const std::vector<Model>& models() {
  static const std::vector<Model> m = {{"BLE-AC", dial::Model::BleAc},
                                       {"UWB-RAW", dial::Model::UwbRaw}};
  return m;
}

void cmd_battery(bool as_json, std::ostream& out) {
  const BatterySpec spec;
  ordered_json rows = ordered_json::array();
  std::ostringstream table;
  table << std::left << std::setw(9) << "model" << std::right << std::setw(10) << "cost_usd"
        << std::setw(12) << "current_mA" << std::setw(10) << "min_days" << std::setw(10)
        << "max_days" << '\n';
  for (const auto& m : models()) {
    const double current = reference_current(m.model);
    const auto bounds = battery_bounds(spec, current);
    const auto bom = reference_bom(m.model);
    const Usd cost = bom_cost(bom);
    table << std::left << std::setw(9) << m.label << std::right << std::setw(10) << cost.str()
          << std::setw(12) << fixed(current, 1) << std::setw(10) << fixed(bounds.min_days, 2)
          << std::setw(10) << fixed(bounds.max_days, 2) << '\n';
    ordered_json row;
    row["model"] = m.label;
    row["cost_usd"] = cost.value();
    row["current_mA"] = current;
    row["capacity_min_mAh"] = spec.cells * spec.per_cell_min_mAh;
    row["capacity_max_mAh"] = spec.cells * spec.per_cell_max_mAh;
    row["min_days"] = bounds.min_days;
    row["max_days"] = bounds.max_days;
    rows.push_back(std::move(row));
  }
  if (as_json) {
    out << rows.dump(2) << '\n';
  } else {
    out << table.str();
  }
}

void cmd_cost(bool as_json, std::ostream& out) {
  ordered_json rows = ordered_json::array();
  for (const auto& m : models()) {
    const auto bom = reference_bom(m.model);
    ordered_json row;
    row["model"] = m.label;
    row["items"] = ordered_json::array();
    if (!as_json) out << m.label << '\n';
    for (const auto& item : bom) {
      row["items"].push_back(
          {{"name", item.name}, {"unit_price_usd", item.unit_price_usd}, {"quantity", item.quantity}});
      if (!as_json) {
        out << "  " << std::left << std::setw(40) << item.name << std::right << std::setw(3)
            << item.quantity << " x " << std::setw(6) << fixed(item.unit_price_usd, 2) << '\n';
      }
    }
    const Usd total = bom_cost(bom);
    row["total_usd"] = total.value();
    if (!as_json) out << "  " << std::left << std::setw(40) << "total" << std::right << std::setw(15) << total.str() << '\n';
    rows.push_back(std::move(row));
  }
  if (as_json) out << rows.dump(2) << '\n';
}

std::vector<double> read_answers(const std::string& path) {
  const std::string text = read_file(path);
  const auto j = json::parse(text, nullptr, false);
  std::vector<double> answers;
  if (!j.is_discarded() && j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw Error(ErrorCode::ParseError, "answers must be numbers");
      answers.push_back(v.get<double>());
    }
    return answers;
  }
  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      answers.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, "answer '" + token + "' is not a number");
    }
  }
  return answers;
}

void cmd_sus(const std::string& path, bool as_json, std::ostream& out) {
  const auto answers = read_answers(path);
  const double score = sus_score(answers);
  if (as_json) {
    out << ordered_json{{"answers", answers}, {"score", score}}.dump() << '\n';
  } else {
    out << "SUS score: " << fixed(score, 2) << '\n';
  }
}

ordered_json record_json(const ndef::Record& r) {
  ordered_json j;
  j["tnf"] = static_cast<int>(r.tnf);
  j["type"] = std::string(r.type.begin(), r.type.end());
  if (r.id) j["id"] = std::string(r.id->begin(), r.id->end());
  j["payload"] = to_hex(r.payload);
  return j;
}

void cmd_ndef_encode(const std::string& path, std::ostream& out) {
  const DeviceInfo info = device_info_from_json(parse_json(read_file(path), path));
  out << to_hex(ndef::encode_message(pack_device_info(info))) << '\n';
}

void cmd_ndef_decode(const std::string& hex, std::ostream& out) {
  const auto bytes = from_hex(hex);
  if (!bytes) throw Error(ErrorCode::InvalidArgument, "not a hex string");
  const auto msg = ndef::decode_message(*bytes);
  ordered_json j;
  j["records"] = ordered_json::array();
  for (const auto& r : msg) j["records"].push_back(record_json(r));
  j["device_info"] = device_info_to_json(unpack_device_info(msg));
  out << j.dump(2) << '\n';
}

void cmd_beacon_encode(const std::string& version, const std::string& model,
                       const std::string& id, const std::string& flags, std::ostream& out) {
  std::uint8_t model_byte = 0;
  if (auto m = parse_model(model)) {
    model_byte = static_cast<std::uint8_t>(*m);
  } else {
    model_byte = parse_byte(model, "model");
  }
  const auto tag = TagId::from_hex(id);
  if (!tag) throw Error(ErrorCode::InvalidArgument, "id must be 12 hex digits");
  const Frame f = encode_beacon(parse_byte(version, "version"), model_byte, *tag,
                                parse_byte(flags, "flags"));
  out << to_hex(f) << '\n';
}

void cmd_beacon_decode(const std::string& hex, bool as_json, std::ostream& out) {
  const auto bytes = from_hex(hex);
  if (!bytes) throw Error(ErrorCode::InvalidArgument, "not a hex string");
  const Beacon b = decode_beacon(*bytes);
  const auto raw_model = static_cast<std::uint8_t>(b.model);
  const std::string model =
      is_known_model(raw_model) ? std::string(model_name(b.model)) : "unknown";
  char buf[8];
  if (as_json) {
    ordered_json j;
    j["version"] = b.version;
    j["model"] = raw_model;
    j["model_name"] = model;
    j["tag_id"] = b.tag_id.hex();
    j["flags"] = b.flags;
    j["activation"] = b.is_activation();
    j["checksum"] = (*bytes)[9];
    out << j.dump() << '\n';
    return;
  }
  out << "version:    " << static_cast<int>(b.version) << '\n';
  std::snprintf(buf, sizeof buf, "0x%02x", raw_model);
  out << "model:      " << buf << " (" << model << ")\n";
  out << "tag_id:     " << b.tag_id.hex() << '\n';
  std::snprintf(buf, sizeof buf, "0x%02x", b.flags);
  out << "flags:      " << buf << '\n';
  out << "activation: " << (b.is_activation() ? "yes" : "no") << '\n';
  std::snprintf(buf, sizeof buf, "0x%02x", (*bytes)[9]);
  out << "checksum:   " << buf << '\n';
}

void cmd_simulate(const std::string& scenario_ref, std::optional<std::uint64_t> seed,
                  const std::string& out_path, std::string trace_path, double time_limit,
                  std::ostream& out) {
  const json doc = scenario_document(scenario_ref);
  World world = load_scenario(doc, seed);
  const auto plan = default_hunt_plan(world);
  const HuntReport report = run_hunt(world, plan, time_limit);

  write_file(out_path, world.event_log_text());
  if (trace_path.empty()) trace_path = out_path + ".trace.json";
  const Trace trace{doc, world.scenario().seed, world.trace()};
  write_file(trace_path, trace_to_json(trace).dump() + "\n");

  ordered_json j = hunt_report_to_json(report);
  j["seed"] = world.scenario().seed;
  j["events"] = world.event_log().size();
  j["event_log"] = out_path;
  j["trace"] = trace_path;
  out << j.dump(2) << '\n';
}

int cmd_replay(const std::string& trace_path, const std::string& out_path,
               const std::string& check_path, std::ostream& out, std::ostream& err) {
  const Trace trace = trace_from_json(parse_json(read_file(trace_path), trace_path));
  const std::string log = replay(trace).event_log_text();
  if (!out_path.empty()) {
    write_file(out_path, log);
  } else if (check_path.empty()) {
    out << log;
  }
  if (!check_path.empty()) {
    if (read_file(check_path) != log) {
      err << ordered_json{{"error", {{"code", "replay_mismatch"},
                                     {"detail", "replayed log differs from " + check_path}}}}
                 .dump()
          << '\n';
      return 1;
    }
    out << "replay matches " << check_path << '\n';
  }
  return 0;
}

int cmd_serve(std::string root, std::string bind, int threads, double tick_hz,
              std::ostream& out) {
  ServerOptions opts;
  if (bind.empty()) {
    if (const char* env = std::getenv("DIAL_BIND")) bind = env;
  }
  if (!bind.empty() && !parse_bind_address(bind, opts)) {
    throw Error(ErrorCode::InvalidArgument, "bind address must be host:port, got " + bind);
  }
  opts.web_root = root;
  opts.threads = threads;
  opts.auto_tick_hz = tick_hz;
  Server server(opts);
  out << "listening on " << opts.address << ':' << server.port() << std::endl;
  server.run();
  return 0;
}

void print_error(std::ostream& err, std::string_view code, const std::string& detail) {
  err << ordered_json{{"error", {{"code", code}, {"detail", detail}}}}.dump() << '\n';
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tag discovery, locating and inventory simulator", "dialsim"};
  app.require_subcommand(1);

  bool as_json = false;

  auto* battery = app.add_subcommand("battery", "Battery life bounds per tag model");
  battery->add_flag("--json", as_json, "JSON output");

  auto* cost = app.add_subcommand("cost", "Bill of materials per tag model");
  cost->add_flag("--json", as_json, "JSON output");

  std::string answers_path;
  auto* sus = app.add_subcommand("sus", "SUS score from a file of ten answers");
  sus->add_option("answers", answers_path, "JSON array or whitespace-separated numbers")->required();
  sus->add_flag("--json", as_json, "JSON output");

  auto* ndef_cmd = app.add_subcommand("ndef", "NDEF device-information images");
  ndef_cmd->require_subcommand(1);
  std::string info_path;
  auto* ndef_encode = ndef_cmd->add_subcommand("encode", "Device-info JSON file to NDEF hex");
  ndef_encode->add_option("info", info_path, "device_info JSON file")->required();
  std::string ndef_hex;
  auto* ndef_decode = ndef_cmd->add_subcommand("decode", "NDEF hex to device-info JSON");
  ndef_decode->add_option("hex", ndef_hex, "NDEF message as hex")->required();

  auto* beacon = app.add_subcommand("beacon", "Advertising frames");
  beacon->require_subcommand(1);
  std::string b_version = "1", b_model = "BLE-AC", b_id, b_flags = "0";
  auto* beacon_encode = beacon->add_subcommand("encode", "Fields to frame hex");
  beacon_encode->add_option("--version", b_version, "version byte");
  beacon_encode->add_option("--model", b_model, "BLE-AC, UWB-RAW or a byte");
  beacon_encode->add_option("--id", b_id, "12 hex digits")->required();
  beacon_encode->add_option("--flags", b_flags, "flags byte");
  std::string beacon_hex;
  auto* beacon_decode = beacon->add_subcommand("decode", "Frame hex to fields");
  beacon_decode->add_option("hex", beacon_hex, "frame as hex")->required();
  beacon_decode->add_flag("--json", as_json, "JSON output");

  std::string scenario_ref, out_path, trace_path;
  std::optional<std::uint64_t> seed;
  double time_limit = 300.0;
  auto* simulate = app.add_subcommand("simulate", "Run scripted hunt agents over a scenario");
  simulate->add_option("--scenario", scenario_ref, "bundled scenario name or JSON file")->required();
  simulate->add_option("--seed", seed, "override the scenario seed");
  simulate->add_option("--out", out_path, "event log (LDJSON) path")->required();
  simulate->add_option("--trace", trace_path, "trace path (default <out>.trace.json)");
  simulate->add_option("--time-limit", time_limit, "simulated seconds for the whole hunt");

  std::string replay_trace, replay_out, replay_check;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a recorded trace");
  replay_cmd->add_option("--trace", replay_trace, "trace JSON file")->required();
  replay_cmd->add_option("--out", replay_out, "write the event log here instead of stdout");
  replay_cmd->add_option("--check", replay_check, "compare against a recorded event log");

  std::string web_root = "hunt_ui/dist", bind;
  int threads = 1;
  double tick_hz = 10.0;
  auto* serve = app.add_subcommand("serve", "Start the session service");
  serve->add_option("--web-root", web_root, "directory served at /");
  serve->add_option("--bind", bind, "host:port (default DIAL_BIND or 127.0.0.1:8080)");
  serve->add_option("--threads", threads, "I/O threads");
  serve->add_option("--tick-hz", tick_hz, "auto-tick rate for sessions that enable it");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (*battery) cmd_battery(as_json, out);
    else if (*cost) cmd_cost(as_json, out);
    else if (*sus) cmd_sus(answers_path, as_json, out);
    else if (*ndef_encode) cmd_ndef_encode(info_path, out);
    else if (*ndef_decode) cmd_ndef_decode(ndef_hex, out);
    else if (*beacon_encode) cmd_beacon_encode(b_version, b_model, b_id, b_flags, out);
    else if (*beacon_decode) cmd_beacon_decode(beacon_hex, as_json, out);
    else if (*simulate) cmd_simulate(scenario_ref, seed, out_path, trace_path, time_limit, out);
    else if (*replay_cmd) return cmd_replay(replay_trace, replay_out, replay_check, out, err);
    else if (*serve) return cmd_serve(web_root, bind, threads, tick_hz, out);
  } catch (const Error& e) {
    print_error(err, code_name(e.code()), e.detail());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace dial
