#include "boomerang/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>

#include "json.hpp"

#include "boomerang/errors.hpp"

namespace boomerang {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// One significant line of a text format: 1-based source line number plus the
// content with comments ('#' to end of line) and surrounding blanks removed.
struct Line {
  int number;
  std::string text;
};

std::vector<Line> significant_lines(const std::string& text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++number;
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (!line.empty()) out.push_back({number, std::string(line)});
    if (pos > text.size()) break;
  }
  return out;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(std::move(tok));
  return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

template <typename Int>
bool parse_int(std::string_view tok, Int& out) {
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !tok.empty();
}

bool parse_double(std::string_view tok, double& out) {
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && !tok.empty();
}

[[noreturn]] void line_fail(const char* what, int line, const std::string& msg) {
  fail(Errc::parse_error, std::string(what) + " line " + std::to_string(line) + ": " + msg);
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(Errc::io_error, "failed reading '" + path + "'");
  return std::move(buf).str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) fail(Errc::io_error, "failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// graph text format
// ---------------------------------------------------------------------------

SignedGraph parse_graph(const std::string& text) {
  const std::vector<Line> lines = significant_lines(text);
  if (lines.empty()) fail(Errc::parse_error, "graph: empty input");

  const auto head = split_tokens(lines[0].text);
  int n = 0;
  if (head.size() != 2 || head[0] != "n" || !parse_int(head[1], n)) {
    line_fail("graph", lines[0].number, "expected header 'n <count>'");
  }

  std::vector<std::tuple<int, int, int>> edges;
  edges.reserve(lines.size() - 1);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto toks = split_tokens(lines[k].text);
    int i = 0;
    int j = 0;
    if (toks.size() != 3 || !parse_int(toks[0], i) || !parse_int(toks[1], j)) {
      line_fail("graph", lines[k].number, "expected '<i> <j> <+1|-1>'");
    }
    int sign = 0;
    if (toks[2] == "+1") {
      sign = 1;
    } else if (toks[2] == "-1") {
      sign = -1;
    } else {
      line_fail("graph", lines[k].number, "sign must be '+1' or '-1', got '" + toks[2] + "'");
    }
    edges.emplace_back(i, j, sign);
  }
  return SignedGraph::build(n, edges);
}

std::string serialize_graph(const SignedGraph& g) {
  std::string out = "n " + std::to_string(g.vertex_count()) + "\n";
  for (const SignedEdge& se : g.edges()) {
    out += std::to_string(se.e.u);
    out += ' ';
    out += std::to_string(se.e.v);
    out += se.sign > 0 ? " +1\n" : " -1\n";
  }
  return out;
}

SignedGraph read_graph_file(const std::string& path) { return parse_graph(read_text_file(path)); }

void write_graph_file(const SignedGraph& g, const std::string& path) {
  write_text_file(path, serialize_graph(g));
}

// ---------------------------------------------------------------------------
// trajectory CSV
// ---------------------------------------------------------------------------

std::string serialize_trajectory_csv(const Trajectory& traj) {
  const int n = traj.n();
  std::string out = "t,edge_i,edge_j";
  for (int c = 0; c < n; ++c) out += ",x_" + std::to_string(c);
  out += '\n';

  for (std::size_t r = 0; r < traj.recorded_count(); ++r) {
    Edge e{-1, -1};
    if (r > 0) e = traj.edge_log[static_cast<std::size_t>(traj.times[r] - 1)];
    out += std::to_string(traj.times[r]);
    out += ',';
    out += std::to_string(e.u);
    out += ',';
    out += std::to_string(e.v);
    for (const double v : traj.row(r)) {
      out += ',';
      out += fmt_g17(v);
    }
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  write_text_file(path, serialize_trajectory_csv(traj));
}

TrajectoryData parse_trajectory_csv(const std::string& text) {
  std::vector<std::string_view> lines;
  {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      std::string_view line(text.data() + pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) lines.push_back(line);
      pos = end + 1;
    }
  }
  if (lines.empty()) fail(Errc::parse_error, "trajectory: empty input");

  const auto header = split_csv(lines[0]);
  if (header.size() < 4 || header[0] != "t" || header[1] != "edge_i" || header[2] != "edge_j") {
    line_fail("trajectory", 1, "expected header 't,edge_i,edge_j,x_0,...'");
  }
  const int n = static_cast<int>(header.size()) - 3;
  for (int c = 0; c < n; ++c) {
    if (header[static_cast<std::size_t>(c) + 3] != "x_" + std::to_string(c)) {
      line_fail("trajectory", 1, "opinion columns must be named x_0..x_" + std::to_string(n - 1));
    }
  }
  if (lines.size() < 2) fail(Errc::parse_error, "trajectory: no data rows");

  TrajectoryData data;
  data.n = n;
  data.times.reserve(lines.size() - 1);
  data.states.reserve((lines.size() - 1) * static_cast<std::size_t>(n));
  data.row_edges.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const int lineno = static_cast<int>(r) + 1;
    const auto cells = split_csv(lines[r]);
    if (cells.size() != header.size()) {
      line_fail("trajectory", lineno,
                "expected " + std::to_string(header.size()) + " columns, got " +
                    std::to_string(cells.size()));
    }
    std::int64_t t = 0;
    Edge e{0, 0};
    if (!parse_int(cells[0], t)) line_fail("trajectory", lineno, "bad time value");
    if (!parse_int(cells[1], e.u) || !parse_int(cells[2], e.v)) {
      line_fail("trajectory", lineno, "bad edge columns");
    }
    if (!data.times.empty() && t <= data.times.back()) {
      line_fail("trajectory", lineno, "times must be strictly increasing");
    }
    for (int c = 0; c < n; ++c) {
      double v = 0.0;
      if (!parse_double(cells[static_cast<std::size_t>(c) + 3], v)) {
        line_fail("trajectory", lineno, "bad opinion value in column x_" + std::to_string(c));
      }
      data.states.push_back(v);
    }
    data.times.push_back(t);
    data.row_edges.push_back(e);
  }
  if (data.times[0] != 0 || data.row_edges[0].u != -1 || data.row_edges[0].v != -1) {
    line_fail("trajectory", 2, "first row must be 't=0' with edge columns '-1,-1'");
  }
  return data;
}

TrajectoryData read_trajectory_csv(const std::string& path) {
  return parse_trajectory_csv(read_text_file(path));
}

// ---------------------------------------------------------------------------
// edge sequences and opinion vectors
// ---------------------------------------------------------------------------

std::string serialize_edge_sequence(const std::vector<Edge>& sequence) {
  std::string out;
  for (const Edge& e : sequence) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += '\n';
  }
  return out;
}

std::vector<Edge> parse_edge_sequence(const std::string& text) {
  std::vector<Edge> out;
  for (const Line& line : significant_lines(text)) {
    const auto toks = split_tokens(line.text);
    Edge e{0, 0};
    if (toks.size() != 2 || !parse_int(toks[0], e.u) || !parse_int(toks[1], e.v)) {
      line_fail("edge sequence", line.number, "expected '<i> <j>'");
    }
    if (e.u < 0 || e.v < 0) line_fail("edge sequence", line.number, "vertices must be >= 0");
    out.push_back(e);
  }
  return out;
}

std::vector<Edge> read_edge_sequence_file(const std::string& path) {
  return parse_edge_sequence(read_text_file(path));
}

void write_edge_sequence_file(const std::vector<Edge>& sequence, const std::string& path) {
  write_text_file(path, serialize_edge_sequence(sequence));
}

std::string serialize_opinions(const std::vector<double>& x) {
  std::string out;
  for (const double v : x) {
    out += fmt_g17(v);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_opinions(const std::string& text) {
  std::vector<double> out;
  for (const Line& line : significant_lines(text)) {
    const auto toks = split_tokens(line.text);
    double v = 0.0;
    if (toks.size() != 1 || !parse_double(toks[0], v)) {
      line_fail("opinions", line.number, "expected one value per line");
    }
    out.push_back(v);
  }
  if (out.empty()) fail(Errc::parse_error, "opinions: no values found");
  return out;
}

std::vector<double> read_opinions_file(const std::string& path) {
  return parse_opinions(read_text_file(path));
}

void write_opinions_file(const std::vector<double>& x, const std::string& path) {
  write_text_file(path, serialize_opinions(x));
}

// ---------------------------------------------------------------------------
// experiment config JSON
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void schema_fail(const std::string& msg) { fail(Errc::schema_violation, msg); }

double need_number(const json& v, const std::string& field) {
  if (!v.is_number()) schema_fail(field + ": expected a number");
  return v.get<double>();
}

double need_finite(const json& v, const std::string& field) {
  const double d = need_number(v, field);
  if (!std::isfinite(d)) fail(Errc::validation_error, field + ": must be finite");
  return d;
}

std::int64_t need_integer(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      schema_fail(field + ": value too large");
    }
    return static_cast<std::int64_t>(u);
  }
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) <= 9.0e15) return static_cast<std::int64_t>(d);
  }
  schema_fail(field + ": expected an integer");
}

const std::string& need_string(const json& v, const std::string& field) {
  if (!v.is_string()) schema_fail(field + ": expected a string");
  return v.get_ref<const std::string&>();
}

double need_weight(const json& v, const std::string& field) {
  const double d = need_finite(v, field);
  if (!(d > 0.0 && d < 1.0)) {
    fail(Errc::validation_error, field + ": must lie strictly inside (0, 1)");
  }
  return d;
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["schema_version"] = 1;
  j["preset"] = preset_name(cfg.preset);
  if (!cfg.graph_file.empty()) j["graph_file"] = cfg.graph_file;
  if (!cfg.faction_sizes.empty()) j["faction_sizes"] = cfg.faction_sizes;
  j["o_min"] = cfg.o_min;
  j["o_max"] = cfg.o_max;
  j["self_weight"] = cfg.self_weight;
  if (!cfg.self_weights.empty()) j["self_weights"] = cfg.self_weights;
  j["horizon"] = cfg.horizon;
  j["trials"] = cfg.trials;
  if (cfg.seed) j["seed"] = *cfg.seed;
  j["tol"] = cfg.tol;
  j["epsilon"] = cfg.epsilon;
  j["flip_count"] = cfg.flip_count;
  j["init"] = cfg.init == InitRule::pinned ? "pinned" : "uniform_random";
  j["record_stride"] = cfg.record_stride;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    // parse_error plus the range errors the reader raises mid-parse (e.g. 1e999)
    fail(Errc::parse_error, std::string("config: ") + e.what());
  }
  if (!j.is_object()) schema_fail("config: top level must be an object");

  static const std::unordered_set<std::string> allowed = {
      "schema_version", "preset",    "graph_file", "faction_sizes", "o_min",
      "o_max",          "self_weight", "self_weights", "horizon",   "trials",
      "seed",           "tol",       "epsilon",    "flip_count",    "init",
      "record_stride"};
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) schema_fail("unknown field '" + key + "'");
  }
  if (!j.contains("schema_version")) schema_fail("schema_version: missing");
  if (need_integer(j["schema_version"], "schema_version") != 1) {
    schema_fail("schema_version: expected 1");
  }

  Preset preset = Preset::none;
  if (j.contains("preset")) preset = preset_from_name(need_string(j["preset"], "preset"));
  double self_weight = 0.5;
  if (j.contains("self_weight")) self_weight = need_weight(j["self_weight"], "self_weight");

  ExperimentConfig cfg =
      preset == Preset::none ? ExperimentConfig{} : make_preset(preset, self_weight);
  cfg.self_weight = self_weight;

  if (j.contains("graph_file")) cfg.graph_file = need_string(j["graph_file"], "graph_file");
  if (j.contains("faction_sizes")) {
    const json& arr = j["faction_sizes"];
    if (!arr.is_array()) schema_fail("faction_sizes: expected an array");
    cfg.faction_sizes.clear();
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string field = "faction_sizes[" + std::to_string(k) + "]";
      const std::int64_t size = need_integer(arr[k], field);
      if (size < 1) fail(Errc::validation_error, field + ": must be >= 1");
      cfg.faction_sizes.push_back(static_cast<int>(size));
    }
  }
  if (j.contains("o_min")) cfg.o_min = need_finite(j["o_min"], "o_min");
  if (j.contains("o_max")) cfg.o_max = need_finite(j["o_max"], "o_max");
  if (!(cfg.o_min < cfg.o_max)) {
    fail(Errc::validation_error, "o_min/o_max: require o_min < o_max");
  }
  if (j.contains("self_weights")) {
    const json& arr = j["self_weights"];
    if (!arr.is_array()) schema_fail("self_weights: expected an array");
    cfg.self_weights.clear();
    for (std::size_t k = 0; k < arr.size(); ++k) {
      cfg.self_weights.push_back(need_weight(arr[k], "self_weights[" + std::to_string(k) + "]"));
    }
  }
  if (j.contains("horizon")) {
    cfg.horizon = need_integer(j["horizon"], "horizon");
    if (cfg.horizon < 1) fail(Errc::validation_error, "horizon: must be >= 1");
  }
  if (j.contains("trials")) {
    const std::int64_t trials = need_integer(j["trials"], "trials");
    if (trials < 1 || trials > std::numeric_limits<int>::max()) {
      fail(Errc::validation_error, "trials: must be >= 1");
    }
    cfg.trials = static_cast<int>(trials);
  }
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (s.is_number_unsigned()) {
      cfg.seed = s.get<std::uint64_t>();
    } else if (s.is_number_integer()) {
      const auto v = s.get<std::int64_t>();
      if (v < 0) fail(Errc::validation_error, "seed: must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else {
      schema_fail("seed: expected an unsigned integer");
    }
  }
  if (j.contains("tol")) {
    cfg.tol = need_finite(j["tol"], "tol");
    if (!(cfg.tol > 0.0)) fail(Errc::validation_error, "tol: must be > 0");
  }
  if (j.contains("epsilon")) {
    cfg.epsilon = need_finite(j["epsilon"], "epsilon");
    if (!(cfg.epsilon > 0.0)) fail(Errc::validation_error, "epsilon: must be > 0");
  }
  if (j.contains("flip_count")) {
    const std::int64_t flips = need_integer(j["flip_count"], "flip_count");
    if (flips < 0) fail(Errc::validation_error, "flip_count: must be >= 0");
    cfg.flip_count = static_cast<int>(flips);
  }
  if (j.contains("init")) {
    const std::string& name = need_string(j["init"], "init");
    if (name == "uniform_random") {
      cfg.init = InitRule::uniform_random;
    } else if (name == "pinned") {
      cfg.init = InitRule::pinned;
    } else {
      schema_fail("init: expected 'uniform_random' or 'pinned'");
    }
  }
  if (j.contains("record_stride")) {
    cfg.record_stride = need_integer(j["record_stride"], "record_stride");
    if (cfg.record_stride < 1) fail(Errc::validation_error, "record_stride: must be >= 1");
  }

  validate_experiment_config(cfg);
  return cfg;
}

ExperimentConfig read_config_file(const std::string& path) {
  return parse_config(read_text_file(path));
}

std::string serialize_config(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// experiment summary
// ---------------------------------------------------------------------------

namespace {

ordered_json trial_to_json(const TrialSummary& t) {
  ordered_json j;
  j["trial"] = t.trial;
  j["seed"] = t.seed;
  j["final_spread"] = t.final_spread;
  if (t.consensus) {
    j["converged"] = t.consensus->converged;
    if (t.consensus->value) j["consensus_value"] = *t.consensus->value;
    if (t.consensus->hit_time) j["hit_time"] = *t.consensus->hit_time;
    if (t.consensus_in_hull) j["in_hull"] = *t.consensus_in_hull;
  }
  if (t.polarization) {
    j["polarized"] = t.polarization->polarized;
    j["low_faction"] = t.polarization->low_faction;
    j["high_faction"] = t.polarization->high_faction;
    if (t.polarization->hit_time) j["hit_time"] = *t.polarization->hit_time;
  }
  if (t.absorbing_ok) j["absorbing_ok"] = *t.absorbing_ok;
  if (t.monotone_ok) j["monotone_ok"] = *t.monotone_ok;
  if (t.factions_at_bounds) j["factions_at_bounds"] = *t.factions_at_bounds;
  if (t.two_polarized_one_fluctuating) {
    j["two_polarized_one_fluctuating"] = *t.two_polarized_one_fluctuating;
  }
  if (t.min_center_occupancy) j["min_center_occupancy"] = *t.min_center_occupancy;
  if (t.min_visits_low) j["min_visits_low"] = *t.min_visits_low;
  if (t.min_visits_high) j["min_visits_high"] = *t.min_visits_high;
  if (t.min_crossings) j["min_crossings"] = *t.min_crossings;
  if (t.pinned_constant) j["pinned_constant"] = *t.pinned_constant;
  if (t.extreme_occupancy_mean) j["extreme_occupancy_mean"] = *t.extreme_occupancy_mean;
  return j;
}

ordered_json aggregate_to_json(const SummaryAggregate& a) {
  ordered_json j;
  j["trials"] = a.trials;
  if (a.fraction_converged) j["fraction_converged"] = *a.fraction_converged;
  if (a.fraction_polarized) j["fraction_polarized"] = *a.fraction_polarized;
  if (a.hit_p10) j["hit_p10"] = *a.hit_p10;
  if (a.hit_median) j["hit_median"] = *a.hit_median;
  if (a.hit_p90) j["hit_p90"] = *a.hit_p90;
  if (a.all_in_hull) j["all_in_hull"] = *a.all_in_hull;
  if (a.all_absorbing) j["all_absorbing"] = *a.all_absorbing;
  if (a.all_monotone) j["all_monotone"] = *a.all_monotone;
  if (a.all_pinned_constant) j["all_pinned_constant"] = *a.all_pinned_constant;
  if (a.two_polarized_fraction) j["two_polarized_fraction"] = *a.two_polarized_fraction;
  if (a.min_visits_low) j["min_visits_low"] = *a.min_visits_low;
  if (a.min_visits_high) j["min_visits_high"] = *a.min_visits_high;
  if (a.min_crossings) j["min_crossings"] = *a.min_crossings;
  if (a.mean_extreme_occupancy) j["mean_extreme_occupancy"] = *a.mean_extreme_occupancy;
  if (!a.consensus_values.empty()) j["consensus_values"] = a.consensus_values;
  return j;
}

void csv_cell(std::string& out, const std::optional<bool>& v) {
  if (v) out += *v ? '1' : '0';
}

void csv_cell(std::string& out, const std::optional<std::int64_t>& v) {
  if (v) out += std::to_string(*v);
}

void csv_cell(std::string& out, const std::optional<double>& v) {
  if (v) out += fmt_g17(*v);
}

}  // namespace

std::string serialize_summary_json(const ExperimentSummary& summary) {
  ordered_json j;
  j["schema_version"] = 1;
  j["mode"] = detector_mode_name(summary.mode);
  j["config"] = config_to_json(summary.config);
  ordered_json flips = ordered_json::array();
  for (const Edge& e : summary.flipped_edges) flips.push_back({e.u, e.v});
  j["flipped_edges"] = std::move(flips);
  j["aggregate"] = aggregate_to_json(summary.aggregate);
  ordered_json trials = ordered_json::array();
  for (const TrialSummary& t : summary.trials) trials.push_back(trial_to_json(t));
  j["trials"] = std::move(trials);
  return j.dump(2) + "\n";
}

std::string serialize_summary_csv(const ExperimentSummary& summary) {
  std::string out = "trial,seed,final_spread";
  switch (summary.mode) {
    case DetectorMode::consensus: out += ",converged,consensus_value,hit_time,in_hull"; break;
    case DetectorMode::polarization:
      out += ",polarized,low_faction,high_faction,hit_time,absorbing_ok,monotone_ok";
      break;
    case DetectorMode::multi_faction:
      out += ",factions_at_bounds,two_polarized_one_fluctuating,min_center_occupancy";
      break;
    case DetectorMode::fluctuation:
      out += ",min_visits_low,min_visits_high,min_crossings,pinned_constant";
      break;
    case DetectorMode::perturbed: out += ",extreme_occupancy_mean"; break;
  }
  out += '\n';

  for (const TrialSummary& t : summary.trials) {
    out += std::to_string(t.trial);
    out += ',';
    out += std::to_string(t.seed);
    out += ',';
    out += fmt_g17(t.final_spread);
    switch (summary.mode) {
      case DetectorMode::consensus: {
        out += ',';
        if (t.consensus) out += t.consensus->converged ? '1' : '0';
        out += ',';
        if (t.consensus && t.consensus->value) out += fmt_g17(*t.consensus->value);
        out += ',';
        if (t.consensus && t.consensus->hit_time) out += std::to_string(*t.consensus->hit_time);
        out += ',';
        csv_cell(out, t.consensus_in_hull);
        break;
      }
      case DetectorMode::polarization: {
        out += ',';
        if (t.polarization) out += t.polarization->polarized ? '1' : '0';
        out += ',';
        if (t.polarization) out += std::to_string(t.polarization->low_faction);
        out += ',';
        if (t.polarization) out += std::to_string(t.polarization->high_faction);
        out += ',';
        if (t.polarization && t.polarization->hit_time) {
          out += std::to_string(*t.polarization->hit_time);
        }
        out += ',';
        csv_cell(out, t.absorbing_ok);
        out += ',';
        csv_cell(out, t.monotone_ok);
        break;
      }
      case DetectorMode::multi_faction: {
        out += ',';
        csv_cell(out, t.factions_at_bounds ? std::optional<std::int64_t>(*t.factions_at_bounds)
                                           : std::nullopt);
        out += ',';
        csv_cell(out, t.two_polarized_one_fluctuating);
        out += ',';
        csv_cell(out, t.min_center_occupancy);
        break;
      }
      case DetectorMode::fluctuation: {
        out += ',';
        csv_cell(out, t.min_visits_low);
        out += ',';
        csv_cell(out, t.min_visits_high);
        out += ',';
        csv_cell(out, t.min_crossings);
        out += ',';
        csv_cell(out, t.pinned_constant);
        break;
      }
      case DetectorMode::perturbed: {
        out += ',';
        csv_cell(out, t.extreme_occupancy_mean);
        break;
      }
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// analysis report JSON
// ---------------------------------------------------------------------------

std::string serialize_report_json(const AnalysisReport& report) {
  ordered_json j;
  j["schema_version"] = 1;
  j["tol"] = report.tol;
  j["epsilon"] = report.epsilon;
  j["final_spread"] = report.final_spread;

  const bool polarized = report.polarization && report.polarization->polarized;
  if (report.consensus.converged) {
    j["verdict"] = "consensus";
    if (report.consensus.value) j["c"] = *report.consensus.value;
    if (report.consensus.hit_time) j["hit_time"] = *report.consensus.hit_time;
  } else if (polarized) {
    j["verdict"] = "polarization";
    j["orientation"] = {{"low_faction", report.polarization->low_faction},
                        {"high_faction", report.polarization->high_faction}};
    if (report.polarization->hit_time) j["hit_time"] = *report.polarization->hit_time;
  } else {
    j["verdict"] = "none";
  }

  if (report.z_final) j["z_final"] = *report.z_final;
  if (report.separation_time) j["separation_time"] = *report.separation_time;
  if (report.absorbing_ok) j["absorbing_ok"] = *report.absorbing_ok;
  if (report.monotone_ok) j["monotone_ok"] = *report.monotone_ok;

  ordered_json agents = ordered_json::array();
  for (const AgentFluctuation& a : report.fluctuation.agents) {
    ordered_json row;
    row["agent"] = a.agent;
    row["visits_low"] = a.visits_low;
    row["visits_high"] = a.visits_high;
    row["crossings"] = a.crossings;
    row["occupancy"] = {{"low", a.occupancy.low},
                        {"center", a.occupancy.center},
                        {"high", a.occupancy.high}};
    agents.push_back(std::move(row));
  }
  j["fluctuation"] = {{"epsilon", report.fluctuation.epsilon}, {"agents", std::move(agents)}};
  return j.dump(2) + "\n";
}

}  // namespace boomerang
