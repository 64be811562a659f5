#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boomerang/analysis.hpp"
#include "boomerang/dynamics.hpp"
#include "boomerang/experiments.hpp"
#include "boomerang/graph.hpp"

namespace boomerang {

// Plain file helpers (binary mode both ways, so written bytes are exact).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// ---------------------------------------------------------------------------
// Graph text format: optional '#' comments, a `n <count>` line, then one
// `<i> <j> <+1|-1>` line per edge. The writer is canonical (edges ascending),
// and parse(serialize(g)) reproduces g exactly.
// ---------------------------------------------------------------------------
SignedGraph parse_graph(const std::string& text);
std::string serialize_graph(const SignedGraph& g);
SignedGraph read_graph_file(const std::string& path);
void write_graph_file(const SignedGraph& g, const std::string& path);

// ---------------------------------------------------------------------------
// Trajectory CSV: header `t,edge_i,edge_j,x_0,...,x_{n-1}`, one row per
// recorded state, doubles with 17 significant digits. The edge columns carry
// the edge whose update produced that row's state (-1 -1 on the t=0 row; for
// strides > 1 they show the last edge applied before the snapshot).
// ---------------------------------------------------------------------------
std::string serialize_trajectory_csv(const Trajectory& traj);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

// Parsed CSV payload. The file stores no graph or params, so replays combine
// this with a separately supplied graph.
struct TrajectoryData {
  int n = 0;
  std::vector<std::int64_t> times;
  std::vector<double> states;    // row-major, n per row
  std::vector<Edge> row_edges;   // aligned with times; {-1, -1} on the first row
};

TrajectoryData parse_trajectory_csv(const std::string& text);
TrajectoryData read_trajectory_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Edge sequence files: one `i j` pair per line ('#' comments allowed).
// Opinion vector files: one value per line ('#' comments allowed).
// ---------------------------------------------------------------------------
std::string serialize_edge_sequence(const std::vector<Edge>& sequence);
std::vector<Edge> parse_edge_sequence(const std::string& text);
std::vector<Edge> read_edge_sequence_file(const std::string& path);
void write_edge_sequence_file(const std::vector<Edge>& sequence, const std::string& path);

std::string serialize_opinions(const std::vector<double>& x);
std::vector<double> parse_opinions(const std::string& text);
std::vector<double> read_opinions_file(const std::string& path);
void write_opinions_file(const std::vector<double>& x, const std::string& path);

// ---------------------------------------------------------------------------
// Experiment config JSON (schema_version 1, strict: unknown fields rejected).
// A "preset" field applies that preset's defaults first; any other present
// field then overrides them. Errors carry the offending field path.
// ---------------------------------------------------------------------------
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig read_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Experiment summary: JSON document (config echo + aggregate + per-trial rows)
// and a flat CSV (one row per trial, columns fixed by the detector mode).
// ---------------------------------------------------------------------------
std::string serialize_summary_json(const ExperimentSummary& summary);
std::string serialize_summary_csv(const ExperimentSummary& summary);

// Analysis report JSON for a single trajectory (schema_version 1).
std::string serialize_report_json(const AnalysisReport& report);

}  // namespace boomerang
