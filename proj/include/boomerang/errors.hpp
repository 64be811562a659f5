#pragma once

#include <stdexcept>
#include <string>

namespace boomerang {

// Failure identities for the public operations. The CLI maps each to exactly one
// exit code, so every throw site picks the code that names its contract breach.
enum class Errc {
  index_out_of_range,
  duplicate_edge,
  self_loop,
  invalid_sign,
  invalid_sizes,
  count_exceeds_edges,
  empty_edge_set,
  invalid_edge,
  invalid_initial_opinion,
  unknown_edge,
  arrangement_violated,
  no_path,
  sequence_too_long,
  wrong_faction_count,
  never_separated,
  invalid_epsilon,
  unknown_preset,
  invalid_weight,
  not_single_faction,
  parse_error,
  schema_violation,
  validation_error,
  io_error,
};

// model: the inputs were well-formed but the model's preconditions don't hold
//        (CLI exit 1).
// input: malformed files, flags, or argument contracts (CLI exit 2).
enum class ErrorKind { model, input };

constexpr const char* errc_name(Errc c) {
  switch (c) {
    case Errc::index_out_of_range: return "index_out_of_range";
    case Errc::duplicate_edge: return "duplicate_edge";
    case Errc::self_loop: return "self_loop";
    case Errc::invalid_sign: return "invalid_sign";
    case Errc::invalid_sizes: return "invalid_sizes";
    case Errc::count_exceeds_edges: return "count_exceeds_edges";
    case Errc::empty_edge_set: return "empty_edge_set";
    case Errc::invalid_edge: return "invalid_edge";
    case Errc::invalid_initial_opinion: return "invalid_initial_opinion";
    case Errc::unknown_edge: return "unknown_edge";
    case Errc::arrangement_violated: return "arrangement_violated";
    case Errc::no_path: return "no_path";
    case Errc::sequence_too_long: return "sequence_too_long";
    case Errc::wrong_faction_count: return "wrong_faction_count";
    case Errc::never_separated: return "never_separated";
    case Errc::invalid_epsilon: return "invalid_epsilon";
    case Errc::unknown_preset: return "unknown_preset";
    case Errc::invalid_weight: return "invalid_weight";
    case Errc::not_single_faction: return "not_single_faction";
    case Errc::parse_error: return "parse_error";
    case Errc::schema_violation: return "schema_violation";
    case Errc::validation_error: return "validation_error";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

constexpr ErrorKind errc_kind(Errc c) {
  switch (c) {
    case Errc::arrangement_violated:
    case Errc::no_path:
    case Errc::sequence_too_long:
    case Errc::never_separated:
    case Errc::not_single_faction:
      return ErrorKind::model;
    default:
      return ErrorKind::input;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return errc_kind(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace boomerang
