#pragma once

// Locale-independent CSV/JSON emission with a replayable metadata block.

#include <charconv>
#include <fstream>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "gadqs/errors.hpp"
#include "gadqs/ga.hpp"

namespace gadqs::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// %.17g without locale dependence.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (r.ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, r.ptr);
}

inline nlohmann::json ga_budget_json(const ga::GaConfig& c) {
  return {{"population", c.population},
          {"offspring", c.offspring},
          {"participation", c.participation},
          {"mutation_rate", c.mutation_rate},
          {"mutation_scope", c.scope == ga::MutationScope::all ? "all" : "offspring"},
          {"angle_sigma", c.angle_sigma},
          {"angle_decades", c.angle_decades},
          {"max_generations", c.max_generations},
          {"target_fitness", c.target_fitness},
          {"unique_selection", c.unique_selection},
          {"restart_after", c.restart_after}};
}

/// Metadata block; thread count is deliberately absent so outputs do not
/// depend on it.
inline nlohmann::json metadata(const std::string& command, std::uint64_t seed, nlohmann::json config) {
  return {{"tool", "gadqs"}, {"version", kToolVersion}, {"command", command}, {"seed", seed},
          {"config", std::move(config)}};
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  /// Writes the metadata as a single '#'-prefixed JSON line.
  void comment(const nlohmann::json& meta) { os_ << "# " << meta.dump() << '\n'; }

  void header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) os_ << (i ? "," : "") << names[i];
    os_ << '\n';
  }

  CsvWriter& cell(double v) { return raw(format_double(v)); }
  CsvWriter& cell(long long v) { return raw(std::to_string(v)); }
  CsvWriter& cell(int v) { return raw(std::to_string(v)); }
  CsvWriter& cell(std::size_t v) { return raw(std::to_string(v)); }
  CsvWriter& cell(bool v) { return raw(v ? "1" : "0"); }
  CsvWriter& cell(const std::string& v) { return raw(v); }
  CsvWriter& cell(const char* v) { return raw(v); }

  void end_row() {
    os_ << '\n';
    first_ = true;
  }

 private:
  CsvWriter& raw(const std::string& s) {
    if (!first_) os_ << ',';
    os_ << s;
    first_ = false;
    return *this;
  }

  std::ostream& os_;
  bool first_ = true;
};

/// Opens `path` for writing; throws Error when that fails.
inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  return f;
}

}  // namespace gadqs::io
