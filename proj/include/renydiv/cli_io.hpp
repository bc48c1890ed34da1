#pragma once

// Count-table and simulation-config I/O, and the `renydiv` command dispatcher.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "renydiv/asymptotics.hpp"
#include "renydiv/montecarlo.hpp"

namespace renydiv {

// Tab-separated count table: header `category<TAB>name1[<TAB>name2...]`,
// then one row per category.
struct CountTableFile {
  std::vector<std::string> categories;
  std::vector<std::string> sample_names;
  std::vector<std::vector<std::uint64_t>> samples;  // samples[s][category]

  std::size_t m() const noexcept { return categories.size(); }
  CountVector sample(std::size_t s) const { return CountVector(samples.at(s)); }

  bool operator==(const CountTableFile&) const = default;
};

// Throws ParseError (with line number) on malformed rows and ValidationError
// on duplicate category ids or an empty table.
CountTableFile parse_count_table(std::istream& in);
CountTableFile read_count_table(const std::filesystem::path& path);
void write_count_table(std::ostream& out, const CountTableFile& table);

// Flat `key = value` simulation config; `#` starts a comment. Keys mirror
// the SimConfig fields (`n` sets n_override; `noise_blocks` is a list
// `categories:mass,...`). Throws ParseError on unknown keys or bad values.
SimConfig parse_sim_config(std::istream& in);
// Canonical text form; parse_sim_config(format_sim_config(c)) == c.
// `workers` is omitted because it never affects results.
std::string format_sim_config(const SimConfig& cfg);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

// Entry point of the `renydiv` tool. Reports go to `out` unless --output is
// given; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace renydiv
