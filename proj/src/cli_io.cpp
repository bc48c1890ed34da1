#include "renydiv/cli_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>
#include <json.hpp>

#include "renydiv/errors.hpp"
#include "renydiv/pipeline.hpp"
#include "renydiv/powerlaw.hpp"

namespace renydiv {

using Json = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_uint(std::string_view s, std::uint64_t& v) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& v) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v);
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Round to 9 significant digits so the JSON dump prints at most that many.
double sig9(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

Json num(double v) { return std::isfinite(v) ? Json(sig9(v)) : Json(nullptr); }

Json opt_num(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

Json to_json(const LDReport& r) {
  return Json{{"p_star", num(r.p_star)},
              {"ld_ratio", num(r.ld_ratio)},
              {"m_over_n", num(r.m_over_n)},
              {"m_sq_over_n", num(r.m_sq_over_n)},
              {"entropy_condition", opt_num(r.entropy_condition)},
              {"divergence_condition", opt_num(r.divergence_condition)},
              {"degenerate_divergence_condition", opt_num(r.degenerate_divergence_condition)},
              {"ld_advisory", to_string(r.ld_advisory)},
              {"entropy_advisory", to_string(r.entropy_advisory)},
              {"divergence_advisory", to_string(r.divergence_advisory)},
              {"uniform_advisory", to_string(r.uniform_advisory)},
              {"degenerate_divergence_advisory", to_string(r.degenerate_divergence_advisory)}};
}

Json to_json(const EstimateWithCI& e) {
  return Json{{"estimate", num(e.estimate)},
              {"level", num(e.level)},
              {"lower", num(e.lower)},
              {"upper", num(e.upper)},
              {"std_error", num(e.std_error)},
              {"n", e.n},
              {"m", e.m},
              {"method", to_string(e.method)},
              {"diagnostics", e.diagnostics ? to_json(*e.diagnostics) : Json(nullptr)}};
}

Json to_json(const TestReport& t) {
  return Json{{"statistic", num(t.statistic)},
              {"raw_statistic", num(t.raw_statistic)},
              {"null_mean", num(t.null_mean)},
              {"null_sd", num(t.null_sd)},
              {"p_value", num(t.p_value)},
              {"sidedness", to_string(t.sidedness)},
              {"m", t.m},
              {"n", t.n},
              {"method", to_string(t.method)}};
}

Json to_json(const FitResult& f) {
  return Json{{"beta_hat", num(f.beta_hat)},
              {"std_error", num(f.std_error)},
              {"residual_sse", num(f.residual_sse)},
              {"intercept", num(f.intercept)},
              {"ranks_used", f.ranks_used}};
}

Json category_ids(const std::vector<std::size_t>& idx, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (auto i : idx) out.push_back(names.at(i));
  return out;
}

Json to_json(const MixtureDecomposition& d, const std::vector<std::string>& names) {
  Json comps = Json::array();
  for (const auto& c : d.noise_components) {
    comps.push_back(Json{{"categories", category_ids(c.categories, names)},
                         {"min_count", c.min_count},
                         {"max_count", c.max_count},
                         {"total", c.total},
                         {"level", num(c.level)}});
  }
  return Json{{"k_m", d.cutoff_k_m},
              {"noise_components", comps},
              {"signal_categories", category_ids(d.signal_categories, names)},
              {"noise_fraction", num(d.noise_fraction)},
              {"signal_fraction", num(d.signal_fraction)},
              {"m_signal", d.m_signal},
              {"n", d.n}};
}

Json to_json(const SimConfig& c) {
  Json blocks = Json::array();
  for (const auto& b : c.noise_blocks) blocks.push_back(Json{{"categories", b.categories}, {"mass", num(b.mass)}});
  return Json{{"family", to_string(c.family)},
              {"beta", num(c.beta)},
              {"beta2", num(c.beta2)},
              {"rho", num(c.rho)},
              {"p0", num(c.p0)},
              {"noise_blocks", blocks},
              {"m", c.m},
              {"epsilon", num(c.epsilon)},
              {"n_override", c.n_override ? Json(*c.n_override) : Json(nullptr)},
              {"n", c.n()},
              {"alpha", num(c.alpha)},
              {"B", c.B},
              {"statistic", to_string(c.statistic)},
              {"thinning_tau", opt_num(c.thinning_tau)},
              {"master_seed", c.master_seed}};
}

void flatten(const Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    if (j.empty()) out << prefix << "\t\n";
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_string()) {
    out << prefix << '\t' << j.get<std::string>() << '\n';
  } else if (j.is_null()) {
    out << prefix << "\t\n";
  } else {
    out << prefix << '\t' << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Command implementations

struct Common {
  double alpha = 0.5;
  double level = 0.95;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format = "json";
  std::vector<std::string> files;
  std::vector<std::string> samples;
};

// Named samples from one or more tables, aligned on the union of category ids
// in order of first appearance. Absent categories count zero.
struct SampleSet {
  std::vector<std::string> categories;
  std::vector<std::string> names;
  std::vector<std::vector<std::uint64_t>> columns;

  CountVector column(std::size_t s) const { return CountVector(columns.at(s)); }
};

SampleSet load_samples(const Common& c) {
  if (c.files.empty()) throw UsageError("no input count table given");
  SampleSet set;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::pair<std::string, std::vector<std::pair<std::size_t, std::uint64_t>>>> raw;
  for (const auto& path : c.files) {
    const CountTableFile t = read_count_table(path);
    std::vector<std::size_t> map(t.m());
    for (std::size_t i = 0; i < t.m(); ++i) {
      auto [it, inserted] = index.emplace(t.categories[i], set.categories.size());
      if (inserted) set.categories.push_back(t.categories[i]);
      map[i] = it->second;
    }
    for (std::size_t s = 0; s < t.samples.size(); ++s) {
      std::vector<std::pair<std::size_t, std::uint64_t>> col;
      for (std::size_t i = 0; i < t.m(); ++i) col.emplace_back(map[i], t.samples[s][i]);
      raw.emplace_back(t.sample_names[s], std::move(col));
    }
  }
  std::vector<std::size_t> chosen;
  if (c.samples.empty()) {
    for (std::size_t s = 0; s < raw.size(); ++s) chosen.push_back(s);
  } else {
    for (const auto& name : c.samples) {
      std::size_t hit = raw.size();
      for (std::size_t s = 0; s < raw.size(); ++s) {
        if (raw[s].first == name) {
          hit = s;
          break;
        }
      }
      if (hit == raw.size()) throw ValidationError("unknown sample '" + name + "'");
      chosen.push_back(hit);
    }
  }
  for (auto s : chosen) {
    std::vector<std::uint64_t> col(set.categories.size(), 0);
    for (const auto& [i, v] : raw[s].second) col[i] = v;
    set.names.push_back(raw[s].first);
    set.columns.push_back(std::move(col));
  }
  return set;
}

// Paired table: header `row<TAB>col<TAB>count`, category ids in the first two
// fields. Returns the table over the union of ids in first-appearance order.
std::pair<JointCountTable, std::vector<std::string>> read_joint_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::tuple<std::size_t, std::size_t, std::uint64_t>> cells;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  auto id_of = [&](std::string_view s) {
    auto [it, inserted] = index.emplace(std::string(s), ids.size());
    if (inserted) ids.emplace_back(s);
    return it->second;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) throw ParseError("expected 3 tab-separated fields, got " + std::to_string(f.size()), lineno);
    if (!header) {
      header = true;
      continue;
    }
    std::uint64_t v = 0;
    if (!parse_uint(f[2], v)) throw ParseError("count '" + std::string(f[2]) + "' is not a non-negative integer", lineno);
    cells.emplace_back(id_of(f[0]), id_of(f[1]), v);
  }
  if (!header) throw ParseError("missing header", 1);
  if (ids.empty()) throw ValidationError("joint table has no cells");
  JointCountTable table(ids.size());
  for (const auto& [i, j, v] : cells) {
    if (v > 0) table.add(i, j, v);
  }
  if (table.n() == 0) throw ValidationError("joint table has no observations");
  return {std::move(table), std::move(ids)};
}

void emit(const Json& report, const Common& c, std::ostream& out) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.output.empty()) {
    file.open(c.output);
    if (!file) throw ValidationError("cannot write '" + c.output + "'");
    sink = &file;
  }
  if (c.format == "tsv") {
    *sink << "key\tvalue\n";
    flatten(report, "", *sink);
  } else {
    *sink << report.dump(2) << '\n';
  }
}

Json header(const Common& c) { return Json{{"alpha", num(c.alpha)}, {"level", num(c.level)}}; }

Json cmd_entropy(const Common& c) {
  const SampleSet set = load_samples(c);
  const Alpha alpha(c.alpha);
  Json rows = Json::array();
  for (std::size_t s = 0; s < set.columns.size(); ++s) {
    const CountVector cv = set.column(s);
    Json row = to_json(entropy_ci(cv, alpha, c.level));
    row["hill_number"] = to_json(hill_ci(cv, alpha, c.level));
    Json entry{{"sample", set.names[s]}};
    entry.update(row);
    rows.push_back(entry);
  }
  Json r = header(c);
  r["samples"] = rows;
  return r;
}

std::pair<std::size_t, std::size_t> two_samples(const SampleSet& set, std::string_view what) {
  if (set.columns.size() != 2) {
    throw UsageError(std::string(what) + " needs exactly 2 samples, got " + std::to_string(set.columns.size()) +
                     " (select with --samples)");
  }
  return {0, 1};
}

Json cmd_divergence(const Common& c, const std::string& joint_path) {
  const Alpha alpha(c.alpha);
  Json r = header(c);
  if (!joint_path.empty()) {
    const auto [table, ids] = read_joint_table(joint_path);
    r["mode"] = "paired";
    r["divergence"] = to_json(divergence_ci(table, alpha, c.level));
    return r;
  }
  const SampleSet set = load_samples(c);
  const auto [x, y] = two_samples(set, "divergence");
  r["mode"] = "independent";
  r["samples"] = Json::array({set.names[x], set.names[y]});
  r["divergence"] = to_json(divergence_ci(set.column(x), set.column(y), alpha, c.level));
  return r;
}

Json cmd_filter_noise(const Common& c, double noise_level, std::size_t max_components) {
  const SampleSet set = load_samples(c);
  Json rows = Json::array();
  for (std::size_t s = 0; s < set.columns.size(); ++s) {
    Json entry{{"sample", set.names[s]}};
    entry.update(to_json(filter_noise(set.column(s), noise_level, max_components), set.categories));
    rows.push_back(entry);
  }
  return Json{{"noise_level", num(noise_level)}, {"max_components", max_components}, {"samples", rows}};
}

Json cmd_test_equality(const Common& c, const std::string& mode, const std::string& joint_path) {
  const Alpha alpha(c.alpha);
  Json r{{"alpha", num(c.alpha)}, {"mode", mode}};
  if (mode == "paired") {
    if (joint_path.empty()) throw UsageError("--mode paired needs --joint <file>");
    const auto [table, ids] = read_joint_table(joint_path);
    r["test"] = to_json(equality_test(table, alpha));
    return r;
  }
  const SampleSet set = load_samples(c);
  const auto [x, y] = two_samples(set, "test-equality");
  r["samples"] = Json::array({set.names[x], set.names[y]});
  r["test"] = to_json(equality_test(set.column(x), set.column(y), alpha));
  return r;
}

Json cmd_test_homogeneity(const Common& c) {
  const SampleSet set = load_samples(c);
  if (set.columns.size() % 2 != 0) {
    throw UsageError("test-homogeneity pairs samples consecutively; got an odd count " +
                     std::to_string(set.columns.size()));
  }
  std::vector<std::pair<CountVector, CountVector>> pairs;
  Json names = Json::array();
  for (std::size_t s = 0; s + 1 < set.columns.size(); s += 2) {
    pairs.emplace_back(set.column(s), set.column(s + 1));
    names.push_back(Json::array({set.names[s], set.names[s + 1]}));
  }
  const Alpha alpha(c.alpha);
  Json per_pair = Json::array();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    per_pair.push_back(
        Json{{"samples", names[k]}, {"test", to_json(equality_test(pairs[k].first, pairs[k].second, alpha))}});
  }
  return Json{{"alpha", num(c.alpha)}, {"pairs", per_pair}, {"test", to_json(homogeneity_test(pairs, alpha))}};
}

Json cmd_fit_powerlaw(const Common& c) {
  const SampleSet set = load_samples(c);
  Json rows = Json::array();
  for (std::size_t s = 0; s < set.columns.size(); ++s) {
    Json entry{{"sample", set.names[s]}};
    entry.update(to_json(fit_powerlaw_ls(set.column(s))));
    rows.push_back(entry);
  }
  return Json{{"samples", rows}};
}

Json cmd_pipeline(const Common& c, const PipelineConfig& pc) {
  const SampleSet set = load_samples(c);
  const auto [x, y] = two_samples(set, "pipeline");
  const PipelineReport rep = diversity_pipeline(set.column(x), set.column(y), Alpha(c.alpha), pc);
  Json samples = Json::array();
  for (std::size_t s = 0; s < 2; ++s) {
    const MixtureDecomposition& d = rep.decomposition[s];
    samples.push_back(Json{{"sample", set.names[s]},
                           {"H_alpha", to_json(rep.entropies[s])},
                           {"ENC_alpha", to_json(rep.hill_numbers[s])},
                           {"k_m", d.cutoff_k_m},
                           {"noise_fraction", num(d.noise_fraction)},
                           {"signal_fraction", num(d.signal_fraction)},
                           {"signal_n", rep.signal_n[s]},
                           {"decomposition", to_json(d, set.categories)},
                           {"powerlaw_fit", rep.powerlaw_fits[s] ? to_json(*rep.powerlaw_fits[s]) : Json(nullptr)}});
  }
  return Json{{"alpha", num(rep.alpha)},
              {"k_m", rep.shared_cutoff},
              {"signal_support", category_ids(rep.signal_support, set.categories)},
              {"samples", samples},
              {"equality", to_json(rep.equality)},
              {"equality_rejected", rep.equality_rejected()},
              {"D_alpha", rep.divergence ? to_json(*rep.divergence) : Json(nullptr)},
              {"config",
               Json{{"noise_level", num(pc.noise_level)},
                    {"max_components", pc.max_components},
                    {"ci_level", num(pc.ci_level)},
                    {"test_level", num(pc.test_level)}}}};
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("RENYDIV_SEED");
  if (v == nullptr) return std::nullopt;
  std::uint64_t s = 0;
  if (!parse_uint(trim(v), s)) throw ValidationError("RENYDIV_SEED is not a non-negative integer");
  return s;
}

void cmd_simulate(const Common& c, const std::string& config_path, bool alpha_given,
                  std::optional<std::size_t> workers, std::ostream& out) {
  if (config_path.empty()) throw UsageError("simulate needs --config <file>");
  std::ifstream in(config_path);
  if (!in) throw ValidationError("cannot open '" + config_path + "'");
  bool seed_in_file = false;
  {
    std::string line;
    while (std::getline(in, line)) {
      const auto body = trim(std::string_view(line).substr(0, line.find('#')));
      if (trim(body.substr(0, body.find('='))) == "master_seed") seed_in_file = true;
    }
    in.clear();
    in.seekg(0);
  }
  SimConfig cfg = parse_sim_config(in);
  if (c.seed) {
    cfg.master_seed = *c.seed;
  } else if (!seed_in_file) {
    if (auto s = env_seed()) cfg.master_seed = *s;
  }
  if (alpha_given) cfg.alpha = c.alpha;
  if (workers) cfg.workers = *workers;

  const SimRun run = simulate_statistic(cfg);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.output.empty()) {
    file.open(c.output);
    if (!file) throw ValidationError("cannot write '" + c.output + "'");
    sink = &file;
  }
  if (c.format == "json") {
    Json pairs = Json::array();
    for (const auto& [qn, qs] : run.qq_pairs) pairs.push_back(Json::array({num(qn), num(qs)}));
    Json samples = Json::array();
    for (double v : run.samples) samples.push_back(num(v));
    *sink << Json{{"config_echo", to_json(run.config_echo)},
                  {"ks_distance", num(run.ks_distance)},
                  {"samples", samples},
                  {"qq_pairs", pairs}}
                 .dump(2)
          << '\n';
    return;
  }
  *sink << "normal_quantile,sample_quantile\n";
  char buf[80];
  for (const auto& [qn, qs] : run.qq_pairs) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", qn, qs);
    *sink << buf;
  }
  std::snprintf(buf, sizeof buf, "# ks_distance,%.9g\n", run.ks_distance);
  *sink << buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Count tables

CountTableFile parse_count_table(std::istream& in) {
  CountTableFile t;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (!have_header) {
      if (fields.size() < 2) throw ParseError("header needs 'category' and at least one sample column", lineno);
      for (std::size_t k = 1; k < fields.size(); ++k) {
        if (fields[k].empty()) throw ParseError("empty sample name in header", lineno);
        t.sample_names.emplace_back(fields[k]);
      }
      t.samples.resize(t.sample_names.size());
      have_header = true;
      continue;
    }
    if (fields.size() != t.sample_names.size() + 1) {
      throw ParseError("expected " + std::to_string(t.sample_names.size() + 1) + " tab-separated fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    }
    const std::string id(fields[0]);
    if (id.empty()) throw ParseError("empty category id", lineno);
    if (auto [it, inserted] = seen.emplace(id, lineno); !inserted) {
      throw ValidationError("duplicate category '" + id + "' on line " + std::to_string(lineno) +
                            " (first seen on line " + std::to_string(it->second) + ")");
    }
    for (std::size_t k = 1; k < fields.size(); ++k) {
      std::uint64_t v = 0;
      if (!parse_uint(fields[k], v)) {
        throw ParseError("count '" + std::string(fields[k]) + "' is not a non-negative integer", lineno);
      }
      t.samples[k - 1].push_back(v);
    }
    t.categories.push_back(id);
  }
  if (!have_header) throw ParseError("missing header", lineno + 1);
  if (t.categories.empty()) throw ValidationError("count table has no categories");
  return t;
}

CountTableFile read_count_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return parse_count_table(in);
}

void write_count_table(std::ostream& out, const CountTableFile& table) {
  out << "category";
  for (const auto& name : table.sample_names) out << '\t' << name;
  out << '\n';
  for (std::size_t i = 0; i < table.m(); ++i) {
    out << table.categories[i];
    for (const auto& col : table.samples) out << '\t' << col[i];
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Simulation config

SimConfig parse_sim_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    body = trim(body.substr(0, body.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", lineno);
    const std::string key(trim(body.substr(0, eq)));
    std::string_view value = trim(body.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

    auto bad = [&](std::string_view what) {
      return ParseError("invalid value '" + std::string(value) + "' for " + key + " (" + std::string(what) + ")",
                        lineno);
    };
    auto real = [&] {
      double v = 0.0;
      if (!parse_double(value, v)) throw bad("expected a real number");
      return v;
    };
    auto count = [&] {
      std::uint64_t v = 0;
      if (!parse_uint(value, v)) throw bad("expected a non-negative integer");
      return v;
    };

    if (key == "family") {
      const auto f = family_from_string(value);
      if (!f) throw bad("unknown family");
      cfg.family = *f;
    } else if (key == "statistic") {
      const auto s = statistic_from_string(value);
      if (!s) throw bad("unknown statistic");
      cfg.statistic = *s;
    } else if (key == "beta") {
      cfg.beta = real();
    } else if (key == "beta2") {
      cfg.beta2 = real();
    } else if (key == "rho") {
      cfg.rho = real();
    } else if (key == "p0") {
      cfg.p0 = real();
    } else if (key == "m") {
      cfg.m = count();
    } else if (key == "epsilon") {
      cfg.epsilon = real();
    } else if (key == "n" || key == "n_override") {
      if (value == "none" || value.empty()) {
        cfg.n_override.reset();
      } else {
        cfg.n_override = count();
      }
    } else if (key == "alpha") {
      cfg.alpha = real();
    } else if (key == "B") {
      cfg.B = count();
    } else if (key == "thinning_tau") {
      if (value == "none" || value.empty()) {
        cfg.thinning_tau.reset();
      } else {
        cfg.thinning_tau = real();
      }
    } else if (key == "master_seed" || key == "seed") {
      cfg.master_seed = count();
    } else if (key == "workers") {
      cfg.workers = count();
    } else if (key == "noise_blocks") {
      cfg.noise_blocks.clear();
      if (!value.empty()) {
        for (auto item : split(value, ',')) {
          item = trim(item);
          const auto colon = item.find(':');
          std::uint64_t cats = 0;
          double mass = 0.0;
          if (colon == std::string_view::npos || !parse_uint(trim(item.substr(0, colon)), cats) ||
              !parse_double(trim(item.substr(colon + 1)), mass)) {
            throw bad("expected categories:mass[,categories:mass...]");
          }
          cfg.noise_blocks.push_back({cats, mass});
        }
      }
    } else {
      throw ParseError("unknown key '" + key + "'", lineno);
    }
  }
  return cfg;
}

std::string format_sim_config(const SimConfig& cfg) {
  std::ostringstream o;
  o << "family = " << to_string(cfg.family) << '\n';
  o << "statistic = " << to_string(cfg.statistic) << '\n';
  o << "m = " << cfg.m << '\n';
  o << "epsilon = " << exact(cfg.epsilon) << '\n';
  o << "n = " << (cfg.n_override ? std::to_string(*cfg.n_override) : std::string("none")) << '\n';
  o << "alpha = " << exact(cfg.alpha) << '\n';
  o << "B = " << cfg.B << '\n';
  o << "beta = " << exact(cfg.beta) << '\n';
  o << "beta2 = " << exact(cfg.beta2) << '\n';
  o << "rho = " << exact(cfg.rho) << '\n';
  o << "p0 = " << exact(cfg.p0) << '\n';
  o << "noise_blocks = ";
  for (std::size_t i = 0; i < cfg.noise_blocks.size(); ++i) {
    o << (i ? "," : "") << cfg.noise_blocks[i].categories << ':' << exact(cfg.noise_blocks[i].mass);
  }
  o << '\n';
  o << "thinning_tau = " << (cfg.thinning_tau ? exact(*cfg.thinning_tau) : std::string("none")) << '\n';
  o << "master_seed = " << cfg.master_seed << '\n';
  return o.str();
}

// ---------------------------------------------------------------------------
// Dispatcher

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Renyi entropy and divergence inference for count data"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Common common;
  auto add_common = [&](CLI::App* sub, bool positional_files, std::vector<std::string> formats = {"json", "tsv"}) {
    sub->add_option("--alpha", common.alpha, "Renyi order in (0, 1)")->capture_default_str();
    sub->add_option("--level", common.level, "Confidence level")->capture_default_str();
    sub->add_option("--seed", common.seed, "Master seed");
    sub->add_option("--output", common.output, "Write the report to this path");
    sub->add_option("--format", common.format, "Report format")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
    if (positional_files) {
      sub->add_option("--samples", common.samples, "Sample columns to use, by name")->delimiter(',');
      sub->add_option("files", common.files, "Tab-separated count tables");
    }
  };

  auto* entropy = app.add_subcommand("entropy", "Renyi entropy and Hill number intervals per sample");
  add_common(entropy, true);

  std::string joint_path;
  auto* divergence = app.add_subcommand("divergence", "Renyi divergence interval for a sample pair");
  add_common(divergence, true);
  divergence->add_option("--joint", joint_path, "Paired table (row, col, count) instead of two samples");

  double noise_level = kDefaultNoiseLevel;
  std::size_t max_components = kDefaultMaxComponents;
  auto* filter = app.add_subcommand("filter-noise", "Split each sample into uniform noise blocks and signal");
  add_common(filter, true);
  filter->add_option("--noise-level", noise_level, "Significance of each block test")->capture_default_str();
  filter->add_option("--max-components", max_components, "Maximum number of noise blocks")->capture_default_str();

  std::string mode = "independent";
  auto* equality = app.add_subcommand("test-equality", "Test equality of two distributions");
  add_common(equality, true);
  equality->add_option("--mode", mode, "Sampling design")
      ->check(CLI::IsMember({"independent", "paired"}))
      ->capture_default_str();
  equality->add_option("--joint", joint_path, "Paired table (row, col, count), for --mode paired");

  auto* homogeneity = app.add_subcommand("test-homogeneity", "Joint equality test over consecutive sample pairs");
  add_common(homogeneity, true);

  auto* fit = app.add_subcommand("fit-powerlaw", "Rank-frequency power-law fit per sample");
  add_common(fit, true);

  PipelineConfig pc;
  auto* pipeline = app.add_subcommand("pipeline", "Noise filtering, equality test and diversity intervals");
  add_common(pipeline, true);
  pipeline->add_option("--noise-level", pc.noise_level, "Significance of each block test")->capture_default_str();
  pipeline->add_option("--max-components", pc.max_components, "Maximum number of noise blocks")
      ->capture_default_str();
  pipeline->add_option("--test-level", pc.test_level, "Equality is rejected below this p-value")
      ->capture_default_str();

  std::string config_path;
  std::optional<std::size_t> workers;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo samples of a normalized statistic");
  add_common(simulate, false, {"csv", "json"});
  simulate->add_option("--config", config_path, "key = value simulation config")->required();
  simulate->add_option("--workers", workers, "Worker threads (results do not depend on it)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) {
      if (simulate->get_option("--format")->count() == 0) common.format = "csv";
      cmd_simulate(common, config_path, simulate->get_option("--alpha")->count() > 0, workers, out);
      return kExitOk;
    }
    pc.ci_level = common.level;
    Json report;
    if (entropy->parsed()) {
      report = cmd_entropy(common);
    } else if (divergence->parsed()) {
      report = cmd_divergence(common, joint_path);
    } else if (filter->parsed()) {
      report = cmd_filter_noise(common, noise_level, max_components);
    } else if (equality->parsed()) {
      report = cmd_test_equality(common, mode, joint_path);
    } else if (homogeneity->parsed()) {
      report = cmd_test_homogeneity(common);
    } else if (fit->parsed()) {
      report = cmd_fit_powerlaw(common);
    } else if (pipeline->parsed()) {
      report = cmd_pipeline(common, pc);
    }
    emit(report, common, out);
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NoSignalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace renydiv
