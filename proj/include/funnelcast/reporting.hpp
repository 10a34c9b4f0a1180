// SPDX-License-Identifier: Apache-2.0
//
// Command orchestration shared by the CLI and the integration tests:
// validation, the full analysis report, the visitor/non-visitor rank-test
// battery, regression tables, simulation and fixture emission, plus run
// manifests with content digests for reproducibility checks.
#ifndef FUNNELCAST_REPORTING_HPP
#define FUNNELCAST_REPORTING_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "funnelcast/cascade.hpp"
#include "funnelcast/factors.hpp"
#include "funnelcast/fixture.hpp"
#include "funnelcast/ingest.hpp"
#include "funnelcast/model.hpp"
#include "funnelcast/simulate.hpp"
#include "funnelcast/staging.hpp"
#include "funnelcast/stats.hpp"

namespace funnelcast {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit-code contract: 0 clean, 1 data findings, 2 usage or I/O failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitUsage = 2;

/// FNV-1a 64-bit content digest; enough to detect any accidental output
/// drift between reruns.
inline std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> input_digests;
  std::int64_t duration_ms = 0;
  std::vector<std::pair<std::string, std::string>> outputs;  // file, digest

  nlohmann::json to_json() const {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [file, digest] : outputs)
      outs.push_back({{"file", file}, {"digest", digest}});
    return nlohmann::json{{"command", command},
                          {"tool_version", kToolVersion},
                          {"inputs", input_digests},
                          {"duration_ms", duration_ms},
                          {"outputs", outs}};
  }
};

namespace detail {

inline std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(RunManifest& manifest, const std::filesystem::path& dir,
                         const std::string& name, const std::string& content) {
  std::ofstream out(dir / name, std::ios::binary);
  out << content;
  manifest.outputs.emplace_back(name, fnv1a64(content));
}

inline std::string format_double(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string sanitize_filename(std::string name) {
  for (char& c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return name;
}

}  // namespace detail

// --- Rank-test battery ----------------------------------------------------------

struct MwuRow {
  std::string factor;
  RankTestResult result;
};

/// Runs the visitor/non-visitor comparison for the nine pre-event factors
/// under the zero-fill policy (the convention that gives every factor the
/// same two group sizes). Rows come back sorted by descending Z.
inline std::vector<MwuRow> mwu_battery(const std::vector<FactorVector>& vectors,
                                       const std::map<UserId, StageProfile>& profiles,
                                       bool tie_correction) {
  std::vector<MwuRow> rows;
  for (const char* name : kComparisonFactors) {
    std::vector<double> visitors, others;
    for (const auto& v : vectors) {
      const double value = v.by_name(name).value_or(0.0);
      const auto it = profiles.find(v.user);
      const bool s4 = it != profiles.end() && it->second.s4;
      (s4 ? visitors : others).push_back(value);
    }
    if (visitors.empty() || others.empty()) continue;
    rows.push_back({name, mann_whitney(visitors, others, tie_correction)});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const MwuRow& a, const MwuRow& b) { return a.result.z > b.result.z; });
  return rows;
}

inline nlohmann::json mwu_json(const std::vector<MwuRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    const auto& r = row.result;
    out.push_back({{"factor", row.factor},
                   {"rank_sum_visitors", r.rank_sum_a},
                   {"rank_sum_others", r.rank_sum_b},
                   {"u", r.u},
                   {"z", r.z},
                   {"p_value", r.p_two_sided},
                   {"n_visitors", r.n_a},
                   {"n_others", r.n_b}});
  }
  return out;
}

inline std::string mwu_csv(const std::vector<MwuRow>& rows, int decimals = 6) {
  std::string out = "factor,rank_sum_visitors,rank_sum_others,u,z,p_value,n_visitors,n_others\n";
  for (const auto& row : rows) {
    const auto& r = row.result;
    out += row.factor + ',' + detail::format_double(r.rank_sum_a, 1) + ',' +
           detail::format_double(r.rank_sum_b, 1) + ',' + detail::format_double(r.u, 1) + ',' +
           detail::format_double(r.z, decimals) + ',' +
           detail::format_double(r.p_two_sided, decimals) + ',' + std::to_string(r.n_a) + ',' +
           std::to_string(r.n_b) + '\n';
  }
  return out;
}

// --- Regression table ------------------------------------------------------------

struct RegressionTable {
  std::vector<std::string> regressors;
  std::string response;
  OlsResult fit;
  std::size_t n = 0;
};

/// Default response: keyword intensity of the user's messages during the
/// event, merged across the infected/non-infected variants and zero-filled.
inline double response_value(const FactorVector& v, const std::string& response) {
  if (response == "kw_event") return v.rf2 ? *v.rf2 : v.rf3.value_or(0.0);
  return v.by_name(response).value_or(0.0);
}

inline RegressionTable regress(const std::vector<FactorVector>& vectors,
                               const std::vector<std::string>& regressors,
                               const std::string& response, UndefinedPolicy policy) {
  RegressionTable table;
  table.regressors = regressors;
  table.response = response;

  std::vector<std::vector<double>> X;
  std::vector<double> y;
  for (const auto& v : vectors) {
    std::vector<double> row;
    row.reserve(regressors.size());
    bool drop = false;
    for (const auto& name : regressors) {
      const auto value = v.by_name(name);
      if (!value && policy == UndefinedPolicy::DropUndefined) {
        drop = true;
        break;
      }
      row.push_back(value.value_or(0.0));
    }
    if (drop) continue;
    X.push_back(std::move(row));
    y.push_back(response_value(v, response));
  }
  if (X.empty()) throw EmptyMatrix("no users survive the factor policy");
  table.n = X.size();
  table.fit = ols(X, y);
  return table;
}

inline nlohmann::json regression_json(const RegressionTable& table) {
  const auto& f = table.fit;
  nlohmann::json rows = nlohmann::json::array();
  auto row = [&](const std::string& name, std::size_t idx) {
    nlohmann::json j{{"factor", name},
                     {"b", f.coefficients[idx]},
                     {"std_err", f.standard_errors[idx]},
                     {"t", f.t_statistics[idx]},
                     {"p_value", f.p_values[idx]}};
    if (f.standardized[idx]) {
      j["b_std"] = *f.standardized[idx];
      if (f.coefficients[idx] != 0.0)
        j["b_std_err"] = f.standard_errors[idx] * (*f.standardized[idx] / f.coefficients[idx]);
    }
    rows.push_back(std::move(j));
  };
  row("Intercept", 0);
  for (std::size_t j = 0; j < table.regressors.size(); ++j) row(table.regressors[j], j + 1);
  return nlohmann::json{{"response", table.response},
                        {"n", table.n},
                        {"df_resid", f.df_resid},
                        {"r_squared", f.r_squared},
                        {"rows", rows}};
}

inline std::string regression_csv(const RegressionTable& table, int decimals = 6) {
  const auto& f = table.fit;
  std::string out = "factor,b_std,b_std_err,b,std_err,t,p_value\n";
  auto fmt = [&](double v) { return detail::format_double(v, decimals); };
  out += "Intercept,,," + fmt(f.coefficients[0]) + ',' + fmt(f.standard_errors[0]) + ',' +
         fmt(f.t_statistics[0]) + ',' + fmt(f.p_values[0]) + '\n';
  for (std::size_t j = 0; j < table.regressors.size(); ++j) {
    const std::size_t idx = j + 1;
    const double sd_ratio =
        f.coefficients[idx] != 0.0 && f.standardized[idx]
            ? *f.standardized[idx] / f.coefficients[idx]
            : 0.0;
    out += table.regressors[j] + ',' +
           (f.standardized[idx] ? fmt(*f.standardized[idx]) : std::string()) + ',' +
           fmt(f.standard_errors[idx] * sd_ratio) + ',' + fmt(f.coefficients[idx]) + ',' +
           fmt(f.standard_errors[idx]) + ',' + fmt(f.t_statistics[idx]) + ',' +
           fmt(f.p_values[idx]) + '\n';
  }
  out += "df_resid," + std::to_string(f.df_resid) + ",,,,,\n";
  out += "r_squared," + fmt(f.r_squared) + ",,,,,\n";
  return out;
}

// --- Loaded inputs -----------------------------------------------------------------

struct LoadedInputs {
  CampaignConfig config;
  ParseResult parsed;
  std::set<UserId> roster;
  std::map<std::string, std::string> digests;
};

/// Reads config/log/roster from disk. Throws std::runtime_error with a
/// user-facing message on I/O failure; config/JSON errors propagate.
inline LoadedInputs load_inputs(const std::string& log_path, const std::string& config_path,
                                const std::string& roster_path,
                                std::optional<EngagementDefinition> engagement_override) {
  LoadedInputs in;
  const auto config_bytes = detail::read_file(config_path);
  if (!config_bytes) throw std::runtime_error("cannot read config: " + config_path);
  std::istringstream config_stream(*config_bytes);
  in.config = load_campaign_config(config_stream);
  if (engagement_override) in.config.engagement = *engagement_override;
  in.digests["config"] = fnv1a64(*config_bytes);

  const auto log_bytes = detail::read_file(log_path);
  if (!log_bytes) throw std::runtime_error("cannot read log: " + log_path);
  std::istringstream log_stream(*log_bytes);
  in.parsed = parse_log(log_stream, in.config);
  in.digests["log"] = fnv1a64(*log_bytes);

  if (!roster_path.empty()) {
    const auto roster_bytes = detail::read_file(roster_path);
    if (!roster_bytes) throw std::runtime_error("cannot read roster: " + roster_path);
    std::istringstream roster_stream(*roster_bytes);
    in.roster = load_roster(roster_stream);
    in.digests["roster"] = fnv1a64(*roster_bytes);
  }
  return in;
}

inline void print_issues(const std::vector<LogIssue>& issues, std::ostream& out) {
  for (const auto& issue : issues) {
    out << "line " << issue.line_no << ": "
        << (issue.severity == Severity::Fatal ? "fatal" : "warning") << ' ' << issue.code << ": "
        << issue.detail << '\n';
  }
}

// --- Commands -------------------------------------------------------------------

inline int run_validate(const std::string& log_path, const std::string& config_path,
                        const std::string& roster_path, std::ostream& out) {
  LoadedInputs in;
  try {
    in = load_inputs(log_path, config_path, roster_path, std::nullopt);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  print_issues(in.parsed.issues, out);
  out << (in.parsed.ok() ? "ok: " : "invalid: ") << in.parsed.records.size() << " records, "
      << in.parsed.issues.size() << " issues\n";
  return in.parsed.ok() ? kExitOk : kExitFindings;
}

struct ReportOptions {
  std::string roster_path;
  UndefinedPolicy policy = UndefinedPolicy::ZeroFill;
  std::optional<EngagementDefinition> engagement_override;
  int decimals = 6;  // 17 under --full-precision
};

inline int run_report(const std::string& log_path, const std::string& config_path,
                      const std::string& out_dir, const ReportOptions& options,
                      std::ostream& console) {
  const auto started = std::chrono::steady_clock::now();
  LoadedInputs in;
  try {
    in = load_inputs(log_path, config_path, options.roster_path, options.engagement_override);
  } catch (const std::exception& e) {
    console << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!in.parsed.ok()) {
    print_issues(in.parsed.issues, console);
    return kExitFindings;
  }

  const auto timelines = build_timelines(in.parsed.records, in.config, in.roster);
  const auto profiles = classify(timelines, in.config);
  const auto report = estimate_transitions(profiles);
  const auto census = path_census(profiles);
  const auto forest = build_forest(in.parsed.records, in.config);
  const auto spread = spread_stats(forest, profiles);

  std::vector<FactorVector> vectors;
  vectors.reserve(timelines.size());
  for (const auto& [user, timeline] : timelines)
    vectors.push_back(compute_factors(timeline, profiles.at(user), in.config));
  const auto battery = mwu_battery(vectors, profiles, in.config.tie_correction);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  RunManifest manifest;
  manifest.command = "report";
  manifest.input_digests = in.digests;

  const int d = options.decimals;
  detail::write_output(manifest, out_dir, "transitions.csv", transitions_csv(report, d));
  detail::write_output(manifest, out_dir, "summary.csv", summary_csv(report, d));
  detail::write_output(manifest, out_dir, "paths.csv", paths_csv(census));
  detail::write_output(manifest, out_dir, "factors.csv",
                       factors_csv(vectors, options.policy == UndefinedPolicy::ZeroFill, d));
  detail::write_output(manifest, out_dir, "mwu.csv", mwu_csv(battery, d));
  detail::write_output(manifest, out_dir, "stages.dot", stages_dot(report, d));
  detail::write_output(manifest, out_dir, "cascade_edges.csv", cascade_edges_csv(forest));
  for (const auto& component : in.config.components) {
    detail::write_output(manifest, out_dir,
                         "cascade_" + detail::sanitize_filename(component) + ".dot",
                         cascade_dot(forest, component));
  }

  nlohmann::json jr;
  jr["n_total"] = report.n_total;
  jr["stages"] = {{"s1", report.n_s1}, {"s2", report.n_s2}, {"s3", report.n_s3},
                  {"s4", report.n_s4}};
  for (const char* edge : kEdgeOrder) {
    const Ratio& r = report.edges.at(edge);
    jr["edges"][edge] = {{"numerator", r.num}, {"denominator", r.den}};
    if (r.defined()) jr["edges"][edge]["probability"] = r.value();
  }
  for (Path p : kAllPaths) {
    const auto it = census.find(p);
    jr["path_census"][std::string(path_label(p))] = it == census.end() ? 0 : it->second;
  }
  jr["spread"]["forwarding_ratio"] = {{"numerator", spread.forwarding_ratio.num},
                                      {"denominator", spread.forwarding_ratio.den}};
  jr["spread"]["infected_attendee_rate"] = {{"numerator", spread.infected_attendee_rate.num},
                                            {"denominator", spread.infected_attendee_rate.den}};
  for (const auto& [comp, reach] : spread.reach) {
    jr["spread"]["reach"][comp] = reach;
    jr["spread"]["max_depth"][comp] = spread.max_depth.at(comp);
  }
  jr["anomalies"] = forest.anomalies.size();
  jr["mwu"] = mwu_json(battery);
  detail::write_output(manifest, out_dir, "report.json", jr.dump(2) + "\n");

  manifest.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
  std::ofstream mf(std::filesystem::path(out_dir) / "manifest.json", std::ios::binary);
  mf << manifest.to_json().dump(2) << '\n';

  if (in.parsed.records.empty()) console << "warning: empty log\n";
  if (report.n_total == 0) console << "warning: empty population\n";
  console << "report written to " << out_dir << '\n';
  return kExitOk;
}

struct MwuOptions {
  std::string roster_path;
  std::string out_path;  // empty: console
  std::optional<EngagementDefinition> engagement_override;
  int decimals = 6;
};

inline int run_mwu(const std::string& log_path, const std::string& config_path,
                   const MwuOptions& options, std::ostream& console) {
  LoadedInputs in;
  try {
    in = load_inputs(log_path, config_path, options.roster_path, options.engagement_override);
  } catch (const std::exception& e) {
    console << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!in.parsed.ok()) {
    print_issues(in.parsed.issues, console);
    return kExitFindings;
  }
  const auto timelines = build_timelines(in.parsed.records, in.config, in.roster);
  const auto profiles = classify(timelines, in.config);
  std::vector<FactorVector> vectors;
  for (const auto& [user, timeline] : timelines)
    vectors.push_back(compute_factors(timeline, profiles.at(user), in.config));
  const auto battery = mwu_battery(vectors, profiles, in.config.tie_correction);
  const bool as_json = options.out_path.ends_with(".json");
  const std::string rendered =
      as_json ? mwu_json(battery).dump(2) + "\n" : mwu_csv(battery, options.decimals);
  if (options.out_path.empty()) {
    console << rendered;
  } else {
    std::ofstream out(options.out_path, std::ios::binary);
    out << rendered;
  }
  return kExitOk;
}

struct RegressOptions {
  std::string roster_path;
  std::string population = "attendees";  // all | attendees | infected
  std::vector<std::string> regressors;   // empty: the nine comparison factors
  std::string response = "kw_event";
  UndefinedPolicy policy = UndefinedPolicy::ZeroFill;
  std::optional<EngagementDefinition> engagement_override;
  std::string out_path;
  int decimals = 6;
};

inline int run_regress(const std::string& log_path, const std::string& config_path,
                       const RegressOptions& options, std::ostream& console) {
  LoadedInputs in;
  try {
    in = load_inputs(log_path, config_path, options.roster_path, options.engagement_override);
  } catch (const std::exception& e) {
    console << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!in.parsed.ok()) {
    print_issues(in.parsed.issues, console);
    return kExitFindings;
  }
  const auto timelines = build_timelines(in.parsed.records, in.config, in.roster);
  const auto profiles = classify(timelines, in.config);

  std::vector<FactorVector> vectors;
  for (const auto& [user, timeline] : timelines) {
    const auto& profile = profiles.at(user);
    if (options.population == "attendees" && !profile.s4) continue;
    if (options.population == "infected" && !profile.s2) continue;
    vectors.push_back(compute_factors(timeline, profile, in.config));
  }

  std::vector<std::string> regressors = options.regressors;
  if (regressors.empty())
    regressors = {"ef33", "ef32", "ef31", "if22", "if21", "af14", "af13", "af12", "af11"};

  RegressionTable table;
  try {
    table = regress(vectors, regressors, options.response, options.policy);
  } catch (const EmptyMatrix& e) {
    console << "error: " << e.what() << '\n';
    return kExitFindings;
  } catch (const RankDeficient& e) {
    console << "error: " << e.what() << '\n';
    return kExitFindings;
  }
  const bool as_json = options.out_path.ends_with(".json");
  const std::string rendered =
      as_json ? regression_json(table).dump(2) + "\n" : regression_csv(table, options.decimals);
  if (options.out_path.empty()) {
    console << rendered;
  } else {
    std::ofstream out(options.out_path, std::ios::binary);
    out << rendered;
  }
  return kExitOk;
}

/// Writes log.jsonl, config.json, roster.txt, truth.csv and manifest.json.
inline int run_simulate_cmd(const SimParams& params, const std::string& out_dir,
                            std::ostream& console) {
  const auto started = std::chrono::steady_clock::now();
  SimOutput sim;
  try {
    sim = simulate(params);
  } catch (const std::exception& e) {
    console << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  RunManifest manifest;
  manifest.command = "simulate";

  std::ostringstream log_stream;
  write_log(log_stream, sim.events);
  nlohmann::json config_json = sim.config;
  std::string roster;
  for (const auto& u : sim.users) roster += u + '\n';
  std::string truth = "user,s1,s2,s3,s4,path\n";
  for (const auto& [user, p] : sim.truth) {
    truth += user;
    truth += ',' + std::to_string(p.s1) + ',' + std::to_string(p.s2) + ',' +
             std::to_string(p.s3) + ',' + std::to_string(p.s4) + ',';
    truth += std::string(path_label(p.path)) + '\n';
  }

  detail::write_output(manifest, out_dir, "log.jsonl", log_stream.str());
  detail::write_output(manifest, out_dir, "config.json", config_json.dump(2) + "\n");
  detail::write_output(manifest, out_dir, "roster.txt", roster);
  detail::write_output(manifest, out_dir, "truth.csv", truth);

  manifest.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
  std::ofstream mf(std::filesystem::path(out_dir) / "manifest.json", std::ios::binary);
  mf << manifest.to_json().dump(2) << '\n';
  console << sim.events.size() << " events for " << sim.users.size() << " users written to "
          << out_dir << '\n';
  return kExitOk;
}

/// Writes the bundled fixture: log.jsonl, config.json, manifest of target
/// counts, and the run manifest.
inline int run_fixture_cmd(const std::string& out_dir, std::ostream& console) {
  const auto started = std::chrono::steady_clock::now();
  const Fixture fx = build_benchmark_fixture();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  RunManifest manifest;
  manifest.command = "fixture";

  std::ostringstream log_stream;
  write_log(log_stream, fx.events);
  nlohmann::json config_json = fx.config;
  detail::write_output(manifest, out_dir, "log.jsonl", log_stream.str());
  detail::write_output(manifest, out_dir, "config.json", config_json.dump(2) + "\n");
  detail::write_output(manifest, out_dir, "fixture_manifest.json",
                       fixture_manifest_json(fx).dump(2) + "\n");

  manifest.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started)
                             .count();
  std::ofstream mf(std::filesystem::path(out_dir) / "manifest.json", std::ios::binary);
  mf << manifest.to_json().dump(2) << '\n';
  console << fx.events.size() << " fixture events written to " << out_dir << '\n';
  return kExitOk;
}

}  // namespace funnelcast

#endif  // FUNNELCAST_REPORTING_HPP
