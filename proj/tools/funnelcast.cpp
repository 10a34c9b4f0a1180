// SPDX-License-Identifier: Apache-2.0
//
// funnelcast CLI: analyze multistage participation in viral campaigns from
// event logs, or generate synthetic logs to test the pipeline against.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "funnelcast/reporting.hpp"

namespace {

using namespace funnelcast;

std::optional<EngagementDefinition> parse_engagement(const std::string& value) {
  if (value.empty()) return std::nullopt;
  if (value == "keyword") return EngagementDefinition::KeywordOnly;
  if (value == "keyword-or-component") return EngagementDefinition::KeywordOrComponentActivity;
  throw CLI::ValidationError("--engagement must be keyword or keyword-or-component");
}

UndefinedPolicy parse_policy(const std::string& value) {
  if (value == "drop") return UndefinedPolicy::DropUndefined;
  return UndefinedPolicy::ZeroFill;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multistage participation analytics for viral campaigns"};
  app.set_version_flag("--version", std::string("funnelcast ") + kToolVersion);
  app.require_subcommand(1);

  std::string log_path, config_path, roster_path, out_path;
  std::string policy = "zerofill";
  std::string engagement;
  bool full_precision = false;

  auto add_common = [&](CLI::App* cmd, bool needs_log) {
    if (needs_log) {
      cmd->add_option("--log", log_path, "event log (JSON lines)")->required();
      cmd->add_option("--config", config_path, "campaign config (JSON)")->required();
      cmd->add_option("--roster", roster_path, "extra user ids, one per line");
      cmd->add_option("--engagement", engagement,
                      "engagement definition override: keyword | keyword-or-component");
    }
    cmd->add_flag("--full-precision", full_precision, "emit full double precision");
  };

  auto* validate = app.add_subcommand("validate", "check a log against the schema");
  add_common(validate, true);

  auto* report = app.add_subcommand("report", "full analysis report into a directory");
  add_common(report, true);
  report->add_option("--out", out_path, "output directory")->required();
  report->add_option("--policy", policy, "undefined-factor policy: zerofill | drop");

  auto* mwu = app.add_subcommand("mwu", "visitor/non-visitor rank-test battery");
  add_common(mwu, false);
  mwu->add_option("--log", log_path, "event log (JSON lines)");
  mwu->add_option("--config", config_path, "campaign config (JSON)");
  mwu->add_option("--roster", roster_path, "extra user ids, one per line");
  mwu->add_option("--engagement", engagement, "engagement definition override");
  mwu->add_option("--out", out_path, "output CSV (default: stdout)");
  double rank_sum_a = -1;
  std::uint64_t n_a = 0, n_b = 0;
  mwu->add_option("--rank-sum-a", rank_sum_a, "published group-a rank sum (direct mode)");
  mwu->add_option("--n-a", n_a, "group-a size (direct mode)");
  mwu->add_option("--n-b", n_b, "group-b size (direct mode)");

  auto* regress_cmd = app.add_subcommand("regress", "factor regression table");
  add_common(regress_cmd, true);
  RegressOptions regress_options;
  regress_cmd->add_option("--population", regress_options.population,
                          "population filter: all | attendees | infected");
  regress_cmd->add_option("--regressors", regress_options.regressors,
                          "factor names (default: the nine pre-event factors)");
  regress_cmd->add_option("--response", regress_options.response,
                          "response factor (default kw_event)");
  regress_cmd->add_option("--policy", policy, "undefined-factor policy: zerofill | drop");
  regress_cmd->add_option("--out", out_path, "output CSV (default: stdout)");

  auto* simulate_cmd = app.add_subcommand("simulate", "generate a synthetic campaign log");
  std::string params_path;
  std::optional<std::uint64_t> seed_override;
  simulate_cmd->add_option("--params", params_path, "simulation parameters (JSON)");
  simulate_cmd->add_option("--seed", seed_override, "random seed override");
  simulate_cmd->add_option("--out", out_path, "output directory")->required();
  add_common(simulate_cmd, false);

  auto* fixture_cmd = app.add_subcommand("fixture", "emit the bundled benchmark fixture");
  fixture_cmd->add_option("--out", out_path, "output directory")->required();
  add_common(fixture_cmd, false);

  CLI11_PARSE(app, argc, argv);
  const int decimals = full_precision ? 17 : 6;

  try {
    if (validate->parsed()) {
      return run_validate(log_path, config_path, roster_path, std::cout);
    }
    if (report->parsed()) {
      ReportOptions options;
      options.roster_path = roster_path;
      options.policy = parse_policy(policy);
      options.engagement_override = parse_engagement(engagement);
      options.decimals = decimals;
      return run_report(log_path, config_path, out_path, options, std::cout);
    }
    if (mwu->parsed()) {
      if (rank_sum_a >= 0) {
        if (n_a == 0 || n_b == 0) {
          std::cout << "error: direct mode needs --n-a and --n-b\n";
          return kExitUsage;
        }
        const auto r = mann_whitney_from_rank_sum(rank_sum_a, n_a, n_b);
        char buf[256];
        std::snprintf(buf, sizeof buf, "u1,u2,u,z,p_value\n%.1f,%.1f,%.1f,%.*f,%.*f\n", r.u1,
                      r.u2, r.u, decimals, r.z, decimals, r.p_two_sided);
        std::cout << buf;
        return kExitOk;
      }
      if (log_path.empty() || config_path.empty()) {
        std::cout << "error: mwu needs --log and --config (or --rank-sum-a)\n";
        return kExitUsage;
      }
      MwuOptions options;
      options.roster_path = roster_path;
      options.out_path = out_path;
      options.engagement_override = parse_engagement(engagement);
      options.decimals = decimals;
      return run_mwu(log_path, config_path, options, std::cout);
    }
    if (regress_cmd->parsed()) {
      regress_options.roster_path = roster_path;
      regress_options.policy = parse_policy(policy);
      regress_options.engagement_override = parse_engagement(engagement);
      regress_options.out_path = out_path;
      regress_options.decimals = decimals;
      return run_regress(log_path, config_path, regress_options, std::cout);
    }
    if (simulate_cmd->parsed()) {
      SimParams params;
      if (!params_path.empty()) {
        std::ifstream in(params_path);
        if (!in) {
          std::cout << "error: cannot read params: " << params_path << '\n';
          return kExitUsage;
        }
        params = load_sim_params(in);
      }
      if (seed_override) params.rng_seed = *seed_override;
      return run_simulate_cmd(params, out_path, std::cout);
    }
    if (fixture_cmd->parsed()) {
      return run_fixture_cmd(out_path, std::cout);
    }
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
