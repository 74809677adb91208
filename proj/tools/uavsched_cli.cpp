#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "uavsched/domain.hpp"
#include "uavsched/mdp.hpp"
#include "uavsched/report.hpp"
#include "uavsched/scheduler.hpp"
#include "uavsched/sim.hpp"

namespace fs = std::filesystem;
using namespace uavsched;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitOrdering = 2;

Scenario load(const std::string& path) {
  return path.empty() ? default_scenario() : load_scenario_file(path);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

/// "a..b" (inclusive) or a comma list.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const auto a = std::stoull(text.substr(0, dots));
    const auto b = std::stoull(text.substr(dots + 2));
    if (b < a) throw ValidationError("seeds", "empty range " + text);
    for (auto s = a; s <= b; ++s) seeds.push_back(s);
  } else {
    for (const auto& item : split(text, ',')) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw ValidationError("seeds", "no seeds in '" + text + "'");
  return seeds;
}

std::string file_tag(const Policy& p) {
  std::string name = p.name();
  for (char& c : name)
    if (c == '(' || c == ')') c = '_';
  while (!name.empty() && name.back() == '_') name.pop_back();
  return name;
}

struct SearchOptions {
  std::string search = "exhaustive";
  int budget = 1000;
  void apply(Policy& p) const {
    p.search = parse_search(search);
    p.search_budget = budget;
  }
};

int cmd_run(const std::string& scenario_path, const std::string& policy_name, double epsilon,
            std::uint64_t seed, const std::string& out, const SearchOptions& so, bool invariants) {
  Scenario s = load(scenario_path);
  s.epsilon = epsilon;
  Policy p = parse_policy(policy_name, epsilon);
  so.apply(p);
  const auto log = run_episode(s, p, seed, {invariants});
  const std::vector<EpisodeLog> one{log};
  const auto stats = summarize(one);
  const fs::path dir(out);
  export_log(log, dir / "episode.ndjson");
  export_log(log, dir / "episode.csv");
  export_summary(stats, dir / "summary.json");
  export_summary(stats, dir / "summary.csv");
  std::cout << p.name() << " seed " << seed << ": " << log.records.size() << " steps"
            << (log.truncated ? " (all UAVs down)" : "") << ", final mean energy "
            << format6(final_mean_energy(log)) << " J, total data " << format6(final_total_data(log))
            << ", system value " << format6(log.system_value) << "\n";
  return 0;
}

int cmd_compare(const std::string& scenario_path, const std::string& policies_text, double epsilon,
                const std::string& seeds_text, const std::string& out, const SearchOptions& so,
                bool assert_orderings, unsigned threads, bool invariants) {
  Scenario s = load(scenario_path);
  s.epsilon = epsilon;
  std::vector<Policy> policies;
  for (const auto& name : split(policies_text, ',')) {
    policies.push_back(parse_policy(name, epsilon));
    so.apply(policies.back());
  }
  if (policies.empty()) throw ValidationError("policies", "no policy given");
  const auto c = compare(s, policies, parse_seeds(seeds_text), {invariants}, threads);
  const fs::path dir(out);
  write_file(dir / "comparison.json", to_json(c).dump(2) + "\n");
  const std::string table = comparison_table(c);
  write_file(dir / "comparison.txt", table);
  for (const auto& run : c.runs) {
    export_summary(run.summary, dir / ("summary_" + file_tag(run.policy) + ".json"));
    export_summary(run.summary, dir / ("summary_" + file_tag(run.policy) + ".csv"));
  }
  std::cout << table;
  if (assert_orderings && !c.orderings_pass()) {
    std::cerr << "acceptance orderings failed\n";
    return kExitOrdering;
  }
  return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& values_text,
              const std::string& seeds_text, const std::string& out, const SearchOptions& so,
              unsigned threads) {
  Scenario s = load(scenario_path);
  const auto seeds = parse_seeds(seeds_text);
  std::ostringstream csv;
  csv << "epsilon,final_mean_energy,time_avg_energy,final_tower_stddev,total_data,system_value\n";
  for (const auto& text : split(values_text, ',')) {
    const double eps = std::stod(text);
    s.epsilon = eps;
    Policy p = Policy::proposed(eps);
    so.apply(p);
    const auto c = compare(s, {p}, seeds, {}, threads);
    double e = 0.0, avg = 0.0, sd = 0.0, total = 0.0;
    for (const auto& log : c.runs.front().logs) {
      e += final_mean_energy(log);
      avg += mean_energy_over_time(log, log.horizon);
      sd += final_tower_stddev(log);
      total += final_total_data(log);
    }
    const double n = static_cast<double>(seeds.size());
    csv << format6(eps) << ',' << format6(e / n) << ',' << format6(avg / n) << ','
        << format6(sd / n) << ',' << format6(total / n) << ','
        << format6(c.runs.front().summary.system_value) << "\n";
  }
  write_file(fs::path(out) / "sweep.csv", csv.str());
  std::cout << csv.str();
  return 0;
}

int cmd_mdp_check(const std::string& path, const std::string& out, int random_count,
                  std::uint64_t seed) {
  mdp::SmallMdpInstance instance;
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw ValidationError("scenario", "cannot open " + path);
    const Json j = Json::parse(f);
    if (j.contains("mdp")) instance = mdp::instance_from_json(j["mdp"]);
  }
  instance = mdp::normalized(instance);
  const auto sol = mdp::value_iteration(instance);
  const auto gap = mdp::greedy_gap(instance);
  const double residual = mdp::bellman_residual(instance, sol);
  Json report{{"instance", mdp::to_json(instance)},
              {"states", mdp::state_count(instance)},
              {"optimal_value", gap.optimal},
              {"greedy_value", gap.greedy},
              {"greedy_ratio", gap.ratio()},
              {"bellman_residual", residual}};
  if (random_count > 0) {
    Rng rng(seed);
    Json rows = Json::array();
    int within = 0;
    for (int k = 0; k < random_count; ++k) {
      const auto g = mdp::greedy_gap(mdp::random_instance(rng));
      within += g.ratio() >= 0.9 ? 1 : 0;
      rows.push_back({{"optimal", g.optimal}, {"greedy", g.greedy}, {"ratio", g.ratio()}});
    }
    report["random"] = {{"count", random_count},
                        {"seed", seed},
                        {"greedy_within_0.9", within},
                        {"instances", rows}};
  }
  const fs::path dir(out);
  write_file(dir / "mdp_report.json", rounded(report).dump(2) + "\n");
  write_file(dir / "mdp_solution.csv", mdp::solution_csv(instance, sol));
  std::cout << "states " << mdp::state_count(instance) << ", V* " << format6(gap.optimal)
            << ", greedy " << format6(gap.greedy) << " (ratio " << format6(gap.ratio())
            << "), residual " << format6(residual) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV / tower charging and data-offloading scheduling simulator"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  SearchOptions so;
  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--search", so.search, "exhaustive|local")->capture_default_str();
    sub->add_option("--budget", so.budget, "local-search move budget")->capture_default_str();
  };

  std::string scenario, out = "out", policy = "proposed", policies = "proposed,comp1,comp2,comp3";
  std::string seeds = "0..19", values = "0,0.25,0.5,0.75,1";
  double epsilon = 0.5;
  std::uint64_t seed = 0;
  bool assert_orderings = false, invariants = false;
  unsigned threads = 0;
  int random_count = 0;

  auto* run = app.add_subcommand("run", "Simulate one episode");
  run->add_option("--scenario", scenario, "scenario JSON (built-in default when omitted)");
  run->add_option("--policy", policy)->capture_default_str();
  run->add_option("--epsilon", epsilon)->capture_default_str();
  run->add_option("--seed", seed)->capture_default_str();
  run->add_option("--out", out)->capture_default_str();
  run->add_flag("--check-invariants", invariants);
  add_search(run);

  auto* cmp = app.add_subcommand("compare", "Run policies x seeds and check orderings");
  cmp->add_option("--scenario", scenario);
  cmp->add_option("--policies", policies)->capture_default_str();
  cmp->add_option("--epsilon", epsilon)->capture_default_str();
  cmp->add_option("--seeds", seeds, "a..b or a comma list")->capture_default_str();
  cmp->add_option("--out", out)->capture_default_str();
  cmp->add_option("--threads", threads, "0 uses every core");
  cmp->add_flag("--assert", assert_orderings, "exit 2 when an ordering fails");
  cmp->add_flag("--check-invariants", invariants);
  add_search(cmp);

  auto* sweep = app.add_subcommand("sweep-epsilon", "Proposed policy over several weights");
  sweep->add_option("--scenario", scenario);
  sweep->add_option("--values", values)->capture_default_str();
  sweep->add_option("--seeds", seeds)->capture_default_str();
  sweep->add_option("--out", out)->capture_default_str();
  sweep->add_option("--threads", threads);
  add_search(sweep);

  auto* mdp_check = app.add_subcommand("mdp-check", "Value iteration and greedy-gap report");
  mdp_check->add_option("--scenario", scenario, "JSON with an \"mdp\" object");
  mdp_check->add_option("--out", out)->capture_default_str();
  mdp_check->add_option("--random", random_count, "also report this many random instances");
  mdp_check->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(scenario, policy, epsilon, seed, out, so, invariants);
    if (*cmp)
      return cmd_compare(scenario, policies, epsilon, seeds, out, so, assert_orderings, threads,
                         invariants);
    if (*sweep) return cmd_sweep(scenario, values, seeds, out, so, threads);
    if (*mdp_check) return cmd_mdp_check(scenario, out, random_count, seed);
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Json::exception& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
