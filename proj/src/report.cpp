#include "uavsched/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "uavsched/reward.hpp"

namespace uavsched {

Quantiles quantiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quantiles of an empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

const StepRecord& record_at(const EpisodeLog& log, std::size_t t) {
  return log.records[std::min(t, log.records.size() - 1)];
}

}  // namespace

SummaryStats summarize(std::span<const EpisodeLog> logs) {
  if (logs.empty()) throw std::invalid_argument("summarize needs at least one episode");
  SummaryStats out;
  out.policy = logs.front().policy;
  out.scenario_digest = logs.front().scenario_digest;
  out.episodes = static_cast<int>(logs.size());

  std::size_t horizon = 0;
  for (const auto& log : logs) {
    if (log.records.empty()) throw std::invalid_argument("episode without records");
    if (log.scenario_digest != out.scenario_digest)
      throw std::invalid_argument("episodes come from different scenarios");
    horizon = std::max({horizon, log.records.size(), static_cast<std::size_t>(log.horizon)});
  }
  const std::size_t n_towers = logs.front().records.front().tower_data.size();
  const double n = static_cast<double>(logs.size());

  for (std::size_t t = 0; t < horizon; ++t) {
    double energy = 0.0, raw = 0.0, norm = 0.0;
    std::vector<double> towers(n_towers, 0.0);
    Quantiles q;
    for (const auto& log : logs) {
      const auto& r = record_at(log, t);
      energy += mean_of(r.uav_energy);
      raw += r.reward.combined_raw(log.epsilon);
      norm += r.reward.combined_normalized(log.epsilon);
      for (std::size_t i = 0; i < n_towers; ++i) towers[i] += r.tower_data[i];
      const Quantiles e = quantiles(r.tower_data);
      q.min += e.min;
      q.q1 += e.q1;
      q.median += e.median;
      q.q3 += e.q3;
      q.max += e.max;
    }
    for (double& d : towers) d /= n;
    out.mean_energy.push_back(energy / n);
    out.reward_raw.push_back(raw / n);
    out.reward_normalized.push_back(norm / n);
    out.tower_data.push_back(std::move(towers));
    out.tower_quantiles.push_back({q.min / n, q.q1 / n, q.median / n, q.q3 / n, q.max / n});
  }
  double value = 0.0;
  for (const auto& log : logs) value += log.system_value;
  out.system_value = value / n;
  return out;
}

Json to_json(const SummaryStats& s) {
  Json q = Json::array();
  for (const auto& e : s.tower_quantiles) q.push_back({e.min, e.q1, e.median, e.q3, e.max});
  return rounded(Json{{"policy", s.policy},
                      {"scenario_digest", s.scenario_digest},
                      {"episodes", s.episodes},
                      {"mean_energy", s.mean_energy},
                      {"tower_data", s.tower_data},
                      {"tower_quantiles", q},
                      {"reward_raw", s.reward_raw},
                      {"reward_normalized", s.reward_normalized},
                      {"system_value", s.system_value}});
}

SummaryStats summary_from_json(const Json& j) {
  SummaryStats s;
  j.at("policy").get_to(s.policy);
  j.at("scenario_digest").get_to(s.scenario_digest);
  j.at("episodes").get_to(s.episodes);
  j.at("mean_energy").get_to(s.mean_energy);
  j.at("tower_data").get_to(s.tower_data);
  for (const auto& e : j.at("tower_quantiles")) {
    if (e.size() != 5) throw std::invalid_argument("tower_quantiles rows need 5 entries");
    s.tower_quantiles.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>(),
                                 e[3].get<double>(), e[4].get<double>()});
  }
  j.at("reward_raw").get_to(s.reward_raw);
  j.at("reward_normalized").get_to(s.reward_normalized);
  j.at("system_value").get_to(s.system_value);
  return s;
}

std::string to_csv(const SummaryStats& s) {
  std::ostringstream out;
  const std::size_t n = s.tower_data.empty() ? 0 : s.tower_data.front().size();
  out << "t,mean_energy,reward_raw,reward_normalized,q_min,q1,median,q3,q_max";
  for (std::size_t i = 0; i < n; ++i) out << ",tower_" << i;
  out << "\n";
  for (std::size_t t = 0; t < s.mean_energy.size(); ++t) {
    const auto& q = s.tower_quantiles[t];
    out << t << ',' << format6(s.mean_energy[t]) << ',' << format6(s.reward_raw[t]) << ','
        << format6(s.reward_normalized[t]) << ',' << format6(q.min) << ',' << format6(q.q1) << ','
        << format6(q.median) << ',' << format6(q.q3) << ',' << format6(q.max);
    for (double d : s.tower_data[t]) out << ',' << format6(d);
    out << "\n";
  }
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << contents;
}

void export_summary(const SummaryStats& stats, const std::filesystem::path& path) {
  if (path.extension() == ".csv")
    write_file(path, to_csv(stats));
  else
    write_file(path, to_json(stats).dump(2) + "\n");
}

void export_log(const EpisodeLog& log, const std::filesystem::path& path) {
  if (path.extension() == ".csv")
    write_file(path, to_csv(log));
  else
    write_file(path, to_ndjson(log));
}

bool Comparison::orderings_pass() const {
  return !orderings.empty() &&
         std::all_of(orderings.begin(), orderings.end(), [](const auto& o) { return o.pass(); });
}

double final_mean_energy(const EpisodeLog& log) {
  return log.records.empty() ? 0.0 : mean_of(log.records.back().uav_energy);
}

double final_tower_stddev(const EpisodeLog& log) {
  return log.records.empty() ? 0.0 : population_stddev(log.records.back().tower_data);
}

double final_total_data(const EpisodeLog& log) {
  if (log.records.empty()) return 0.0;
  const auto& d = log.records.back().tower_data;
  return std::accumulate(d.begin(), d.end(), 0.0);
}

double mean_energy_over_time(const EpisodeLog& log, int horizon) {
  if (log.records.empty() || horizon <= 0) return 0.0;
  double sum = 0.0;
  for (int t = 0; t < horizon; ++t) sum += mean_of(record_at(log, static_cast<std::size_t>(t)).uav_energy);
  return sum / horizon;
}

namespace {

const PolicyRun* find_run(const std::vector<PolicyRun>& runs, PolicyKind kind) {
  for (const auto& r : runs)
    if (r.policy.kind == kind) return &r;
  return nullptr;
}

bool at_least(double a, double b) { return a >= b - 1e-9 * std::max(1.0, std::abs(b)); }

OrderingCheck check(const std::string& name, const PolicyRun& hi, const PolicyRun& lo,
                    double (*metric)(const EpisodeLog&), bool higher_is_first) {
  OrderingCheck c;
  c.name = name;
  const std::size_t n = std::min(hi.logs.size(), lo.logs.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double a = metric(hi.logs[k]);
    const double b = metric(lo.logs[k]);
    c.holds += (higher_is_first ? at_least(a, b) : at_least(b, a)) ? 1 : 0;
    ++c.total;
  }
  return c;
}

}  // namespace

std::vector<OrderingCheck> acceptance_orderings(const std::vector<PolicyRun>& runs) {
  const auto* p = find_run(runs, PolicyKind::kProposed);
  const auto* c1 = find_run(runs, PolicyKind::kComp1);
  const auto* c2 = find_run(runs, PolicyKind::kComp2);
  const auto* c3 = find_run(runs, PolicyKind::kComp3);
  if (!p || !c1 || !c2 || !c3) return {};
  return {
      check("energy comp1 >= proposed", *c1, *p, final_mean_energy, true),
      check("energy proposed >= comp2", *p, *c2, final_mean_energy, true),
      check("energy comp1 >= comp3", *c1, *c3, final_mean_energy, true),
      check("stddev comp2 <= proposed", *c2, *p, final_tower_stddev, false),
      check("stddev proposed <= comp3", *p, *c3, final_tower_stddev, false),
      check("stddev comp2 <= comp1", *c2, *c1, final_tower_stddev, false),
      check("data proposed >= comp3", *p, *c3, final_total_data, true),
      check("data comp2 >= comp3", *c2, *c3, final_total_data, true),
  };
}

Comparison compare(const Scenario& s, const std::vector<Policy>& policies,
                   const std::vector<std::uint64_t>& seeds, const EpisodeOptions& options,
                   unsigned threads) {
  validate_scenario(s);
  if (seeds.empty()) throw std::invalid_argument("compare needs at least one seed");
  Comparison out;
  out.seeds = seeds;
  out.runs.resize(policies.size());
  for (std::size_t p = 0; p < policies.size(); ++p) {
    out.runs[p].policy = policies[p];
    out.runs[p].logs.resize(seeds.size());
  }

  const std::size_t jobs = policies.size() * seeds.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < jobs;) {
      const std::size_t p = k / seeds.size(), i = k % seeds.size();
      try {
        out.runs[p].logs[i] = run_episode(s, policies[p], seeds[i], options);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& run : out.runs) {
    run.summary = summarize(run.logs);
    spdlog::debug("{}: system value {:.6g}", run.policy.name(), run.summary.system_value);
  }
  out.orderings = acceptance_orderings(out.runs);
  return out;
}

Json to_json(const Comparison& c) {
  Json runs = Json::array();
  for (const auto& r : c.runs) {
    double e = 0.0, sd = 0.0, total = 0.0, e_avg = 0.0;
    for (const auto& log : r.logs) {
      e += final_mean_energy(log);
      sd += final_tower_stddev(log);
      total += final_total_data(log);
      e_avg += mean_energy_over_time(log, log.horizon);
    }
    const double n = static_cast<double>(r.logs.size());
    runs.push_back({{"policy", r.policy.name()},
                    {"final_mean_energy", e / n},
                    {"final_tower_stddev", sd / n},
                    {"final_total_data", total / n},
                    {"time_avg_energy", e_avg / n},
                    {"summary", to_json(r.summary)}});
  }
  Json orderings = Json::array();
  for (const auto& o : c.orderings)
    orderings.push_back({{"name", o.name},
                         {"holds", o.holds},
                         {"total", o.total},
                         {"fraction", o.fraction()},
                         {"pass", o.pass()}});
  return rounded(Json{{"seeds", c.seeds}, {"runs", runs}, {"orderings", orderings}});
}

std::string comparison_table(const Comparison& c) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %14s %14s %14s %14s %12s\n", "policy", "final_energy",
                "avg_energy", "final_stddev", "total_data", "value");
  out << line;
  for (const auto& r : c.runs) {
    double e = 0.0, avg = 0.0, sd = 0.0, total = 0.0;
    for (const auto& log : r.logs) {
      e += final_mean_energy(log);
      avg += mean_energy_over_time(log, log.horizon);
      sd += final_tower_stddev(log);
      total += final_total_data(log);
    }
    const double n = static_cast<double>(r.logs.size());
    std::snprintf(line, sizeof line, "%-16s %14.6g %14.6g %14.6g %14.6g %12.6g\n",
                  r.policy.name().c_str(), e / n, avg / n, sd / n, total / n,
                  r.summary.system_value);
    out << line;
  }
  for (const auto& o : c.orderings) {
    std::snprintf(line, sizeof line, "%-28s %d/%d %s\n", o.name.c_str(), o.holds, o.total,
                  o.pass() ? "ok" : "FAIL");
    out << line;
  }
  return out.str();
}

}  // namespace uavsched
