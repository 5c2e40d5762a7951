#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "robust_bandits/config.hpp"
#include "robust_bandits/experiment.hpp"
#include "robust_bandits/harness.hpp"

namespace robust_bandits {

namespace fs = std::filesystem;

struct OutputOptions {
  std::vector<std::size_t> checkpoints;
  bool full_trace = false;
  bool diagnostics = false;
  std::size_t worst = 0;  // 0: max(1, trials / 5)
};

inline OutputOptions output_options(const Config& cfg) {
  OutputOptions o;
  for (const auto& item : cfg.get_list("run.checkpoints")) o.checkpoints.push_back(static_cast<std::size_t>(*parse_integer(item)));
  o.full_trace = cfg.get_bool("run.full_trace");
  o.diagnostics = cfg.get_bool("run.diagnostics");
  o.worst = static_cast<std::size_t>(cfg.get_integer("run.worst"));
  return o;
}

inline std::size_t worst_count(const OutputOptions& o, std::size_t trials) {
  return o.worst ? std::min(o.worst, trials) : std::max<std::size_t>(1, trials / 5);
}

/// Rounds written to trace and curve files (1-based).
inline std::vector<std::size_t> output_rounds(std::size_t horizon, const OutputOptions& o) {
  if (!o.full_trace) return checkpoint_grid(horizon, o.checkpoints);
  std::vector<std::size_t> all(horizon);
  for (std::size_t t = 0; t < horizon; ++t) all[t] = t + 1;
  return all;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), "write failed: " + path.string());
}

/// Config lines embedded at the top of every CSV.
inline std::string config_header(const Config& pinned, std::uint64_t seed) {
  return pinned.serialize("# cfg ") + "# seed = " + std::to_string(seed) + "\n";
}

inline std::string join_vector(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_real(v(i));
  return s;
}

inline std::string trace_csv(const RegretTrace& trace, const std::vector<std::size_t>& rounds, const Config& pinned,
                             bool diagnostics) {
  std::ostringstream out;
  out << config_header(pinned, trace.seed);
  out << "round,arm,inst_regret,cum_regret,corruption,spent,cum_regret_corrupted,observed";
  if (diagnostics) out << ",epoch,active_arms,c_hat,theta_hat";
  out << '\n';
  auto diag = trace.diagnostics.begin();
  for (std::size_t t : rounds) {
    const std::size_t i = t - 1;
    out << t << ',' << trace.arm[i] << ',' << format_real(trace.inst_regret[i]) << ','
        << format_real(trace.cum_regret[i]) << ',' << format_real(trace.corruption[i]) << ','
        << format_real(trace.spent[i]) << ',' << format_real(trace.cum_regret_corrupted[i]) << ','
        << format_real(trace.observed[i]);
    if (diagnostics) {
      while (diag != trace.diagnostics.end() && diag->first < t) ++diag;
      if (diag != trace.diagnostics.end() && diag->first == t) {
        const LearnerSnapshot& s = diag->second;
        out << ',' << (s.epoch ? std::to_string(*s.epoch) : "") << ','
            << (s.active_arms ? std::to_string(*s.active_arms) : "") << ','
            << (s.corruption_threshold ? format_real(*s.corruption_threshold) : "") << ','
            << join_vector(s.theta_hat);
      } else {
        out << ",,,,";
      }
    }
    out << '\n';
  }
  return out.str();
}

inline std::string curves_csv(const TrialSummary& s, const std::vector<std::size_t>& rounds, const Config& pinned) {
  std::ostringstream out;
  out << config_header(pinned, s.seeds.front());
  out << "round,mean_cum_regret,std_cum_regret,mean_cum_regret_corrupted\n";
  for (std::size_t t : rounds) {
    out << t << ',' << format_real(s.mean_curve[t - 1]) << ',' << format_real(s.std_curve[t - 1]) << ','
        << format_real(s.mean_corrupted_curve[t - 1]) << '\n';
  }
  return out.str();
}

/// JSON number carrying the same 12 significant digits as the CSVs.
inline nlohmann::json json_real(double x) { return std::stod(format_real(x)); }

inline nlohmann::json summary_json(const TrialSummary& s, const Config& pinned, const Combination& combo,
                                   const OutputOptions& o) {
  nlohmann::json j;
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [key, value] : pinned.values()) config[key] = value;
  j["config"] = config;
  j["learner"] = combo.learner;
  j["adversary"] = combo.adversary;
  j["eta"] = json_real(combo.eta);
  j["budget"] = json_real(combo.budget);
  j["horizon"] = s.horizon;
  j["seeds"] = s.seeds;
  j["trials"] = s.trials();
  nlohmann::json finals = nlohmann::json::array();
  for (double r : s.final_regret) finals.push_back(json_real(r));
  j["final_regret"] = finals;
  j["mean_final_regret"] = json_real(s.mean_final());
  j["std_final_regret"] = json_real(s.std_final());
  nlohmann::json worst = nlohmann::json::array();
  for (std::size_t i : s.worst(worst_count(o, s.trials()))) {
    worst.push_back({{"seed", s.seeds[i]}, {"final_regret", json_real(s.final_regret[i])}});
  }
  j["worst"] = worst;
  double max_spent = 0.0;
  for (double v : s.final_spent) max_spent = std::max(max_spent, v);
  j["budget_audit"] = {{"budget", json_real(combo.budget)}, {"max_spent", json_real(max_spent)},
                       {"within_budget", max_spent <= combo.budget}};
  nlohmann::json checkpoints = nlohmann::json::object();
  for (std::size_t t : checkpoint_grid(s.horizon, o.checkpoints)) {
    checkpoints[std::to_string(t)] = json_real(s.mean_curve[t - 1]);
  }
  j["mean_regret_at"] = checkpoints;
  return j;
}

/// trace_seed<N>.csv per trial, curves.csv, summary.json and resolved.cfg.
inline void write_combination(const fs::path& dir, const TrialSummary& s, const Config& pinned,
                              const Combination& combo, const OutputOptions& o) {
  fs::create_directories(dir);
  const auto rounds = output_rounds(s.horizon, o);
  for (const auto& trace : s.traces) {
    write_text(dir / ("trace_seed" + std::to_string(trace.seed) + ".csv"), trace_csv(trace, rounds, pinned, o.diagnostics));
  }
  write_text(dir / "curves.csv", curves_csv(s, rounds, pinned));
  write_text(dir / "summary.json", summary_json(s, pinned, combo, o).dump(2) + "\n");
  write_text(dir / "resolved.cfg", pinned.serialize());
}

/// One row per combination, regret at each checkpoint.
inline std::string index_csv(const std::vector<std::pair<Combination, TrialSummary>>& results, const Config& cfg,
                             const OutputOptions& o) {
  std::ostringstream out;
  out << cfg.serialize("# cfg ");
  std::vector<std::size_t> cps = o.checkpoints;
  out << "dir,learner,adversary,eta,budget,trials,mean_final_regret,std_final_regret,worst_final_regret";
  for (std::size_t c : cps) out << ",mean_regret_t" << c;
  out << '\n';
  for (const auto& [combo, s] : results) {
    out << combo.label() << ',' << combo.learner << ',' << combo.adversary << ',' << format_real(combo.eta) << ','
        << format_real(combo.budget) << ',' << s.trials() << ',' << format_real(s.mean_final()) << ','
        << format_real(s.std_final()) << ',' << format_real(s.final_regret[s.ranking.front()]);
    for (std::size_t c : cps) {
      out << ',' << (c >= 1 && c <= s.horizon ? format_real(s.mean_curve[c - 1]) : "");
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace robust_bandits
