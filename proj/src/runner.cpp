// Copyright 2026 The trispin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trispin/runner.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "trispin/errors.hpp"
#include "trispin/spectral.hpp"
#include "trispin/trajectories.hpp"

namespace trispin {

std::string_view to_string(Subcommand c) {
  switch (c) {
    case Subcommand::kSpectrum: return "spectrum";
    case Subcommand::kTrajectories: return "trajectories";
    case Subcommand::kDark: return "dark";
    case Subcommand::kFt: return "ft";
    case Subcommand::kCompare: return "compare";
  }
  return "unknown";
}

Subcommand parse_subcommand(std::string_view text) {
  for (auto c : {Subcommand::kSpectrum, Subcommand::kTrajectories, Subcommand::kDark,
                 Subcommand::kFt, Subcommand::kCompare}) {
    if (to_string(c) == text) return c;
  }
  throw ValidationError("unknown subcommand '" + std::string(text) + "'");
}

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

// One output table: provenance block, '#'-prefixed scalars, CSV body.
class Table {
 public:
  Table(const RunConfig& cfg, Subcommand cmd) {
    head_ += fmt::format("# trispin {}\n", TRISPIN_VERSION);
    head_ += fmt::format("# subcommand: {}\n", to_string(cmd));
    head_ += fmt::format("# config_hash: {:016x}\n", cfg.hash());
    head_ += fmt::format("# master_seed: {}\n", cfg.ensemble.master_seed);
    head_ += fmt::format("# convention: {}\n", to_string(cfg.model.convention));
    head_ += fmt::format("# profile: {}\n", to_string(cfg.profile));
  }

  void scalar(std::string_view key, std::string_view value) {
    head_ += fmt::format("# {}: {}\n", key, value);
  }
  void scalar(std::string_view key, double value) { scalar(key, num(value)); }
  void scalar(std::string_view key, long value) { scalar(key, std::to_string(value)); }
  void scalar(std::string_view key, bool value) {
    scalar(key, std::string_view(value ? "true" : "false"));
  }

  void columns(std::string_view header) { body_ += fmt::format("{}\n", header); }
  void row(const std::string& line) { body_ += line + "\n"; }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << head_ << body_;
  }

 private:
  std::string head_;
  std::string body_;
};

StopCriterion ensemble_stop(const RunConfig& cfg, const ModelParams& p) {
  if (cfg.ensemble.t_max) return MaxTime{*cfg.ensemble.t_max};
  if (cfg.ensemble.fixed_horizon) return MaxTime{horizon_for_jumps(p, cfg.jumps())};
  return MaxJumps{cfg.jumps()};
}

EnsembleSpec ensemble_spec(const RunConfig& cfg, const ModelParams& p) {
  EnsembleSpec spec;
  spec.n_trajectories = cfg.trajectories();
  spec.stop = ensemble_stop(cfg, p);
  spec.master_seed = cfg.ensemble.master_seed;
  spec.burn_in_fraction = cfg.ensemble.burn_in_fraction;
  spec.threads = cfg.threads;
  return spec;
}

std::string stop_text(const StopCriterion& stop) {
  if (const auto* t = std::get_if<MaxTime>(&stop)) return "t_max=" + num(t->t_max);
  return "n_jumps=" + std::to_string(std::get<MaxJumps>(stop).n_jumps);
}

void run_spectrum(const RunConfig& cfg) {
  const auto& p = cfg.model;
  const auto grid = linear_grid(cfg.scan.s_min, cfg.scan.s_max, cfg.scan.n_points);
  ScanOptions opts;
  opts.threads = cfg.threads;
  const auto scan = theta_scan(p, grid, opts);

  Table spectrum(cfg, Subcommand::kSpectrum);
  spectrum.scalar("nbar", p.nbar);
  spectrum.scalar("gamma_single", p.gamma_single);
  spectrum.scalar("n_kinks", static_cast<long>(scan.kinks.size()));
  if (p.nbar > 0.0) {
    spectrum.scalar("gc_symmetry_point", gc_symmetry_point(p.nbar));
    spectrum.scalar("gc_residual", gc_residual(p, grid, cfg.threads));
  }
  spectrum.columns("s,theta,activity");
  for (std::size_t i = 0; i < scan.s_values.size(); ++i) {
    spectrum.row(fmt::format("{},{},{}", num(scan.s_values[i]), num(scan.theta[i]),
                             num(scan.activity[i])));
  }
  spectrum.write(cfg.output_dir / "spectrum.csv");

  Table kinks(cfg, Subcommand::kSpectrum);
  kinks.scalar("n_kinks", static_cast<long>(scan.kinks.size()));
  kinks.columns("s_star,delta_k,k_left,k_right");
  for (const auto& k : scan.kinks) {
    kinks.row(fmt::format("{},{},{},{}", num(k.s_star), num(k.delta_k), num(k.k_left),
                          num(k.k_right)));
  }
  kinks.write(cfg.output_dir / "kinks.csv");
}

void run_trajectories(const RunConfig& cfg) {
  const auto& p = cfg.model;
  const auto spec = ensemble_spec(cfg, p);
  const auto channels = build_channels(p);
  const std::size_t n = spec.n_trajectories;
  const std::size_t n_logs = std::min(cfg.ensemble.sample_logs, n);
  constexpr std::size_t kMaxLoggedEvents = 500;

  const double blink_threshold = default_blink_threshold(p);
  const double blink_window = blink_threshold > 0.0 ? 10.0 / blink_threshold : 1.0;

  struct Row {
    double activity = 0.0;
    double total_time = 0.0;
    bool trapped = false;
    long k_plus = 0, k_minus = 0, single = 0;
  };
  std::vector<Row> rows(n);
  std::vector<std::vector<JumpEvent>> logs(n_logs);
  std::vector<std::vector<Segment>> segments(n_logs);

  for_each_trajectory(p, spec, [&](std::size_t i, const JumpRecord& rec) {
    Row r;
    const double burn_in = spec.burn_in_fraction * rec.total_time;
    r.activity = net_activity(rec, burn_in);
    r.total_time = rec.total_time;
    r.trapped = rec.dark_trapped;
    for (const auto& e : rec.events) {
      if (e.time <= burn_in) continue;
      if (e.weight > 0) ++r.k_plus;
      else if (e.weight < 0) ++r.k_minus;
      else ++r.single;
    }
    rows[i] = r;
    if (i < n_logs) {
      const auto count = std::min(rec.events.size(), kMaxLoggedEvents);
      logs[i].assign(rec.events.begin(), rec.events.begin() + count);
      if (blink_window <= rec.total_time) {
        segments[i] = blinking_segments(rec, blink_window, blink_threshold);
      }
    }
  });

  std::vector<double> acts(n);
  for (std::size_t i = 0; i < n; ++i) acts[i] = rows[i].activity;
  const auto stats = ensemble_stats(acts, cfg.ensemble.bins);

  Table act(cfg, Subcommand::kTrajectories);
  act.scalar("nbar", p.nbar);
  act.scalar("gamma_single", p.gamma_single);
  act.scalar("stop", stop_text(spec.stop));
  act.scalar("burn_in_fraction", spec.burn_in_fraction);
  act.scalar("n_trajectories", static_cast<long>(n));
  act.scalar("mean", stats.mean);
  act.scalar("std", stats.std);
  act.scalar("std_error", stats.std_error);
  act.scalar("zero_fraction", stats.zero_fraction);
  act.columns("trajectory,net_activity,total_time,dark_trapped,k_plus,k_minus,single_spin");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[i];
    act.row(fmt::format("{},{},{},{},{},{},{}", i, num(r.activity), num(r.total_time),
                        r.trapped ? 1 : 0, r.k_plus, r.k_minus, r.single));
  }
  act.write(cfg.output_dir / "activities.csv");

  Table hist(cfg, Subcommand::kTrajectories);
  hist.scalar("mean", stats.mean);
  hist.scalar("std", stats.std);
  hist.scalar("std_error", stats.std_error);
  hist.scalar("zero_fraction", stats.zero_fraction);
  hist.scalar("bimodality", stats.bimodality);
  hist.scalar("bimodal", stats.bimodal);
  hist.columns("bin_lo,bin_hi,count");
  for (std::size_t b = 0; b < stats.histogram.counts.size(); ++b) {
    hist.row(fmt::format("{},{},{}", num(stats.histogram.edges[b]),
                         num(stats.histogram.edges[b + 1]), stats.histogram.counts[b]));
  }
  hist.write(cfg.output_dir / "histogram.csv");

  Table ev(cfg, Subcommand::kTrajectories);
  ev.scalar("max_events_per_trajectory", static_cast<long>(kMaxLoggedEvents));
  ev.columns("trajectory,time,channel,channel_name,weight");
  for (std::size_t i = 0; i < n_logs; ++i) {
    for (const auto& e : logs[i]) {
      ev.row(fmt::format("{},{},{},{},{}", i, num(e.time), e.channel,
                         channels[e.channel].name, e.weight));
    }
  }
  ev.write(cfg.output_dir / "events_sample.csv");

  Table blink(cfg, Subcommand::kTrajectories);
  blink.scalar("window", blink_window);
  blink.scalar("rate_threshold", blink_threshold);
  blink.columns("trajectory,t_start,t_end,label");
  for (std::size_t i = 0; i < n_logs; ++i) {
    for (const auto& s : segments[i]) {
      blink.row(fmt::format("{},{},{},{}", i, num(s.t_start), num(s.t_end),
                            s.active ? "active" : "inactive"));
    }
  }
  blink.write(cfg.output_dir / "blinking.csv");
}

void run_dark(const RunConfig& cfg) {
  const auto dark = dark_subspace(cfg.model);
  bool energies_nonzero = true;
  for (double e : dark.energies) energies_nonzero = energies_nonzero && std::abs(e) > 1e-10;

  Table t(cfg, Subcommand::kDark);
  t.scalar("dimension", static_cast<long>(dark.dimension));
  t.scalar("inactive_fraction", double(dark.dimension) / 8.0);
  t.scalar("jump_residual", dark.jump_residual);
  t.scalar("invariance_residual", dark.invariance_residual);
  t.scalar("energies_nonzero", energies_nonzero);
  t.scalar("lowering1_min_singular", dark.lowering1_min_singular);
  t.scalar("no_dark_vector_annihilated_by_lowering1", dark.lowering1_min_singular > 1e-10);
  t.scalar("single_site_kernel_dimension", static_cast<long>(dark.single_site_kernel_dimension));
  std::string header = "vector,energy";
  for (int i = 0; i < 8; ++i) header += fmt::format(",c{}_re,c{}_im", i, i);
  t.columns(header);
  for (int v = 0; v < dark.dimension; ++v) {
    std::string line = fmt::format("{},{}", v, num(dark.energies[v]));
    for (int i = 0; i < 8; ++i) {
      line += fmt::format(",{},{}", num(dark.basis(i, v).real()), num(dark.basis(i, v).imag()));
    }
    t.row(line);
  }
  t.write(cfg.output_dir / "dark.csv");
}

void run_ft(const RunConfig& cfg) {
  const auto& p = cfg.model;
  const auto spec = ensemble_spec(cfg, p);
  const double window = cfg.ensemble.ft_window;
  std::vector<std::vector<long>> per(spec.n_trajectories);
  for_each_trajectory(p, spec, [&](std::size_t i, const JumpRecord& rec) {
    per[i] = window_net_counts(rec, window, spec.burn_in_fraction * rec.total_time);
  });
  std::vector<long> counts;
  for (const auto& v : per) counts.insert(counts.end(), v.begin(), v.end());
  const auto ft = empirical_ft(counts, cfg.ensemble.ft_k_max, p.nbar);

  Table t(cfg, Subcommand::kFt);
  t.scalar("nbar", p.nbar);
  t.scalar("window", window);
  t.scalar("stop", stop_text(spec.stop));
  t.scalar("n_windows", ft.n_windows);
  t.scalar("negative_windows", ft.negative_windows);
  t.scalar("s0", ft.s0);
  t.scalar("slope", ft.slope);
  t.scalar("slope_std_error", ft.slope_std_error);
  if (std::isfinite(ft.s0) && std::isfinite(ft.slope)) {
    const double rel = std::abs(ft.slope - ft.s0) / ft.s0;
    t.scalar("slope_relative_error", rel);
    t.scalar("slope_within_tolerance", rel < 0.2 * cfg.tolerance_scale());
  }
  t.columns("K,n_K,n_minus_K,log_ratio,predicted,omitted");
  for (const auto& r : ft.rows) {
    t.row(fmt::format("{},{},{},{},{},{}", r.k, r.n_positive, r.n_negative,
                      num(r.log_ratio), num(r.predicted), r.omitted ? 1 : 0));
  }
  t.write(cfg.output_dir / "ft.csv");
}

void run_compare(const RunConfig& cfg) {
  Table t(cfg, Subcommand::kCompare);
  t.scalar("gamma_single", cfg.model.gamma_single);
  t.scalar("agreement_sigmas", 3.0 * cfg.tolerance_scale());
  t.columns("nbar,k_spectral,mean,std,std_error,active_mean,active_std_error,z,agree");
  const bool closed = cfg.model.gamma_single == 0.0;
  for (double nbar : cfg.scan.nbar_sweep) {
    ModelParams p = cfg.model;
    p.nbar = nbar;
    // Without single-spin damping theta has a kink at s=0; the active phase
    // is the s -> 0^- branch.
    const double k_spec = closed ? activity_hf(p, -1e-6) : activity_hf(p, 0.0);
    const auto summaries = run_ensemble(p, ensemble_spec(cfg, p));
    std::vector<double> all;
    std::vector<double> active;
    for (const auto& s : summaries) {
      all.push_back(s.net_activity);
      if (!s.dark_trapped) active.push_back(s.net_activity);
    }
    const auto st = ensemble_stats(all);
    const auto act = active.empty() ? st : ensemble_stats(active);
    const double ref_mean = closed ? act.mean : st.mean;
    const double ref_se = closed ? act.std_error : st.std_error;
    const double z = ref_se > 0.0 ? (ref_mean - k_spec) / ref_se : 0.0;
    const bool agree = std::abs(z) < 3.0 * cfg.tolerance_scale();
    t.row(fmt::format("{},{},{},{},{},{},{},{},{}", num(nbar), num(k_spec), num(st.mean),
                      num(st.std), num(st.std_error), num(act.mean), num(act.std_error),
                      num(z), agree ? 1 : 0));
  }
  t.write(cfg.output_dir / "compare.csv");
}

void report(std::ostream& err, const RunConfig& cfg, Subcommand cmd, std::string_view kind,
            int code, const std::string& message) {
  nlohmann::json rec = {{"status", "error"},   {"subcommand", to_string(cmd)},
                        {"kind", kind},        {"exit_code", code},
                        {"message", message}};
  err << rec.dump() << "\n";
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (!ec) {
    std::ofstream out(cfg.output_dir / "error.json", std::ios::trunc);
    if (out) out << rec.dump(2) << "\n";
  }
}

}  // namespace

int run(Subcommand cmd, const RunConfig& cfg, std::ostream& err) {
  try {
    validate(cfg.model);
    std::filesystem::create_directories(cfg.output_dir);
    std::filesystem::remove(cfg.output_dir / "error.json");
    switch (cmd) {
      case Subcommand::kSpectrum: run_spectrum(cfg); break;
      case Subcommand::kTrajectories: run_trajectories(cfg); break;
      case Subcommand::kDark: run_dark(cfg); break;
      case Subcommand::kFt: run_ft(cfg); break;
      case Subcommand::kCompare: run_compare(cfg); break;
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    report(err, cfg, cmd, "validation", kExitValidation, e.what());
    return kExitValidation;
  } catch (const NumericalError& e) {
    report(err, cfg, cmd, "numerical", kExitNumerical, e.what());
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    report(err, cfg, cmd, "validation", kExitValidation, e.what());
    return kExitValidation;
  }
}

}  // namespace trispin
