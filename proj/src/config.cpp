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

#include "trispin/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "trispin/errors.hpp"

namespace trispin {

std::string_view to_string(Profile p) {
  return p == Profile::kFast ? "fast" : "paper";
}

Profile parse_profile(std::string_view text) {
  if (text == "fast") return Profile::kFast;
  if (text == "paper") return Profile::kPaper;
  throw ValidationError("profile: expected 'fast' or 'paper', got '" +
                        std::string(text) + "'");
}

std::size_t RunConfig::trajectories() const {
  if (ensemble.n_trajectories) return *ensemble.n_trajectories;
  return profile == Profile::kFast ? 400 : 2000;
}

std::size_t RunConfig::jumps() const {
  if (ensemble.n_jumps) return *ensemble.n_jumps;
  return profile == Profile::kFast ? 1000 : 10000;
}

double RunConfig::tolerance_scale() const {
  return profile == Profile::kFast ? 2.0 : 1.0;
}

std::string RunConfig::canonical() const {
  std::string out;
  auto add = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{}={}\n", key, value);
  };
  add("model.alpha", fmt::format("{:.17g}", model.alpha));
  add("model.b_field", fmt::format("{:.17g}", model.b_field));
  add("model.gamma_coll", fmt::format("{:.17g}", model.gamma_coll));
  add("model.gamma_single", fmt::format("{:.17g}", model.gamma_single));
  add("model.nbar", fmt::format("{:.17g}", model.nbar));
  add("model.convention", to_string(model.convention));
  add("scan.s_min", fmt::format("{:.17g}", scan.s_min));
  add("scan.s_max", fmt::format("{:.17g}", scan.s_max));
  add("scan.n_points", scan.n_points);
  add("scan.nbar_sweep", fmt::format("{:.17g}", fmt::join(scan.nbar_sweep, ",")));
  add("ensemble.n_trajectories", trajectories());
  add("ensemble.n_jumps", jumps());
  add("ensemble.t_max", ensemble.t_max ? fmt::format("{:.17g}", *ensemble.t_max) : "none");
  add("ensemble.master_seed", ensemble.master_seed);
  add("ensemble.burn_in_fraction", fmt::format("{:.17g}", ensemble.burn_in_fraction));
  add("ensemble.fixed_horizon", ensemble.fixed_horizon);
  add("ensemble.bins", ensemble.bins);
  add("ensemble.ft_window", fmt::format("{:.17g}", ensemble.ft_window));
  add("ensemble.ft_k_max", ensemble.ft_k_max);
  add("ensemble.sample_logs", ensemble.sample_logs);
  add("output.profile", to_string(profile));
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

using boost::property_tree::ptree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model",
       {"alpha", "b_field", "gamma_coll", "gamma_single", "gamma_single_ratio",
        "nbar", "convention"}},
      {"scan", {"s_min", "s_max", "n_points", "nbar_sweep"}},
      {"ensemble",
       {"n_trajectories", "n_jumps", "t_max", "master_seed", "burn_in_fraction",
        "fixed_horizon", "bins", "ft_window", "ft_k_max", "sample_logs"}},
      {"output", {"dir", "profile"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ValidationError(key + ": cannot parse '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ValidationError(key + ": expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
  if (out.empty()) throw ValidationError(key + ": empty list");
  return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ValidationError(key + ": " + what);
}

RunConfig from_tree(const ptree& tree) {
  const auto& allowed = allowed_keys();
  for (const auto& [section, body] : tree) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) {
      throw ValidationError(section + ": unknown section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        throw ValidationError(section + "." + key + ": unknown key");
      }
    }
  }

  auto get = [&tree](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(ptree::path_type(path, '.'))) {
      return *v;
    }
    return std::nullopt;
  };
  auto need = [&get](const std::string& path) {
    auto v = get(path);
    if (!v) throw ValidationError(path + ": missing required field");
    return *v;
  };

  RunConfig cfg;
  ModelParams& m = cfg.model;
  m.alpha = parse_number<double>("alpha", need("model.alpha"));
  m.b_field = parse_number<double>("b_field", need("model.b_field"));
  m.gamma_coll = parse_number<double>("gamma_coll", need("model.gamma_coll"));
  m.gamma_single = 0.0;
  m.nbar = 0.0;
  const auto single = get("model.gamma_single");
  const auto ratio = get("model.gamma_single_ratio");
  require(!(single && ratio), "gamma_single",
          "give either gamma_single or gamma_single_ratio, not both");
  if (single) m.gamma_single = parse_number<double>("gamma_single", *single);
  if (ratio) {
    const double r = parse_number<double>("gamma_single_ratio", *ratio);
    require(r >= 0.0, "gamma_single_ratio", "must be >= 0");
    m.gamma_single = r * m.gamma_coll;
  }
  if (auto v = get("model.nbar")) m.nbar = parse_number<double>("nbar", *v);
  if (auto v = get("model.convention")) m.convention = parse_convention(trim(*v));
  validate(m);

  ScanConfig& sc = cfg.scan;
  if (auto v = get("scan.s_min")) sc.s_min = parse_number<double>("s_min", *v);
  if (auto v = get("scan.s_max")) sc.s_max = parse_number<double>("s_max", *v);
  if (auto v = get("scan.n_points")) sc.n_points = parse_number<int>("n_points", *v);
  if (auto v = get("scan.nbar_sweep")) sc.nbar_sweep = parse_list("nbar_sweep", *v);
  require(sc.s_min < sc.s_max, "s_min", "must be < s_max");
  require(sc.n_points >= 3, "n_points", "must be >= 3");
  for (double n : sc.nbar_sweep) require(n >= 0.0, "nbar_sweep", "values must be >= 0");

  EnsembleConfig& en = cfg.ensemble;
  en.master_seed = parse_number<std::uint64_t>("master_seed", need("ensemble.master_seed"));
  if (auto v = get("ensemble.n_trajectories")) {
    en.n_trajectories = parse_number<std::size_t>("n_trajectories", *v);
    require(*en.n_trajectories >= 1, "n_trajectories", "must be >= 1");
  }
  if (auto v = get("ensemble.n_jumps")) {
    en.n_jumps = parse_number<std::size_t>("n_jumps", *v);
    require(*en.n_jumps >= 1, "n_jumps", "must be >= 1");
  }
  if (auto v = get("ensemble.t_max")) {
    en.t_max = parse_number<double>("t_max", *v);
    require(*en.t_max > 0.0, "t_max", "must be > 0");
  }
  if (auto v = get("ensemble.burn_in_fraction")) {
    en.burn_in_fraction = parse_number<double>("burn_in_fraction", *v);
  }
  require(en.burn_in_fraction >= 0.0 && en.burn_in_fraction < 1.0,
          "burn_in_fraction", "must be in [0, 1)");
  if (auto v = get("ensemble.fixed_horizon")) {
    en.fixed_horizon = parse_bool("fixed_horizon", *v);
  }
  if (auto v = get("ensemble.bins")) {
    en.bins = parse_number<int>("bins", *v);
    require(en.bins >= 0, "bins", "must be >= 0");
  }
  if (auto v = get("ensemble.ft_window")) {
    en.ft_window = parse_number<double>("ft_window", *v);
    require(en.ft_window > 0.0, "ft_window", "must be > 0");
  }
  if (auto v = get("ensemble.ft_k_max")) {
    en.ft_k_max = parse_number<int>("ft_k_max", *v);
    require(en.ft_k_max >= 1, "ft_k_max", "must be >= 1");
  }
  if (auto v = get("ensemble.sample_logs")) {
    en.sample_logs = parse_number<std::size_t>("sample_logs", *v);
  }

  if (auto v = get("output.dir")) cfg.output_dir = trim(*v);
  if (auto v = get("output.profile")) cfg.profile = parse_profile(trim(*v));
  return cfg;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return from_tree(tree);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace trispin
