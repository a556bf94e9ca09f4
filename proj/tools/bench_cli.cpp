// Copyright 2026 The mixsolve Authors
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

// mixsolve-bench: validation sweeps, scaling metrics and switch benchmarks.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixsolve/bench.hpp"

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::map<std::string, std::string> read_config(const std::string& path) {
  std::map<std::string, std::string> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

// Fills options the user left unset from the config file.
void apply_config(CLI::App* app, const std::map<std::string, std::string>& cfg) {
  for (const auto& [key, value] : cfg) {
    if (key == "config") continue;
    CLI::Option* opt = nullptr;
    try {
      opt = app->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("unknown config key: " + key);
    }
    if (opt->count() == 0) {
      opt->add_result(value);
      opt->run_callback();
    }
  }
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size() || v < 2) throw UsageError("invalid resolution: " + tok);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty resolution list");
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

std::ostream* open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path);
  if (!file) throw UsageError("cannot write " + path);
  return &file;
}

struct ValidateArgs {
  std::string config, case_id, kernel = "CHAT2", layout = "node", strategy = "nb", nres = "33,65,129";
  std::string derivative = "spectral", out, profile;
  int p = 1;
  double sigma_ratio = 2.0;
};

int run_validate(const ValidateArgs& a) {
  using namespace mixsolve;
  ValidationOptions o;
  try {
    o.id = parse_case(a.case_id);
    o.layout = parse_layout(a.layout);
    o.strategy = parse_strategy(a.strategy);
    o.derivative = parse_derivative(a.derivative);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  o.nres = parse_int_list(a.nres);
  o.nranks = a.p;
  if (o.nranks < 1) throw UsageError("--p must be positive");

  std::vector<ValidationResult> results;
  ProfileMap profile;
  bool failed = false;
  for (const std::string& k : split(a.kernel)) {
    try {
      o.kernel = KernelId::parse(k, a.sigma_ratio);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    ValidationResult r = run_validation(o, !a.profile.empty());
    for (const auto& pt : r.points) {
      if (!std::isfinite(pt.einf)) failed = true;
      const ValidationCase vc = validation_case(o.id, o.length);
      const Domain dom = case_domain(vc, pt.n, o.layout);
      const std::array<int, 3> s = sample_counts(dom);
      const double pts = double(s[0]) * s[1] * s[2] * throughput_factor(dom);
      std::fprintf(stderr, "%s %s N=%d P=%d Einf=%.3e time=%.3fs throughput=%.3e pts/s/rank\n",
                   to_string(o.id).c_str(), o.kernel.name().c_str(), pt.n, o.nranks, pt.einf, pt.seconds,
                   pts / (pt.seconds * o.nranks));
      for (const auto& [name, st] : pt.profile) {
        StageTimes& d = profile[name];
        d.compute_s += st.compute_s;
        d.overlap_s += st.overlap_s;
        d.comm_s += st.comm_s;
        d.wall_s += st.wall_s;
        d.bytes += st.bytes;
      }
    }
    results.push_back(std::move(r));
  }

  std::ofstream file;
  write_csv(*open_out(a.out, file), results);
  if (!a.profile.empty()) {
    std::ofstream pf(a.profile);
    if (!pf) throw UsageError("cannot write " + a.profile);
    pf << profile_json(profile) << '\n';
  }
  return failed ? kExitNumerical : 0;
}

struct MetricsArgs {
  std::string config, input, mode = "strong", out;
};

int run_metrics(const MetricsArgs& a) {
  using namespace mixsolve;
  ScalingMode mode;
  try {
    mode = parse_scaling_mode(a.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ifstream in(a.input);
  if (!in) throw UsageError("cannot open " + a.input);
  std::vector<std::pair<double, double>> times;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto parts = split(line);
    if (parts.size() < 2) throw UsageError("expected r,T per line: " + line);
    try {
      times.emplace_back(std::stod(parts[0]), std::stod(parts[1]));
    } catch (const std::invalid_argument&) {
      if (times.empty()) continue;  // header
      throw UsageError("not a number: " + line);
    }
  }
  ScalingResult res;
  try {
    res = scaling_metrics(times, mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ofstream file;
  std::ostream& os = *open_out(a.out, file);
  os << "r,T,alpha,beta,speedup,efficiency,beta_fit\n";
  char buf[256];
  for (const auto& r : res.records) {
    std::snprintf(buf, sizeof buf, "%g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.r, r.time, r.alpha, r.beta,
                  r.speedup, r.efficiency, res.beta);
    os << buf;
  }
  return std::isfinite(res.beta) ? 0 : kExitNumerical;
}

struct SwitchArgs {
  std::string config, strategy = "all";
  int p = 4, n = 32;
  std::uint64_t seed = 1;
  bool adversarial = false;
};

int run_switch_bench(const SwitchArgs& a) {
  using namespace mixsolve;
  std::vector<Strategy> list;
  if (a.strategy == "all") list = {Strategy::A2A, Strategy::NB, Strategy::ISR};
  else {
    try {
      list = {parse_strategy(a.strategy)};
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (a.p < 1 || a.n < 1) throw UsageError("--p and --n must be positive");
  TransportOptions topt;
  topt.adversarial = a.adversarial;
  topt.seed = a.seed;
  std::cout << "strategy,P,n,seconds,checksum\n";
  bool mismatch = false;
  std::uint64_t first = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const SwitchBenchResult r = switch_bench(a.p, a.n, list[i], a.seed, topt);
    if (i == 0) first = r.checksum;
    else if (r.checksum != first) mismatch = true;
    std::printf("%s,%d,%d,%.6f,%016llx\n", to_string(r.strategy).c_str(), a.p, a.n, r.seconds,
                static_cast<unsigned long long>(r.checksum));
  }
  std::fflush(stdout);
  if (mismatch) std::fprintf(stderr, "checksums differ between strategies\n");
  return mismatch ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixsolve benchmark and validation driver"};
  app.require_subcommand(1);

  ValidateArgs va;
  CLI::App* validate = app.add_subcommand("validate", "Convergence study on a reference case");
  validate->add_option("--config", va.config, "key=value file, overridden by flags");
  validate->add_option("--case", va.case_id, "spectral-mixed, fully-unbounded, semi-unbounded, biot-savart-tube");
  validate->add_option("--kernel", va.kernel, "kernel, or a comma separated list")->capture_default_str();
  validate->add_option("--layout", va.layout, "cell or node")->capture_default_str();
  validate->add_option("--strategy", va.strategy, "a2a, nb or isr")->capture_default_str();
  validate->add_option("--nres", va.nres, "comma separated sample counts")->capture_default_str();
  validate->add_option("--p", va.p, "simulated ranks")->capture_default_str();
  validate->add_option("--sigma-ratio", va.sigma_ratio, "sigma / h for the regularized kernels")->capture_default_str();
  validate->add_option("--derivative", va.derivative, "spectral, fd2, fd4 or fd6")->capture_default_str();
  validate->add_option("--out", va.out, "CSV output, stdout by default");
  validate->add_option("--profile", va.profile, "JSON per-stage timings");

  MetricsArgs ma;
  CLI::App* metrics = app.add_subcommand("metrics", "Speedup, efficiency and serial fraction from timings");
  metrics->add_option("--config", ma.config, "key=value file, overridden by flags");
  metrics->add_option("--input", ma.input, "CSV of r,T");
  metrics->add_option("--mode", ma.mode, "strong or weak")->capture_default_str();
  metrics->add_option("--out", ma.out, "CSV output, stdout by default");

  SwitchArgs sa;
  CLI::App* sw = app.add_subcommand("switch-bench", "Time pencil switches and compare strategies");
  sw->add_option("--config", sa.config, "key=value file, overridden by flags");
  sw->add_option("--p", sa.p, "simulated ranks")->capture_default_str();
  sw->add_option("--n", sa.n, "grid points per direction")->capture_default_str();
  sw->add_option("--strategy", sa.strategy, "a2a, nb, isr or all")->capture_default_str();
  sw->add_option("--seed", sa.seed, "random seed")->capture_default_str();
  sw->add_flag("--adversarial", sa.adversarial, "reorder deliveries randomly");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (validate->parsed()) {
      if (!va.config.empty()) apply_config(validate, read_config(va.config));
      if (va.case_id.empty()) throw UsageError("--case is required");
      return run_validate(va);
    }
    if (metrics->parsed()) {
      if (!ma.config.empty()) apply_config(metrics, read_config(ma.config));
      if (ma.input.empty()) throw UsageError("--input is required");
      return run_metrics(ma);
    }
    if (sw->parsed()) {
      if (!sa.config.empty()) apply_config(sw, read_config(sa.config));
      return run_switch_bench(sa);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
