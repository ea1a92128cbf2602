#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pwstab/errors.hpp"
#include "pwstab/evolution.hpp"
#include "pwstab/io.hpp"
#include "pwstab/linearized.hpp"
#include "pwstab/spectral.hpp"
#include "pwstab/waves.hpp"

namespace {

using namespace pwstab;

enum Exit : int { kVerified = 0, kCriterionFailed = 1, kUsage = 2, kBlowUp = 3 };

struct RunConfig {
  std::string system = "kdv";
  std::vector<double> coeffs;
  double w = 0.0;
  std::optional<double> mu;
  std::optional<int> root;
  std::optional<double> length;
  int n = 256;
  std::optional<double> k;
  std::optional<double> c;
  std::optional<double> a;
  std::optional<double> omega;
  double amplitude = 0.5;
  std::optional<double> period;
  std::string out;
  std::string tag;
  double residual_tol = 1e-8;
  std::optional<double> fd_step;
  std::string method = "family_fd";
  std::string dump_operator = "none";
  double dt = 1e-3;
  double horizon = 20.0;
  double delta = 1e-3;
  std::uint64_t seed = 1;
  double k_ratio = 10.0;
  double cfl = 4000.0;
  int record_every = 100;
  int orbits = 12;
  int samples = 200;
};

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--system", cfg.system, "kdv | mkdv | logkdv | lkk");
  sub->add_option("--coeffs", cfg.coeffs, "B1..B4 (kdv) or D1..D5 (mkdv)")->delimiter(',');
  sub->add_option("--W", cfg.w, "inverse depth for lkk");
  sub->add_option("--mu", cfg.mu, "proportionality constant of the wave (phi, mu phi)");
  sub->add_option("--root", cfg.root, "index into the valid coupling roots");
  sub->add_option("--L", cfg.length, "period");
  sub->add_option("--N", cfg.n, "grid size, a power of two >= 8");
  sub->add_option("--k", cfg.k, "elliptic modulus");
  sub->add_option("--c", cfg.c, "log-KdV speed");
  sub->add_option("--A", cfg.a, "log-KdV integration constant");
  sub->add_option("--omega", cfg.omega, "lkk speed");
  sub->add_option("--amplitude", cfg.amplitude, "log-KdV orbit amplitude above the center");
  sub->add_option("--period", cfg.period, "log-KdV target period (bisection over amplitude)");
  sub->add_option("--out", cfg.out, "output directory (default $PWSTAB_OUTPUT_DIR or .)");
  sub->add_option("--tag", cfg.tag, "output file prefix (default: system name)");
  sub->add_option("--residual-tol", cfg.residual_tol, "wave residual acceptance");
  sub->add_option("--fd-step", cfg.fd_step, "family difference step");
  sub->add_option("--method", cfg.method, "family_fd | solve");
  sub->add_option("--dump-operator", cfg.dump_operator, "none | csv | binary");
  sub->add_option("--dt", cfg.dt, "time step");
  sub->add_option("--T", cfg.horizon, "horizon");
  sub->add_option("--delta", cfg.delta, "perturbation size in the energy norm");
  sub->add_option("--seed", cfg.seed, "perturbation seed");
  sub->add_option("--k-ratio", cfg.k_ratio, "bounded verdict threshold max rho <= k_ratio delta");
  sub->add_option("--cfl", cfg.cfl, "time-step constant C in dt <= C / max |xi m|");
  sub->add_option("--record-every", cfg.record_every, "steps between history rows");
  sub->add_option("--orbits", cfg.orbits, "phase-plane orbit count");
  sub->add_option("--samples", cfg.samples, "points per phase-plane orbit");
}

template <class T>
T require(const std::optional<T>& v, const char* flag) {
  if (!v) throw CLI::RequiredError(std::string("--") + flag);
  return *v;
}

void validate(const RunConfig& cfg) {
  if (!is_power_of_two(cfg.n) || cfg.n < 8) throw DomainError("N must be a power of two >= 8");
  for (double tol : {cfg.residual_tol, cfg.k_ratio, cfg.cfl}) {
    if (!(tol > 0.0)) throw DomainError("tolerances must be positive");
  }
  if (cfg.fd_step && !(*cfg.fd_step > 0.0)) throw DomainError("fd-step must be positive");
  if (cfg.method != "family_fd" && cfg.method != "solve") {
    throw DomainError("method must be family_fd or solve");
  }
  if (cfg.dump_operator != "none" && cfg.dump_operator != "csv" && cfg.dump_operator != "binary") {
    throw DomainError("dump-operator must be none, csv or binary");
  }
}

std::filesystem::path output_dir(const RunConfig& cfg) {
  std::filesystem::path dir = cfg.out;
  if (dir.empty()) {
    const char* env = std::getenv("PWSTAB_OUTPUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw DomainError("output directory " + dir.string() + " is not writable");
  }
  return dir;
}

std::string out_path(const RunConfig& cfg, const std::string& suffix) {
  const std::string tag = cfg.tag.empty() ? cfg.system : cfg.tag;
  return (output_dir(cfg) / (tag + suffix)).string();
}

SystemSpec make_system(const RunConfig& cfg) {
  const auto kind = parse_system_kind(cfg.system);
  switch (kind) {
    case SystemKind::kdv:
      return SystemSpec::from_coefficients(
          kind, cfg.coeffs.empty() ? std::vector<double>{1.0, 1.0, 0.0, 0.0} : cfg.coeffs);
    case SystemKind::mkdv:
      return SystemSpec::from_coefficients(
          kind, cfg.coeffs.empty() ? std::vector<double>{-1.0, 0.0, 1.0, 0.0, 0.5} : cfg.coeffs);
    case SystemKind::logkdv:
      if (!cfg.coeffs.empty()) throw DomainError("logkdv takes no coefficients");
      return SystemSpec::logkdv();
    case SystemKind::lkk:
      if (!cfg.coeffs.empty()) throw DomainError("lkk takes no coefficients; use --W");
      return SystemSpec::lkk(cfg.w);
  }
  throw DomainError("unknown system");
}

double select_mu(const SystemSpec& system, const RunConfig& cfg) {
  if (cfg.mu) {
    build_coupling_reduction(system, *cfg.mu);
    return *cfg.mu;
  }
  const auto roots = solve_coupling_cubic(system);
  if (roots.all_mu) throw CLI::RequiredError("--mu (every mu satisfies the coupling relation)");
  std::vector<double> valid;
  for (double r : roots.roots) {
    try {
      build_coupling_reduction(system, r);
      valid.push_back(r);
    } catch (const Error&) {
    }
  }
  if (valid.empty()) throw DomainError("no real coupling root gives a valid reduction");
  const int idx = cfg.root.value_or(0);
  if (idx < 0 || idx >= static_cast<int>(valid.size())) {
    throw DomainError("--root must lie in [0, " + std::to_string(valid.size()) + ")");
  }
  return valid[idx];
}

double logkdv_amplitude(const RunConfig& cfg) {
  if (!cfg.period) return cfg.amplitude;
  return logkdv_amplitude_for_period(require(cfg.c, "c"), require(cfg.a, "A"), *cfg.period);
}

WaveProfile build_wave(const RunConfig& cfg) {
  validate(cfg);
  const SystemSpec system = make_system(cfg);
  switch (system.kind()) {
    case SystemKind::kdv:
      return build_cnoidal_wave(system, select_mu(system, cfg), require(cfg.length, "L"),
                                require(cfg.k, "k"), cfg.n);
    case SystemKind::mkdv:
      return build_dnoidal_wave(system, select_mu(system, cfg), require(cfg.length, "L"),
                                require(cfg.k, "k"), cfg.n);
    case SystemKind::logkdv:
      return build_logkdv_wave(require(cfg.c, "c"), require(cfg.a, "A"), cfg.n,
                               logkdv_amplitude(cfg));
    case SystemKind::lkk: {
      const auto bo = build_bo_wave(require(cfg.omega, "omega"), require(cfg.length, "L"), cfg.n);
      return cfg.w > 0.0 ? continue_lkk_wave(*cfg.omega, cfg.w, bo) : bo;
    }
  }
  throw DomainError("unknown system");
}

void print(std::ostream& out, const std::string& key, double v) { out << key << '=' << v << '\n'; }

int cmd_build_wave(const RunConfig& cfg, std::ostream& out) {
  const auto wave = build_wave(cfg);
  write_json(wave_to_json(wave), out_path(cfg, "_wave.json"));
  write_wave_csv(wave, 0, out_path(cfg, "_phi1.csv"));
  write_wave_csv(wave, 1, out_path(cfg, "_phi2.csv"));
  out << "system=" << to_string(wave.system.kind()) << '\n';
  print(out, "L", wave.length);
  print(out, "c", wave.speed);
  print(out, "mu", wave.mu);
  for (const auto& [key, value] : wave.params) print(out, key, value);
  print(out, "residual", wave.residual);
  const bool ok = wave.residual < cfg.residual_tol;
  out << "residual_ok=" << (ok ? "true" : "false") << '\n';
  return ok ? kVerified : kCriterionFailed;
}

H2Report run_h2(const RunConfig& cfg, const WaveProfile& wave) {
  const auto method = cfg.method == "solve" ? DerivativeMethod::solve : DerivativeMethod::family_fd;
  switch (wave.system.kind()) {
    case SystemKind::kdv:
      return build_phi_kdv(wave.system, wave.mu, wave.length, *cfg.k, cfg.n,
                           cfg.fd_step.value_or(1e-4), method);
    case SystemKind::mkdv:
      return build_phi_mkdv(wave.system, wave.mu, wave.length, *cfg.k, cfg.n,
                            cfg.fd_step.value_or(1e-4), method);
    case SystemKind::logkdv:
      return check_h2_logkdv(*cfg.c, *cfg.a, cfg.fd_step.value_or(1e-3), cfg.n,
                             logkdv_amplitude(cfg), method);
    case SystemKind::lkk:
      return check_h2_lkk(*cfg.omega, cfg.w, wave.length, cfg.fd_step.value_or(1e-3), cfg.n, method);
  }
  throw DomainError("unknown system");
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const auto wave = build_wave(cfg);
  const auto op = assemble_operator(wave);
  if (cfg.dump_operator == "csv") write_operator_csv(op, out_path(cfg, "_operator.csv"));
  if (cfg.dump_operator == "binary") write_operator_binary(op, out_path(cfg, "_operator.bin"));
  const auto h1 = check_h1(op);
  const auto h2 = run_h2(cfg, wave);
  const bool verified = h1.h1_verdict && h2.h2_verdict;
  nlohmann::json doc = {{"system", to_string(wave.system.kind())},
                        {"coefficients", wave.system.coefficients()},
                        {"W", wave.system.depth_inverse()},
                        {"L", wave.length},
                        {"N", wave.size()},
                        {"c", wave.speed},
                        {"mu", wave.mu},
                        {"params", wave.params},
                        {"wave_residual", wave.residual},
                        {"h1", report_to_json(h1)},
                        {"h2", report_to_json(h2)},
                        {"verified", verified}};
  write_json(doc, out_path(cfg, "_report.json"));
  out << "system=" << h1.system << '\n';
  out << "negative_count=" << h1.negative_count << '\n';
  out << "zero_count=" << h1.zero_count << '\n';
  out << "criterion=" << h1.criterion << '\n';
  print(out, "criterion_value", h1.criterion_value);
  if (!h1.note.empty()) out << "note=" << h1.note << '\n';
  out << "h1_verdict=" << (h1.h1_verdict ? "true" : "false") << '\n';
  print(out, "I", h2.i_value);
  out << "h2_verdict=" << (h2.h2_verdict ? "true" : "false") << '\n';
  return verified ? kVerified : kCriterionFailed;
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  const auto wave = build_wave(cfg);
  StabilityConfig sc;
  sc.delta = cfg.delta;
  sc.horizon = cfg.horizon;
  sc.dt = cfg.dt;
  sc.seed = cfg.seed;
  sc.k_ratio = cfg.k_ratio;
  sc.cfl = cfg.cfl;
  sc.record_every = cfg.record_every;
  const auto result = stability_experiment(wave, sc);
  write_history_csv(result.history, out_path(cfg, "_history.csv"));
  auto summary = stability_to_json(result);
  if (!result.blew_up) {
    const auto final_wave =
        make_wave(wave.system, wave.length, wave.speed, result.final_state, wave.a1, wave.a2);
    write_json(wave_to_json(final_wave), out_path(cfg, "_final.json"));
  }
  write_json(summary, out_path(cfg, "_evolve.json"));
  print(out, "max_rho", result.max_rho);
  print(out, "drift_E", result.drift_energy);
  print(out, "drift_F", result.drift_momentum);
  print(out, "drift_M", result.drift_mass);
  out << "bounded=" << (result.bounded ? "true" : "false") << '\n';
  if (result.blew_up) {
    print(out, "last_valid_time", result.last_valid_time);
    out << "blow_up=" << result.message << '\n';
    return kBlowUp;
  }
  return result.bounded ? kVerified : kCriterionFailed;
}

int cmd_phase_plane(const RunConfig& cfg, std::ostream& out) {
  const double c = cfg.c.value_or(1.0);
  const double a = cfg.a.value_or(1.0);
  const auto orbits = logkdv_phase_portrait(c, a, cfg.orbits, cfg.samples);
  RunConfig named = cfg;
  if (named.tag.empty()) named.tag = "logkdv";
  write_phase_csv(orbits, out_path(named, "_phase.csv"));
  int closed = 0;
  int above = 0;
  for (const auto& o : orbits) {
    if (o.kind != "orbit") continue;
    ++closed;
    if (o.f_min > 1.0) ++above;
  }
  print(out, "c", c);
  print(out, "A", a);
  out << "equilibria=" << orbits.size() - closed << '\n';
  out << "orbits=" << closed << '\n';
  out << "orbits_above_one=" << above << '\n';
  return kVerified;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

int cmd_sweep(const std::string& command, const std::string& param,
              const std::vector<std::string>& values, int jobs,
              const std::vector<std::string>& rest, const RunConfig& cfg, std::ostream& out,
              std::ostream& err) {
  if (command != "build-wave" && command != "check" && command != "evolve") {
    throw DomainError("sweep --command must be build-wave, check or evolve");
  }
  if (values.empty()) throw DomainError("sweep needs at least one value");
  if (jobs < 1) throw DomainError("--jobs must be >= 1");
  const std::string base = cfg.tag.empty() ? cfg.system : cfg.tag;
  const std::size_t count = values.size();
  std::vector<int> codes(count, 0);
  std::vector<std::string> logs(count), errors(count);
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(next_mutex);
        if (next == count) return;
        i = next++;
      }
      std::vector<std::string> a{"pwstab", command};
      a.insert(a.end(), rest.begin(), rest.end());
      a.push_back("--" + param + "=" + values[i]);
      a.push_back("--tag=" + base + "_" + param + "_" + std::to_string(i));
      std::ostringstream o, e;
      o << std::setprecision(17);
      codes[i] = run(a, o, e);
      logs[i] = o.str();
      errors[i] = e.str();
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min<int>(jobs, static_cast<int>(count));
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  nlohmann::json summary = nlohmann::json::array();
  int worst = kVerified;
  for (std::size_t i = 0; i < count; ++i) {
    out << "[" << param << "=" << values[i] << "] exit=" << codes[i] << '\n' << logs[i];
    err << errors[i];
    summary.push_back({{"index", i}, {param, values[i]}, {"exit", codes[i]}});
    worst = std::max(worst, codes[i]);
  }
  RunConfig named = cfg;
  named.tag = base;
  write_json(summary, out_path(named, "_sweep.json"));
  return worst;
}

/// Splices `key=value` lines of --config files in front of the explicit
/// flags so that later flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.size() < 2) return args;
  std::vector<std::string> head{args[0], args[1]};
  std::vector<std::string> from_file;
  std::vector<std::string> tail;
  for (std::size_t i = 2; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw CLI::ArgumentMismatch("--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      tail.push_back(args[i]);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config " + path);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw DomainError("config line without '=': " + line);
      from_file.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
    }
  }
  head.insert(head.end(), from_file.begin(), from_file.end());
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orbital stability diagnostics for periodic waves of coupled dispersive systems"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  RunConfig cfg;
  auto* build = app.add_subcommand("build-wave", "construct a traveling wave and write JSON + CSV");
  auto* check = app.add_subcommand("check", "spectral (H1) and slope (H2) verification");
  auto* evolve = app.add_subcommand("evolve", "perturbed time evolution and orbital distance");
  auto* phase = app.add_subcommand("phase-plane", "log-KdV phase portrait as orbit polylines");
  auto* sweep = app.add_subcommand("sweep", "fan one parameter over a list of values");
  for (auto* sub : {build, check, evolve, phase, sweep}) {
    add_common(sub, cfg);
    sub->add_option("--config", "flat key=value file mirroring the flags");
  }
  std::string command;
  std::string param;
  std::vector<std::string> values;
  int jobs = 1;
  sweep->add_option("--command", command, "build-wave | check | evolve")->required();
  sweep->add_option("--param", param, "flag name to vary, e.g. k")->required();
  sweep->add_option("--values", values, "comma separated values")->delimiter(',')->required();
  sweep->add_option("--jobs", jobs, "concurrent workers");

  try {
    args = expand_config(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kVerified;
    }
    err << "usage error: " << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*build) return cmd_build_wave(cfg, out);
    if (*check) return cmd_check(cfg, out);
    if (*evolve) return cmd_evolve(cfg, out);
    if (*phase) return cmd_phase_plane(cfg, out);
    // Sweep forwards every shared flag it was given to the inner command.
    std::vector<std::string> rest;
    for (std::size_t i = 2; i < args.size(); ++i) {
      const std::string& t = args[i];
      const bool own = t.rfind("--command", 0) == 0 || t.rfind("--param", 0) == 0 ||
                       t.rfind("--values", 0) == 0 || t.rfind("--jobs", 0) == 0;
      if (own) {
        if (t.find('=') == std::string::npos) ++i;
        continue;
      }
      rest.push_back(t);
    }
    return cmd_sweep(command, param, values, jobs, rest, cfg, out, err);
  } catch (const CLI::RequiredError& e) {
    err << "usage error: missing required parameter " << e.what() << '\n';
    return kUsage;
  } catch (const BlowUpError& e) {
    err << "blow-up: " << e.what() << " (last valid time " << e.last_valid_time() << ")\n";
    return kBlowUp;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::cout << std::setprecision(17);
  std::vector<std::string> args(argv, argv + argc);
  return run(std::move(args), std::cout, std::cerr);
}
