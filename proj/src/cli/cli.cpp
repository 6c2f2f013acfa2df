#include "tetra/cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "tetra/bench/kpi.hpp"
#include "tetra/commute/ablation.hpp"

namespace tetra::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string command;
  std::optional<std::string> config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> component;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::string first_line_of(const fs::path& path, std::string_view prefix) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) return line.substr(line.find(':') + 1);
  }
  return " unknown";
}

// Effective config first (parses back as a config file), environment as comments.
std::string manifest(const Options& opts, const bench::WorkloadConfig& config) {
  std::string out = "# command=" + opts.command + '\n';
  out += "# config_file=" + opts.config_path.value_or("(defaults)") + '\n';
  out += bench::to_text(config);
  out += "# cpu=" + first_line_of("/proc/cpuinfo", "model name") + '\n';
  out += "# hardware_threads=" + std::to_string(std::thread::hardware_concurrency()) + '\n';
  out += "# kernel=" + first_line_of("/proc/version", "Linux") + '\n';
#if defined(__VERSION__)
  out += std::string("# compiler=") + __VERSION__ + '\n';
#endif
#if defined(NDEBUG)
  out += "# build=release\n";
#else
  out += "# build=debug\n";
#endif
  return out;
}

int bench_cmd(const bench::WorkloadConfig& config, const fs::path& dir, std::ostream& out) {
  const auto report = bench::run_kpi(config);
  write_file(dir / "kpi.csv", bench::kpi_csv(report));
  write_file(dir / "latency.csv", bench::latency_csv(report));
  write_file(dir / "amplification.csv", bench::amplification_csv(report));
  write_file(dir / "throughput.csv", bench::throughput_csv(report));
  out << bench::kpi_summary(report);
  out << (report.passed() ? "bench: all gating KPIs met\n" : "bench: some gating KPIs missed\n");
  return report.passed() ? kExitOk : kExitFailed;
}

int epsilon_cmd(const bench::WorkloadConfig& config, const fs::path& dir, std::ostream& out) {
  const auto report = bench::run_kpi(config, {false});
  const auto e = bench::estimate_epsilon(report.reads, config.resamples, config.seed);
  write_file(dir / "epsilon.csv", bench::epsilon_csv(e));
  char line[256];
  std::snprintf(line, sizeof(line),
                "eps %.6f [%.6f, %.6f] H %.4f c_k %.4f; mean steps %.4f vs model %.4f (rel err %.4f, block corr %.3f)\n",
                e.eps, e.ci_lo, e.ci_hi, e.h_cache, e.c_k, e.mean_steps, e.model_steps, e.rel_error,
                e.step_correlation);
  out << line;
  const bool ok = e.eps <= 0.05 && e.rel_error <= 0.10;
  out << (ok ? "epsilon: within bound\n" : "epsilon: bound missed\n");
  return ok ? kExitOk : kExitFailed;
}

int commute_cmd(const bench::WorkloadConfig& config, const fs::path& dir, std::ostream& out) {
  const auto summary = commute::theorem1_suite(commute::measure_params(config));
  std::vector<commute::CommutationRow> rows = summary.baseline;
  rows.insert(rows.end(), summary.composed.begin(), summary.composed.end());
  write_file(dir / "commutation.csv", commute::commutation_csv(rows));
  write_file(dir / "heatmap.csv", commute::heatmap_csv(rows));
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-8s %-4s rate %.4f [%.4f, %.4f] %s\n", r.config.c_str(),
                  std::string(commute::to_string(r.projection)).c_str(), r.rate, r.ci_lo, r.ci_hi,
                  r.non_commuting() ? "non-commuting" : "commuting");
    out << line;
  }
  out << summary.report() << '\n' << (summary.holds ? "commute: reduction holds\n" : "commute: reduction fails\n");
  return summary.holds ? kExitOk : kExitFailed;
}

int ablate_cmd(const bench::WorkloadConfig& config, const std::optional<std::string>& component, const fs::path& dir,
               std::ostream& out) {
  std::vector<std::string> components;
  if (component) {
    components = {*component};
  } else {
    components = {"none", "ownership", "capability", "cas", "graph-split"};
  }
  for (const auto& c : components) commute::Config::without(c);  // reject unknown names before any work
  const auto full = bench::run_kpi(config, {false});
  std::vector<commute::AblationRow> rows;
  std::vector<commute::CommutationRow> rates;
  for (const auto& c : components) {
    rows.push_back(commute::ablate(c, config, &full));
    rates.insert(rates.end(), rows.back().rates.begin(), rows.back().rates.end());
    char line[200];
    std::snprintf(line, sizeof(line), "%-12s preserved %zu/6  WA %.4f (%+.4f)  p99.5 %.3f ms (%+.3f)\n",
                  rows.back().component.c_str(), commute::preserved_count(rows.back().checks), rows.back().wa,
                  rows.back().wa_delta, rows.back().p995_ms, rows.back().p995_delta_ms);
    out << line;
  }
  write_file(dir / "ablation.csv", commute::ablation_csv(rows));
  write_file(dir / "commutation.csv", commute::commutation_csv(rates));
  write_file(dir / "heatmap.csv", commute::heatmap_csv(rates));
  return kExitOk;
}

int selftest_cmd(const bench::WorkloadConfig& config, const fs::path& dir, std::ostream& out) {
  auto params = commute::measure_params(config);
  params.horizon = std::min<std::size_t>(params.horizon, 100);
  std::vector<commute::CommutationRow> rates;
  for (auto p : commute::kAllProjections) rates.push_back(commute::measure(p, params, commute::Config::full()));
  const auto checks = commute::preservation_checks(commute::Config::full(), rates, config.seed);
  std::string csv = "projection,preserved,detail\n";
  for (const auto& c : checks) {
    csv += std::string(commute::to_string(c.projection)) + ',' + (c.preserved ? "true" : "false") + ',' + c.detail + '\n';
    out << commute::to_string(c.projection) << (c.preserved ? " preserved: " : " NOT preserved: ") << c.detail << '\n';
  }
  write_file(dir / "selftest.csv", csv);
  const auto passed = commute::preserved_count(checks);
  out << "selftest: " << passed << '/' << checks.size() << " preservation checks passed\n";
  return passed == checks.size() ? kExitOk : kExitFailed;
}

bool is_config_error(ErrorCode code) {
  return code == ErrorCode::kParseError || code == ErrorCode::kUnknownKey || code == ErrorCode::kInvalidConfig;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layered content-addressed graph store: benchmarks and commutation measurement", "tetra"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Options opts;
  app.add_option("--config", opts.config_path, "Workload config file (key=value)");
  app.add_option("--out", opts.out_dir, "Output directory, created if absent");
  app.add_option("--seed", opts.seed, "Root seed override");
  app.add_option("--trials", opts.trials, "Trial count override")->check(CLI::PositiveNumber);
  app.add_option("--ablate", opts.component, "Component to ablate: ownership, capability, cas, graph-split, none");
  for (const char* name : {"bench", "commute", "ablate", "epsilon", "selftest"}) {
    app.add_subcommand(name)->callback([&opts, name] { opts.command = name; });
  }
  app.get_subcommand("bench")->description("KPI suite: latency, write amplification, cache hits, security overhead");
  app.get_subcommand("commute")->description("Anti-commutativity rates per projection, baseline vs composed");
  app.get_subcommand("ablate")->description("Preservation, WA and tail latency with one component removed");
  app.get_subcommand("epsilon")->description("Read-bound slack estimate from engine access logs");
  app.get_subcommand("selftest")->description("Preservation checks over all six projections");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  bench::WorkloadConfig config;
  const fs::path dir(opts.out_dir);
  try {
    if (opts.config_path) config = bench::load_config(*opts.config_path);
    if (opts.seed) config.seed = *opts.seed;
    if (opts.trials) config.trials = *opts.trials;
    config.validate();
    if (opts.component) commute::Config::without(*opts.component);
    fs::create_directories(dir);
    write_file(dir / "manifest.txt", manifest(opts, config));
  } catch (const Error& e) {
    err << "tetra: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "tetra: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (opts.command == "bench") return bench_cmd(config, dir, out);
    if (opts.command == "epsilon") return epsilon_cmd(config, dir, out);
    if (opts.command == "commute") return commute_cmd(config, dir, out);
    if (opts.command == "ablate") return ablate_cmd(config, opts.component, dir, out);
    return selftest_cmd(config, dir, out);
  } catch (const Error& e) {
    err << "tetra " << opts.command << ": " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitUsage : kExitFailed;
  }
}

}  // namespace tetra::cli
