// Benchmark harness and one-shot split utility for the attribute observers.
//
//   quantobs run [filters] --out results.csv
//   quantobs summarize --in results.csv --out ranks.csv
//   quantobs suggest-split --in sample.csv --observer EBST
//
// Exit codes: 0 success, 1 bad input data, 2 configuration error, 3 I/O error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quantobs/bench.hpp"
#include "quantobs/errors.hpp"
#include "quantobs/number_format.hpp"

namespace {

constexpr int kExitData = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr std::size_t kSlotWarningThreshold = 1000000;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunArgs {
  std::vector<std::string> distributions;
  std::vector<std::string> target_fns;
  std::vector<std::size_t> sizes;
  std::vector<double> noise;
  std::vector<std::string> observers;
  unsigned reps = quantobs::kTable1Repetitions;
  std::uint64_t seed = quantobs::kDefaultBaseSeed;
  std::string out = "-";
  unsigned parallelism = 1;
  bool full_sizes = false;
};

struct SummarizeArgs {
  std::string in;
  std::string out;
};

struct SuggestArgs {
  std::string in;
  std::string observer;
  std::optional<double> radius;
  std::optional<std::string> radius_policy;
};

int cmd_run(const RunArgs& args) {
  quantobs::MatrixFilter filter;
  filter.distributions = args.distributions;
  for (const auto& fn : args.target_fns) filter.target_fns.push_back(quantobs::parse_target_fn(fn));
  filter.sizes = args.sizes;
  filter.noise_fractions = args.noise;
  for (const auto& name : args.observers) filter.observers.push_back(quantobs::parse_observer(name));
  filter.repetitions = args.reps;
  filter.base_seed = args.seed;
  filter.full_sizes = args.full_sizes;
  // Validate before touching the output file.
  (void)quantobs::select_specs(filter);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (args.out != "-") {
    file.open(args.out);
    if (!file) throw IoError("cannot open '" + args.out + "' for writing");
    out = &file;
  }

  quantobs::MatrixOptions options;
  options.parallelism = args.parallelism;
  options.on_record = [](const quantobs::BenchRecord& r) {
    if (r.observer.rfind("QO", 0) == 0 && r.n_elements > kSlotWarningThreshold) {
      std::cerr << "warning: " << r.observer << " holds " << r.n_elements << " slots on " << r.distribution
                << "(" << r.dist_params << ") size " << r.size << "\n";
    }
  };
  const std::size_t rows = quantobs::run_matrix(filter, *out, options);
  out->flush();
  if (!*out) throw IoError("failed writing results to '" + args.out + "'");
  std::cerr << "wrote " << rows << " rows\n";
  return 0;
}

int cmd_summarize(const SummarizeArgs& args) {
  std::ifstream in(args.in);
  if (!in) throw IoError("cannot open '" + args.in + "'");

  std::vector<quantobs::RowError> errors;
  std::vector<quantobs::BenchRecord> records;
  try {
    records = quantobs::read_records(in, errors);
  } catch (const std::invalid_argument& e) {
    throw DataError(args.in + ": " + e.what());
  }
  for (const auto& err : errors) {
    std::cerr << args.in << ": row " << err.row << ": " << err.message << "\n";
  }

  const auto summary = quantobs::summarize(records);
  quantobs::print_summary_table(std::cout, summary);

  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw IoError("cannot open '" + args.out + "' for writing");
    quantobs::write_summary_csv(out, summary);
    out.flush();
    if (!out) throw IoError("failed writing '" + args.out + "'");
  }
  return 0;
}

quantobs::RadiusPolicy parse_radius_policy(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const auto value = colon == std::string::npos ? std::nullopt : quantobs::parse_double(text.substr(colon + 1));
  if (!value) {
    throw quantobs::ConfigError("radius policy must look like fixed:<r> or std_div:<k>, got '" + text + "'");
  }
  if (kind == "fixed") return quantobs::FixedRadius{*value};
  if (kind == "std_div") return quantobs::StdFraction{*value};
  throw quantobs::ConfigError("unknown radius policy '" + kind + "'");
}

int cmd_suggest(const SuggestArgs& args) {
  quantobs::ObserverConfig config;
  if (args.observer == "QO") {
    if (!args.radius && !args.radius_policy) {
      throw quantobs::ConfigError("observer QO needs --radius or --radius-policy");
    }
    config.name = "QO";
    config.kind = quantobs::ObserverKind::qo;
  } else {
    config = quantobs::parse_observer(args.observer);
  }
  if (args.radius || args.radius_policy) {
    if (config.kind != quantobs::ObserverKind::qo) {
      throw quantobs::ConfigError("--radius/--radius-policy only apply to QO observers");
    }
    config.radius = args.radius ? quantobs::RadiusPolicy{quantobs::FixedRadius{*args.radius}}
                                : parse_radius_policy(*args.radius_policy);
  }

  std::ifstream in(args.in);
  if (!in) throw IoError("cannot open '" + args.in + "'");

  std::vector<double> xs;
  std::vector<double> ys;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const auto x = comma == std::string::npos ? std::nullopt : quantobs::parse_double(line.substr(0, comma));
    const auto y = comma == std::string::npos ? std::nullopt : quantobs::parse_double(line.substr(comma + 1));
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
      if (row == 1) continue;  // header
      throw DataError(args.in + ": row " + std::to_string(row) + ": expected two finite numbers");
    }
    xs.push_back(*x);
    ys.push_back(*y);
  }

  const double feature_std = quantobs::sample_std(xs);
  auto observer = quantobs::make_observer(config, feature_std);
  quantobs::VarStats total;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    observer->update(xs[i], ys[i]);
    total.observe(ys[i]);
  }
  const auto split = observer->best_split(total);
  if (!split) {
    throw DataError("insufficient data: fewer than two split candidates");
  }

  nlohmann::json out = {
      {"observer", config.name},
      {"cut_point", split->cut_point},
      {"merit", split->merit},
      {"left_count", split->left.count()},
      {"right_count", split->right.count()},
      {"left_mean", split->left.mean()},
      {"right_mean", split->right.mean()},
      {"n_elements", observer->n_elements()},
  };
  if (auto* qo = dynamic_cast<const quantobs::QuantizationObserver*>(observer.get())) {
    out["radius"] = qo->radius();
  }
  std::cout << out.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-point attribute observers: benchmark harness and utilities"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the benchmark matrix and write a results CSV");
  run->add_option("--distribution", run_args.distributions, "Distribution family: uniform, normal, bimodal");
  run->add_option("--target-fn", run_args.target_fns, "Target function: lin, cub");
  run->add_option("--size", run_args.sizes, "Sample size (repeatable)");
  run->add_option("--noise", run_args.noise, "Noise fraction: 0 or 0.1 (repeatable)");
  run->add_option("--observer", run_args.observers, "Observer name (repeatable)");
  run->add_option("--reps", run_args.reps, "Repetitions per cell")->check(CLI::Range(1u, 1000u));
  run->add_option("--seed", run_args.seed, "Base seed");
  run->add_option("--out", run_args.out, "Output CSV path ('-' for stdout)");
  run->add_option("--parallelism", run_args.parallelism, "Worker threads")->check(CLI::Range(1u, 1024u));
  run->add_flag("--full-sizes", run_args.full_sizes, "Include sizes above 100000 by default");

  SummarizeArgs sum_args;
  auto* summarize = app.add_subcommand("summarize", "Average per-cell observer ranks from a results CSV");
  summarize->add_option("--in", sum_args.in, "Results CSV")->required();
  summarize->add_option("--out", sum_args.out, "Rank summary CSV");

  SuggestArgs sug_args;
  auto* suggest = app.add_subcommand("suggest-split", "Stream an x,y CSV through one observer");
  suggest->add_option("--in", sug_args.in, "Two-column x,y CSV")->required();
  suggest->add_option("--observer", sug_args.observer, "Observer name, or QO with a radius")->required();
  auto* radius = suggest->add_option("--radius", sug_args.radius, "Fixed QO radius");
  suggest->add_option("--radius-policy", sug_args.radius_policy, "fixed:<r> or std_div:<k>")->excludes(radius);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*summarize) return cmd_summarize(sum_args);
    if (*suggest) return cmd_suggest(sug_args);
  } catch (const quantobs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
