#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quantobs/datagen.hpp"
#include "quantobs/quantization_observer.hpp"
#include "quantobs/split.hpp"

namespace quantobs {

enum class ObserverKind { ebst, tebst, qo };

struct ObserverConfig {
  std::string name;
  ObserverKind kind = ObserverKind::ebst;
  RadiusPolicy radius = FixedRadius{kFallbackRadius};  // qo only
  unsigned truncation_digits = 3;                       // tebst only
};

// EBST, TEBST, QO_fixed_0.01, QO_std_div_2, QO_std_div_3.
[[nodiscard]] const std::vector<ObserverConfig>& standard_observers();
// Looks up one of the standard names. Throws ConfigError otherwise.
[[nodiscard]] ObserverConfig parse_observer(std::string_view name);

// `feature_std` feeds std-fraction radius policies; ignored otherwise.
[[nodiscard]] std::unique_ptr<AttributeObserver> make_observer(const ObserverConfig& config,
                                                               double feature_std);

struct BenchRecord {
  std::string observer;
  std::string distribution;
  std::string dist_params;
  std::string target_fn;
  double noise_fraction = 0.0;
  std::size_t size = 0;
  unsigned repetition = 0;
  std::uint64_t seed = 0;
  double merit = 0.0;
  std::optional<double> cut_point;
  std::size_t n_elements = 0;
  double observe_time_s = 0.0;
  double query_time_s = 0.0;
};

inline constexpr std::string_view kResultsHeader =
    "observer,distribution,dist_params,target_fn,noise_fraction,size,repetition,seed,merit,cut_point,"
    "n_elements,observe_time_s,query_time_s";

// Sample standard deviation of x (0 for fewer than two values).
[[nodiscard]] double sample_std(std::span<const double> x);

// Streams an already generated sample through one observer, timing the
// whole observation pass and a single split query.
[[nodiscard]] BenchRecord bench_sample(const SampleSpec& spec, const Sample& sample,
                                       const ObserverConfig& config);

// Generates the spec's sample once and benchmarks every observer on it.
[[nodiscard]] std::vector<BenchRecord> run_bench(const SampleSpec& spec,
                                                 std::span<const ObserverConfig> observers);
[[nodiscard]] BenchRecord run_bench(const SampleSpec& spec, const ObserverConfig& observer);

void write_record(std::ostream& out, const BenchRecord& record);
// Throws std::invalid_argument describing the first bad field.
[[nodiscard]] BenchRecord parse_record(std::string_view line);

struct RowError {
  std::size_t row;  // 1-based line number in the file, header = 1
  std::string message;
};

// Reads a results CSV. Malformed rows are skipped and reported in `errors`.
// Throws std::invalid_argument when the header does not match.
[[nodiscard]] std::vector<BenchRecord> read_records(std::istream& in, std::vector<RowError>& errors);

struct MatrixFilter {
  std::vector<std::string> distributions;  // family names; empty = all
  std::vector<TargetFn> target_fns;        // empty = all
  std::vector<std::size_t> sizes;          // empty = matrix sizes up to kDeskMaxSize
  std::vector<double> noise_fractions;     // empty = all
  std::vector<ObserverConfig> observers;   // empty = standard_observers()
  unsigned repetitions = kTable1Repetitions;
  std::uint64_t base_seed = kDefaultBaseSeed;
  bool full_sizes = false;
};

inline constexpr std::size_t kDeskMaxSize = 100000;

// Throws ConfigError for unknown family names or non-positive sizes.
[[nodiscard]] std::vector<SampleSpec> select_specs(const MatrixFilter& filter);

struct MatrixOptions {
  unsigned parallelism = 1;
  // Called (from the writer) for every record before it is written.
  std::function<void(const BenchRecord&)> on_record;
};

// Runs every selected spec x observer cell and streams CSV rows (header
// first) to `out` in matrix order regardless of parallelism. Returns the
// number of data rows written.
std::size_t run_matrix(const MatrixFilter& filter, std::ostream& out, const MatrixOptions& options = {});

// Mean fractional rank of each observer for one metric, over all cells or
// over the cells of one sample size.
struct RankEntry {
  std::string metric;
  std::string observer;
  std::optional<std::size_t> size;  // nullopt = all sizes
  double mean_rank = 0.0;
  std::size_t cells = 0;

  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

struct RankSummary {
  std::vector<RankEntry> entries;

  friend bool operator==(const RankSummary&, const RankSummary&) = default;
};

inline constexpr std::array<std::string_view, 4> kRankedMetrics = {"merit", "n_elements", "observe_time_s",
                                                                   "query_time_s"};

// Fractional ranks (ties share the average rank). Rank 1 is the largest
// value when `descending`, the smallest otherwise.
[[nodiscard]] std::vector<double> fractional_ranks(std::span<const double> values, bool descending);

// Ranks observers inside each (distribution, params, target_fn, noise, size,
// repetition) cell and averages. Merit is ranked descending, the rest ascending.
[[nodiscard]] RankSummary summarize(std::span<const BenchRecord> records);

void write_summary_csv(std::ostream& out, const RankSummary& summary);
void print_summary_table(std::ostream& out, const RankSummary& summary);

}  // namespace quantobs
