#include "quantobs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "quantobs/ebst.hpp"
#include "quantobs/errors.hpp"
#include "quantobs/number_format.hpp"

namespace quantobs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <class Int>
Int parse_int(std::string_view field, const char* what) {
  Int v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(field) + "'");
  }
  return v;
}

double parse_real(std::string_view field, const char* what) {
  auto v = parse_double(field);
  if (!v) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(field) + "'");
  }
  return *v;
}

std::string_view strip_eol(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

// Position of an observer name in the standard list, unknown names last.
std::size_t observer_order(const std::string& name) {
  const auto& std_obs = standard_observers();
  for (std::size_t i = 0; i < std_obs.size(); ++i) {
    if (std_obs[i].name == name) return i;
  }
  return std_obs.size();
}

}  // namespace

const std::vector<ObserverConfig>& standard_observers() {
  static const std::vector<ObserverConfig> observers = {
      {"EBST", ObserverKind::ebst, FixedRadius{kFallbackRadius}, 3},
      {"TEBST", ObserverKind::tebst, FixedRadius{kFallbackRadius}, 3},
      {"QO_fixed_0.01", ObserverKind::qo, FixedRadius{0.01}, 3},
      {"QO_std_div_2", ObserverKind::qo, StdFraction{2.0}, 3},
      {"QO_std_div_3", ObserverKind::qo, StdFraction{3.0}, 3},
  };
  return observers;
}

ObserverConfig parse_observer(std::string_view name) {
  for (const auto& config : standard_observers()) {
    if (config.name == name) return config;
  }
  throw ConfigError("unknown observer '" + std::string(name) +
                    "' (expected EBST, TEBST, QO_fixed_0.01, QO_std_div_2 or QO_std_div_3)");
}

std::unique_ptr<AttributeObserver> make_observer(const ObserverConfig& config, double feature_std) {
  switch (config.kind) {
    case ObserverKind::ebst:
      return std::make_unique<EbstObserver>();
    case ObserverKind::tebst:
      return std::make_unique<EbstObserver>(config.truncation_digits);
    case ObserverKind::qo:
      return std::make_unique<QuantizationObserver>(resolve_radius(config.radius, feature_std));
  }
  throw ConfigError("unhandled observer kind");
}

double sample_std(std::span<const double> x) {
  VarStats stats;
  for (double v : x) stats.observe(v);
  return std::sqrt(stats.variance());
}

BenchRecord bench_sample(const SampleSpec& spec, const Sample& sample, const ObserverConfig& config) {
  BenchRecord record;
  record.observer = config.name;
  record.distribution = family_name(spec.distribution);
  record.dist_params = params_string(spec.distribution);
  record.target_fn = to_string(spec.target_fn);
  record.noise_fraction = spec.noise_fraction;
  record.size = spec.size;
  record.repetition = spec.repetition;
  record.seed = spec.seed;

  // The radius is resolved up front from the whole sample, outside the timing.
  const double feature_std = config.kind == ObserverKind::qo ? sample_std(sample.x) : 0.0;
  auto observer = make_observer(config, feature_std);

  VarStats total;
  for (double y : sample.y) total.observe(y);

  const std::size_t n = sample.x.size();
  const auto observe_start = Clock::now();
  for (std::size_t i = 0; i < n; ++i) {
    observer->update(sample.x[i], sample.y[i]);
  }
  record.observe_time_s = seconds_since(observe_start);

  const auto query_start = Clock::now();
  const auto split = observer->best_split(total);
  record.query_time_s = seconds_since(query_start);

  record.n_elements = observer->n_elements();
  if (split) {
    record.merit = split->merit;
    record.cut_point = split->cut_point;
  }
  return record;
}

std::vector<BenchRecord> run_bench(const SampleSpec& spec, std::span<const ObserverConfig> observers) {
  const Sample sample = generate_sample(spec);
  std::vector<BenchRecord> records;
  records.reserve(observers.size());
  for (const auto& config : observers) {
    records.push_back(bench_sample(spec, sample, config));
  }
  return records;
}

BenchRecord run_bench(const SampleSpec& spec, const ObserverConfig& observer) {
  return run_bench(spec, std::span<const ObserverConfig>(&observer, 1)).front();
}

void write_record(std::ostream& out, const BenchRecord& r) {
  out << r.observer << ',' << r.distribution << ',' << r.dist_params << ',' << r.target_fn << ','
      << format_double(r.noise_fraction) << ',' << r.size << ',' << r.repetition << ',' << r.seed << ','
      << format_double(r.merit) << ',' << (r.cut_point ? format_double(*r.cut_point) : std::string()) << ','
      << r.n_elements << ',' << format_double(r.observe_time_s) << ',' << format_double(r.query_time_s)
      << '\n';
}

BenchRecord parse_record(std::string_view line) {
  const auto f = split_fields(strip_eol(line));
  if (f.size() != 13) {
    throw std::invalid_argument("expected 13 fields, got " + std::to_string(f.size()));
  }
  BenchRecord r;
  r.observer = std::string(f[0]);
  r.distribution = std::string(f[1]);
  r.dist_params = std::string(f[2]);
  r.target_fn = std::string(f[3]);
  if (r.observer.empty() || r.distribution.empty() || r.target_fn.empty()) {
    throw std::invalid_argument("empty name field");
  }
  r.noise_fraction = parse_real(f[4], "noise_fraction");
  r.size = parse_int<std::size_t>(f[5], "size");
  r.repetition = parse_int<unsigned>(f[6], "repetition");
  r.seed = parse_int<std::uint64_t>(f[7], "seed");
  r.merit = parse_real(f[8], "merit");
  if (!f[9].empty()) {
    r.cut_point = parse_real(f[9], "cut_point");
  }
  r.n_elements = parse_int<std::size_t>(f[10], "n_elements");
  r.observe_time_s = parse_real(f[11], "observe_time_s");
  r.query_time_s = parse_real(f[12], "query_time_s");
  if (r.observe_time_s < 0.0 || r.query_time_s < 0.0) {
    throw std::invalid_argument("negative time");
  }
  return r;
}

std::vector<BenchRecord> read_records(std::istream& in, std::vector<RowError>& errors) {
  std::string line;
  if (!std::getline(in, line) || strip_eol(line) != kResultsHeader) {
    throw std::invalid_argument("results header does not match the expected columns");
  }
  std::vector<BenchRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (strip_eol(line).empty()) continue;
    try {
      records.push_back(parse_record(line));
    } catch (const std::exception& e) {
      errors.push_back({row, e.what()});
    }
  }
  return records;
}

std::vector<SampleSpec> select_specs(const MatrixFilter& filter) {
  const auto distributions = table1_distributions();
  for (const auto& family : filter.distributions) {
    if (family != "uniform" && family != "normal" && family != "bimodal") {
      throw ConfigError("unknown distribution family '" + family + "' (expected uniform, normal or bimodal)");
    }
  }
  for (std::size_t size : filter.sizes) {
    if (size == 0) throw ConfigError("sizes must be positive");
  }
  for (double noise : filter.noise_fractions) {
    if (!(noise >= 0.0 && noise <= 1.0)) throw ConfigError("noise fractions must lie in [0, 1]");
  }

  auto wanted = [](const auto& list, const auto& value) {
    return list.empty() || std::find(list.begin(), list.end(), value) != list.end();
  };

  std::vector<SampleSpec> specs;
  for (const auto& spec : table1_matrix(filter.base_seed, filter.repetitions)) {
    if (filter.sizes.empty()) {
      if (!filter.full_sizes && spec.size > kDeskMaxSize) continue;
    } else if (!wanted(filter.sizes, spec.size)) {
      continue;
    }
    if (!wanted(filter.distributions, family_name(spec.distribution))) continue;
    if (!wanted(filter.target_fns, spec.target_fn)) continue;
    if (!filter.noise_fractions.empty() &&
        std::none_of(filter.noise_fractions.begin(), filter.noise_fractions.end(),
                     [&](double v) { return std::abs(v - spec.noise_fraction) < 1e-12; })) {
      continue;
    }
    specs.push_back(spec);
  }
  return specs;
}

std::size_t run_matrix(const MatrixFilter& filter, std::ostream& out, const MatrixOptions& options) {
  const auto specs = select_specs(filter);
  const std::vector<ObserverConfig> observers =
      filter.observers.empty() ? standard_observers() : filter.observers;

  out << kResultsHeader << '\n';

  // Workers claim spec indices; the calling thread writes finished cells in
  // matrix order so the file content does not depend on scheduling.
  std::vector<std::optional<std::vector<BenchRecord>>> done(specs.size());
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      std::vector<BenchRecord> records;
      std::exception_ptr error;
      try {
        records = run_bench(specs[i], observers);
      } catch (...) {
        error = std::current_exception();
      }
      {
        std::lock_guard lock(mutex);
        if (error && !failure) failure = error;
        done[i] = std::move(records);
      }
      ready.notify_all();
    }
  };

  const unsigned n_workers = std::max(1u, options.parallelism);
  std::vector<std::jthread> pool;
  pool.reserve(n_workers);
  for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);

  std::size_t rows = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    std::vector<BenchRecord> records;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return done[i].has_value() || failure; });
      if (failure) {
        next = specs.size();
        lock.unlock();
        pool.clear();
        std::rethrow_exception(failure);
      }
      records = std::move(*done[i]);
      done[i].reset();
    }
    for (const auto& record : records) {
      if (options.on_record) options.on_record(record);
      write_record(out, record);
      ++rows;
    }
    out.flush();
  }
  return rows;
}

std::vector<double> fractional_ranks(std::span<const double> values, bool descending) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double shared = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

RankSummary summarize(std::span<const BenchRecord> records) {
  using CellKey = std::tuple<std::string, std::string, std::string, std::string, std::size_t, unsigned>;
  std::map<CellKey, std::vector<const BenchRecord*>> cells;
  for (const auto& r : records) {
    cells[{r.distribution, r.dist_params, r.target_fn, format_double(r.noise_fraction), r.size, r.repetition}]
        .push_back(&r);
  }

  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  // (metric index, observer order, observer, size or max for "all")
  using AccKey = std::tuple<std::size_t, std::size_t, std::string, std::size_t>;
  constexpr std::size_t kAll = 0;  // sorts first; real sizes are positive
  std::map<AccKey, Acc> acc;

  for (const auto& [key, members] : cells) {
    const std::size_t size = std::get<4>(key);
    for (std::size_t m = 0; m < kRankedMetrics.size(); ++m) {
      std::vector<double> values;
      values.reserve(members.size());
      for (const BenchRecord* r : members) {
        switch (m) {
          case 0: values.push_back(r->merit); break;
          case 1: values.push_back(static_cast<double>(r->n_elements)); break;
          case 2: values.push_back(r->observe_time_s); break;
          default: values.push_back(r->query_time_s); break;
        }
      }
      const auto ranks = fractional_ranks(values, m == 0);
      for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& name = members[i]->observer;
        for (std::size_t bucket : {kAll, size}) {
          Acc& a = acc[{m, observer_order(name), name, bucket}];
          a.sum += ranks[i];
          ++a.n;
        }
      }
    }
  }

  RankSummary summary;
  for (const auto& [key, a] : acc) {
    const auto& [m, order, name, bucket] = key;
    RankEntry entry;
    entry.metric = std::string(kRankedMetrics[m]);
    entry.observer = name;
    if (bucket != kAll) entry.size = bucket;
    entry.mean_rank = a.sum / static_cast<double>(a.n);
    entry.cells = a.n;
    summary.entries.push_back(std::move(entry));
  }
  // Group "all" rows ahead of the per-size rows within each metric.
  std::stable_sort(summary.entries.begin(), summary.entries.end(), [](const RankEntry& a, const RankEntry& b) {
    auto metric_index = [](const std::string& m) {
      return std::find(kRankedMetrics.begin(), kRankedMetrics.end(), m) - kRankedMetrics.begin();
    };
    return std::make_tuple(metric_index(a.metric), a.size.value_or(0), observer_order(a.observer)) <
           std::make_tuple(metric_index(b.metric), b.size.value_or(0), observer_order(b.observer));
  });
  return summary;
}

void write_summary_csv(std::ostream& out, const RankSummary& summary) {
  out << "metric,observer,size,mean_rank,cells\n";
  for (const auto& e : summary.entries) {
    out << e.metric << ',' << e.observer << ',' << (e.size ? std::to_string(*e.size) : std::string("all")) << ','
        << format_double(e.mean_rank) << ',' << e.cells << '\n';
  }
}

void print_summary_table(std::ostream& out, const RankSummary& summary) {
  std::vector<std::string> observers;
  for (const auto& e : summary.entries) {
    if (!e.size && std::find(observers.begin(), observers.end(), e.observer) == observers.end()) {
      observers.push_back(e.observer);
    }
  }
  std::stable_sort(observers.begin(), observers.end(),
                   [](const std::string& a, const std::string& b) { return observer_order(a) < observer_order(b); });

  out << "Mean rank over all cells (1 = best; merit ranked high-to-low, others low-to-high)\n";
  out << std::left << std::setw(16) << "observer";
  for (auto metric : kRankedMetrics) out << std::right << std::setw(16) << metric;
  out << '\n';
  for (const auto& name : observers) {
    out << std::left << std::setw(16) << name;
    for (auto metric : kRankedMetrics) {
      auto it = std::find_if(summary.entries.begin(), summary.entries.end(), [&](const RankEntry& e) {
        return !e.size && e.observer == name && e.metric == metric;
      });
      std::ostringstream cell;
      if (it != summary.entries.end()) cell << std::fixed << std::setprecision(3) << it->mean_rank;
      else cell << "-";
      out << std::right << std::setw(16) << cell.str();
    }
    out << '\n';
  }
}

}  // namespace quantobs
