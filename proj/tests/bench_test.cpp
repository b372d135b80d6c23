#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "quantobs/bench.hpp"
#include "quantobs/errors.hpp"

using namespace quantobs;

namespace {

std::vector<BenchRecord> parse_all(const std::string& csv) {
  std::istringstream in(csv);
  std::vector<RowError> errors;
  auto records = read_records(in, errors);
  EXPECT_TRUE(errors.empty());
  return records;
}

// Everything except the timing columns.
std::vector<std::string> deterministic_columns(const std::vector<BenchRecord>& records) {
  std::vector<std::string> out;
  for (auto r : records) {
    r.observe_time_s = 0;
    r.query_time_s = 0;
    std::ostringstream line;
    write_record(line, r);
    out.push_back(line.str());
  }
  return out;
}

BenchRecord cell_record(const std::string& observer, double merit, double n_elements) {
  BenchRecord r;
  r.observer = observer;
  r.distribution = "normal";
  r.dist_params = "0;1";
  r.target_fn = "lin";
  r.size = 50;
  r.merit = merit;
  r.n_elements = static_cast<std::size_t>(n_elements);
  r.observe_time_s = 0.5;
  r.query_time_s = 0.25;
  return r;
}

const RankEntry& find_entry(const RankSummary& s, std::string_view metric, std::string_view observer) {
  for (const auto& e : s.entries) {
    if (!e.size && e.metric == metric && e.observer == observer) return e;
  }
  throw std::runtime_error("missing entry");
}

}  // namespace

TEST(Observers, StandardNames) {
  std::vector<std::string> names;
  for (const auto& c : standard_observers()) names.push_back(c.name);
  EXPECT_EQ(names, (std::vector<std::string>{"EBST", "TEBST", "QO_fixed_0.01", "QO_std_div_2", "QO_std_div_3"}));
  EXPECT_EQ(parse_observer("TEBST").kind, ObserverKind::tebst);
  EXPECT_THROW((void)parse_observer("QO_std_div_4"), ConfigError);
  EXPECT_EQ(make_observer(parse_observer("EBST"), 0.0)->name(), "EBST");
  auto qo = make_observer(parse_observer("QO_std_div_2"), 3.0);
  EXPECT_EQ(dynamic_cast<QuantizationObserver&>(*qo).radius(), 1.5);
}

TEST(RunBench, SmallSampleBoundsElements) {
  const auto specs = table1_matrix(kDefaultBaseSeed, 1);
  for (const auto& spec : specs) {
    if (spec.size != 50) continue;
    for (const auto& r : run_bench(spec, standard_observers())) {
      EXPECT_GE(r.n_elements, 1u);
      EXPECT_LE(r.n_elements, 50u);
      EXPECT_GE(r.observe_time_s, 0.0);
      EXPECT_GE(r.query_time_s, 0.0);
    }
  }
}

TEST(RunBench, UniformSlotBoundAndEbstDistinctness) {
  const SampleSpec spec{100000, Uniform{-1, 1}, TargetFn::lin, 0.0, 4242, 0};
  const Sample sample = generate_sample(spec);
  const BenchRecord qo = bench_sample(spec, sample, parse_observer("QO_std_div_2"));
  EXPECT_LE(qo.n_elements, static_cast<std::size_t>(1 + std::ceil(2.0 / (1.0 / std::sqrt(3.0) / 2.0))));
  EXPECT_LE(qo.n_elements, 8u);
  const BenchRecord ebst = bench_sample(spec, sample, parse_observer("EBST"));
  EXPECT_EQ(ebst.n_elements, std::set<double>(sample.x.begin(), sample.x.end()).size());
  EXPECT_GT(ebst.n_elements, 99000u);
  EXPECT_TRUE(ebst.cut_point.has_value());
}

TEST(RunBench, ReplayIsBitIdentical) {
  const SampleSpec spec = table1_matrix(7, 1)[600];
  for (const auto& cfg : standard_observers()) {
    const auto a = run_bench(spec, cfg);
    const auto b = run_bench(spec, cfg);
    EXPECT_EQ(a.merit, b.merit);
    EXPECT_EQ(a.cut_point, b.cut_point);
    EXPECT_EQ(a.n_elements, b.n_elements);
  }
}

TEST(Records, WriteParseRoundTrip) {
  BenchRecord r = cell_record("QO_std_div_3", 1.0 / 3.0, 12);
  r.noise_fraction = 0.1;
  r.seed = 18446744073709551615ULL;
  r.repetition = 9;
  r.cut_point = -0.1234567890123;
  std::ostringstream out;
  write_record(out, r);
  const BenchRecord back = parse_record(out.str().substr(0, out.str().size() - 1));
  EXPECT_EQ(back.observer, r.observer);
  EXPECT_EQ(back.merit, r.merit);
  EXPECT_EQ(back.cut_point, r.cut_point);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.noise_fraction, r.noise_fraction);

  r.cut_point.reset();
  std::ostringstream absent;
  write_record(absent, r);
  EXPECT_NE(absent.str().find(",,12,"), std::string::npos);
  EXPECT_FALSE(parse_record(absent.str()).cut_point.has_value());
}

TEST(Records, MalformedRowsAreReportedAndSkipped) {
  std::ostringstream csv;
  csv << kResultsHeader << '\n';
  write_record(csv, cell_record("EBST", 2.0, 10));
  csv << "EBST,normal,0;1,lin,0,50,0,1,notanumber,,10,0.1,0.1\n";
  csv << "too,few,fields\n";
  write_record(csv, cell_record("QO_std_div_2", 1.0, 3));
  std::istringstream in(csv.str());
  std::vector<RowError> errors;
  const auto records = read_records(in, errors);
  EXPECT_EQ(records.size(), 2u);
  ASSERT_EQ(errors.size(), 2u);
  EXPECT_EQ(errors[0].row, 3u);
  EXPECT_EQ(errors[1].row, 4u);

  std::istringstream bad_header("observer,merit\n");
  EXPECT_THROW((void)read_records(bad_header, errors), std::invalid_argument);
}

TEST(Matrix, FilterCountsRows) {
  MatrixFilter filter;
  filter.sizes = {50, 100};
  filter.observers = {parse_observer("EBST"), parse_observer("QO_std_div_2")};
  filter.repetitions = 2;
  std::ostringstream out;
  EXPECT_EQ(run_matrix(filter, out), 288u);
  EXPECT_EQ(parse_all(out.str()).size(), 288u);
}

TEST(Matrix, EmptyMatchWritesHeaderOnly) {
  MatrixFilter filter;
  filter.sizes = {123};
  std::ostringstream out;
  EXPECT_EQ(run_matrix(filter, out), 0u);
  EXPECT_EQ(out.str(), std::string(kResultsHeader) + "\n");
}

TEST(Matrix, InvalidFilterThrows) {
  MatrixFilter filter;
  filter.distributions = {"cauchy"};
  std::ostringstream out;
  EXPECT_THROW((void)run_matrix(filter, out), ConfigError);
  EXPECT_TRUE(out.str().empty());
}

TEST(Matrix, DeskDefaultCapsSizes) {
  MatrixFilter filter;
  filter.repetitions = 1;
  std::set<std::size_t> sizes;
  for (const auto& s : select_specs(filter)) sizes.insert(s.size);
  EXPECT_EQ(sizes.size(), 16u);
  EXPECT_EQ(*sizes.rbegin(), kDeskMaxSize);
  filter.full_sizes = true;
  EXPECT_EQ(select_specs(filter).size(), 19u * 9u * 2u * 2u);
}

TEST(Matrix, DeterministicAcrossRunsAndParallelism) {
  MatrixFilter filter;
  filter.sizes = {400, 2500};
  filter.distributions = {"bimodal", "uniform"};
  filter.repetitions = 2;
  std::ostringstream serial;
  std::ostringstream again;
  std::ostringstream parallel;
  run_matrix(filter, serial);
  run_matrix(filter, again);
  run_matrix(filter, parallel, MatrixOptions{4, {}});
  const auto a = deterministic_columns(parse_all(serial.str()));
  EXPECT_EQ(a, deterministic_columns(parse_all(again.str())));
  EXPECT_EQ(a, deterministic_columns(parse_all(parallel.str())));
}

TEST(Ranks, Fractional) {
  const std::vector<double> v = {5.0, 4.0};
  EXPECT_EQ(fractional_ranks(v, true), (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(fractional_ranks(v, false), (std::vector<double>{2.0, 1.0}));
  const std::vector<double> tied = {3.0, 1.0, 3.0, 3.0};
  EXPECT_EQ(fractional_ranks(tied, false), (std::vector<double>{3.0, 1.0, 3.0, 3.0}));
  EXPECT_EQ(fractional_ranks(tied, true), (std::vector<double>{2.0, 4.0, 2.0, 2.0}));
}

TEST(Summarize, MeritDescendingOthersAscending) {
  const std::vector<BenchRecord> records = {cell_record("EBST", 5.0, 100), cell_record("QO_std_div_2", 4.0, 7)};
  const auto s = summarize(records);
  EXPECT_EQ(find_entry(s, "merit", "EBST").mean_rank, 1.0);
  EXPECT_EQ(find_entry(s, "merit", "QO_std_div_2").mean_rank, 2.0);
  EXPECT_EQ(find_entry(s, "n_elements", "EBST").mean_rank, 2.0);
  EXPECT_EQ(find_entry(s, "n_elements", "QO_std_div_2").mean_rank, 1.0);
  // Equal times tie.
  EXPECT_EQ(find_entry(s, "observe_time_s", "EBST").mean_rank, 1.5);
  EXPECT_EQ(find_entry(s, "query_time_s", "QO_std_div_2").mean_rank, 1.5);
  for (const auto& e : s.entries) {
    EXPECT_GE(e.mean_rank, 1.0);
    EXPECT_LE(e.mean_rank, 2.0);
  }
}

TEST(Summarize, SeparatesCellsAndSizes) {
  std::vector<BenchRecord> records = {cell_record("EBST", 5.0, 100), cell_record("QO_std_div_2", 4.0, 7)};
  auto other = records;
  for (auto& r : other) {
    r.size = 100;
    r.merit = r.observer == "EBST" ? 1.0 : 2.0;
  }
  records.insert(records.end(), other.begin(), other.end());
  const auto s = summarize(records);
  EXPECT_EQ(find_entry(s, "merit", "EBST").mean_rank, 1.5);
  EXPECT_EQ(find_entry(s, "merit", "EBST").cells, 2u);
  for (const auto& e : s.entries) {
    if (e.metric == "merit" && e.observer == "EBST" && e.size == 100u) EXPECT_EQ(e.mean_rank, 2.0);
    if (e.metric == "merit" && e.observer == "EBST" && e.size == 50u) EXPECT_EQ(e.mean_rank, 1.0);
  }
}

TEST(Summarize, CsvRoundTripPreservesSummary) {
  MatrixFilter filter;
  filter.sizes = {200};
  filter.repetitions = 2;
  std::ostringstream csv;
  run_matrix(filter, csv);
  const auto records = parse_all(csv.str());
  std::ostringstream rewritten;
  rewritten << kResultsHeader << '\n';
  for (const auto& r : records) write_record(rewritten, r);
  EXPECT_EQ(summarize(parse_all(rewritten.str())), summarize(records));

  std::ostringstream table;
  print_summary_table(table, summarize(records));
  EXPECT_NE(table.str().find("QO_std_div_3"), std::string::npos);
  std::ostringstream summary_csv;
  write_summary_csv(summary_csv, summarize(records));
  EXPECT_EQ(summary_csv.str().rfind("metric,observer,size,mean_rank,cells\n", 0), 0u);
}
