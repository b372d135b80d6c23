#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace quantobs {

struct Uniform {
  double lo;
  double hi;
};
struct Normal {
  double mu;
  double sigma;
};
// Equal-probability mixture of two normals.
struct Bimodal {
  Normal first;
  Normal second;
};
using Distribution = std::variant<Uniform, Normal, Bimodal>;

enum class TargetFn { lin, cub };

struct SampleSpec {
  std::size_t size = 0;
  Distribution distribution = Normal{0.0, 1.0};
  TargetFn target_fn = TargetFn::lin;
  double noise_fraction = 0.0;
  std::uint64_t seed = 0;
  unsigned repetition = 0;
};

// y = a3 x^3 + a2 x^2 + a1 x + a0 (a2 = a3 = 0 for lin).
struct TargetCoefficients {
  std::array<double, 4> a{};

  [[nodiscard]] double operator()(double x) const noexcept {
    return ((a[3] * x + a[2]) * x + a[1]) * x + a[0];
  }
};

struct Sample {
  std::vector<double> x;
  std::vector<double> y;
  TargetCoefficients coefficients;
  std::vector<std::size_t> noisy;  // indices whose x was perturbed, ascending
};

[[nodiscard]] std::string family_name(const Distribution& d);
// Parameters as "a;b[;c;d]" using shortest round-trip formatting.
[[nodiscard]] std::string params_string(const Distribution& d);
[[nodiscard]] std::string to_string(TargetFn fn);
[[nodiscard]] TargetFn parse_target_fn(const std::string& s);

// Sd of the additive input noise: 0.01 for the low-dispersion settings
// (scale <= 0.1), 0.1 otherwise.
[[nodiscard]] double noise_sd(const Distribution& d);

// Throws ConfigError on an invalid spec (size 0, sigma <= 0, lo >= hi,
// noise fraction outside [0, 1]).
void validate(const SampleSpec& spec);

// Draws coefficients (uniform on [-1, 1]), then x, computes y, then perturbs
// round(noise_fraction * size) randomly chosen x values. Pure function of spec.
[[nodiscard]] Sample generate_sample(const SampleSpec& spec);

// Same, but with caller-fixed coefficients (used for forced-identity checks).
[[nodiscard]] Sample generate_sample(const SampleSpec& spec, const TargetCoefficients& coefficients);

inline constexpr std::array<std::size_t, 19> kTable1Sizes = {
    50,    100,   200,   400,   500,    750,    1000,   2500,   5000,   7000,
    10000, 15000, 25000, 50000, 75000, 100000, 200000, 500000, 1000000};

[[nodiscard]] std::vector<Distribution> table1_distributions();

inline constexpr std::array<double, 2> kTable1NoiseFractions = {0.0, 0.10};
inline constexpr unsigned kTable1Repetitions = 10;
inline constexpr std::uint64_t kDefaultBaseSeed = 20220501;

// Seed for one matrix cell: SplitMix64-mixed from the base seed and the
// cell's factor indices, so every cell draws an independent stream.
[[nodiscard]] std::uint64_t cell_seed(std::uint64_t base_seed, unsigned repetition,
                                      std::size_t distribution_index, TargetFn fn,
                                      std::size_t noise_index, std::size_t size);

// Full factorial: sizes x distributions x target fns x noise x repetitions.
[[nodiscard]] std::vector<SampleSpec> table1_matrix(std::uint64_t base_seed = kDefaultBaseSeed,
                                                    unsigned repetitions = kTable1Repetitions);

// Two-column "x,y" CSV with header row.
void write_sample_csv(std::ostream& out, const Sample& sample);

}  // namespace quantobs
