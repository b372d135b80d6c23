#include "quantobs/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "quantobs/errors.hpp"
#include "quantobs/number_format.hpp"

namespace quantobs {

namespace {

// Boost.Random's engines and distributions are specified algorithms, unlike
// the <random> distributions, so samples are identical across platforms.
using Engine = boost::random::mt19937_64;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double draw_normal(Engine& engine, const Normal& n) {
  return boost::random::normal_distribution<double>(n.mu, n.sigma)(engine);
}

double draw_x(Engine& engine, const Distribution& d) {
  return std::visit(overloaded{
                        [&](const Uniform& u) {
                          return boost::random::uniform_real_distribution<double>(u.lo, u.hi)(engine);
                        },
                        [&](const Normal& n) { return draw_normal(engine, n); },
                        [&](const Bimodal& b) {
                          const bool first = boost::random::bernoulli_distribution<double>(0.5)(engine);
                          return draw_normal(engine, first ? b.first : b.second);
                        },
                    },
                    d);
}

double dispersion_scale(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Uniform& u) { return (u.hi - u.lo) / 2.0; },
                        [](const Normal& n) { return n.sigma; },
                        [](const Bimodal& b) { return std::max(b.first.sigma, b.second.sigma); },
                    },
                    d);
}

void validate_normal(const Normal& n) {
  if (!std::isfinite(n.mu) || !std::isfinite(n.sigma) || !(n.sigma > 0.0)) {
    throw ConfigError("normal distribution needs finite mu and sigma > 0");
  }
}

}  // namespace

std::string family_name(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const Normal&) { return std::string("normal"); },
                        [](const Bimodal&) { return std::string("bimodal"); },
                    },
                    d);
}

std::string params_string(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Uniform& u) { return format_double(u.lo) + ";" + format_double(u.hi); },
                        [](const Normal& n) { return format_double(n.mu) + ";" + format_double(n.sigma); },
                        [](const Bimodal& b) {
                          return format_double(b.first.mu) + ";" + format_double(b.first.sigma) + ";" +
                                 format_double(b.second.mu) + ";" + format_double(b.second.sigma);
                        },
                    },
                    d);
}

std::string to_string(TargetFn fn) { return fn == TargetFn::lin ? "lin" : "cub"; }

TargetFn parse_target_fn(const std::string& s) {
  if (s == "lin") return TargetFn::lin;
  if (s == "cub") return TargetFn::cub;
  throw ConfigError("unknown target function '" + s + "' (expected lin or cub)");
}

double noise_sd(const Distribution& d) { return dispersion_scale(d) <= 0.1 ? 0.01 : 0.1; }

void validate(const SampleSpec& spec) {
  if (spec.size == 0) {
    throw ConfigError("sample size must be positive");
  }
  if (!(spec.noise_fraction >= 0.0 && spec.noise_fraction <= 1.0)) {
    throw ConfigError("noise fraction must lie in [0, 1]");
  }
  std::visit(overloaded{
                 [](const Uniform& u) {
                   if (!std::isfinite(u.lo) || !std::isfinite(u.hi) || !(u.lo < u.hi)) {
                     throw ConfigError("uniform distribution needs finite lo < hi");
                   }
                 },
                 [](const Normal& n) { validate_normal(n); },
                 [](const Bimodal& b) {
                   validate_normal(b.first);
                   validate_normal(b.second);
                 },
             },
             spec.distribution);
}

namespace {

Sample generate_impl(const SampleSpec& spec, const TargetCoefficients* forced) {
  validate(spec);
  Engine engine(spec.seed);

  // Coefficients are always drawn so the x stream does not depend on `forced`.
  boost::random::uniform_real_distribution<double> coefficient(-1.0, 1.0);
  TargetCoefficients drawn;
  for (double& a : drawn.a) {
    a = coefficient(engine);
  }
  if (spec.target_fn == TargetFn::lin) {
    drawn.a[2] = 0.0;
    drawn.a[3] = 0.0;
  }

  Sample sample;
  sample.coefficients = forced ? *forced : drawn;
  const TargetCoefficients& c = sample.coefficients;
  sample.x.resize(spec.size);
  sample.y.resize(spec.size);
  for (std::size_t i = 0; i < spec.size; ++i) {
    sample.x[i] = draw_x(engine, spec.distribution);
    sample.y[i] = c(sample.x[i]);
  }

  const auto n_noisy = static_cast<std::size_t>(std::llround(spec.noise_fraction * static_cast<double>(spec.size)));
  if (n_noisy > 0) {
    // Partial Fisher-Yates: the first n_noisy slots become a uniform subset.
    std::vector<std::size_t> order(spec.size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < n_noisy; ++i) {
      boost::random::uniform_int_distribution<std::size_t> pick(i, spec.size - 1);
      std::swap(order[i], order[pick(engine)]);
    }
    order.resize(n_noisy);
    std::sort(order.begin(), order.end());

    const Normal noise{0.0, noise_sd(spec.distribution)};
    for (std::size_t i : order) {
      sample.x[i] += draw_normal(engine, noise);
    }
    sample.noisy = std::move(order);
  }
  return sample;
}

}  // namespace

Sample generate_sample(const SampleSpec& spec) { return generate_impl(spec, nullptr); }

Sample generate_sample(const SampleSpec& spec, const TargetCoefficients& coefficients) {
  return generate_impl(spec, &coefficients);
}

std::vector<Distribution> table1_distributions() {
  return {
      Uniform{-1.0, 1.0},
      Uniform{-0.1, 0.1},
      Uniform{-7.0, 7.0},
      Normal{0.0, 1.0},
      Normal{0.0, 0.1},
      Normal{0.0, 7.0},
      Bimodal{{-1.0, 1.0}, {1.0, 1.0}},
      Bimodal{{-0.1, 0.1}, {0.1, 0.1}},
      Bimodal{{-7.0, 7.0}, {7.0, 0.1}},
  };
}

std::uint64_t cell_seed(std::uint64_t base_seed, unsigned repetition, std::size_t distribution_index,
                        TargetFn fn, std::size_t noise_index, std::size_t size) {
  std::uint64_t h = splitmix64(base_seed);
  for (std::uint64_t part : {std::uint64_t{repetition}, std::uint64_t{distribution_index},
                             std::uint64_t{fn == TargetFn::lin ? 0u : 1u}, std::uint64_t{noise_index},
                             std::uint64_t{size}}) {
    h = splitmix64(h ^ part);
  }
  return h;
}

std::vector<SampleSpec> table1_matrix(std::uint64_t base_seed, unsigned repetitions) {
  const auto distributions = table1_distributions();
  std::vector<SampleSpec> specs;
  specs.reserve(kTable1Sizes.size() * distributions.size() * 2 * kTable1NoiseFractions.size() * repetitions);
  for (std::size_t size : kTable1Sizes) {
    for (std::size_t d = 0; d < distributions.size(); ++d) {
      for (TargetFn fn : {TargetFn::lin, TargetFn::cub}) {
        for (std::size_t k = 0; k < kTable1NoiseFractions.size(); ++k) {
          for (unsigned rep = 0; rep < repetitions; ++rep) {
            specs.push_back({size, distributions[d], fn, kTable1NoiseFractions[k],
                             cell_seed(base_seed, rep, d, fn, k, size), rep});
          }
        }
      }
    }
  }
  return specs;
}

void write_sample_csv(std::ostream& out, const Sample& sample) {
  out << "x,y\n";
  for (std::size_t i = 0; i < sample.x.size(); ++i) {
    out << format_double(sample.x[i]) << ',' << format_double(sample.y[i]) << '\n';
  }
}

}  // namespace quantobs
