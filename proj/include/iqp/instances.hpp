#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>

#include "iqp/model.hpp"

namespace iqp {

enum class Family { DenseSpectrum, Sparse, LowRank };
enum class DomainKind { Ternary, IntegerBox, Custom };
enum class ConstraintKind { None, SumNonpositive, Knapsack };

struct GenSpec {
  int n = 10;
  Family family = Family::DenseSpectrum;
  int p = 50;  // percent: negative eigenvalues / density / negative share
  double zero_fraction = 0.5;  // LowRank only
  DomainKind domain = DomainKind::Ternary;
  std::int64_t lo = -10, hi = 10;  // IntegerBox / Custom bounds
  ConstraintKind constraint = ConstraintKind::None;
  std::uint64_t seed = 0;
};

/// Deterministic instance generation: the same spec always produces the
/// same instance, independent of platform.
IqpInstance generate(const GenSpec& spec);

struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& what, int line_number)
      : std::runtime_error(what + " (line " + std::to_string(line_number) +
                           ")"),
        line(line_number) {}
};

std::string format_instance(const IqpInstance& inst);
IqpInstance parse_instance(const std::string& text);
void write_instance(const IqpInstance& inst, const std::string& path);
IqpInstance read_instance(const std::string& path);

namespace detail {
// Platform-independent draws on top of mt19937_64.
double uniform01(std::mt19937_64& rng);               // [0, 1)
double uniform(std::mt19937_64& rng, double a, double b);
std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo,
                         std::int64_t hi);            // inclusive
double gaussian(std::mt19937_64& rng);                // Box-Muller
}  // namespace detail

}  // namespace iqp
