#pragma once

#include <optional>

#include "iqp/model.hpp"

namespace iqp::oracle {

struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnumerationResult {
  double value;
  std::vector<std::int64_t> x;
};

/// Exhaustive minimum over all feasible integer points. Throws TooLarge
/// when the search space exceeds the cap. Returns nullopt when no point
/// satisfies the linear constraints.
std::optional<EnumerationResult> enumerate_optimum(
    const IqpInstance& inst, std::int64_t cap = 10'000'000);

/// <b,y> + sigma * log det(Q - A^T y), computed densely.
double dense_barrier_value(const SdpRelaxation& rel, const Vector& y,
                           double sigma);

/// b - sigma * A((Q - A^T y)^{-1}), computed densely with full contractions.
Vector dense_barrier_gradient(const SdpRelaxation& rel, const Vector& y,
                              double sigma);

}  // namespace iqp::oracle
