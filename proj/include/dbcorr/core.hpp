// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Instance parameters, permutations, cycle types and the seed contract.

#ifndef DBCORR_CORE_HPP_
#define DBCORR_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dbcorr {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Rng = std::mt19937_64;

struct ProblemParams {
  std::uint64_t n = 1;
  std::uint64_t d = 1;
  double rho = 0.0;

  ProblemParams() = default;
  // Requires n, d >= 1 and |rho| < 1. rho = 0 is allowed (null model).
  ProblemParams(std::uint64_t n, std::uint64_t d, double rho);

  // Same checks, and additionally rejects rho = 0.
  static ProblemParams alternate(std::uint64_t n, std::uint64_t d, double rho);

  double rho2() const { return rho * rho; }
  int rho_sign() const { return rho < 0.0 ? -1 : 1; }

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;
};

// Mixes (master_seed, label, index) into a 64-bit trial seed. Pure: no
// dependence on call order or thread.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label,
                          std::uint64_t index);

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::string stream_label;

  std::uint64_t trial_seed(std::uint64_t trial_index) const {
    return derive_seed(master_seed, stream_label, trial_index);
  }
  SeedSpec child(std::string_view suffix) const {
    return {master_seed, stream_label + "/" + std::string(suffix)};
  }
};

class Permutation {
 public:
  Permutation() = default;
  // Throws ShapeError unless `map` is a bijection on {0, ..., n-1}.
  explicit Permutation(std::vector<std::size_t> map);

  static Permutation identity(std::size_t n);

  std::size_t size() const { return map_.size(); }
  std::size_t operator[](std::size_t i) const { return map_[i]; }
  const std::vector<std::size_t>& map() const { return map_; }
  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) {
    return a.map_ <=> b.map_;
  }

 private:
  std::vector<std::size_t> map_;
};

// Fisher-Yates over an mt19937_64 seeded with `seed`.
Permutation uniform_permutation(std::size_t n, std::uint64_t seed);
Permutation uniform_permutation(std::size_t n, Rng& rng);

// counts[k] = number of k-cycles. The vector is trimmed after the longest
// cycle, so count(k) must be used for arbitrary k.
struct CycleType {
  std::size_t n = 0;
  std::vector<std::uint32_t> counts;  // counts[0] is unused

  std::uint32_t count(std::size_t k) const {
    return k < counts.size() ? counts[k] : 0;
  }
  std::uint32_t fixed_points() const { return count(1); }

  friend bool operator==(const CycleType& a, const CycleType& b) {
    return a.n == b.n && a.counts == b.counts;
  }
  friend auto operator<=>(const CycleType& a, const CycleType& b) {
    return a.counts <=> b.counts;
  }
};

CycleType cycle_decompose(const Permutation& p);

// n! / prod_k (k^{N_k} N_k!).
BigInt cycle_type_count(const CycleType& t);

inline constexpr std::size_t kCycleTypeCap = 60;

// All partitions of n, largest parts first. Throws SizeError above `cap`.
std::vector<CycleType> enumerate_cycle_types(std::size_t n,
                                             std::size_t cap = kCycleTypeCap);
// Streaming variant in the same order; does not materialize the list.
void for_each_cycle_type(std::size_t n,
                         const std::function<void(const CycleType&)>& visit,
                         std::size_t cap = kCycleTypeCap);

BigInt factorial(std::size_t n);
BigInt derangement_count(std::size_t n);
// P[N_1 = k] for sigma uniform on S_n, i.e. C(n,k) !(n-k) / n!.
Rational prob_fixed_points(std::size_t n, std::size_t k);

}  // namespace dbcorr

#endif  // DBCORR_CORE_HPP_
