#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace dosefind {

/// Reproducible random stream identified by (master_seed, stream_id).
///
/// The generator is xoshiro256** seeded through SplitMix64 from a mix of
/// both identifiers, so any stream can be reconstructed without replaying
/// other streams. All variates are produced by code in this library (no
/// <random> distributions), which keeps sequences identical across standard
/// library implementations.
///
/// A stream is single-owner; concurrent replicates each construct their own.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape);

  /// Binomial(trials, p) as a sum of Bernoulli draws; trials is a cohort size.
  int binomial(int trials, double p);

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> s_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a hash of a label, used to derive stream ids from names.
std::uint64_t hash_label(std::string_view label);

/// Stream id for one cell replicate. Depends only on its own arguments, so
/// adding designs or scenarios never perturbs other cells.
std::uint64_t replicate_stream_id(std::string_view design,
                                  std::string_view scenario,
                                  std::uint64_t replicate);

}  // namespace dosefind
