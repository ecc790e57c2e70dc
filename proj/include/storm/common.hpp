#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace storm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Interpolation or regression system too ill-conditioned to solve.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (LIBSVM data, CSV tables, config files).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Seeded random stream with a draw counter.
///
/// Wraps SplitMix64-seeded xoshiro256** so sequences are identical across
/// platforms and standard-library implementations. Every primitive draw
/// (one 64-bit word) increments draws().
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi].
  double uniform(double lo, double hi);
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  /// Independent child stream; does not advance this stream.
  Rng derive(std::uint64_t stream) const;

  std::uint64_t draws() const { return draws_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t draws_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace storm
