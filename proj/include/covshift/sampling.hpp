#pragma once

#include "covshift/dataset.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace covshift {

/// Thrown by bias_sample when thinning removed every row of some class.
/// Callers that can redraw should reseed and retry.
class EmptyClassError : public std::runtime_error {
 public:
  EmptyClassError(int class_id, const std::string& what)
      : std::runtime_error(what), class_id_(class_id) {}
  int class_id() const noexcept { return class_id_; }

 private:
  int class_id_;
};

/// True for rows whose first two coordinates are both > 0 or both < 0.
bool in_odd_quadrant(double first, double second) noexcept;

/// Retains each row lying in quadrant I or III of the first two coordinates
/// with probability 1/reduction_factor; every other row is kept. Row order is
/// preserved and the draw is a pure function of `seed`.
Dataset bias_sample(const Dataset& data, double reduction_factor, std::uint64_t seed);

/// Row indices bias_sample keeps (same draw, same seed).
std::vector<std::size_t> bias_sample_rows(const Dataset& data, double reduction_factor,
                                          std::uint64_t seed);

enum class TrainMode { Half, Minimal };

const char* to_string(TrainMode mode) noexcept;
TrainMode parse_train_mode(const std::string& text);

struct SplitSpec {
  std::uint64_t seed = 0;
  TrainMode train_mode = TrainMode::Half;
  std::uint64_t repetition = 0;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;  ///< indices into source, ascending
  std::vector<std::size_t> test_rows;   ///< indices into target, ascending
};

/// A split that cannot be drawn from the given data.
class SplitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when `minimal` mode finds a class with fewer than d+1 rows.
class InsufficientClassError : public SplitError {
 public:
  using SplitError::SplitError;
};

/// Train/test construction for one repetition.
///
/// half:    per class, a random floor(n_c/2) rows of the source.
/// minimal: per class, exactly d+1 random rows of the source.
/// The test set is a random half of the target with every row that equals a
/// training row (as a feature vector) removed.
Split make_splits(const Dataset& source, const Dataset& target, const SplitSpec& spec);

}  // namespace covshift
