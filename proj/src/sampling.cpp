#include "covshift/sampling.hpp"

#include "covshift/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>

namespace covshift {

bool in_odd_quadrant(double first, double second) noexcept {
  return (first > 0.0 && second > 0.0) || (first < 0.0 && second < 0.0);
}

std::vector<std::size_t> bias_sample_rows(const Dataset& data, double reduction_factor,
                                          std::uint64_t seed) {
  if (data.dim() < 2) throw std::invalid_argument("bias_sample needs at least two columns");
  if (!(reduction_factor >= 1.0))
    throw std::invalid_argument(fmt::format("reduction factor {} must be >= 1", reduction_factor));

  Rng rng = make_rng({seed});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep_probability = 1.0 / reduction_factor;
  const auto& x = data.features();

  std::vector<std::size_t> kept;
  kept.reserve(data.size());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    if (!in_odd_quadrant(x(r, 0), x(r, 1)) || unit(rng) < keep_probability)
      kept.push_back(static_cast<std::size_t>(r));
  }
  return kept;
}

Dataset bias_sample(const Dataset& data, double reduction_factor, std::uint64_t seed) {
  const auto rows = bias_sample_rows(data, reduction_factor, seed);
  if (rows.empty()) throw EmptyClassError(-1, "bias_sample removed every row");
  Dataset out = data.subset(rows);
  if (out.labeled()) {
    const auto counts = out.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c)
      if (counts[c] == 0)
        throw EmptyClassError(static_cast<int>(c),
                              fmt::format("bias_sample removed every row of class {}", c));
  }
  return out;
}

const char* to_string(TrainMode mode) noexcept {
  return mode == TrainMode::Half ? "half" : "minimal";
}

TrainMode parse_train_mode(const std::string& text) {
  if (text == "half") return TrainMode::Half;
  if (text == "minimal") return TrainMode::Minimal;
  throw std::invalid_argument("unknown train mode '" + text + "' (expected half or minimal)");
}

Split make_splits(const Dataset& source, const Dataset& target, const SplitSpec& spec) {
  if (!source.labeled() || !target.labeled())
    throw std::invalid_argument("make_splits needs labeled source and target");
  if (source.dim() != target.dim())
    throw std::invalid_argument(fmt::format("source has {} columns, target {}", source.dim(), target.dim()));

  Rng rng = make_rng({spec.seed, spec.repetition, static_cast<std::uint64_t>(spec.train_mode)});

  const auto d = source.dim();
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(source.num_classes()));
  for (std::size_t i = 0; i < source.size(); ++i)
    by_class[static_cast<std::size_t>(source.labels()[i])].push_back(i);

  std::vector<std::size_t> train_rows;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    std::size_t take = members.size() / 2;
    if (spec.train_mode == TrainMode::Minimal) {
      if (members.size() < d + 1)
        throw InsufficientClassError(fmt::format("class {} has {} rows; minimal mode needs {}", c,
                                                 members.size(), d + 1));
      take = d + 1;
    }
    std::shuffle(members.begin(), members.end(), rng);
    train_rows.insert(train_rows.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(train_rows.begin(), train_rows.end());

  std::vector<std::size_t> candidates(target.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(target.size() / 2);

  // Exclude target rows that coincide with any training feature vector.
  auto as_vector = [](const Eigen::MatrixXd& x, std::size_t r) {
    const Eigen::RowVectorXd row = x.row(static_cast<Eigen::Index>(r));
    return std::vector<double>(row.data(), row.data() + row.size());
  };
  std::set<std::vector<double>> train_points;
  for (std::size_t r : train_rows) train_points.insert(as_vector(source.features(), r));

  std::vector<std::size_t> test_rows;
  for (std::size_t r : candidates)
    if (!train_points.contains(as_vector(target.features(), r))) test_rows.push_back(r);
  std::sort(test_rows.begin(), test_rows.end());
  if (test_rows.empty()) throw SplitError("test set is empty after removing training rows");

  return Split{source.subset(train_rows), target.subset(test_rows), std::move(train_rows),
               std::move(test_rows)};
}

}  // namespace covshift
