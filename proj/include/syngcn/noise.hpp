#pragma once

#include <cstdint>
#include <vector>

#include "syngcn/rng.hpp"

namespace syngcn {

class Vocabulary;

// Negative-sampling noise distribution: P(w) proportional to count(w)^power
// over the real vocabulary (unk excluded). Sampling is a binary search over
// the cumulative table, so probabilities are exact.
class NoiseTable {
 public:
  NoiseTable() = default;
  NoiseTable(const Vocabulary& vocab, double power);

  uint32_t sample(Rng& rng) const;
  // Sample avoiding one forbidden id (the prediction target).
  uint32_t sample_excluding(Rng& rng, uint32_t forbidden) const;

  double probability(uint32_t word_id) const;
  size_t support_size() const { return ids_.size(); }

 private:
  std::vector<uint32_t> ids_;
  std::vector<double> cumulative_;
};

}  // namespace syngcn
