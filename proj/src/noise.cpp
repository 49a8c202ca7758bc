#include "syngcn/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "syngcn/common.hpp"
#include "syngcn/vocab.hpp"

namespace syngcn {

NoiseTable::NoiseTable(const Vocabulary& vocab, double power) {
  double total = 0.0;
  for (uint32_t id = 0; id < vocab.size(); ++id) {
    if (vocab.has_unk() && id == vocab.unk_id()) continue;
    const double mass = std::pow(static_cast<double>(vocab.count(id)), power);
    if (mass <= 0.0) continue;
    ids_.push_back(id);
    total += mass;
    cumulative_.push_back(total);
  }
  if (ids_.empty())
    throw DataError("noise distribution is empty: no word has positive count");
  for (double& c : cumulative_) c /= total;
  cumulative_.back() = 1.0;  // guard against rounding at the top end
}

uint32_t NoiseTable::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const size_t slot = std::min<size_t>(it - cumulative_.begin(),
                                       ids_.size() - 1);
  return ids_[slot];
}

uint32_t NoiseTable::sample_excluding(Rng& rng, uint32_t forbidden) const {
  if (ids_.size() == 1 && ids_[0] == forbidden)
    throw std::logic_error(
        "cannot sample a negative: the target is the only word with mass");
  for (;;) {
    const uint32_t id = sample(rng);
    if (id != forbidden) return id;
  }
}

double NoiseTable::probability(uint32_t word_id) const {
  for (size_t i = 0; i < ids_.size(); ++i)
    if (ids_[i] == word_id)
      return cumulative_[i] - (i ? cumulative_[i - 1] : 0.0);
  return 0.0;
}

}  // namespace syngcn
