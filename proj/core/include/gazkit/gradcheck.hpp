#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gazkit {

struct BlockError {
  std::string block;
  double max_relative_error = 0.0;
  std::size_t entries_checked = 0;
};

struct GradCheckReport {
  std::vector<BlockError> blocks;
  double max_relative_error() const;
};

// |a - n| / max(|a|, |n|, floor); the floor keeps entries whose true
// gradient is ~0 from dividing noise by noise.
double relative_error(double analytic, double numeric, double floor = 1e-7);

// Central differences for one random gazetteer-embedding instance: loss is
// a random linear functional of g, checked over touched G rows, used S rows,
// W and b.
GradCheckReport check_gaz_embedding_gradients(std::uint64_t seed, std::size_t dim, std::size_t matches,
                                              bool span_encoding = true, bool self_attention = true,
                                              double step = 1e-5);

// Central differences of the full tagger CRF loss over every parameter of a
// tiny model on a 3-token sentence.
GradCheckReport check_tagger_gradients(std::uint64_t seed, double step = 1e-5);

}  // namespace gazkit
