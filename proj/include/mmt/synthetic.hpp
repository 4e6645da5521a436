#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmt/corpus.hpp"

namespace mmt {

// Generator for a grounded toy corpus. Every pair carries L "content" tokens
// that map one-to-one from source to target, plus K attribute tokens appended
// to the target that the source never mentions: attribute slot j writes the
// identity of its attribute as a channel spike into a dedicated block of
// feature-map regions, so those target positions are predictable from the
// image alone.
struct SyntheticSpec {
  int train_pairs = 500;
  int heldout_pairs = 100;
  int content_vocab = 20;
  int num_attributes = 5;
  int attrs_per_example = 2;  // K
  int min_content = 3;
  int max_content = 6;
  int regions = 16;
  int channels = 8;
  double signal = 2.0;
  double noise = 0.05;
  uint64_t seed = 1;
};

struct SyntheticData {
  Dataset train;
  Dataset heldout;  // shares the train vocabularies
  SyntheticSpec spec;
  std::vector<int> attr_token_ids;  // target-vocabulary ids of the attribute tokens

  // Attribute tokens occupy the last K positions of every target.
  int attr_positions(const ParallelExample& ex, std::vector<int>* positions) const;
};

SyntheticData make_synthetic(const SyntheticSpec& spec);

// Materialize the corpus as the toolkit's on-disk formats:
// {train,heldout}.{src,tgt,ids} text files plus features.mmf.
void write_synthetic_files(const SyntheticData& data, const std::string& dir);

}  // namespace mmt
