#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmt/error.hpp"

namespace mmt {

// Reserved vocabulary slots, fixed for every vocabulary.
inline constexpr int kPadId = 0;
inline constexpr int kBosId = 1;
inline constexpr int kEosId = 2;
inline constexpr int kUnkId = 3;
inline constexpr int kReservedTokens = 4;

// Lowercase, strip ASCII punctuation, split on whitespace runs.
std::vector<std::string> tokenize(const std::string& line);

class Vocabulary {
 public:
  explicit Vocabulary(int max_size = 10000);

  // Keeps the `max_size` most frequent tokens; ties break by first occurrence.
  static Vocabulary build(const std::vector<std::vector<std::string>>& corpus, int max_size);

  int encode(const std::string& token) const;  // UNK for out-of-vocabulary
  std::vector<int> encode(const std::vector<std::string>& tokens) const;
  const std::string& token(int id) const;
  std::vector<std::string> decode(const std::vector<int>& ids) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  int max_size() const { return max_size_; }
  bool contains(const std::string& token) const { return index_.count(token) > 0; }

  // One token per line, line i (0-based) holding the token with index i+4.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path, int max_size = 10000);

 private:
  int add(const std::string& token);
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> tokens_;
  int max_size_;
};

struct ParallelExample {
  std::vector<int> source_ids;  // no BOS/EOS
  std::vector<int> target_ids;  // no BOS/EOS
  std::string image_id;
};

struct FeatureMap {
  std::string image_id;
  int regions = 0;
  int channels = 0;
  std::vector<double> values;  // regions x channels, row-major

  double at(int r, int c) const { return values[static_cast<size_t>(r) * channels + c]; }
  double& at(int r, int c) { return values[static_cast<size_t>(r) * channels + c]; }
};

FeatureMap zero_features(const std::string& image_id, int regions, int channels);

// MMFEAT container: text header "MMFEAT <R> <C> <count>\n", then per image a
// 16-byte zero-padded ASCII id followed by R*C little-endian float32 values.
class FeatureStore {
 public:
  FeatureStore() = default;
  FeatureStore(int regions, int channels) : regions_(regions), channels_(channels) {}

  int regions() const { return regions_; }
  int channels() const { return channels_; }
  int count() const { return static_cast<int>(order_.size()); }
  bool has(const std::string& id) const { return maps_.count(id) > 0; }
  const FeatureMap& get(const std::string& id) const;
  void put(FeatureMap fm);
  const std::vector<std::string>& ids() const { return order_; }

  void save(const std::string& path) const;
  static FeatureStore load(const std::string& path);

  // Same ids and shape, every value zero; the text-only ablation input.
  FeatureStore zeroed() const;

 private:
  int regions_ = 0;
  int channels_ = 0;
  std::vector<std::string> order_;
  std::unordered_map<std::string, FeatureMap> maps_;
};

struct PairLimits {
  int min_len = 3;
  int max_len = 50;
  int max_ratio = 3;
};

bool pair_within_limits(int n, int m, const PairLimits& limits = {});
std::vector<ParallelExample> filter_pairs(const std::vector<ParallelExample>& candidates,
                                          const PairLimits& limits = {});

// One training minibatch. Targets are stored as BOS <ids> EOS, then padded;
// masks mark exactly the non-PAD cells. Losses and attention must skip PAD.
struct Batch {
  std::vector<std::vector<int>> src;       // B x Nmax
  std::vector<std::vector<int>> src_mask;  // 0/1
  std::vector<std::vector<int>> tgt;       // B x (Mmax+2), BOS ... EOS
  std::vector<std::vector<int>> tgt_mask;  // 0/1
  std::vector<std::string> image_ids;

  int size() const { return static_cast<int>(src.size()); }
  std::vector<int> source_of(int i) const;  // unpadded, no BOS/EOS
  std::vector<int> target_of(int i) const;  // unpadded, no BOS/EOS
};

// Shuffle with the given seed and slice into batches of `batch_size`; the
// last batch may be smaller. Identical seed, identical stream.
std::vector<Batch> batch_iter(const std::vector<ParallelExample>& dataset, int batch_size,
                              uint64_t shuffle_seed);

struct Dataset {
  std::vector<ParallelExample> examples;
  FeatureStore features;
  Vocabulary src_vocab{10000};
  Vocabulary tgt_vocab{10000};
};

// Text-file ingestion: aligned source/target/image-id files, one item per line.
struct RawCorpus {
  std::vector<std::vector<std::string>> src_tokens;
  std::vector<std::vector<std::string>> tgt_tokens;
  std::vector<std::string> image_ids;
};
RawCorpus read_parallel_files(const std::string& src_path, const std::string& tgt_path,
                              const std::string& ids_path);
std::vector<std::string> read_lines(const std::string& path);

}  // namespace mmt
