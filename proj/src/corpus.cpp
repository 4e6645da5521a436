#include "mmt/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

namespace mmt {

std::vector<std::string> tokenize(const std::string& line) {
  std::string cleaned;
  cleaned.reserve(line.size());
  for (unsigned char c : line) {
    if (std::ispunct(c)) continue;
    cleaned.push_back(static_cast<char>(std::tolower(c)));
  }
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : cleaned) {
    if (std::isspace(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(c));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

Vocabulary::Vocabulary(int max_size) : max_size_(max_size) {
  if (max_size < 1) throw ContractError("vocabulary max_size must be >= 1");
  tokens_ = {"<pad>", "<bos>", "<eos>", "<unk>"};
  for (int i = 0; i < kReservedTokens; ++i) index_[tokens_[i]] = i;
}

int Vocabulary::add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  if (size() >= max_size_ + kReservedTokens) {
    throw ContractError("vocabulary full: cannot add '" + token + "'");
  }
  const int id = size();
  index_[token] = id;
  tokens_.push_back(token);
  return id;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus, int max_size) {
  struct Entry {
    long count = 0;
    long first = 0;
  };
  std::unordered_map<std::string, Entry> freq;
  long position = 0;
  for (const auto& sent : corpus) {
    for (const auto& tok : sent) {
      auto [it, inserted] = freq.try_emplace(tok);
      if (inserted) it->second.first = position;
      it->second.count++;
      ++position;
    }
  }
  std::vector<std::pair<std::string, Entry>> entries(freq.begin(), freq.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first < b.second.first;
  });
  Vocabulary vocab(max_size);
  for (const auto& [tok, e] : entries) {
    if (vocab.size() >= max_size + kReservedTokens) break;
    vocab.add(tok);
  }
  return vocab;
}

int Vocabulary::encode(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

std::vector<int> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(encode(t));
  return ids;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw ContractError("token id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

std::vector<std::string> Vocabulary::decode(const std::vector<int>& ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int id : ids) tokens.push_back(token(id));
  return tokens;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ContractError("cannot write vocabulary file " + path);
  for (int i = kReservedTokens; i < size(); ++i) out << tokens_[i] << "\n";
}

Vocabulary Vocabulary::load(const std::string& path, int max_size) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot read vocabulary file " + path);
  Vocabulary vocab(max_size);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) vocab.add(line);
  }
  return vocab;
}

FeatureMap zero_features(const std::string& image_id, int regions, int channels) {
  FeatureMap fm;
  fm.image_id = image_id;
  fm.regions = regions;
  fm.channels = channels;
  fm.values.assign(static_cast<size_t>(regions) * channels, 0.0);
  return fm;
}

const FeatureMap& FeatureStore::get(const std::string& id) const {
  auto it = maps_.find(id);
  if (it == maps_.end()) throw ContractError("no feature map for image id '" + id + "'");
  return it->second;
}

void FeatureStore::put(FeatureMap fm) {
  if (regions_ == 0 && channels_ == 0) {
    regions_ = fm.regions;
    channels_ = fm.channels;
  }
  if (fm.regions != regions_ || fm.channels != channels_) {
    throw DimError("feature map " + fm.image_id + " is " + std::to_string(fm.regions) + "x" +
                   std::to_string(fm.channels) + ", store holds " + std::to_string(regions_) +
                   "x" + std::to_string(channels_));
  }
  if (static_cast<int>(fm.values.size()) != regions_ * channels_) {
    throw DimError("feature map " + fm.image_id + " has wrong value count");
  }
  if (!maps_.count(fm.image_id)) order_.push_back(fm.image_id);
  maps_[fm.image_id] = std::move(fm);
}

namespace {
constexpr size_t kImageIdBytes = 16;
}

void FeatureStore::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot write feature file " + path);
  out << "MMFEAT " << regions_ << " " << channels_ << " " << count() << "\n";
  for (const auto& id : order_) {
    if (id.size() > kImageIdBytes) {
      throw ContractError("image id '" + id + "' longer than 16 bytes");
    }
    char buf[kImageIdBytes] = {0};
    std::memcpy(buf, id.data(), id.size());
    out.write(buf, kImageIdBytes);
    const FeatureMap& fm = maps_.at(id);
    for (double v : fm.values) {
      const float f = static_cast<float>(v);
      out.write(reinterpret_cast<const char*>(&f), sizeof(float));
    }
  }
}

FeatureStore FeatureStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot read feature file " + path);
  std::string magic;
  int r = 0, c = 0, n = 0;
  in >> magic >> r >> c >> n;
  if (magic != "MMFEAT" || r <= 0 || c <= 0 || n < 0) {
    throw ContractError("malformed MMFEAT header in " + path);
  }
  in.ignore(1);  // newline after header
  FeatureStore store(r, c);
  for (int i = 0; i < n; ++i) {
    char buf[kImageIdBytes];
    in.read(buf, kImageIdBytes);
    if (!in) throw ContractError("truncated MMFEAT file " + path);
    size_t len = 0;
    while (len < kImageIdBytes && buf[len] != '\0') ++len;
    FeatureMap fm;
    fm.image_id.assign(buf, len);
    fm.regions = r;
    fm.channels = c;
    fm.values.resize(static_cast<size_t>(r) * c);
    for (auto& v : fm.values) {
      float f = 0.0f;
      in.read(reinterpret_cast<char*>(&f), sizeof(float));
      v = static_cast<double>(f);
    }
    if (!in) throw ContractError("truncated MMFEAT file " + path);
    store.put(std::move(fm));
  }
  return store;
}

FeatureStore FeatureStore::zeroed() const {
  FeatureStore out(regions_, channels_);
  for (const auto& id : order_) out.put(zero_features(id, regions_, channels_));
  return out;
}

bool pair_within_limits(int n, int m, const PairLimits& limits) {
  if (n < limits.min_len || n > limits.max_len) return false;
  if (m < limits.min_len || m > limits.max_len) return false;
  const int hi = std::max(n, m);
  const int lo = std::min(n, m);
  return hi <= limits.max_ratio * lo;
}

std::vector<ParallelExample> filter_pairs(const std::vector<ParallelExample>& candidates,
                                          const PairLimits& limits) {
  std::vector<ParallelExample> kept;
  for (const auto& ex : candidates) {
    if (pair_within_limits(static_cast<int>(ex.source_ids.size()),
                           static_cast<int>(ex.target_ids.size()), limits)) {
      kept.push_back(ex);
    }
  }
  return kept;
}

std::vector<int> Batch::source_of(int i) const {
  std::vector<int> out;
  for (size_t j = 0; j < src[i].size(); ++j) {
    if (src_mask[i][j]) out.push_back(src[i][j]);
  }
  return out;
}

std::vector<int> Batch::target_of(int i) const {
  std::vector<int> out;
  for (size_t j = 0; j < tgt[i].size(); ++j) {
    if (tgt_mask[i][j] && tgt[i][j] != kBosId && tgt[i][j] != kEosId) out.push_back(tgt[i][j]);
  }
  return out;
}

std::vector<Batch> batch_iter(const std::vector<ParallelExample>& dataset, int batch_size,
                              uint64_t shuffle_seed) {
  if (batch_size < 1) throw ContractError("batch_size must be >= 1");
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(shuffle_seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Batch> batches;
  for (size_t start = 0; start < order.size(); start += batch_size) {
    const size_t end = std::min(order.size(), start + batch_size);
    Batch b;
    size_t max_src = 0, max_tgt = 0;
    for (size_t i = start; i < end; ++i) {
      max_src = std::max(max_src, dataset[order[i]].source_ids.size());
      max_tgt = std::max(max_tgt, dataset[order[i]].target_ids.size() + 2);
    }
    for (size_t i = start; i < end; ++i) {
      const ParallelExample& ex = dataset[order[i]];
      std::vector<int> s(max_src, kPadId), sm(max_src, 0);
      for (size_t j = 0; j < ex.source_ids.size(); ++j) {
        s[j] = ex.source_ids[j];
        sm[j] = 1;
      }
      std::vector<int> t(max_tgt, kPadId), tm(max_tgt, 0);
      t[0] = kBosId;
      tm[0] = 1;
      for (size_t j = 0; j < ex.target_ids.size(); ++j) {
        t[j + 1] = ex.target_ids[j];
        tm[j + 1] = 1;
      }
      t[ex.target_ids.size() + 1] = kEosId;
      tm[ex.target_ids.size() + 1] = 1;
      b.src.push_back(std::move(s));
      b.src_mask.push_back(std::move(sm));
      b.tgt.push_back(std::move(t));
      b.tgt_mask.push_back(std::move(tm));
      b.image_ids.push_back(ex.image_id);
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot read file " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

RawCorpus read_parallel_files(const std::string& src_path, const std::string& tgt_path,
                              const std::string& ids_path) {
  const auto src_lines = read_lines(src_path);
  const auto tgt_lines = read_lines(tgt_path);
  const auto id_lines = read_lines(ids_path);
  if (src_lines.size() != tgt_lines.size() || src_lines.size() != id_lines.size()) {
    throw ContractError("parallel files differ in line count: " + std::to_string(src_lines.size()) +
                        " / " + std::to_string(tgt_lines.size()) + " / " +
                        std::to_string(id_lines.size()));
  }
  RawCorpus raw;
  for (size_t i = 0; i < src_lines.size(); ++i) {
    raw.src_tokens.push_back(tokenize(src_lines[i]));
    raw.tgt_tokens.push_back(tokenize(tgt_lines[i]));
    raw.image_ids.push_back(id_lines[i]);
  }
  return raw;
}

}  // namespace mmt
