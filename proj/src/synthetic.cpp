#include "mmt/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <random>

namespace mmt {

namespace {

struct RawPair {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  std::string image_id;
};

RawPair draw_pair(const SyntheticSpec& spec, std::mt19937_64& rng, int index,
                  std::vector<int>* attrs_out) {
  std::uniform_int_distribution<int> content_len(spec.min_content, spec.max_content);
  std::uniform_int_distribution<int> content_id(0, spec.content_vocab - 1);
  std::uniform_int_distribution<int> attr_id(0, spec.num_attributes - 1);

  RawPair pair;
  const int len = content_len(rng);
  for (int i = 0; i < len; ++i) {
    const int c = content_id(rng);
    pair.src.push_back("src" + std::to_string(c));
    pair.tgt.push_back("tgt" + std::to_string(c));
  }
  attrs_out->clear();
  for (int j = 0; j < spec.attrs_per_example; ++j) {
    const int p = attr_id(rng);
    attrs_out->push_back(p);
    pair.tgt.push_back("attr" + std::to_string(p));
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "img%06d", index);
  pair.image_id = buf;
  return pair;
}

FeatureMap draw_features(const SyntheticSpec& spec, std::mt19937_64& rng,
                         const std::string& image_id, const std::vector<int>& attrs) {
  std::normal_distribution<double> bg(0.0, spec.noise);
  FeatureMap fm = zero_features(image_id, spec.regions, spec.channels);
  for (auto& v : fm.values) v = bg(rng);
  const int block = spec.regions / spec.attrs_per_example;
  for (int j = 0; j < spec.attrs_per_example; ++j) {
    const int lo = j * block;
    const int hi = (j + 1 == spec.attrs_per_example) ? spec.regions : lo + block;
    for (int r = lo; r < hi; ++r) fm.at(r, attrs[j]) += spec.signal;
  }
  return fm;
}

}  // namespace

int SyntheticData::attr_positions(const ParallelExample& ex, std::vector<int>* positions) const {
  positions->clear();
  const int m = static_cast<int>(ex.target_ids.size());
  for (int j = spec.attrs_per_example; j >= 1; --j) positions->push_back(m - j);
  return spec.attrs_per_example;
}

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  if (spec.num_attributes > spec.channels) {
    throw ContractError("synthetic corpus needs channels >= num_attributes");
  }
  if (spec.attrs_per_example < 1 || spec.attrs_per_example > spec.regions) {
    throw ContractError("attrs_per_example must be in [1, regions]");
  }
  std::mt19937_64 rng(spec.seed);

  std::vector<RawPair> raw_train, raw_heldout;
  std::vector<std::vector<int>> attrs_train, attrs_heldout;
  std::vector<int> attrs;
  for (int i = 0; i < spec.train_pairs; ++i) {
    raw_train.push_back(draw_pair(spec, rng, i, &attrs));
    attrs_train.push_back(attrs);
  }
  for (int i = 0; i < spec.heldout_pairs; ++i) {
    raw_heldout.push_back(draw_pair(spec, rng, spec.train_pairs + i, &attrs));
    attrs_heldout.push_back(attrs);
  }

  std::vector<std::vector<std::string>> src_corpus, tgt_corpus;
  for (const auto& p : raw_train) {
    src_corpus.push_back(p.src);
    tgt_corpus.push_back(p.tgt);
  }
  const int vocab_cap = spec.content_vocab + spec.num_attributes;
  SyntheticData data;
  data.spec = spec;
  data.train.src_vocab = Vocabulary::build(src_corpus, vocab_cap);
  data.train.tgt_vocab = Vocabulary::build(tgt_corpus, vocab_cap);
  data.heldout.src_vocab = data.train.src_vocab;
  data.heldout.tgt_vocab = data.train.tgt_vocab;
  for (int p = 0; p < spec.num_attributes; ++p) {
    data.attr_token_ids.push_back(data.train.tgt_vocab.encode("attr" + std::to_string(p)));
  }

  auto fill = [&](Dataset& ds, const std::vector<RawPair>& raws,
                  const std::vector<std::vector<int>>& attr_lists) {
    ds.features = FeatureStore(spec.regions, spec.channels);
    for (size_t i = 0; i < raws.size(); ++i) {
      ParallelExample ex;
      ex.source_ids = data.train.src_vocab.encode(raws[i].src);
      ex.target_ids = data.train.tgt_vocab.encode(raws[i].tgt);
      ex.image_id = raws[i].image_id;
      ds.examples.push_back(std::move(ex));
      ds.features.put(draw_features(spec, rng, raws[i].image_id, attr_lists[i]));
    }
    ds.examples = filter_pairs(ds.examples);
  };
  fill(data.train, raw_train, attrs_train);
  fill(data.heldout, raw_heldout, attrs_heldout);
  return data;
}

void write_synthetic_files(const SyntheticData& data, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write_split = [&](const Dataset& ds, const std::string& stem) {
    std::ofstream src(dir + "/" + stem + ".src");
    std::ofstream tgt(dir + "/" + stem + ".tgt");
    std::ofstream ids(dir + "/" + stem + ".ids");
    for (const auto& ex : ds.examples) {
      auto join = [](const std::vector<std::string>& toks) {
        std::string s;
        for (size_t i = 0; i < toks.size(); ++i) {
          if (i) s += " ";
          s += toks[i];
        }
        return s;
      };
      src << join(ds.src_vocab.decode(ex.source_ids)) << "\n";
      tgt << join(ds.tgt_vocab.decode(ex.target_ids)) << "\n";
      ids << ex.image_id << "\n";
    }
  };
  write_split(data.train, "train");
  write_split(data.heldout, "heldout");

  FeatureStore all(data.spec.regions, data.spec.channels);
  for (const auto& id : data.train.features.ids()) all.put(data.train.features.get(id));
  for (const auto& id : data.heldout.features.ids()) all.put(data.heldout.features.get(id));
  all.save(dir + "/features.mmf");
}

}  // namespace mmt
