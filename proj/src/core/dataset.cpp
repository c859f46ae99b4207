#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "core/binio.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace mmb {

namespace {

constexpr char kMagic[4] = {'M', 'M', 'B', 'D'};
constexpr std::uint32_t kFormatVersion = 1;

// Inter-speaker variation applied per sample before the observation noise.
constexpr double kSpeakerGainLo = 0.8;
constexpr double kSpeakerGainHi = 1.2;
constexpr double kSpeakerBiasSigma = 0.05;

double sequence_capacity(const DataConfig& spec) {
  double capacity = 1.0;
  for (int i = 0; i < spec.seq_len && capacity <= 1e18; ++i)
    capacity *= spec.codebook_size;
  return capacity;
}

std::vector<std::vector<int>> pick_class_sequences(const DataConfig& spec,
                                                   Rng& rng) {
  const int k = spec.num_classes, p = spec.codebook_size, t = spec.seq_len;
  const double capacity = sequence_capacity(spec);
  std::vector<std::vector<int>> chosen;
  chosen.reserve(k);
  if (capacity <= 1e6) {
    // Small space: enumerate every sequence, shuffle, take the first K.
    const auto total = static_cast<std::size_t>(capacity);
    std::vector<std::vector<int>> all(total, std::vector<int>(t));
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (int j = t - 1; j >= 0; --j) {
        all[idx][j] = static_cast<int>(rem % p);
        rem /= p;
      }
    }
    rng.shuffle(all);
    chosen.assign(all.begin(), all.begin() + k);
  } else {
    std::set<std::vector<int>> seen;
    while (static_cast<int>(chosen.size()) < k) {
      std::vector<int> seq(t);
      for (int j = 0; j < t; ++j) seq[j] = static_cast<int>(rng.uniform_index(p));
      if (seen.insert(seq).second) chosen.push_back(std::move(seq));
    }
  }
  return chosen;
}

Tensor gaussian_projection(int rows, int cols, Rng& rng) {
  Tensor t = Tensor::zeros({rows, cols});
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& v : *t.data) v = rng.gaussian() * scale;
  return t;
}

void render_stream(const std::vector<int>& sequence, const RenderBasis& basis,
                   const Tensor& projection, double gain,
                   const std::vector<double>& bias, double noise_sigma,
                   Rng& noise_rng, Tensor& out) {
  const int t = static_cast<int>(sequence.size());
  const int code_dim = projection.shape[0];
  const int width = projection.shape[1];
  for (int step = 0; step < t; ++step) {
    const std::vector<double>& code = basis.codebook[sequence[step]];
    for (int j = 0; j < width; ++j) {
      double v = 0.0;
      for (int c = 0; c < code_dim; ++c) v += code[c] * projection.at(c, j);
      v = gain * v + bias[j];
      if (noise_sigma > 0.0) v += noise_sigma * noise_rng.gaussian();
      out.at(step, j) = v;
    }
  }
}

}  // namespace

RenderBasis build_render_basis(const DataConfig& spec, std::uint64_t seed) {
  RenderBasis basis;
  Rng code_rng(derive_seed(seed, "data.codebook"));
  basis.codebook.resize(spec.codebook_size);
  for (auto& code : basis.codebook)
    code = code_rng.gaussian_vector(spec.code_dim);

  Rng seq_rng(derive_seed(seed, "data.class_sequences"));
  basis.class_sequences = pick_class_sequences(spec, seq_rng);

  Rng proj_rng(derive_seed(seed, "data.projections"));
  basis.src_projection = gaussian_projection(spec.code_dim, spec.src_dim, proj_rng);
  basis.tgt_projection = gaussian_projection(spec.code_dim, spec.tgt_dim, proj_rng);
  return basis;
}

ModalSample render_sample(int class_id, std::uint64_t sample_seed,
                          const DataConfig& spec, const RenderBasis& basis) {
  if (class_id < 0 || class_id >= spec.num_classes)
    throw ValidationError("render_sample: class id out of range");

  // Independent streams so toggling the jitter leaves the noise unchanged.
  Rng jitter_rng(derive_seed(sample_seed, "speaker"));
  Rng noise_rng(derive_seed(sample_seed, "noise"));

  double gain_src = 1.0, gain_tgt = 1.0;
  std::vector<double> bias_src(spec.src_dim, 0.0), bias_tgt(spec.tgt_dim, 0.0);
  if (spec.speaker_jitter) {
    gain_src = jitter_rng.uniform(kSpeakerGainLo, kSpeakerGainHi);
    gain_tgt = jitter_rng.uniform(kSpeakerGainLo, kSpeakerGainHi);
    for (double& b : bias_src) b = jitter_rng.gaussian() * kSpeakerBiasSigma;
    for (double& b : bias_tgt) b = jitter_rng.gaussian() * kSpeakerBiasSigma;
  }

  ModalSample sample;
  sample.label = class_id;
  sample.source = Tensor::zeros({spec.seq_len, spec.src_dim});
  sample.target = Tensor::zeros({spec.seq_len, spec.tgt_dim});
  const std::vector<int>& sequence = basis.class_sequences[class_id];
  render_stream(sequence, basis, basis.src_projection, gain_src, bias_src,
                spec.noise_src, noise_rng, sample.source);
  render_stream(sequence, basis, basis.tgt_projection, gain_tgt, bias_tgt,
                spec.noise_tgt, noise_rng, sample.target);
  return sample;
}

GeneratedData generate_dataset(const DataConfig& spec, std::uint64_t seed) {
  spec.validate(/*strict_noise=*/false);
  const RenderBasis basis = build_render_basis(spec, seed);

  GeneratedData out;
  out.train.spec = spec;
  out.train.seed = seed;
  out.train.role = "train";
  out.test.spec = spec;
  out.test.seed = seed;
  out.test.role = "test";

  for (int c = 0; c < spec.num_classes; ++c) {
    for (int i = 0; i < spec.train_per_class; ++i)
      out.train.samples.push_back(
          render_sample(c, derive_seed(seed, "sample.train", c, i), spec, basis));
    for (int i = 0; i < spec.test_per_class; ++i)
      out.test.samples.push_back(
          render_sample(c, derive_seed(seed, "sample.test", c, i), spec, basis));
  }
  return out;
}

double centroid_accuracy(const Dataset& train, const Dataset& test,
                         bool use_target) {
  const int k = train.spec.num_classes;
  auto flat = [use_target](const ModalSample& s) -> const std::vector<double>& {
    return use_target ? *s.target.data : *s.source.data;
  };
  if (train.samples.empty() || test.samples.empty())
    throw ValidationError("centroid_accuracy: empty split");

  const std::size_t width = flat(train.samples.front()).size();
  std::vector<std::vector<double>> centroids(k, std::vector<double>(width, 0.0));
  std::vector<int> counts(k, 0);
  for (const ModalSample& s : train.samples) {
    const auto& v = flat(s);
    for (std::size_t i = 0; i < width; ++i) centroids[s.label][i] += v[i];
    ++counts[s.label];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) throw ValidationError("centroid_accuracy: empty class");
    for (double& x : centroids[c]) x /= counts[c];
  }

  int correct = 0;
  for (const ModalSample& s : test.samples) {
    const auto& v = flat(s);
    int best = -1;
    double best_dist = 0.0;
    for (int c = 0; c < k; ++c) {
      double d = 0.0;
      for (std::size_t i = 0; i < width; ++i) {
        const double diff = v[i] - centroids[c][i];
        d += diff * diff;
      }
      if (best < 0 || d < best_dist) {
        best = c;
        best_dist = d;
      }
    }
    if (best == s.label) ++correct;
  }
  return static_cast<double>(correct) / test.samples.size();
}

void save_dataset(const Dataset& dataset, const std::string& path,
                  const std::string& config_echo_json) {
  BinWriter w(path);
  w.bytes(kMagic, 4);
  w.u32(kFormatVersion);
  w.str(dataset.role);
  w.u64(dataset.seed);
  const DataConfig& s = dataset.spec;
  w.u32(static_cast<std::uint32_t>(s.num_classes));
  w.u32(static_cast<std::uint32_t>(s.codebook_size));
  w.u32(static_cast<std::uint32_t>(s.seq_len));
  w.u32(static_cast<std::uint32_t>(s.code_dim));
  w.u32(static_cast<std::uint32_t>(s.src_dim));
  w.u32(static_cast<std::uint32_t>(s.tgt_dim));
  w.f64(s.noise_src);
  w.f64(s.noise_tgt);
  w.u32(static_cast<std::uint32_t>(s.train_per_class));
  w.u32(static_cast<std::uint32_t>(s.test_per_class));
  w.u8(s.speaker_jitter ? 1 : 0);
  w.str(config_echo_json);
  w.u64(dataset.samples.size());
  for (const ModalSample& sample : dataset.samples) {
    w.u32(static_cast<std::uint32_t>(sample.label));
    for (double v : *sample.source.data) w.f64(v);
    for (double v : *sample.target.data) w.f64(v);
  }
  w.finish_with_crc();
}

LoadedDataset load_dataset(const std::string& path) {
  BinReader r(path);
  r.verify_trailing_crc();
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("'" + path + "' is not a dataset file");
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw IoError("unsupported dataset format version " +
                   std::to_string(version) + " in '" + path + "'");

  LoadedDataset out;
  Dataset& d = out.dataset;
  d.role = r.str();
  d.seed = r.u64();
  d.spec.num_classes = static_cast<int>(r.u32());
  d.spec.codebook_size = static_cast<int>(r.u32());
  d.spec.seq_len = static_cast<int>(r.u32());
  d.spec.code_dim = static_cast<int>(r.u32());
  d.spec.src_dim = static_cast<int>(r.u32());
  d.spec.tgt_dim = static_cast<int>(r.u32());
  d.spec.noise_src = r.f64();
  d.spec.noise_tgt = r.f64();
  d.spec.train_per_class = static_cast<int>(r.u32());
  d.spec.test_per_class = static_cast<int>(r.u32());
  d.spec.speaker_jitter = r.u8() != 0;
  out.config_echo_json = r.str();

  const std::uint64_t count = r.u64();
  d.samples.reserve(count);
  const std::size_t src_n =
      static_cast<std::size_t>(d.spec.seq_len) * d.spec.src_dim;
  const std::size_t tgt_n =
      static_cast<std::size_t>(d.spec.seq_len) * d.spec.tgt_dim;
  for (std::uint64_t i = 0; i < count; ++i) {
    ModalSample s;
    s.label = static_cast<int>(r.u32());
    s.source = Tensor::zeros({d.spec.seq_len, d.spec.src_dim});
    s.target = Tensor::zeros({d.spec.seq_len, d.spec.tgt_dim});
    for (std::size_t j = 0; j < src_n; ++j) (*s.source.data)[j] = r.f64();
    for (std::size_t j = 0; j < tgt_n; ++j) (*s.target.data)[j] = r.f64();
    d.samples.push_back(std::move(s));
  }
  if (!r.at_payload_end())
    throw IoError("trailing bytes in dataset file '" + path + "'");
  return out;
}

}  // namespace mmb
