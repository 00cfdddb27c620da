// Copyright 2026 The tweetsum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>
#include <sstream>

#include "tweetsum/binary_io.hpp"
#include "tweetsum/error.hpp"
#include "tweetsum/kernels.hpp"
#include "tweetsum/rng.hpp"
#include "tweetsum/salience.hpp"

namespace tweetsum {

namespace {

constexpr std::string_view kCheckpointMagic = "TSN1";

struct Activations {
  std::vector<double> h1_pre, h1, mask1;
  std::vector<double> x;
  std::vector<double> h2_pre, h2, mask2;
  double score = 0.0;
};

void draw_mask(Rng& rng, std::vector<double>& mask) {
  const double keep = 1.0 - kDropoutRate;
  for (auto& m : mask) m = rng.uniform() < keep ? 1.0 / keep : 0.0;
}

std::size_t count_non_finite(std::span<const double> values) {
  std::size_t n = 0;
  for (double v : values) n += std::isfinite(v) ? 0 : 1;
  return n;
}

void check_inputs(const NetShape& shape, const FrequencyVector& freq,
                  std::span<const double> emb) {
  if (freq.dimension != shape.freq_dim || emb.size() != shape.emb_dim) {
    throw DataError("salience input dimensions (" +
                    std::to_string(freq.dimension) + ", " +
                    std::to_string(emb.size()) + ") do not match network (" +
                    std::to_string(shape.freq_dim) + ", " +
                    std::to_string(shape.emb_dim) + ")");
  }
}

void run_forward(const SalienceNet& net, const FrequencyVector& freq,
                 std::span<const double> emb, bool train_mode,
                 std::uint64_t seed, Activations& a) {
  const NetShape& s = net.shape();
  check_inputs(s, freq, emb);

  a.h1_pre.assign(net.b1().begin(), net.b1().end());
  for (std::size_t k = 0; k < freq.indices.size(); ++k) {
    kernels::axpy(freq.values[k], net.w1_row(freq.indices[k]), a.h1_pre);
  }
  a.mask1.assign(s.freq_hidden, 1.0);
  a.mask2.assign(s.hidden, 1.0);
  if (train_mode) {
    Rng rng(seed);
    draw_mask(rng, a.mask1);
    draw_mask(rng, a.mask2);
  }
  a.h1.resize(s.freq_hidden);
  for (std::size_t j = 0; j < s.freq_hidden; ++j) {
    a.h1[j] = a.h1_pre[j] > 0.0 ? a.h1_pre[j] * a.mask1[j] : 0.0;
  }

  a.x.resize(s.concat_dim());
  std::copy(emb.begin(), emb.end(), a.x.begin());
  std::copy(a.h1.begin(), a.h1.end(), a.x.begin() + static_cast<std::ptrdiff_t>(s.emb_dim));

  a.h2_pre.assign(net.b2().begin(), net.b2().end());
  for (std::size_t i = 0; i < s.concat_dim(); ++i) {
    if (a.x[i] != 0.0) kernels::axpy(a.x[i], net.w2_row(i), a.h2_pre);
  }
  a.h2.resize(s.hidden);
  for (std::size_t j = 0; j < s.hidden; ++j) {
    a.h2[j] = a.h2_pre[j] > 0.0 ? a.h2_pre[j] * a.mask2[j] : 0.0;
  }
  a.score = net.b3() + kernels::dot(net.w3(), a.h2);

  if (!std::isfinite(a.score)) {
    std::ostringstream msg;
    msg << "non-finite salience score: " << count_non_finite(emb)
        << " non-finite embedding values, " << count_non_finite(a.h1_pre)
        << " non-finite first-layer pre-activations, "
        << count_non_finite(a.h2_pre)
        << " non-finite second-layer pre-activations, "
        << count_non_finite(net.params()) << " non-finite parameters";
    throw NumericError(msg.str());
  }
}

std::size_t offset_after(std::size_t offset, std::size_t n) {
  return offset + n;
}

}  // namespace

SalienceNet::SalienceNet(NetShape shape)
    : shape_(shape), params_(shape.parameter_count(), 0.0) {
  w1_ = 0;
  b1_ = offset_after(w1_, shape_.freq_dim * shape_.freq_hidden);
  w2_ = offset_after(b1_, shape_.freq_hidden);
  b2_ = offset_after(w2_, shape_.concat_dim() * shape_.hidden);
  w3_ = offset_after(b2_, shape_.hidden);
  b3_ = offset_after(w3_, shape_.hidden);
}

SalienceNet SalienceNet::glorot(NetShape shape, std::uint64_t seed) {
  SalienceNet net(shape);
  Rng rng(seed);
  auto fill = [&rng](std::span<double> w, std::size_t fan_in,
                     std::size_t fan_out) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& x : w) x = rng.uniform(-limit, limit);
  };
  fill(net.w1(), shape.freq_dim, shape.freq_hidden);
  fill(net.w2(), shape.concat_dim(), shape.hidden);
  fill(net.w3(), shape.hidden, 1);
  return net;
}

bool SalienceNet::all_finite() const {
  return count_non_finite(params_) == 0;
}

std::uint64_t example_seed(std::uint64_t batch_seed, std::size_t index) {
  return mix_seed(batch_seed, index);
}

double forward(const SalienceNet& net, const FrequencyVector& freq,
               std::span<const double> emb, bool train_mode,
               std::uint64_t seed) {
  Activations a;
  run_forward(net, freq, emb, train_mode, seed, a);
  return a.score;
}

double loss(double score, double target) {
  const double r = score - target;
  return r * r;
}

GradResult grad(const SalienceNet& net,
                std::span<const TrainingExample* const> batch, bool train_mode,
                std::uint64_t seed) {
  if (batch.empty()) throw DataError("grad: empty batch");
  const NetShape& s = net.shape();
  GradResult out{SalienceNet(s), 0.0};
  SalienceNet& g = out.grads;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  Activations a;
  std::vector<double> dh1(s.freq_hidden);
  std::vector<double> dh2(s.hidden);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const TrainingExample& ex = *batch[k];
    run_forward(net, ex.freq, ex.emb, train_mode, example_seed(seed, k), a);
    const double residual = a.score - ex.target;
    out.loss += residual * residual * inv_batch;
    const double d_score = 2.0 * residual * inv_batch;

    g.b3() += d_score;
    kernels::axpy(d_score, a.h2, g.w3());
    const auto w3 = net.w3();
    for (std::size_t j = 0; j < s.hidden; ++j) {
      dh2[j] = a.h2_pre[j] > 0.0 ? d_score * w3[j] * a.mask2[j] : 0.0;
    }
    kernels::axpy(1.0, dh2, g.b2());
    auto gw2 = g.w2();
    for (std::size_t i = 0; i < s.concat_dim(); ++i) {
      if (a.x[i] != 0.0) {
        kernels::axpy(a.x[i], dh2, gw2.subspan(i * s.hidden, s.hidden));
      }
    }
    for (std::size_t j = 0; j < s.freq_hidden; ++j) {
      dh1[j] = a.h1_pre[j] > 0.0
                   ? kernels::dot(net.w2_row(s.emb_dim + j), dh2) * a.mask1[j]
                   : 0.0;
    }
    kernels::axpy(1.0, dh1, g.b1());
    auto gw1 = g.w1();
    for (std::size_t n = 0; n < ex.freq.indices.size(); ++n) {
      kernels::axpy(
          ex.freq.values[n], dh1,
          gw1.subspan(ex.freq.indices[n] * s.freq_hidden, s.freq_hidden));
    }
  }
  if (!g.all_finite()) {
    throw NumericError("non-finite gradient (" +
                       std::to_string(count_non_finite(g.params())) +
                       " entries)");
  }
  return out;
}

GradResult grad(const SalienceNet& net, std::span<const TrainingExample> batch,
                bool train_mode, std::uint64_t seed) {
  std::vector<const TrainingExample*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& ex : batch) ptrs.push_back(&ex);
  return grad(net, ptrs, train_mode, seed);
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double lr) {
  if (grads.size() != params.size()) {
    throw UsageError("adam_step: gradient size does not match parameters");
  }
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw UsageError("adam_step: optimizer state size does not match");
  }
  ++state.t;
  const auto t = static_cast<double>(state.t);
  const kernels::AdamCoeffs coeffs{
      lr,
      AdamState::kBeta1,
      AdamState::kBeta2,
      AdamState::kEpsilon,
      1.0 - std::pow(AdamState::kBeta1, t),
      1.0 - std::pow(AdamState::kBeta2, t),
  };
  kernels::adam_update(params, grads, state.m, state.v, coeffs);
}

void adam_step(SalienceNet& net, const SalienceNet& grads, AdamState& state,
               double lr) {
  if (!(net.shape() == grads.shape())) {
    throw UsageError("adam_step: gradient shape does not match network");
  }
  adam_step(net.params(), grads.params(), state, lr);
}

double noam_lr(std::uint64_t step, double d_model, double warmup) {
  if (step == 0) throw UsageError("noam_lr: step must be at least 1");
  const auto s = static_cast<double>(step);
  return std::pow(d_model, -0.5) *
         std::min(std::pow(s, -0.5), s * std::pow(warmup, -1.5));
}

void write_checkpoint(std::ostream& out, const SalienceNet& net,
                      const AdamState* adam) {
  const NetShape& s = net.shape();
  binary::write_magic(out, kCheckpointMagic);
  const std::pair<std::size_t, std::size_t> dims[] = {
      {s.freq_dim, s.freq_hidden}, {s.concat_dim(), s.hidden}, {s.hidden, 1}};
  for (const auto& [rows, cols] : dims) {
    binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rows));
    binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(cols));
  }
  for (double p : net.params()) {
    binary::write_le<float>(out, static_cast<float>(p));
  }
  binary::write_le<std::uint8_t>(out, adam ? 1 : 0);
  if (adam) {
    binary::write_le<std::uint64_t>(out, adam->t);
    for (double m : adam->m) binary::write_le<double>(out, m);
    for (double v : adam->v) binary::write_le<double>(out, v);
  }
}

void save_checkpoint(const std::filesystem::path& path, const SalienceNet& net,
                     const AdamState* adam) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_checkpoint(out, net, adam);
}

Checkpoint read_checkpoint(std::istream& in) {
  binary::expect_magic(in, kCheckpointMagic);
  std::uint32_t dims[3][2];
  for (auto& d : dims) {
    d[0] = binary::read_le<std::uint32_t>(in, "TSN1 rows");
    d[1] = binary::read_le<std::uint32_t>(in, "TSN1 cols");
  }
  NetShape shape;
  shape.freq_dim = dims[0][0];
  shape.freq_hidden = dims[0][1];
  shape.hidden = dims[1][1];
  if (dims[1][0] < shape.freq_hidden || dims[2][0] != shape.hidden ||
      dims[2][1] != 1 || shape.freq_dim == 0 || shape.hidden == 0) {
    throw DataError("TSN1: inconsistent layer shapes");
  }
  shape.emb_dim = dims[1][0] - shape.freq_hidden;
  Checkpoint ckpt{SalienceNet(shape), std::nullopt};
  for (double& p : ckpt.net.params()) {
    p = binary::read_le<float>(in, "TSN1 parameters");
  }
  if (!ckpt.net.all_finite()) throw DataError("TSN1: non-finite parameters");
  const auto has_adam = binary::read_le<std::uint8_t>(in, "TSN1 Adam flag");
  if (has_adam) {
    AdamState adam(shape.parameter_count());
    adam.t = binary::read_le<std::uint64_t>(in, "TSN1 Adam step");
    for (double& m : adam.m) m = binary::read_le<double>(in, "TSN1 Adam m");
    for (double& v : adam.v) v = binary::read_le<double>(in, "TSN1 Adam v");
    ckpt.adam = std::move(adam);
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace tweetsum
