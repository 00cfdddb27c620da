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

#include <cassert>
#include <cmath>

#include "tweetsum/kernels.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#include <arm_neon.h>
#define TWEETSUM_HAVE_NEON 1
#else
#define TWEETSUM_HAVE_NEON 0
#endif

namespace tweetsum::kernels::neon {

#if TWEETSUM_HAVE_NEON

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x.data() + i), vld1q_f64(y.data() + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x.data() + i + 2),
                     vld1q_f64(y.data() + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t prod = vmulq_f64(a, vld1q_f64(x.data() + i));
    vst1q_f64(y.data() + i, vaddq_f64(vld1q_f64(y.data() + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v,
                 const AdamCoeffs& c) {
  assert(params.size() == grads.size());
  const std::size_t n = params.size();
  const float64x2_t b1 = vdupq_n_f64(c.beta1);
  const float64x2_t b2 = vdupq_n_f64(c.beta2);
  const float64x2_t omb1 = vdupq_n_f64(1.0 - c.beta1);
  const float64x2_t omb2 = vdupq_n_f64(1.0 - c.beta2);
  const float64x2_t bc1 = vdupq_n_f64(c.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(c.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(c.lr);
  const float64x2_t eps = vdupq_n_f64(c.eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grads.data() + i);
    float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m.data() + i)),
                               vmulq_f64(omb1, g));
    float64x2_t vi = vaddq_f64(vmulq_f64(b2, vld1q_f64(v.data() + i)),
                               vmulq_f64(omb2, vmulq_f64(g, g)));
    vst1q_f64(m.data() + i, mi);
    vst1q_f64(v.data() + i, vi);
    const float64x2_t m_hat = vdivq_f64(mi, bc1);
    const float64x2_t v_hat = vdivq_f64(vi, bc2);
    const float64x2_t step =
        vmulq_f64(lr, vdivq_f64(m_hat, vaddq_f64(vsqrtq_f64(v_hat), eps)));
    vst1q_f64(params.data() + i, vsubq_f64(vld1q_f64(params.data() + i), step));
  }
  if (i < n) {
    scalar::adam_update(params.subspan(i), grads.subspan(i), m.subspan(i),
                        v.subspan(i), c);
  }
}

#else

double dot(std::span<const double> x, std::span<const double> y) {
  return scalar::dot(x, y);
}
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  scalar::axpy(alpha, x, y);
}
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v,
                 const AdamCoeffs& c) {
  scalar::adam_update(params, grads, m, v, c);
}

#endif

}  // namespace tweetsum::kernels::neon
