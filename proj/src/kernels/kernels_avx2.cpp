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

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define TWEETSUM_HAVE_AVX2 1
#define TWEETSUM_TARGET_AVX2 __attribute__((target("avx2,fma")))
#else
#define TWEETSUM_HAVE_AVX2 0
#endif

namespace tweetsum::kernels::avx2 {

#if TWEETSUM_HAVE_AVX2

namespace {

TWEETSUM_TARGET_AVX2 inline double horizontal_sum(__m256d v) {
  __m128d low = _mm256_castpd256_pd128(v);
  const __m128d high = _mm256_extractf128_pd(v, 1);
  low = _mm_add_pd(low, high);
  const __m128d swapped = _mm_unpackhi_pd(low, low);
  return _mm_cvtsd_f64(_mm_add_sd(low, swapped));
}

}  // namespace

TWEETSUM_TARGET_AVX2
double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const double* px = x.data();
  const double* py = y.data();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i + 4),
                           _mm256_loadu_pd(py + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i),
                           acc0);
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += px[i] * py[i];
  return sum;
}

// No FMA here: y + alpha*x must round exactly like the scalar loop so that
// training is independent of the dispatch.
TWEETSUM_TARGET_AVX2
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const double* px = x.data();
  double* py = y.data();
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(px + i));
    _mm256_storeu_pd(py + i, _mm256_add_pd(_mm256_loadu_pd(py + i), prod));
  }
  for (; i < n; ++i) py[i] += alpha * px[i];
}

TWEETSUM_TARGET_AVX2
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v,
                 const AdamCoeffs& c) {
  assert(params.size() == grads.size());
  assert(params.size() == m.size() && params.size() == v.size());
  const std::size_t n = params.size();
  const __m256d b1 = _mm256_set1_pd(c.beta1);
  const __m256d b2 = _mm256_set1_pd(c.beta2);
  const __m256d omb1 = _mm256_set1_pd(1.0 - c.beta1);
  const __m256d omb2 = _mm256_set1_pd(1.0 - c.beta2);
  const __m256d bc1 = _mm256_set1_pd(c.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(c.bias_correction2);
  const __m256d lr = _mm256_set1_pd(c.lr);
  const __m256d eps = _mm256_set1_pd(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grads.data() + i);
    __m256d mi = _mm256_loadu_pd(m.data() + i);
    __m256d vi = _mm256_loadu_pd(v.data() + i);
    mi = _mm256_add_pd(_mm256_mul_pd(b1, mi), _mm256_mul_pd(omb1, g));
    vi = _mm256_add_pd(_mm256_mul_pd(b2, vi),
                       _mm256_mul_pd(omb2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m.data() + i, mi);
    _mm256_storeu_pd(v.data() + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, bc1);
    const __m256d v_hat = _mm256_div_pd(vi, bc2);
    const __m256d step = _mm256_mul_pd(
        lr, _mm256_div_pd(m_hat, _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps)));
    _mm256_storeu_pd(params.data() + i,
                     _mm256_sub_pd(_mm256_loadu_pd(params.data() + i), step));
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

}  // namespace tweetsum::kernels::avx2
