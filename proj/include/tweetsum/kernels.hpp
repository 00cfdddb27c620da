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

#pragma once

#include <span>
#include <string_view>

// Dense inner loops of the salience network. Each kernel has a scalar
// reference and SIMD variants; the variant is picked once at startup from the
// CPU features, or forced with TWEETSUM_ISA=scalar|avx2|neon.
namespace tweetsum::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

/// True when this build contains the variant and the CPU can run it.
bool isa_available(Isa isa);

/// The variant used by the dispatching entry points below.
Isa active_isa();

/// Bias-corrected Adam coefficients for one step.
struct AdamCoeffs {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

double dot(std::span<const double> x, std::span<const double> y);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// In-place Adam update over matching flat buffers. Element-wise, so every
/// variant is bit-identical to the scalar reference.
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v,
                 const AdamCoeffs& c);

// Per-ISA entry points, used by the equivalence tests and the dispatcher.
namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v,
                 const AdamCoeffs& c);
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v,
                 const AdamCoeffs& c);
}  // namespace avx2

namespace neon {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v,
                 const AdamCoeffs& c);
}  // namespace neon

}  // namespace tweetsum::kernels
