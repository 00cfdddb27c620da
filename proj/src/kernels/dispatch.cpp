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

#include <cstdlib>
#include <string>

#include "tweetsum/kernels.hpp"

namespace tweetsum::kernels {

namespace {

struct KernelTable {
  Isa isa;
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*adam_update)(std::span<double>, std::span<const double>,
                      std::span<double>, std::span<double>, const AdamCoeffs&);
};

constexpr KernelTable kScalarTable{Isa::kScalar, &scalar::dot, &scalar::axpy,
                                   &scalar::adam_update};
constexpr KernelTable kAvx2Table{Isa::kAvx2, &avx2::dot, &avx2::axpy,
                                 &avx2::adam_update};
constexpr KernelTable kNeonTable{Isa::kNeon, &neon::dot, &neon::axpy,
                                 &neon::adam_update};

const KernelTable& table_for(Isa isa) {
  switch (isa) {
    case Isa::kAvx2:
      return kAvx2Table;
    case Isa::kNeon:
      return kNeonTable;
    case Isa::kScalar:
      break;
  }
  return kScalarTable;
}

Isa select_isa() {
  if (const char* forced = std::getenv("TWEETSUM_ISA")) {
    const std::string name(forced);
    if (name == "scalar") return Isa::kScalar;
    if (name == "avx2" && isa_available(Isa::kAvx2)) return Isa::kAvx2;
    if (name == "neon" && isa_available(Isa::kNeon)) return Isa::kNeon;
  }
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_available(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

const KernelTable& active_table() {
  static const KernelTable& table = table_for(select_isa());
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(__aarch64__) || defined(_M_ARM64)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return active_table().isa; }

double dot(std::span<const double> x, std::span<const double> y) {
  return active_table().dot(x, y);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_table().axpy(alpha, x, y);
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v,
                 const AdamCoeffs& c) {
  active_table().adam_update(params, grads, m, v, c);
}

}  // namespace tweetsum::kernels
