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
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "tweetsum/embed.hpp"
#include "tweetsum/error.hpp"
#include "tweetsum/eval.hpp"
#include "tweetsum/kernels.hpp"

namespace tweetsum {

WordVectors WordVectors::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word vectors " + path.string());
  std::size_t count = 0;
  std::size_t dim = 0;
  std::string header;
  if (!std::getline(in, header) ||
      !(std::istringstream(header) >> count >> dim) || dim == 0) {
    throw DataError("word vectors: bad header in " + path.string());
  }
  WordVectors out(dim);
  std::string line;
  for (std::size_t r = 0; r < count; ++r) {
    if (!std::getline(in, line)) {
      throw DataError("word vectors: expected " + std::to_string(count) +
                      " rows, found " + std::to_string(r));
    }
    std::istringstream row(line);
    std::string word;
    row >> word;
    std::vector<double> values(dim);
    for (auto& v : values) {
      if (!(row >> v)) {
        throw DataError("word vectors: row for \"" + word +
                        "\" has fewer than " + std::to_string(dim) +
                        " values");
      }
    }
    out.insert(std::move(word), std::move(values));
  }
  return out;
}

void WordVectors::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << words_.size() << ' ' << dimension_ << '\n';
  for (const auto& word : words_) {
    out << word;
    for (double v : vectors_.at(word)) out << ' ' << v;
    out << '\n';
  }
}

void WordVectors::insert(std::string word, std::vector<double> values) {
  if (values.size() != dimension_) {
    throw DataError("word vector for \"" + word + "\" has dimension " +
                    std::to_string(values.size()));
  }
  auto [it, inserted] = vectors_.try_emplace(word, std::move(values));
  if (inserted) {
    words_.push_back(std::move(word));
  } else {
    it->second = std::move(values);
  }
}

const std::vector<double>* WordVectors::find(std::string_view word) const {
  const auto it = vectors_.find(std::string(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

WordProbs WordProbs::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word probabilities " + path.string());
  WordProbs out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream row(line);
    std::string word;
    double p = 0.0;
    if (!(row >> word)) continue;
    if (!(row >> p) || !(p >= 0.0 && p <= 1.0)) {
      throw DataError("word probabilities: bad value on line " +
                      std::to_string(line_no));
    }
    out.set(std::move(word), p);
  }
  return out;
}

WordProbs WordProbs::estimate(std::span<const std::string> texts) {
  std::unordered_map<std::string, std::size_t> counts;
  std::size_t tokens = 0;
  for (const auto& text : texts) {
    for (auto& word : evaluation_words(text)) {
      ++counts[std::move(word)];
      ++tokens;
    }
  }
  WordProbs out;
  const auto denom = static_cast<double>(tokens + counts.size());
  if (denom == 0.0) return out;
  for (const auto& [word, c] : counts) {
    out.probs_[word] = static_cast<double>(c + 1) / denom;
  }
  out.unseen_ = 1.0 / denom;
  return out;
}

double WordProbs::prob(std::string_view word) const {
  const auto it = probs_.find(std::string(word));
  return it == probs_.end() ? unseen_ : it->second;
}

void WordProbs::save(const std::filesystem::path& path) const {
  std::map<std::string, double> sorted(probs_.begin(), probs_.end());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  for (const auto& [word, p] : sorted) out << word << ' ' << p << '\n';
}

SifModel::SifModel(WordVectors vectors, WordProbs probs, double a,
                   bool remove_pc)
    : vectors_(std::move(vectors)),
      probs_(std::move(probs)),
      a_(a),
      remove_pc_(remove_pc) {
  if (!(a_ > 0.0)) throw UsageError("SIF weight a must be positive");
}

double SifModel::weight(std::string_view word) const {
  return a_ / (a_ + probs_.prob(word));
}

std::vector<double> SifModel::weighted_average(std::string_view text) const {
  std::vector<double> sum(vectors_.dimension(), 0.0);
  std::size_t used = 0;
  for (const auto& word : evaluation_words(text)) {
    const auto* vec = vectors_.find(word);
    if (!vec) continue;
    kernels::scalar::axpy(weight(word), *vec, sum);
    ++used;
  }
  if (used > 0) {
    const double scale = 1.0 / static_cast<double>(used);
    for (auto& x : sum) x *= scale;
  }
  return sum;
}

void SifModel::fit_principal_component(std::span<const std::string> texts) {
  const auto dim = static_cast<Eigen::Index>(vectors_.dimension());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  std::size_t rows = 0;
  for (const auto& text : texts) {
    const auto v = weighted_average(text);
    const Eigen::Map<const Eigen::VectorXd> row(v.data(), dim);
    if (row.squaredNorm() == 0.0) continue;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(row);
    ++rows;
  }
  pc_.reset();
  if (rows == 0) return;
  // The solver only reads the lower triangle.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  Eigen::VectorXd top = solver.eigenvectors().col(dim - 1);
  // Fix the sign so the component is reproducible.
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (top[i] != 0.0) {
      if (top[i] < 0.0) top = -top;
      break;
    }
  }
  pc_.emplace(top.data(), top.data() + dim);
}

std::vector<double> SifModel::embed(std::string_view text) const {
  std::vector<double> v = weighted_average(text);
  if (remove_pc_ && pc_) {
    const double proj = kernels::scalar::dot(v, *pc_);
    kernels::scalar::axpy(-proj, *pc_, v);
  }
  return v;
}

double SifModel::cos_embed(std::string_view candidate,
                           std::string_view reference) const {
  return cosine(embed(candidate), embed(reference));
}

}  // namespace tweetsum
