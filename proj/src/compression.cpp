// Copyright 2026 The HiOCO Authors
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

#include "hioco/compression.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hioco/errors.hpp"
#include "hioco/rng.hpp"

namespace hioco {

namespace {

double quant_step(const QuantizeScheme& q) { return (q.upper - q.lower) / std::ldexp(1.0, q.bits); }

std::uint32_t encode(double v, const QuantizeScheme& q, double step) {
  const double max_code = std::ldexp(1.0, q.bits) - 1.0;
  double cell = std::floor((v - q.lower) / step);
  if (!(cell >= 0.0)) cell = 0.0;  // also catches NaN
  if (cell > max_code) cell = max_code;
  return static_cast<std::uint32_t>(cell);
}

double decode(std::uint32_t code, double lower, double step) {
  return lower + (static_cast<double>(code) + 0.5) * step;
}

}  // namespace

void validate(const CompressionScheme& scheme) {
  if (const auto* q = std::get_if<QuantizeScheme>(&scheme)) {
    if (q->bits < 1) throw ParameterError("quantizer needs bits >= 1");
    if (q->bits > 32) throw ParameterError("quantizer supports at most 32 bits");
    if (!(q->upper > q->lower)) throw ParameterError("quantizer range must satisfy lower < upper");
  } else if (const auto* n = std::get_if<NoiseScheme>(&scheme)) {
    if (!(n->stddev >= 0.0)) throw ParameterError("noise standard deviation must be >= 0");
  }
}

std::string describe(const CompressionScheme& scheme) {
  std::ostringstream os;
  if (std::holds_alternative<IdentityScheme>(scheme)) {
    os << "identity";
  } else if (const auto* q = std::get_if<QuantizeScheme>(&scheme)) {
    os << "quantize(" << q->bits << ",[" << q->lower << "," << q->upper << "])";
  } else {
    const auto& n = std::get<NoiseScheme>(scheme);
    os << "noise(" << n.stddev << ",seed=" << n.seed << ")";
  }
  return os.str();
}

double entry_error_bound(const CompressionScheme& scheme) {
  if (std::holds_alternative<IdentityScheme>(scheme)) return 0.0;
  if (const auto* q = std::get_if<QuantizeScheme>(&scheme)) return 0.5 * quant_step(*q);
  const auto& n = std::get<NoiseScheme>(scheme);
  return n.stddev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

CompressedData compress(WorkerId worker, std::size_t slot, const LocalData& data,
                        const CompressionScheme& scheme) {
  validate(scheme);
  CompressedData out{worker, slot, data};

  if (const auto* q = std::get_if<QuantizeScheme>(&scheme)) {
    const double step = quant_step(*q);
    QuantizedData qd;
    qd.rows = data.A.rows();
    qd.cols = data.A.cols();
    qd.lower = q->lower;
    qd.step = step;
    qd.a_codes.reserve(static_cast<std::size_t>(data.A.size()));
    for (Eigen::Index j = 0; j < data.A.cols(); ++j)
      for (Eigen::Index i = 0; i < data.A.rows(); ++i) qd.a_codes.push_back(encode(data.A(i, j), *q, step));
    qd.b_codes.reserve(static_cast<std::size_t>(data.b.size()));
    for (Eigen::Index i = 0; i < data.b.size(); ++i) qd.b_codes.push_back(encode(data.b(i), *q, step));
    out.body = std::move(qd);
  } else if (const auto* n = std::get_if<NoiseScheme>(&scheme)) {
    if (n->stddev > 0.0) {
      std::mt19937_64 rng(derive_seed({n->seed, worker.index, slot}));
      std::normal_distribution<double> noise(0.0, n->stddev);
      LocalData noisy = data;
      for (Eigen::Index j = 0; j < noisy.A.cols(); ++j)
        for (Eigen::Index i = 0; i < noisy.A.rows(); ++i) noisy.A(i, j) += noise(rng);
      for (Eigen::Index i = 0; i < noisy.b.size(); ++i) noisy.b(i) += noise(rng);
      out.body = std::move(noisy);
    }
  }
  return out;
}

LocalData recover(const CompressedData& compressed) {
  if (const auto* raw = std::get_if<LocalData>(&compressed.body)) return *raw;
  const auto& qd = std::get<QuantizedData>(compressed.body);
  if (qd.a_codes.size() != static_cast<std::size_t>(qd.rows * qd.cols))
    throw ContractError("quantized payload has inconsistent matrix size");
  LocalData out{Mat(qd.rows, qd.cols), Vec(static_cast<Eigen::Index>(qd.b_codes.size()))};
  std::size_t k = 0;
  for (Eigen::Index j = 0; j < qd.cols; ++j)
    for (Eigen::Index i = 0; i < qd.rows; ++i) out.A(i, j) = decode(qd.a_codes[k++], qd.lower, qd.step);
  for (std::size_t i = 0; i < qd.b_codes.size(); ++i)
    out.b(static_cast<Eigen::Index>(i)) = decode(qd.b_codes[i], qd.lower, qd.step);
  return out;
}

}  // namespace hioco
