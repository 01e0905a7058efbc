// SPDX-License-Identifier: Apache-2.0
//
// fddtrain: downlink training simulator for FDD massive MIMO links
// Copyright (C) 2026 The fddtrain authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "fddtrain/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fddtrain/errors.hpp"
#include "fddtrain/estimation.hpp"
#include "fddtrain/random.hpp"
#include "json.hpp"

namespace fddtrain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kFormatTag = "fddtrain-codebook";
constexpr std::uint64_t kRefineStreamOffset = 1u << 20;

void require_codebook_shape(int n_tx, int t_len, int bits) {
  if (n_tx < 1 || t_len < 1 || t_len > n_tx) {
    throw DomainError("codebook: need 1 <= t_len <= n_tx, got n_tx=" + std::to_string(n_tx) +
                      " t_len=" + std::to_string(t_len));
  }
  if (bits < 0 || bits > kMaxCodebookBits) {
    throw DomainError("codebook: bits must lie in [0, " + std::to_string(kMaxCodebookBits) + "]");
  }
}

CMatrix orthonormal_basis(const CMatrix& m) {
  Eigen::HouseholderQR<CMatrix> qr(m);
  return qr.householderQ() * CMatrix::Identity(m.rows(), m.cols());
}

// Squared projection overlap ||Q_a^H Q_b||_F^2 of orthonormal bases;
// chordal distance^2 = T - overlap.
double overlap(const CMatrix& qa, const CMatrix& qb) { return (qa.adjoint() * qb).squaredNorm(); }

// Local search on orthonormal bases. Overlaps are tracked in a dense
// symmetric table so each step touches one row only.
class PackingRefiner {
 public:
  PackingRefiner(std::vector<CMatrix> bases, RandomStream rng) : q_(std::move(bases)), rng_(std::move(rng)) {
    const size_t k = q_.size();
    s_.assign(k * k, 0.0);
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = i + 1; j < k; ++j) set(i, j, overlap(q_[i], q_[j]));
    }
  }

  void run(int iterations) {
    const size_t k = q_.size();
    if (k < 2) return;
    const double t = static_cast<double>(q_[0].cols());
    double step = 0.2;
    for (int it = 0; it < iterations; ++it) {
      const auto [i, j] = closest_pair();
      const size_t mover = (it % 2 == 0) ? i : j;
      const double worst = row_max(mover);

      // Soft-max weighted repulsion from the nearest neighbours of `mover`.
      const double temperature = 0.02 * t;
      CMatrix push = CMatrix::Zero(q_[mover].rows(), q_[mover].cols());
      for (size_t l = 0; l < k; ++l) {
        if (l == mover) continue;
        const double w = std::exp((get(mover, l) - worst) / temperature);
        if (w < 1e-8) continue;
        push += w * (q_[l] * (q_[l].adjoint() * q_[mover]));
      }
      push -= q_[mover] * (q_[mover].adjoint() * push);
      const double norm = push.norm();
      CMatrix candidate = q_[mover];
      if (norm > 1e-14) candidate -= (step / norm) * push;
      // Small random kick keeps symmetric configurations from stalling.
      candidate += (0.05 * step) * rng_.complex_normal_matrix(candidate.rows(), candidate.cols());
      candidate = orthonormal_basis(candidate);

      std::vector<double> row(k, 0.0);
      double cand_worst = 0.0;
      for (size_t l = 0; l < k; ++l) {
        if (l == mover) continue;
        row[l] = overlap(candidate, q_[l]);
        cand_worst = std::max(cand_worst, row[l]);
      }
      if (cand_worst < worst) {
        q_[mover] = std::move(candidate);
        for (size_t l = 0; l < k; ++l) {
          if (l != mover) set(mover, l, row[l]);
        }
        step = std::min(step * 1.3, 0.5);
      } else {
        step *= 0.6;
        if (step < 1e-7) step = 0.2;
      }
    }
  }

  const std::vector<CMatrix>& bases() const { return q_; }

 private:
  double get(size_t a, size_t b) const { return s_[a * q_.size() + b]; }
  void set(size_t a, size_t b, double v) {
    s_[a * q_.size() + b] = v;
    s_[b * q_.size() + a] = v;
  }
  double row_max(size_t a) const {
    double m = 0.0;
    for (size_t l = 0; l < q_.size(); ++l) {
      if (l != a) m = std::max(m, get(a, l));
    }
    return m;
  }
  std::pair<size_t, size_t> closest_pair() const {
    std::pair<size_t, size_t> best{0, 1};
    double m = -1.0;
    for (size_t a = 0; a < q_.size(); ++a) {
      for (size_t b = a + 1; b < q_.size(); ++b) {
        if (get(a, b) > m) {
          m = get(a, b);
          best = {a, b};
        }
      }
    }
    return best;
  }

  std::vector<CMatrix> q_;
  std::vector<double> s_;
  RandomStream rng_;
};

TrainingCodebook assemble(int n_tx, int t_len, int bits, double rho, std::uint64_t seed,
                          const std::vector<CMatrix>& bases) {
  TrainingCodebook cb;
  cb.n_tx = n_tx;
  cb.t_len = t_len;
  cb.bits = bits;
  cb.rho = rho;
  cb.seed = seed;
  cb.entries.reserve(bases.size());
  for (const CMatrix& q : bases) cb.entries.push_back(std::sqrt(rho) * q);
  cb.min_chordal = cb.entries.size() < 2 ? kInf : min_chordal_distance(cb.entries);
  return cb;
}

std::vector<CMatrix> random_bases(int n_tx, int t_len, int bits, std::uint64_t seed, std::uint64_t index) {
  RandomStream rng = RandomStream::substream(seed, {static_cast<std::uint64_t>(StreamPurpose::kCodebook), index});
  std::vector<CMatrix> bases;
  const size_t count = size_t{1} << bits;
  bases.reserve(count);
  for (size_t k = 0; k < count; ++k) bases.push_back(haar_isometry(n_tx, t_len, rng));
  return bases;
}

}  // namespace

void TrainingCodebook::validate(double tol) const {
  if (n_tx < 1 || t_len < 1 || t_len > n_tx) throw FormatError("codebook: invalid n_tx/t_len");
  if (bits < 0 || bits > kMaxCodebookBits) throw FormatError("codebook: invalid bits");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw FormatError("codebook: rho must be positive");
  if (entries.size() != (size_t{1} << bits)) {
    throw FormatError("codebook: expected " + std::to_string(size_t{1} << bits) + " entries, found " +
                      std::to_string(entries.size()));
  }
  const CMatrix target = rho * CMatrix::Identity(t_len, t_len);
  for (size_t k = 0; k < entries.size(); ++k) {
    const CMatrix& x = entries[k];
    if (x.rows() != n_tx || x.cols() != t_len) {
      throw FormatError("codebook: entry " + std::to_string(k) + " has the wrong shape");
    }
    if ((x.adjoint() * x - target).norm() > tol * rho * t_len) {
      throw FormatError("codebook: entry " + std::to_string(k) + " is not unitary");
    }
  }
  const double recomputed = entries.size() < 2 ? kInf : min_chordal_distance(entries);
  const bool both_inf = std::isinf(recomputed) && std::isinf(min_chordal);
  if (!both_inf && !(std::abs(recomputed - min_chordal) <= tol)) {
    throw FormatError("codebook: cached min_chordal does not match the entries");
  }
}

TrainingCodebook TrainingCodebook::rescaled(double new_rho) const {
  if (!(new_rho > 0.0)) throw DomainError("codebook: rho must be positive");
  TrainingCodebook out = *this;
  const double scale = std::sqrt(new_rho / rho);
  for (CMatrix& x : out.entries) x *= scale;
  out.rho = new_rho;
  return out;
}

double chordal_distance(const CMatrix& x, const CMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionError("chordal_distance: shape mismatch");
  const double px = training_power(x);
  const double py = training_power(y);
  if (!(px > 0.0) || !(py > 0.0)) throw DomainError("chordal_distance: zero-power input");
  const CMatrix proj_x = (x * x.adjoint()) / px;
  const CMatrix proj_y = (y * y.adjoint()) / py;
  return (proj_x - proj_y).norm() / std::sqrt(2.0);
}

double min_chordal_distance(const std::vector<CMatrix>& entries) {
  if (entries.size() < 2) throw DomainError("min_chordal_distance: need at least two entries");
  double best = kInf;
  for (size_t a = 0; a < entries.size(); ++a) {
    for (size_t b = a + 1; b < entries.size(); ++b) best = std::min(best, chordal_distance(entries[a], entries[b]));
  }
  return best;
}

TrainingCodebook random_codebook(int n_tx, int t_len, int bits, double rho, std::uint64_t seed,
                                 std::uint64_t index) {
  require_codebook_shape(n_tx, t_len, bits);
  if (!(rho > 0.0)) throw DomainError("random_codebook: rho must be positive");
  return assemble(n_tx, t_len, bits, rho, seed, random_bases(n_tx, t_len, bits, seed, index));
}

TrainingCodebook random_search_codebook(int n_tx, int t_len, int bits, double rho, int candidates,
                                        std::uint64_t seed) {
  if (candidates < 1) throw DomainError("random_search_codebook: need at least one candidate");
  TrainingCodebook best = random_codebook(n_tx, t_len, bits, rho, seed, 0);
  for (int c = 1; c < candidates; ++c) {
    TrainingCodebook cand = random_codebook(n_tx, t_len, bits, rho, seed, static_cast<std::uint64_t>(c));
    if (cand.min_chordal > best.min_chordal) best = std::move(cand);
  }
  return best;
}

TrainingCodebook design_gsp(int n_tx, int t_len, int bits, double rho, int budget, std::uint64_t seed,
                            const GspOptions& options) {
  require_codebook_shape(n_tx, t_len, bits);
  if (!(rho > 0.0)) throw DomainError("design_gsp: rho must be positive");
  if (budget < 0) throw DomainError("design_gsp: budget must be >= 0");
  if (options.restarts < 1) throw DomainError("design_gsp: need at least one restart");

  if (bits == 0) return assemble(n_tx, t_len, bits, rho, seed, random_bases(n_tx, t_len, bits, seed, 0));

  TrainingCodebook best;
  bool have_best = false;
  for (int r = 0; r < options.restarts; ++r) {
    const auto index = static_cast<std::uint64_t>(r);
    PackingRefiner refiner(
        random_bases(n_tx, t_len, bits, seed, index),
        RandomStream::substream(seed, {static_cast<std::uint64_t>(StreamPurpose::kCodebook), kRefineStreamOffset + index}));
    refiner.run(budget);
    TrainingCodebook cand = assemble(n_tx, t_len, bits, rho, seed, refiner.bases());
    if (!have_best || cand.min_chordal > best.min_chordal) {
      best = std::move(cand);
      have_best = true;
    }
  }
  return best;
}

std::string codebook_to_json(const TrainingCodebook& cb) {
  nlohmann::ordered_json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kCodebookFormatVersion;
  doc["n_tx"] = cb.n_tx;
  doc["t_len"] = cb.t_len;
  doc["bits"] = cb.bits;
  doc["rho"] = cb.rho;
  doc["seed"] = cb.seed;
  if (std::isfinite(cb.min_chordal)) {
    doc["min_chordal"] = cb.min_chordal;
  } else {
    doc["min_chordal"] = nullptr;  // single-entry codebook
  }
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const CMatrix& x : cb.entries) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (Eigen::Index c = 0; c < x.cols(); ++c) row.push_back({x(r, c).real(), x(r, c).imag()});
      rows.push_back(std::move(row));
    }
    entries.push_back(std::move(rows));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(1) + "\n";
}

TrainingCodebook codebook_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("codebook: not valid JSON: ") + e.what());
  }
  TrainingCodebook cb;
  try {
    if (doc.at("format").get<std::string>() != kFormatTag) throw FormatError("codebook: unexpected format tag");
    const int version = doc.at("version").get<int>();
    if (version != kCodebookFormatVersion) {
      throw UnsupportedVersionError("codebook: unsupported format version " + std::to_string(version) +
                                    " (this build reads version " + std::to_string(kCodebookFormatVersion) + ")");
    }
    cb.n_tx = doc.at("n_tx").get<int>();
    cb.t_len = doc.at("t_len").get<int>();
    cb.bits = doc.at("bits").get<int>();
    cb.rho = doc.at("rho").get<double>();
    cb.seed = doc.at("seed").get<std::uint64_t>();
    const auto& mc = doc.at("min_chordal");
    cb.min_chordal = mc.is_null() ? kInf : mc.get<double>();
    for (const auto& rows : doc.at("entries")) {
      if (!rows.is_array() || static_cast<int>(rows.size()) != cb.n_tx) {
        throw FormatError("codebook: entry row count does not match n_tx");
      }
      CMatrix x(cb.n_tx, cb.t_len);
      for (int r = 0; r < cb.n_tx; ++r) {
        const auto& row = rows[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != cb.t_len) {
          throw FormatError("codebook: entry column count does not match t_len");
        }
        for (int c = 0; c < cb.t_len; ++c) {
          const auto& z = row[static_cast<size_t>(c)];
          if (!z.is_array() || z.size() != 2) throw FormatError("codebook: complex values must be [re, im]");
          x(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
        }
      }
      cb.entries.push_back(std::move(x));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("codebook: malformed field: ") + e.what());
  }
  cb.validate();
  return cb;
}

void save_codebook(const TrainingCodebook& cb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("codebook: cannot open " + path.string() + " for writing");
  out << codebook_to_json(cb);
  if (!out) throw FormatError("codebook: write to " + path.string() + " failed");
}

TrainingCodebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("codebook: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return codebook_from_json(buf.str());
}

}  // namespace fddtrain
