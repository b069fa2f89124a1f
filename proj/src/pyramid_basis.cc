// Copyright 2026 The revcorr Authors.
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

#include "revcorr/pyramid_basis.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "revcorr/manifest.h"

namespace revcorr {
namespace {

// Unit-norm Gaussians of width sigma centred every `step` bins.
Eigen::MatrixXd Kernels(int length, double sigma, int step) {
  const int count = (length + step - 1) / step;
  Eigen::MatrixXd k(length, count);
  for (int c = 0; c < count; ++c) {
    const double center = c * step;
    for (int i = 0; i < length; ++i) {
      const double d = (i - center) / sigma;
      k(i, c) = std::exp(-0.5 * d * d);
    }
    k.col(c).normalize();
  }
  return k;
}

}  // namespace

PyramidBasis PyramidBasis::Build(int frames, int bands, int levels) {
  if (frames < 1 || bands < 1 || levels < 1) {
    throw std::invalid_argument("pyramid basis needs positive dimensions");
  }
  PyramidBasis b;
  b.frames_ = frames;
  b.bands_ = bands;
  int offset = 0;
  for (int l = 1; l <= levels; ++l) {
    Level level;
    level.offset = offset;
    level.time = Kernels(frames, l, l);
    level.band = Kernels(bands, l, l);
    for (int j = 0; j < level.band.cols(); ++j) {
      for (int i = 0; i < level.time.cols(); ++i) {
        b.columns_.push_back({l, i * l, j * l, static_cast<double>(l)});
      }
    }
    offset += static_cast<int>(level.time.cols() * level.band.cols());
    b.levels_.push_back(std::move(level));
  }
  return b;
}

int PyramidBasis::LevelSize(int level) const {
  if (level < 1 || level > levels()) throw std::out_of_range("pyramid level out of range");
  const Level& l = levels_[level - 1];
  return static_cast<int>(l.time.cols() * l.band.cols());
}

Eigen::MatrixXd PyramidBasis::Dense() const {
  Eigen::MatrixXd dense(rows(), cols());
  for (const Level& l : levels_) {
    const int nt = static_cast<int>(l.time.cols());
    for (int j = 0; j < l.band.cols(); ++j) {
      for (int i = 0; i < nt; ++i) {
        const Eigen::MatrixXd outer = l.time.col(i) * l.band.col(j).transpose();
        dense.col(l.offset + i + nt * j) = Eigen::Map<const Eigen::VectorXd>(outer.data(), rows());
      }
    }
  }
  return dense;
}

Eigen::VectorXd PyramidBasis::Synthesize(const Eigen::VectorXd& beta) const {
  if (beta.size() != cols()) throw std::invalid_argument("beta has the wrong length");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(frames_, bands_);
  for (const Level& l : levels_) {
    const Eigen::Map<const Eigen::MatrixXd> coef(beta.data() + l.offset, l.time.cols(),
                                                 l.band.cols());
    w.noalias() += l.time * coef * l.band.transpose();
  }
  return Eigen::Map<const Eigen::VectorXd>(w.data(), rows());
}

Eigen::MatrixXd PyramidBasis::Project(const Eigen::MatrixXd& x) const {
  if (x.cols() != rows()) throw std::invalid_argument("predictor rows have the wrong length");
  Eigen::MatrixXd z(x.rows(), cols());
  Eigen::MatrixXd v(frames_, bands_);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (int j = 0; j < bands_; ++j) {
      for (int i = 0; i < frames_; ++i) v(i, j) = x(r, i + frames_ * j);
    }
    for (const Level& l : levels_) {
      const Eigen::MatrixXd p = l.time.transpose() * v * l.band;
      z.row(r).segment(l.offset, p.size()) = Eigen::Map<const Eigen::RowVectorXd>(p.data(), p.size());
    }
  }
  return z;
}

std::string PyramidBasis::Hash() const {
  std::string text = "pyramid:" + std::to_string(frames_) + "x" + std::to_string(bands_) + ":" +
                     std::to_string(levels()) + "\n";
  char buf[32];
  for (const Level& l : levels_) {
    for (const Eigen::MatrixXd* m : {&l.time, &l.band}) {
      for (Eigen::Index i = 0; i < m->size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12e\n", m->data()[i]);
        text += buf;
      }
    }
  }
  return Sha256Hex(text);
}

}  // namespace revcorr
