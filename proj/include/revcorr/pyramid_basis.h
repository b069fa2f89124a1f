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

#ifndef REVCORR_PYRAMID_BASIS_H_
#define REVCORR_PYRAMID_BASIS_H_

#include <Eigen/Core>
#include <string>
#include <vector>

#include "revcorr/tf_rep.h"

namespace revcorr {

struct PyramidColumn {
  int level = 1;
  int center_frame = 0;
  int center_band = 0;
  double sigma = 1.0;
};

// Multi-resolution basis of separable 2-D Gaussians on the frame x band
// grid. Level l has sigma = l bins and centres every l bins from bin 0;
// Gaussians are truncated at the grid edges and every column has unit
// Euclidean norm. Columns are ordered by level, then band centre, then
// frame centre, matching the column-major vectorisation of T-F matrices.
class PyramidBasis {
 public:
  static PyramidBasis Build(int frames = kTfFrames, int bands = kTfBands, int levels = 4);

  int rows() const { return frames_ * bands_; }
  int cols() const { return static_cast<int>(columns_.size()); }
  int frames() const { return frames_; }
  int bands() const { return bands_; }
  int levels() const { return static_cast<int>(levels_.size()); }
  const std::vector<PyramidColumn>& columns() const { return columns_; }
  // Number of columns of one level (1-based).
  int LevelSize(int level) const;

  // The explicit rows() x cols() matrix.
  Eigen::MatrixXd Dense() const;
  // B * beta, a vectorised T-F weight map.
  Eigen::VectorXd Synthesize(const Eigen::VectorXd& beta) const;
  // Row i of the result is B^T x_i for row i of x (n x rows()).
  Eigen::MatrixXd Project(const Eigen::MatrixXd& x) const;

  // Digest of the grid layout and kernel values.
  std::string Hash() const;

 private:
  struct Level {
    int offset = 0;
    Eigen::MatrixXd time;  // frames x centres, unit-norm columns
    Eigen::MatrixXd band;  // bands x centres, unit-norm columns
  };

  int frames_ = 0;
  int bands_ = 0;
  std::vector<Level> levels_;
  std::vector<PyramidColumn> columns_;
};

}  // namespace revcorr

#endif  // REVCORR_PYRAMID_BASIS_H_
