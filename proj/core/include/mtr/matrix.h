// Copyright 2026 The MTR Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTR_MATRIX_H_
#define MTR_MATRIX_H_

#include <Eigen/Dense>

namespace mtr {

// Row-major double matrix; one sample per row throughout the library.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;
using Vector = Eigen::VectorXd;

// Throws DomainError if any entry is NaN or infinite.
void CheckFinite(const Matrix& m, const char* what);

// Throws ShapeError unless m is rows x cols.
void CheckShape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                const char* what);

}  // namespace mtr

#endif  // MTR_MATRIX_H_
