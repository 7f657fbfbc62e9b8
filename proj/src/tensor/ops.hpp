#pragma once

#include "tensor/tensor.hpp"

#include <cstdint>
#include <vector>

namespace taskgrid::tensor {

// All ops work on rank-2 tensors (rows x cols). Scalars are 1x1.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
// a (n x m) + row (1 x m), broadcast over rows.
Tensor add_row(const Tensor& a, const Tensor& row);
// a (n x m) * row (1 x m), broadcast over rows.
Tensor mul_row(const Tensor& a, const Tensor& row);
// a (n x m) * col (n x 1), broadcast over columns.
Tensor mul_col(const Tensor& a, const Tensor& col);
Tensor scale(const Tensor& a, double c);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softmax_rows(const Tensor& a);
Tensor transpose(const Tensor& a);
// axis 0 stacks rows, axis 1 stacks columns.
Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
// Column-wise mean: (n x m) -> (1 x m).
Tensor mean_rows(const Tensor& a);

// Row gather with grouping: output row r is the concatenation of input rows
// index[r*group .. r*group+group-1]; an index of -1 contributes zeros.
Tensor gather_rows(const Tensor& a, const std::vector<std::int64_t>& index,
                   std::size_t group);

// Mean binary cross-entropy. Predictions are clamped to [eps, 1-eps].
inline constexpr double kBceEpsilon = 1e-7;
Tensor bce_loss(const Tensor& pred, const Tensor& target);

} // namespace taskgrid::tensor
