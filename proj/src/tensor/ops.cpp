#include "tensor/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace taskgrid::tensor {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

ConstMap view(const std::vector<double>& v, std::size_t r, std::size_t c) {
    return ConstMap(v.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

MutMap view(std::vector<double>& v, std::size_t r, std::size_t c) {
    return MutMap(v.data(), static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

void require_matrix(const std::string& op, const Tensor& a) {
    if (a.rank() != 2) throw ShapeError(op + " expects a matrix, got " + shape_string(a.shape()));
}

void require_same(const std::string& op, const Tensor& a, const Tensor& b) {
    require_matrix(op, a);
    require_matrix(op, b);
    if (a.shape() != b.shape()) throw ShapeError(op, a.shape(), b.shape());
}

Node* parent(Node& n, std::size_t i) {
    Node* p = n.parents[i].get();
    if (!p->requires_grad) return nullptr;
    p->ensure_grad();
    return p;
}

} // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_matrix("matmul", a);
    require_matrix("matmul", b);
    if (a.cols() != b.rows()) throw ShapeError("matmul", a.shape(), b.shape());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    std::vector<double> out(n * m);
    view(out, n, m).noalias() = view(a.node().value, n, k) * view(b.node().value, k, m);
    return make_result({n, m}, std::move(out), {a, b}, [n, k, m](Node& self) {
        auto g = view(self.grad, n, m);
        Node* pa = self.parents[0].get();
        Node* pb = self.parents[1].get();
        if (Node* ga = parent(self, 0)) {
            view(ga->grad, n, k).noalias() += g * view(pb->value, k, m).transpose();
        }
        if (Node* gb = parent(self, 1)) {
            view(gb->grad, k, m).noalias() += view(pa->value, n, k).transpose() * g;
        }
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same("add", a, b);
    std::vector<double> out(a.size());
    const auto& av = a.node().value;
    const auto& bv = b.node().value;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
    return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
        for (std::size_t p = 0; p < 2; ++p) {
            if (Node* g = parent(self, p)) {
                for (std::size_t i = 0; i < self.grad.size(); ++i) g->grad[i] += self.grad[i];
            }
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same("sub", a, b);
    std::vector<double> out(a.size());
    const auto& av = a.node().value;
    const auto& bv = b.node().value;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
    return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
        if (Node* g = parent(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) g->grad[i] += self.grad[i];
        }
        if (Node* g = parent(self, 1)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) g->grad[i] -= self.grad[i];
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same("mul", a, b);
    std::vector<double> out(a.size());
    const auto& av = a.node().value;
    const auto& bv = b.node().value;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    return make_result(a.shape(), std::move(out), {a, b}, [](Node& self) {
        const auto& av = self.parents[0]->value;
        const auto& bv = self.parents[1]->value;
        if (Node* g = parent(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) g->grad[i] += self.grad[i] * bv[i];
        }
        if (Node* g = parent(self, 1)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) g->grad[i] += self.grad[i] * av[i];
        }
    });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
    require_matrix("add_row", a);
    require_matrix("add_row", row);
    if (row.rows() != 1 || row.cols() != a.cols()) throw ShapeError("add_row", a.shape(), row.shape());
    const std::size_t n = a.rows(), m = a.cols();
    std::vector<double> out(a.node().value);
    const auto& rv = row.node().value;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) out[r * m + c] += rv[c];
    return make_result(a.shape(), std::move(out), {a, row}, [n, m](Node& self) {
        if (Node* g = parent(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) g->grad[i] += self.grad[i];
        }
        if (Node* g = parent(self, 1)) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < m; ++c) g->grad[c] += self.grad[r * m + c];
        }
    });
}

Tensor mul_row(const Tensor& a, const Tensor& row) {
    require_matrix("mul_row", a);
    require_matrix("mul_row", row);
    if (row.rows() != 1 || row.cols() != a.cols()) throw ShapeError("mul_row", a.shape(), row.shape());
    const std::size_t n = a.rows(), m = a.cols();
    std::vector<double> out(a.node().value);
    const auto& rv = row.node().value;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) out[r * m + c] *= rv[c];
    return make_result(a.shape(), std::move(out), {a, row}, [n, m](Node& self) {
        const auto& av = self.parents[0]->value;
        const auto& rv = self.parents[1]->value;
        if (Node* g = parent(self, 0)) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < m; ++c) g->grad[r * m + c] += self.grad[r * m + c] * rv[c];
        }
        if (Node* g = parent(self, 1)) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < m; ++c) g->grad[c] += self.grad[r * m + c] * av[r * m + c];
        }
    });
}

Tensor mul_col(const Tensor& a, const Tensor& col) {
    require_matrix("mul_col", a);
    require_matrix("mul_col", col);
    if (col.cols() != 1 || col.rows() != a.rows()) throw ShapeError("mul_col", a.shape(), col.shape());
    const std::size_t n = a.rows(), m = a.cols();
    std::vector<double> out(a.node().value);
    const auto& cv = col.node().value;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) out[r * m + c] *= cv[r];
    return make_result(a.shape(), std::move(out), {a, col}, [n, m](Node& self) {
        const auto& av = self.parents[0]->value;
        const auto& cv = self.parents[1]->value;
        if (Node* g = parent(self, 0)) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < m; ++c) g->grad[r * m + c] += self.grad[r * m + c] * cv[r];
        }
        if (Node* g = parent(self, 1)) {
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < m; ++c) g->grad[r] += self.grad[r * m + c] * av[r * m + c];
        }
    });
}

Tensor scale(const Tensor& a, double k) {
    std::vector<double> out(a.node().value);
    for (double& v : out) v *= k;
    return make_result(a.shape(), std::move(out), {a}, [k](Node& self) {
        if (Node* g = parent(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) g->grad[i] += k * self.grad[i];
        }
    });
}

Tensor relu(const Tensor& a) {
    std::vector<double> out(a.node().value);
    for (double& v : out) v = v > 0.0 ? v : 0.0;
    return make_result(a.shape(), std::move(out), {a}, [](Node& self) {
        if (Node* g = parent(self, 0)) {
            const auto& x = self.parents[0]->value;
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                if (x[i] > 0.0) g->grad[i] += self.grad[i];
        }
    });
}

Tensor sigmoid(const Tensor& a) {
    std::vector<double> out(a.node().value);
    for (double& v : out) {
        v = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    }
    return make_result(a.shape(), std::move(out), {a}, [](Node& self) {
        if (Node* g = parent(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) {
                const double s = self.value[i];
                g->grad[i] += self.grad[i] * s * (1.0 - s);
            }
        }
    });
}

Tensor softmax_rows(const Tensor& a) {
    require_matrix("softmax_rows", a);
    const std::size_t n = a.rows(), m = a.cols();
    std::vector<double> out(a.node().value);
    for (std::size_t r = 0; r < n; ++r) {
        double* row = out.data() + r * m;
        const double mx = *std::max_element(row, row + m);
        double total = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            row[c] = std::exp(row[c] - mx);
            total += row[c];
        }
        for (std::size_t c = 0; c < m; ++c) row[c] /= total;
    }
    return make_result(a.shape(), std::move(out), {a}, [n, m](Node& self) {
        if (Node* g = parent(self, 0)) {
            for (std::size_t r = 0; r < n; ++r) {
                const double* y = self.value.data() + r * m;
                const double* gy = self.grad.data() + r * m;
                double dot = 0.0;
                for (std::size_t c = 0; c < m; ++c) dot += y[c] * gy[c];
                for (std::size_t c = 0; c < m; ++c) g->grad[r * m + c] += y[c] * (gy[c] - dot);
            }
        }
    });
}

Tensor transpose(const Tensor& a) {
    require_matrix("transpose", a);
    const std::size_t n = a.rows(), m = a.cols();
    std::vector<double> out(n * m);
    view(out, m, n) = view(a.node().value, n, m).transpose();
    return make_result({m, n}, std::move(out), {a}, [n, m](Node& self) {
        if (Node* g = parent(self, 0)) {
            view(g->grad, n, m) += view(self.grad, m, n).transpose();
        }
    });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
    if (parts.empty()) throw ShapeError("concat of zero tensors");
    if (axis != 0 && axis != 1) throw ShapeError("concat axis must be 0 or 1");
    for (const auto& p : parts) require_matrix("concat", p);
    std::size_t rows = 0, cols = 0;
    if (axis == 0) {
        cols = parts[0].cols();
        for (const auto& p : parts) {
            if (p.cols() != cols) throw ShapeError("concat", parts[0].shape(), p.shape());
            rows += p.rows();
        }
    } else {
        rows = parts[0].rows();
        for (const auto& p : parts) {
            if (p.rows() != rows) throw ShapeError("concat", parts[0].shape(), p.shape());
            cols += p.cols();
        }
    }
    std::vector<double> out(rows * cols);
    std::vector<std::size_t> extent;
    std::size_t offset = 0;
    for (const auto& p : parts) {
        const auto& v = p.node().value;
        if (axis == 0) {
            std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(offset * cols));
            extent.push_back(p.rows());
            offset += p.rows();
        } else {
            const std::size_t pc = p.cols();
            for (std::size_t r = 0; r < rows; ++r)
                std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(r * pc), pc,
                            out.begin() + static_cast<std::ptrdiff_t>(r * cols + offset));
            extent.push_back(pc);
            offset += pc;
        }
    }
    return make_result({rows, cols}, std::move(out), parts,
                       [axis, rows, cols, extent](Node& self) {
        std::size_t off = 0;
        for (std::size_t i = 0; i < extent.size(); ++i) {
            Node* g = parent(self, i);
            const std::size_t e = extent[i];
            if (g) {
                if (axis == 0) {
                    for (std::size_t j = 0; j < e * cols; ++j) g->grad[j] += self.grad[off * cols + j];
                } else {
                    for (std::size_t r = 0; r < rows; ++r)
                        for (std::size_t c = 0; c < e; ++c)
                            g->grad[r * e + c] += self.grad[r * cols + off + c];
                }
            }
            off += e;
        }
    });
}

Tensor slice_rows(const Tensor& a, std::size_t begin, std::size_t end) {
    require_matrix("slice_rows", a);
    if (begin > end || end > a.rows()) {
        throw ShapeError("slice_rows [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + shape_string(a.shape()));
    }
    const std::size_t m = a.cols();
    const auto& v = a.node().value;
    std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(begin * m),
                            v.begin() + static_cast<std::ptrdiff_t>(end * m));
    return make_result({end - begin, m}, std::move(out), {a}, [begin, m](Node& self) {
        if (Node* g = parent(self, 0)) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) g->grad[begin * m + i] += self.grad[i];
        }
    });
}

Tensor sum(const Tensor& a) {
    double total = 0.0;
    for (double v : a.values()) total += v;
    return make_result({1, 1}, {total}, {a}, [](Node& self) {
        if (Node* g = parent(self, 0)) {
            for (double& x : g->grad) x += self.grad[0];
        }
    });
}

Tensor mean(const Tensor& a) {
    return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor mean_rows(const Tensor& a) {
    require_matrix("mean_rows", a);
    const std::size_t n = a.rows(), m = a.cols();
    if (n == 0) throw ShapeError("mean_rows of empty tensor " + shape_string(a.shape()));
    std::vector<double> out(m, 0.0);
    const auto& v = a.node().value;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < m; ++c) out[c] += v[r * m + c];
    for (double& x : out) x /= static_cast<double>(n);
    return make_result({1, m}, std::move(out), {a}, [n, m](Node& self) {
        if (Node* g = parent(self, 0)) {
            const double inv = 1.0 / static_cast<double>(n);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < m; ++c) g->grad[r * m + c] += self.grad[c] * inv;
        }
    });
}

Tensor gather_rows(const Tensor& a, const std::vector<std::int64_t>& index, std::size_t group) {
    require_matrix("gather_rows", a);
    if (group == 0 || index.size() % group != 0) {
        throw ShapeError("gather_rows index count " + std::to_string(index.size()) +
                         " not divisible by group " + std::to_string(group));
    }
    const std::size_t n = a.rows(), m = a.cols();
    const std::size_t out_rows = index.size() / group;
    for (auto i : index) {
        if (i < -1 || i >= static_cast<std::int64_t>(n)) {
            throw ShapeError("gather_rows index " + std::to_string(i) + " out of range for " +
                             shape_string(a.shape()));
        }
    }
    std::vector<double> out(out_rows * group * m, 0.0);
    const auto& v = a.node().value;
    for (std::size_t j = 0; j < index.size(); ++j) {
        if (index[j] < 0) continue;
        std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(index[j]) * m), m,
                    out.begin() + static_cast<std::ptrdiff_t>(j * m));
    }
    return make_result({out_rows, group * m}, std::move(out), {a}, [index, m](Node& self) {
        if (Node* g = parent(self, 0)) {
            for (std::size_t j = 0; j < index.size(); ++j) {
                if (index[j] < 0) continue;
                const std::size_t src = static_cast<std::size_t>(index[j]) * m;
                for (std::size_t c = 0; c < m; ++c) g->grad[src + c] += self.grad[j * m + c];
            }
        }
    });
}

Tensor bce_loss(const Tensor& pred, const Tensor& target) {
    if (pred.shape() != target.shape()) throw ShapeError("bce_loss", pred.shape(), target.shape());
    const auto& p = pred.node().value;
    const auto& t = target.node().value;
    const double n = static_cast<double>(p.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double q = std::clamp(p[i], kBceEpsilon, 1.0 - kBceEpsilon);
        total -= t[i] * std::log(q) + (1.0 - t[i]) * std::log(1.0 - q);
    }
    // The clamp is treated as identity in the backward pass so saturated
    // predictions still receive a corrective gradient.
    return make_result({1, 1}, {total / n}, {pred, target}, [n](Node& self) {
        const auto& p = self.parents[0]->value;
        const auto& t = self.parents[1]->value;
        const double g0 = self.grad[0] / n;
        if (Node* g = parent(self, 0)) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double q = std::clamp(p[i], kBceEpsilon, 1.0 - kBceEpsilon);
                g->grad[i] += g0 * (q - t[i]) / (q * (1.0 - q));
            }
        }
        if (Node* g = parent(self, 1)) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double q = std::clamp(p[i], kBceEpsilon, 1.0 - kBceEpsilon);
                g->grad[i] += g0 * (std::log(1.0 - q) - std::log(q));
            }
        }
    });
}

} // namespace taskgrid::tensor
