#include "tensor/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace taskgrid::tensor {

namespace {
thread_local bool g_grad_enabled = true;
}

std::string shape_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
}

ShapeError::ShapeError(const std::string& op, const Shape& a, const Shape& b)
    : std::invalid_argument("shape mismatch in " + op + ": " + shape_string(a) +
                            " vs " + shape_string(b)) {}

ShapeError::ShapeError(const std::string& message) : std::invalid_argument(message) {}

void Node::ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    return filled(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::filled(Shape shape, double value, bool requires_grad) {
    const std::size_t n = shape_size(shape);
    return from(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
    if (shape_size(shape) != values.size()) {
        throw ShapeError("value count " + std::to_string(values.size()) +
                         " does not match shape " + shape_string(shape));
    }
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return from({1, 1}, {value}, requires_grad);
}

Node& Tensor::node() {
    if (!node_) throw std::logic_error("use of undefined tensor");
    return *node_;
}

const Node& Tensor::node() const {
    if (!node_) throw std::logic_error("use of undefined tensor");
    return *node_;
}

const Shape& Tensor::shape() const { return node().shape; }

std::size_t Tensor::rows() const {
    const auto& s = shape();
    if (s.size() != 2) throw ShapeError("expected a matrix, got " + shape_string(s));
    return s[0];
}

std::size_t Tensor::cols() const {
    const auto& s = shape();
    if (s.size() != 2) throw ShapeError("expected a matrix, got " + shape_string(s));
    return s[1];
}

double Tensor::item() const {
    if (size() != 1) throw ShapeError("item() on non-scalar " + shape_string(shape()));
    return node().value[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
    return node().value[r * cols() + c];
}

std::span<double> Tensor::mutable_grad() {
    node().ensure_grad();
    return node().grad;
}

void Tensor::zero_grad() {
    auto& g = node().grad;
    std::fill(g.begin(), g.end(), 0.0);
}

Tensor Tensor::clone() const {
    return from(shape(), node().value, requires_grad());
}

void Tensor::backward() {
    Node& root = node();
    if (root.value.size() != 1) {
        throw ShapeError("backward() called on non-scalar " + shape_string(root.shape));
    }
    if (!root.requires_grad) return;

    // Iterative post-order DFS gives a topological order.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack{{&root, 0}};
    seen.insert(&root);
    while (!stack.empty()) {
        auto& [n, next] = stack.back();
        if (next < n->parents.size()) {
            Node* p = n->parents[next++].get();
            if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }

    root.ensure_grad();
    root.grad[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
    }
    for (Node* n : order) {
        if (!n->parents.empty()) {
            n->parents.clear();
            n->backward_fn = nullptr;
            n->grad.clear();
        }
    }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

Tensor make_result(Shape shape, std::vector<double> values,
                   std::vector<Tensor> inputs,
                   std::function<void(Node&)> backward_fn) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    if (g_grad_enabled) {
        const bool any = std::any_of(inputs.begin(), inputs.end(),
                                     [](const Tensor& t) { return t.requires_grad(); });
        if (any) {
            node->requires_grad = true;
            node->parents.reserve(inputs.size());
            for (auto& t : inputs) node->parents.push_back(t.node_ptr());
            node->backward_fn = std::move(backward_fn);
        }
    }
    return Tensor(std::move(node));
}

} // namespace taskgrid::tensor
