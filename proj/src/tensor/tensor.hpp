#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace taskgrid::tensor {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

class ShapeError : public std::invalid_argument {
public:
    ShapeError(const std::string& op, const Shape& a, const Shape& b);
    explicit ShapeError(const std::string& message);
};

// One vertex of the recorded computation graph. Leaves (parameters, inputs)
// have no parents and no backward function.
struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    void ensure_grad();
};

// Dense row-major tensor handle with shared ownership of its graph node.
// Copies alias the same storage; use clone() for a detached deep copy.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor filled(Shape shape, double value, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t rows() const;
    std::size_t cols() const;
    std::size_t size() const { return node().value.size(); }

    std::span<const double> values() const { return node().value; }
    std::span<double> mutable_values() { return node().value; }
    double item() const;
    double at(std::size_t r, std::size_t c) const;

    bool requires_grad() const { return node().requires_grad; }
    void set_requires_grad(bool flag) { node().requires_grad = flag; }
    bool has_grad() const { return !node().grad.empty(); }
    std::span<const double> grad() const { return node().grad; }
    std::span<double> mutable_grad();
    void zero_grad();

    // Reverse-mode sweep from a scalar. Leaf gradients accumulate across
    // calls until zero_grad(); the intermediate graph is released afterwards.
    void backward();

    Tensor clone() const;

    const std::shared_ptr<Node>& node_ptr() const { return node_; }
    Node& node();
    const Node& node() const;

    explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

private:
    std::shared_ptr<Node> node_;
};

// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

bool grad_enabled();

// Creates a result node whose parents are recorded only when grad is on and
// at least one input requires it.
Tensor make_result(Shape shape, std::vector<double> values,
                   std::vector<Tensor> inputs,
                   std::function<void(Node&)> backward_fn);

} // namespace taskgrid::tensor
