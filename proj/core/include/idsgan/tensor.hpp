#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace idsgan {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major array of doubles with an optional gradient buffer.
///
/// A Tensor is a handle: copies share storage, so a parameter held by a model
/// and the same parameter captured on a tape are one object. Use clone() for an
/// independent copy.
class Tensor {
 public:
  Tensor();
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return impl_->data.size(); }
  bool empty() const { return impl_->data.empty(); }

  std::span<const double> values() const { return impl_->data; }
  std::span<double> values() { return impl_->data; }
  const std::vector<double>& vector() const { return impl_->data; }
  double item() const;

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool flag) { impl_->requires_grad = flag; }

  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<const double> grad() const { return impl_->grad; }
  /// Gradient buffer, allocated (zeroed) on first access.
  std::span<double> grad_buffer() const;
  void zero_grad();
  void clear_grad() { impl_->grad.clear(); }

  /// Untracked copy with a different shape of equal size. ops::reshape is the
  /// differentiable counterpart.
  Tensor reshaped(Shape shape) const;
  /// Independent deep copy; the gradient is not copied.
  Tensor clone() const;

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  struct Impl {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;
  };
  explicit Tensor(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<Impl> impl_;
};

/// Ordered record of differentiable operations executed while the tape is active.
///
/// Each entry owns handles to its inputs and output plus a closure that reads
/// the output gradient and accumulates into the input gradients. backward()
/// replays the entries newest-first, each exactly once.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void record(std::string op, Tensor output, BackwardFn fn);
  std::size_t size() const { return entries_.size(); }
  void clear();

  /// Seeds d(loss)/d(loss) = 1 and propagates to every reachable input.
  void backward(const Tensor& loss);

  /// Names of the recorded operations in execution order.
  std::vector<std::string> op_names() const;
  /// Entry indices in the order backward() last visited them.
  const std::vector<std::size_t>& last_visit_order() const { return visit_order_; }

  /// Tape receiving operations on this thread, or nullptr.
  static Tape* active();

 private:
  friend class TapeScope;
  friend class NoTapeScope;

  struct Entry {
    std::string op;
    Tensor output;
    BackwardFn backward;
  };
  std::vector<Entry> entries_;
  std::vector<std::size_t> visit_order_;
  bool consumed_ = false;
};

/// Makes a tape active on the current thread for the lifetime of the scope.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

/// Suspends recording on the current thread (inference paths).
class NoTapeScope {
 public:
  NoTapeScope();
  ~NoTapeScope();
  NoTapeScope(const NoTapeScope&) = delete;
  NoTapeScope& operator=(const NoTapeScope&) = delete;

 private:
  Tape* previous_;
};

/// Runs backward on `tape` from the scalar `loss`.
void backward(const Tensor& loss, Tape& tape);

/// True when an active tape exists and any input participates in gradients.
bool should_record(std::initializer_list<const Tensor*> inputs);

}  // namespace idsgan
