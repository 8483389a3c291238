#include <gtest/gtest.h>

#include "idsgan/errors.hpp"
#include "idsgan/ops.hpp"
#include "idsgan/tensor.hpp"

namespace idsgan {
namespace {

TEST(Tensor, ShapeMustMatchValueCount) {
  EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), ShapeError);
  const Tensor t({2, 3}, std::vector<double>(6, 1.5));
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.dim(1), 3u);
}

TEST(Tensor, ScalarHasOneValue) {
  const Tensor s = Tensor::scalar(4.25);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s.item(), 4.25);
  EXPECT_THROW(Tensor::zeros({2}).item(), ShapeError);
}

TEST(Tensor, GradBufferMirrorsShape) {
  Tensor t = Tensor::zeros({3, 4}, true);
  EXPECT_FALSE(t.has_grad());
  EXPECT_EQ(t.grad_buffer().size(), 12u);
  EXPECT_TRUE(t.has_grad());
  t.clear_grad();
  EXPECT_FALSE(t.has_grad());
}

TEST(Tensor, CloneIsIndependent) {
  Tensor a({2}, {1.0, 2.0});
  Tensor b = a.clone();
  b.values()[0] = 9.0;
  EXPECT_EQ(a.values()[0], 1.0);
  EXPECT_FALSE(a.same_storage(b));
  Tensor c = a;
  EXPECT_TRUE(a.same_storage(c));
}

TEST(Tensor, ReshapedCopiesValues) {
  const Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor b = a.reshaped({3, 2});
  EXPECT_EQ(b.shape(), (Shape{3, 2}));
  EXPECT_EQ(b.vector(), a.vector());
  EXPECT_THROW(a.reshaped({4, 2}), ShapeError);
}

TEST(Tape, SumOfSquaresGradient) {
  Tensor x({2}, {1.0, 2.0}, true);
  Tape tape;
  Tensor loss;
  {
    TapeScope scope(tape);
    loss = ops::sum(ops::square(x));
  }
  tape.backward(loss);
  ASSERT_TRUE(x.has_grad());
  EXPECT_DOUBLE_EQ(x.grad()[0], 2.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], 4.0);
}

TEST(Tape, BackwardRejectsNonScalar) {
  Tensor x({2}, {1.0, 2.0}, true);
  Tape tape;
  Tensor y;
  {
    TapeScope scope(tape);
    y = ops::square(x);
  }
  EXPECT_THROW(tape.backward(y), UsageError);
}

TEST(Tape, TensorsOffThePathGetNoGradient) {
  Tensor x({2}, {1.0, 2.0}, true);
  Tensor unused({2}, {3.0, 4.0}, true);
  Tape tape;
  Tensor loss;
  {
    TapeScope scope(tape);
    loss = ops::sum(x);
    Tensor side = ops::square(unused);
    (void)side;
  }
  tape.backward(loss);
  EXPECT_TRUE(x.has_grad());
  EXPECT_FALSE(unused.has_grad());
}

TEST(Tape, ReplaysEachEntryOnceInReverse) {
  Tensor x({3}, {0.5, -1.0, 2.0}, true);
  Tape tape;
  Tensor loss;
  {
    TapeScope scope(tape);
    loss = ops::mean(ops::sigmoid(ops::square(x)));
  }
  EXPECT_EQ(tape.op_names(), (std::vector<std::string>{"square", "sigmoid", "mean"}));
  tape.backward(loss);
  EXPECT_EQ(tape.last_visit_order(), (std::vector<std::size_t>{2, 1, 0}));
  EXPECT_THROW(tape.backward(loss), UsageError);
}

TEST(Tape, NothingRecordedWithoutScope) {
  Tensor x({2}, {1.0, 2.0}, true);
  Tape tape;
  {
    TapeScope scope(tape);
    NoTapeScope pause;
    Tensor y = ops::square(x);
    EXPECT_FALSE(y.requires_grad());
  }
  EXPECT_EQ(tape.size(), 0u);
}

TEST(Tape, ConstantsAreNotRecorded) {
  const Tensor x({2}, {1.0, 2.0});
  Tape tape;
  TapeScope scope(tape);
  const Tensor y = ops::square(x);
  EXPECT_EQ(tape.size(), 0u);
  EXPECT_FALSE(y.requires_grad());
}

TEST(Tape, GradientsAccumulateAcrossUses) {
  Tensor x({1}, {3.0}, true);
  Tape tape;
  Tensor loss;
  {
    TapeScope scope(tape);
    loss = ops::sum(ops::add(ops::square(x), x));
  }
  tape.backward(loss);
  EXPECT_DOUBLE_EQ(x.grad()[0], 7.0);
}

}  // namespace
}  // namespace idsgan
