// Copyright 2026 The qagg Authors
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

#include "qagg/commute.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace qagg {
namespace {

using gates::cnot;
using gates::rz;

TEST(Commute, DisjointSupportsCommute) {
  const auto v = commutes(gates::h(0), gates::x(1));
  EXPECT_TRUE(v.commutes);
  EXPECT_EQ(v.residual, 0.0);
}

TEST(Commute, ControlCommutesWithZRotation) {
  EXPECT_TRUE(commutes(cnot(0, 1), rz(0.3, 0)).commutes);
  EXPECT_FALSE(commutes(cnot(0, 1), rz(0.3, 1)).commutes);
}

TEST(Commute, DiagonalGatesCommute) {
  EXPECT_TRUE(commutes(gates::cphase(0.4, 0, 1), rz(1.1, 1)).commutes);
  EXPECT_TRUE(commutes(gates::cphase(0.4, 0, 1), gates::cphase(-2.0, 1, 2)).commutes);
}

TEST(Commute, CnotsWithDistinctControlsOnSharedTargetCommute) {
  EXPECT_TRUE(commutes(cnot(0, 2), cnot(1, 2)).commutes);
  EXPECT_TRUE(commutes(cnot(0, 1), cnot(0, 2)).commutes);
  EXPECT_FALSE(commutes(cnot(0, 1), cnot(1, 2)).commutes);
}

TEST(Commute, BlocksCommuteWhileTheirGatesDoNot) {
  const Operator a({cnot(0, 1), rz(5.67, 1), cnot(0, 1)});
  const Operator b({cnot(1, 2), rz(5.67, 2), cnot(1, 2)});
  EXPECT_TRUE(commutes(a, b).commutes);
  EXPECT_FALSE(commutes(cnot(0, 1), cnot(1, 2)).commutes);
}

TEST(Commute, AgreesWithBruteForceOnRandomPairs) {
  std::mt19937_64 rng(2024);
  int agree = 0;
  for (int i = 0; i < 500; ++i) {
    const Gate a = testing::random_gate(rng, 3);
    const Gate b = testing::random_gate(rng, 3);
    const Matrix ua = testing::reference_unitary({a}, 3);
    const Matrix ub = testing::reference_unitary({b}, 3);
    const bool truth = max_abs(ua * ub - ub * ua) <= kCommuteTol;
    agree += commutes(a, b).commutes == truth;
  }
  EXPECT_EQ(agree, 500);
}

TEST(Commute, WidthLimitThrows) {
  const Operator a({cnot(0, 1), cnot(1, 2)});
  const Operator b({cnot(2, 3)});
  EXPECT_THROW(commutes(a, b, 3), WidthError);
  EXPECT_NO_THROW(commutes(a, b, 4));
}

TEST(Diagonal, DetectsDiagonalProducts) {
  EXPECT_TRUE(is_diagonal(sequence_unitary({cnot(0, 1), rz(5.67, 1), cnot(0, 1)}, {0, 1})));
  EXPECT_FALSE(is_diagonal(sequence_unitary({cnot(0, 1), rz(5.67, 1)}, {0, 1})));
  EXPECT_TRUE(is_diagonal(identity(4)));
  EXPECT_THROW(is_diagonal(Matrix::Zero(2, 3)), Error);
}

}  // namespace
}  // namespace qagg
