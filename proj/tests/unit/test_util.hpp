// Copyright 2026 The Hanforge Authors.
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

#ifndef HANFORGE_TESTS_UNIT_TEST_UTIL_HPP_
#define HANFORGE_TESTS_UNIT_TEST_UTIL_HPP_

#include <gtest/gtest.h>

#include "hanforge/error.hpp"

// Asserts that `stmt` throws hanforge::Error carrying `expected`.
#define EXPECT_THROW_CODE(stmt, expected)                                      \
  do {                                                                         \
    try {                                                                      \
      (void)(stmt);                                                            \
      ADD_FAILURE() << "no exception from " #stmt;                             \
    } catch (const ::hanforge::Error& e_) {                                    \
      EXPECT_EQ(e_.code(), (expected)) << e_.what();                           \
    }                                                                          \
  } while (0)

#endif  // HANFORGE_TESTS_UNIT_TEST_UTIL_HPP_
