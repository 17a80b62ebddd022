#pragma once

#include <gtest/gtest.h>

#include <blockfi/error.hpp>

// Asserts that `stmt` throws blockfi::Error of the given kind.
#define EXPECT_BLOCKFI_ERROR(stmt, expected_kind)                                   \
  do {                                                                              \
    try {                                                                           \
      stmt;                                                                         \
      ADD_FAILURE() << "expected " << blockfi::to_string(expected_kind) << " from " \
                    << #stmt;                                                       \
    } catch (const blockfi::Error& e) {                                             \
      EXPECT_EQ(e.kind(), expected_kind) << e.what();                               \
    }                                                                               \
  } while (false)
