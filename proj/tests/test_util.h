// Copyright 2026 The TrustSR Authors
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

#ifndef TRUSTSR_TESTS_TEST_UTIL_H_
#define TRUSTSR_TESTS_TEST_UTIL_H_

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "trustsr/error.h"

namespace trustsr::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("trustsr-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace trustsr::testing

// Asserts that `stmt` throws trustsr::Error carrying `expected_code`.
#define EXPECT_TRUSTSR_ERROR(stmt, expected_code)                          \
  do {                                                                     \
    try {                                                                  \
      stmt;                                                                \
      ADD_FAILURE() << "expected " #expected_code " from " #stmt;          \
    } catch (const ::trustsr::Error& e__) {                                \
      EXPECT_EQ(e__.code(), expected_code)                                 \
          << ::trustsr::ErrorCodeName(e__.code()) << ": " << e__.what();   \
    }                                                                      \
  } while (0)

#endif  // TRUSTSR_TESTS_TEST_UTIL_H_
