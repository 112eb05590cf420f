// Copyright 2026 The pcqa Authors.
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

#ifndef PCQA_TESTS_TEST_SUPPORT_H_
#define PCQA_TESTS_TEST_SUPPORT_H_

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>

#include "pcqa/error.h"
#include "pcqa/point_cloud.h"

namespace pcqa::testing {

// Runs `fn` and checks that it throws pcqa::Error with `code`.
template <typename Fn>
void ExpectErrorCode(ErrorCode code, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << ErrorCodeName(code) << ", nothing thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("pcqa_" + tag + "_" + std::to_string(::getpid()));
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
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline PointCloud RandomCloud(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-3.0, 7.0);
  std::uniform_int_distribution<int> col(0, 255);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.positions.push_back({pos(rng), pos(rng), pos(rng)});
    c.colors.push_back({static_cast<std::uint8_t>(col(rng)),
                        static_cast<std::uint8_t>(col(rng)),
                        static_cast<std::uint8_t>(col(rng))});
  }
  return c;
}

}  // namespace pcqa::testing

#endif  // PCQA_TESTS_TEST_SUPPORT_H_
