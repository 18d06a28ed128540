#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace centroflow::acceptance {

constexpr int kCriteria = 10;
constexpr std::uint64_t kDefaultSeed = 20260415;

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Runs one criterion (1..10). Criterion 7 reuses the criterion 5 solve when
/// both run in the same process.
Result run_criterion(int id, std::uint64_t seed = kDefaultSeed);

/// Runs the listed criteria (all when empty), printing one line per criterion.
std::vector<Result> run_all(std::ostream& log, const std::vector<int>& ids = {},
                            std::uint64_t seed = kDefaultSeed);

std::string format(const Result& r);

}  // namespace centroflow::acceptance
