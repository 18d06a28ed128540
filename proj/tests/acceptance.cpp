// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance 5 7             selected criteria
//   acceptance --seed 42 3     custom seed for the randomized criteria
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "centroflow/acceptance.hpp"

int main(int argc, char** argv) {
  namespace acc = centroflow::acceptance;
  std::uint64_t seed = acc::kDefaultSeed;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      seed = std::stoull(argv[++i]);
    } else {
      ids.push_back(std::stoi(arg));
    }
  }
  const auto results = acc::run_all(std::cout, ids, seed);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
