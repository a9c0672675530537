// Runs the full acceptance tier and prints one verdict line per criterion.
// Exit status is nonzero if any criterion fails.

#include <cstdlib>
#include <iostream>
#include <string>

#include "verify.hpp"

int main(int argc, char** argv) {
  semipos::verify::SuiteOptions options;
  options.tier = semipos::verify::Tier::full;
  for (int i = 1; i < argc; ++i) options.only.emplace_back(argv[i]);
  int failed = 0;
  semipos::verify::run_suite(options, [&](const semipos::verify::CheckResult& r) {
    failed += !r.passed;
    std::cout << "criterion " << r.id.substr(1) << " " << (r.passed ? "PASS" : "FAIL") << " [" << r.title << "] "
              << r.detail << " (" << static_cast<int>(r.seconds + 0.5) << " s)" << std::endl;
  });
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}
