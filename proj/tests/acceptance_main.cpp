#include <iostream>

#include "scatter/acceptance.hpp"

int main() {
  int failed = 0;
  for (const auto& r : scatter::run_acceptance()) {
    std::cout << scatter::format_result(r) << std::endl;
    if (!r.pass) ++failed;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << failed << " of 10 criteria failing" << std::endl;
  return failed ? 1 : 0;
}
