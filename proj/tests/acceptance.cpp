// Acceptance suite: runs every verification suite and prints one line per
// check with the measured worst value against its pinned tolerance.

#include <cstdio>

#include "pfd/verify.hpp"

int main() {
  bool all_pass = true;
  int index = 0;
  for (const std::string& suite : pfd::verify_suite_names()) {
    ++index;
    for (const pfd::CheckResult& r : pfd::run_verify_suite(suite)) {
      all_pass = all_pass && r.pass;
      std::printf("[%s] %2d %-42s measured=%-12.4g tolerance=%-10.4g %s\n",
                  r.pass ? "PASS" : "FAIL", index, r.name.c_str(), r.measured,
                  r.threshold, r.note.c_str());
    }
  }
  std::printf(all_pass ? "acceptance: ALL PASS\n" : "acceptance: FAILURES\n");
  return all_pass ? 0 : 1;
}
