// Prints one line per acceptance criterion and exits nonzero if any fails.
// Criterion 13 reruns the whole suite and compares the two reports byte for
// byte.

#include <cstdio>
#include <string>

#include "nrmt/selftest.hpp"

namespace {

void print_line(int id, bool numeric_pass, double seconds, double limit, const std::string& detail) {
  const bool in_time = limit <= 0.0 || seconds < limit;
  const std::string budget = limit > 0.0 ? "limit " + std::to_string(static_cast<int>(limit)) + " s" : "no limit";
  std::printf("criterion %2d: %s  %s  [%.1f s, %s]\n", id, numeric_pass && in_time ? "PASS" : "FAIL",
              detail.c_str(), seconds, budget.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  const std::uint64_t seed = nrmt::kDefaultSeed;
  bool all = true;
  auto report_line = [&](const nrmt::CriterionOutcome& o) {
    print_line(o.id, o.pass, o.seconds, o.limit_seconds, o.record["metrics"].dump());
    all = all && o.pass && o.seconds < o.limit_seconds;
  };
  const auto first = nrmt::run_selftest(seed, {}, report_line);
  const std::string a = nrmt::selftest_report(seed, first);
  const auto t0 = std::chrono::steady_clock::now();
  const auto second = nrmt::run_selftest(seed);
  const std::string b = nrmt::selftest_report(seed, second);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool same = a == b;
  all = all && same;
  print_line(13, same, secs, 0.0,
             std::string("{\"report_bytes\":") + std::to_string(a.size()) +
                 ",\"byte_identical\":" + (same ? "true" : "false") + "}");
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
