// End-to-end verification binary: one numbered check per claim, one
// PASS/FAIL line each. Run with no arguments for everything, or pass check
// numbers (e.g. "2 3"). --cache <dir> reuses finished runs across processes.

#include <cstdio>
#include <cstring>
#include <set>
#include <string>

int run_criterion(int id, const std::string& cache_dir);

int main(int argc, char** argv) {
  std::set<int> wanted;
  std::string cache_dir;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--cache") == 0 && i + 1 < argc) {
      cache_dir = argv[++i];
    } else {
      wanted.insert(std::atoi(argv[i]));
    }
  }
  if (wanted.empty())
    for (int c = 1; c <= 11; ++c) wanted.insert(c);

  int failures = 0;
  for (int c : wanted) failures += run_criterion(c, cache_dir);
  return failures == 0 ? 0 : 1;
}
