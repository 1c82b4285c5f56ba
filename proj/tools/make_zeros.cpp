// Generates the shipped zero archive: ordinates for the primitive characters
// of conductors 1, 3, 4 and 5 up to a target height, written in the
// data/zeros file format.  One-time tool; the output is committed.

#include <chrono>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "apb/zero_oracle.hpp"
#include "apb/zeros_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate the small-conductor zero archive"};
  std::string out_dir = "data/zeros";
  double height = 1e4;
  double step = 0.03;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--height", height, "verified height for every file");
  app.add_option("--step", step, "scan step");
  CLI11_PARSE(app, argc, argv);

  struct Job {
    uint64_t d;
    int index;
  };
  const Job jobs[] = {{1, 1}, {3, 1}, {4, 1}, {5, 1}, {5, 2}};
  for (const Job& j : jobs) {
    auto t0 = std::chrono::steady_clock::now();
    apb::ZeroList z = apb::oracle_zero_list(j.d, j.index, height, step);
    apb::write_zero_file(out_dir, z);
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("d=%llu chi%d: %zu ordinates to height %.0f (%.1fs)\n",
                (unsigned long long)j.d, j.index, z.ordinates.size(), height, dt);
    std::fflush(stdout);
  }
  return 0;
}
