#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kuzlab/driver.hpp"

int main(int argc, char **argv) {
  CLI::App app{"kuzlab: Kuznecov sums, distance distributions and heat sums on flat tori"};
  app.set_version_flag("--version", KUZLAB_BUILD_ID);

  std::string command, configPath, outDir = ".";
  std::vector<std::string> positional;
  int threads = 0;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;

  app.add_option("command", command, "one of: constants coeffs kuznecov heat distprof energy karamata mixture blocks")
      ->required();
  app.add_option("args", positional, "extra positional arguments (constants n s)");
  app.add_option("--config", configPath, "JSON config file");
  app.add_option("--out", outDir, "output directory");
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
  auto *seedOpt = app.add_option("--seed", seed, "RNG seed, overrides the config");
  auto *budgetOpt = app.add_option("--budget-points", budget, "lattice point budget, overrides the config")
                        ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  kuzlab::set_thread_count(threads);
  kuzlab::RunOptions opt;
  opt.outDir = outDir;
  opt.positional = positional;
  if (*seedOpt) opt.seed = seed;
  if (*budgetOpt) opt.budgetPoints = static_cast<double>(budget);

  return kuzlab::run_file(command, configPath, opt).status;
}
