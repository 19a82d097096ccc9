#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "plurikit/plurikit.h"

int main(int argc, char** argv) {
  CLI::App app{"plurikit: Lelong mass profiles and slice experiments for positive currents"};
  app.footer(plk_usage());

  std::string command;
  std::string config;
  std::string out;
  uint64_t seed = 0;
  size_t budget = 0;
  size_t frames = 0;
  unsigned threads = 0;

  app.add_option("command", command, "command to run")->required();
  app.add_option("--config", config, "JSON run configuration")->required();
  app.add_option("--out", out, "output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override mc.seed");
  app.add_option("--budget", budget, "override mc.budget")->check(CLI::Range(static_cast<size_t>(1000), static_cast<size_t>(1) << 40));
  app.add_option("--frames", frames, "override grassmannian.frames")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "worker thread cap (results do not depend on it)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  plk_run_options options{};
  options.has_seed = seed_opt->count() > 0 ? 1 : 0;
  options.seed = seed;
  options.budget = budget;
  options.frames = frames;
  options.threads = threads;
  options.out_dir = out.c_str();

  const int code = plk_run(command.c_str(), config.c_str(), &options);
  if (code != 0) std::fprintf(stderr, "plurikit: %s\n", plk_last_error());
  return code;
}
