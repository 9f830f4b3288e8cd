#include <cstdio>
#include <cstdint>
#include <exception>

#include "CLI11.hpp"
#include "experiment.hpp"
#include "slt/errors.hpp"

namespace {

// Exit codes: 0 success, 1 configuration error, 2 runtime failure.
int guarded(int (*cmd)(const slt::tool::CommonFlags&),
            const slt::tool::CommonFlags& flags) {
  try {
    return cmd(flags);
  } catch (const slt::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const slt::FormatError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strong lottery ticket experiment driver"};
  app.require_subcommand(1);

  slt::tool::CommonFlags flags;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "JSON config file")
        ->required();
    sub->add_option("--seed", seed_value, "override the config's master seed");
    sub->add_option("--out", flags.out_dir, "override the output directory");
    sub->add_flag("--force", flags.force, "overwrite a completed output directory");
    sub->add_option("--workers", flags.workers, "evaluation worker threads")
        ->check(CLI::PositiveNumber);
    return sub;
  };

  CLI::App* gen = add_common(
      app.add_subcommand("gen-data", "generate dataset CSVs and a manifest"));
  CLI::App* run = add_common(
      app.add_subcommand("run", "run the configured algorithm for R repeats"));
  CLI::App* prune = add_common(app.add_subcommand(
      "prune", "post-evolutionary pruning of stored run masks"));
  CLI::App* landscape = add_common(app.add_subcommand(
      "landscape", "2-D objective slice and Hessian probe around a stored run"));
  CLI::App* stats = add_common(
      app.add_subcommand("stats", "aggregate stored runs into summary tables"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (CLI::App* sub : {gen, run, prune, landscape, stats})
    if (sub->parsed() && sub->count("--seed")) flags.seed = seed_value;

  if (gen->parsed()) return guarded(slt::tool::cmd_gen_data, flags);
  if (run->parsed()) return guarded(slt::tool::cmd_run, flags);
  if (prune->parsed()) return guarded(slt::tool::cmd_prune, flags);
  if (landscape->parsed()) return guarded(slt::tool::cmd_landscape, flags);
  if (stats->parsed()) return guarded(slt::tool::cmd_stats, flags);
  return 1;
}
