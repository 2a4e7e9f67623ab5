#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "slagfib/io.hpp"

#ifndef SLAGFIB_VERSION
#define SLAGFIB_VERSION "unknown"
#endif

using namespace slagfib::cli;

int main(int argc, char** argv) {
  CLI::App app{"slagfib: special Lagrangian fibrations of perturbed flat Calabi-Yau models"};
  app.set_version_flag("--version", std::string("slagfib ") + SLAGFIB_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  std::optional<std::uint64_t> seed_override;
  app.add_option("--config", config_path, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (0: hardware concurrency)")->check(CLI::Range(0, 1024));
  app.add_option("--seed-override", seed_override, "replace the configured seed");

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
  };
  const Entry entries[] = {
      {"generate", "sample potentials and write <name>.structure", cmd_generate},
      {"certify", "certify the implicit function hypotheses", cmd_certify},
      {"solve", "solve for sections at the configured base points", cmd_solve},
      {"fibrate", "certify, solve over the base grid and check the embedding", cmd_fibrate},
      {"verify", "volume comparison, injectivity and collapsing checks", cmd_verify},
      {"report", "refresh and print summary.json", cmd_report},
  };
  for (const auto& e : entries) app.add_subcommand(e.name, e.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  Context ctx;
  ctx.out = out_dir;
  ctx.threads = threads;
  try {
    nlohmann::json j = slagfib::read_json(config_path);
    if (seed_override) {
      if (!j.is_object()) throw ConfigError("config must be an object");
      j["seed"] = *seed_override;
    }
    ctx.config = parse_config(j);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  for (const auto& e : entries) {
    if (app.got_subcommand(e.name)) return run_guarded(e.fn, ctx);
  }
  return kInternalError;
}
