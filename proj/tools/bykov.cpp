#include <CLI11.hpp>
#include <iostream>

#include "bykov/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace bykov::cli;
  CLI::App app{"Return-map laboratory for attracting heteroclinic cycles of two saddle-foci"};
  app.require_subcommand(1);
  app.footer(keys_help() +
             "\nExit codes: 0 ok, 2 configuration or validation error, 3 numerical failure.\n"
             "BYKOV_THREADS caps the number of worker threads.");

  std::string config_file, out_dir;
  bool force = false;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->allow_extras();
    sub->add_option("--config", config_file, "key=value configuration file");
    sub->add_option("--out", out_dir, "output directory (default bykov-<command>)");
    sub->add_flag("--force", force, "overwrite an existing output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  CommandContext ctx;
  ctx.out_dir = out_dir;
  ctx.force = force;
  try {
    if (!config_file.empty()) ctx.config.load_file(config_file);
    for (const std::string& extra : sub->remaining()) {
      if (extra.rfind("--", 0) != 0 || extra.find('=') == std::string::npos)
        throw ConfigError("unexpected argument '" + extra + "' (overrides use --key=value)");
      const auto eq = extra.find('=');
      ctx.config.set(extra.substr(2, eq - 2), extra.substr(eq + 1));
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return run_command(sub->get_name(), ctx, std::cout, std::cerr);
}
