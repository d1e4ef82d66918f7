#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::string format;
  std::string output;
  std::string oracle;
  unsigned jobs = 0;
  bool print_config = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("config", o.config_path, "YAML run configuration (defaults when omitted)");
  sub->add_option("--set", o.sets, "override a config entry, section.key=value (repeatable)");
  sub->add_option("--format", o.format, "csv or json");
  sub->add_option("--output,-o", o.output, "output file, directory for several runs, or - for stdout");
  sub->add_option("--with-oracle", o.oracle, "discrete-bath oracle, N=<modes>[,w_max=..][,initial=product|dressed]");
  sub->add_option("--jobs,-j", o.jobs, "worker threads");
  sub->add_flag("--print-config", o.print_config, "print the resolved configuration and exit");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fermibath::cli;
  CLI::App app{"fermibath: occupation dynamics and transport of a two-level mode in a heat bath"};
  app.set_version_flag("--version", std::string(fb_version()));
  app.require_subcommand(1);
  Options o;
  const char* commands[][2] = {{"evolve", "occupation and transport trajectories"},
                               {"scan", "equilibrium asymptotics over T, g0 or mu"},
                               {"oracle-compare", "analytic occupation against the discrete bath"},
                               {"kernel-dump", "memory kernel and its integral"}};
  for (auto& c : commands) add_common(app.add_subcommand(c[0], c[1]), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig c;
  try {
    if (!o.config_path.empty()) c = load_config(o.config_path);
    if (!c.command.empty() && c.command != command)
      throw ConfigError("config is for command '" + c.command + "', invoked as '" + command + "'", 0, "command");
    c.command = command;
    for (const auto& s : o.sets) apply_override(c, s);
    if (!o.format.empty()) apply_override(c, "output.format=" + o.format);
    if (!o.output.empty()) c.output.path = o.output;
    if (!o.oracle.empty()) apply_oracle_flag(c, o.oracle);
    if (o.jobs) c.jobs = o.jobs;
    check_config(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error";
    if (!o.config_path.empty() && e.line()) std::cerr << " (" << o.config_path << ":" << e.line() << ")";
    if (!e.key().empty()) std::cerr << " [" << e.key() << "]";
    std::cerr << ": " << e.what() << "\n";
    return kConfigError;
  }
  if (o.print_config) {
    std::cout << serialize_config(c);
    return 0;
  }

  try {
    const auto tables = run_command(command, c);
    for (const auto& f : write_outputs(command, c, tables)) std::cerr << "wrote " << f << "\n";
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return 0;
}
