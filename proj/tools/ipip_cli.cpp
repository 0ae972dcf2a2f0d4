// ipip: run, validate and preset front end for the inverse-problem experiments.
//
// Exit codes: 0 success, 2 configuration or input-data error, 3 numerical failure, 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "ipip/cli/runner.hpp"

namespace {

using namespace ipip;
using namespace ipip::cli;

RunConfig load_any(const std::string& path) {
  const std::string text = read_text(path);
  if (std::filesystem::path(path).extension() == ".json") return config_from_manifest(text);
  return parse_config(text);
}

int report(const RunOutcome& r) {
  const auto& m = r.manifest;
  std::cout << "experiment " << m["experiment"].get<std::string>() << ": " << m["status"].get<std::string>() << " ("
            << m["artifacts"].size() << " artifacts, " << fmt(m["wall_clock_seconds"].get<double>()) << " s)\n";
  if (m.contains("error")) std::cerr << "error: " << m["error"].get<std::string>() << "\n";
  for (const auto& w : m["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  return r.exit_code;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "input data error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruct a paraxial boundary amplitude from image-line data"};
  app.require_subcommand(1);

  std::string run_path, validate_path, preset_name, preset_out;
  bool print_config = false;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file or a manifest.json");
  run->add_option("config", run_path, "config file, or manifest.json to replay")->required();
  auto* val = app.add_subcommand("validate", "Check a config file without computing anything");
  val->add_option("config", validate_path, "config file")->required();
  auto* pre = app.add_subcommand("preset", "Run a named preset experiment");
  pre->add_option("name", preset_name, "fig1 .. fig10")->required()->check(CLI::IsMember(preset_names()));
  pre->add_option("--out", preset_out, "output directory (default out/<name>)");
  pre->add_flag("--print-config", print_config, "print the preset's config instead of running it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*run) return guarded([&] { return report(ipip::cli::run(load_any(run_path))); });
  if (*val)
    return guarded([&] {
      const RunConfig c = load_any(validate_path);
      std::cout << "valid: " << to_string(c.experiment) << ", " << c.models.size() << " model(s), N = " << c.intervals
                << "\n";
      return 0;
    });
  return guarded([&] {
    RunConfig c = preset(preset_name);
    if (!preset_out.empty()) c.output_dir = preset_out;
    if (print_config) {
      std::cout << to_text(c);
      return 0;
    }
    return report(ipip::cli::run(c));
  });
}
