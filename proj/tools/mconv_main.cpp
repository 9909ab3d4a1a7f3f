// mconv: batch runner for measure-convolution checks.
#include "mconv/catalog.hpp"
#include "mconv/runner.hpp"
#include "mconv/serialization.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace {

int emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return 0;
  }
  try {
    mconv::write_file(out, text);
  } catch (const std::exception& err) {
    std::cerr << "mconv: " << err.what() << "\n";
    return mconv::kExitUsage;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolution of measures under group actions: checks, approximation, Ellis equality"};
  app.set_version_flag("--version", std::string(mconv::kToolVersion));
  app.require_subcommand(1);

  std::string config_path, out_path, format_name = "tsv", system = std::string(mconv::kCircleScenario);
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::size_t jobs = 1;

  auto add_batch = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Scenario file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--system", system, "Built-in system or table path when no --config is given");
    sub->add_option("--seed", seed, "Override the seed of every scenario");
    sub->add_option("--mode", mode, "Override arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--out", out_path, "Report destination (default stdout)");
    sub->add_option("--format", format_name, "Report format")->check(CLI::IsMember({"tsv", "json"}));
    sub->add_option("--jobs", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);
    return sub;
  };
  auto* verify = add_batch("verify", "Check the action, convolution and topology laws");
  auto* approximate = add_batch("approximate", "Build empirical averages landing in a weak neighborhood");
  auto* ellis = add_batch("ellis", "Compare measure convolution with the enveloping-semigroup action");

  std::string mu_path, nu_path, conv_mode = "exact", conv_system;
  auto* conv = app.add_subcommand("convolve", "Convolve two finite measures");
  conv->add_option("--system", conv_system, "Built-in system or table path")->required();
  conv->add_option("--mu", mu_path, "Measure on the group")->required()->check(CLI::ExistingFile);
  conv->add_option("--nu", nu_path, "Measure on the space")->required()->check(CLI::ExistingFile);
  conv->add_option("--mode", conv_mode, "Arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
  conv->add_option("--out", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : mconv::kExitUsage;
  }

  try {
    if (conv->parsed()) {
      const std::string text =
          mconv::run_convolve(conv_system, mconv::read_file(mu_path), mconv::read_file(nu_path), conv_mode, ".");
      return emit(text, out_path);
    }

    mconv::RunRequest request;
    request.command = verify->parsed() ? "verify" : approximate->parsed() ? "approximate" : "ellis";
    (void)ellis;
    request.seed = seed;
    request.mode = mode;
    request.jobs = jobs;
    if (!config_path.empty()) {
      request.config = mconv::parse_config(mconv::read_file(config_path));
      request.base_dir = std::filesystem::path(config_path).parent_path().string();
      if (request.base_dir.empty()) request.base_dir = ".";
    } else {
      request.config = mconv::default_scenario(request.command, system);
      const bool builtin = system == mconv::kCircleScenario || [&] {
        for (const auto& n : mconv::builtin_finite_names())
          if (n == system) return true;
        return false;
      }();
      if (!builtin) request.config["system"] = nlohmann::json{{"table", system}};
    }
    const auto result = mconv::run_scenarios(request);
    const int written = emit(mconv::render(result.report, mconv::parse_report_format(format_name)), out_path);
    if (result.exit_code == mconv::kExitUsage) {
      for (const auto& rec : result.report.records)
        for (const auto& [k, v] : rec.fields)
          if (k == "error") std::cerr << "mconv: " << std::get<std::string>(v) << "\n";
    }
    return written ? written : result.exit_code;
  } catch (const mconv::ConfigError& err) {
    std::cerr << "mconv: config: " << err.what() << "\n";
  } catch (const mconv::ParseError& err) {
    std::cerr << "mconv: parse: " << err.what() << "\n";
  } catch (const std::exception& err) {
    std::cerr << "mconv: " << err.what() << "\n";
  }
  return mconv::kExitUsage;
}
