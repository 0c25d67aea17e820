#include <iostream>

#include <CLI11.hpp>

#include "hypspec/commands.hpp"
#include "hypspec/errors.hpp"
#include "hypspec/manifest.hpp"

using namespace hypspec;

namespace {
constexpr int kValidation = 2;
constexpr int kNumerical = 3;
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bottom of the spectrum of hyperbolic surfaces modeled on graphs"};
  app.require_subcommand(1);

  std::string manifest_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  bool no_plot = false;

  for (const auto& name : commands::names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " stage");
    sub->add_option("--manifest", manifest_path, "run manifest (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--seed", seed, "Monte-Carlo seed (overrides mc.seed)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--no-plot", no_plot, "skip SVG plots");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  const auto* chosen = app.get_subcommands().front();
  try {
    const auto m = manifest::load(manifest_path);
    commands::RunOptions o;
    if (!out_dir.empty()) o.out = out_dir;
    if (chosen->count("--seed")) o.seed = seed;
    o.threads = threads;
    o.plot = !no_plot;
    const auto out = commands::run(chosen->get_name(), m, o);
    std::cout << out.summary;
    for (const auto& p : out.artifacts) std::cout << "wrote " << p.string() << '\n';
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}
