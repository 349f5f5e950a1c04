#include "glat/io/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <regex>

namespace {

// "50um", "0.05 mm", "5e-5" (metres)
double parse_length(const std::string& s) {
  static const std::regex re(R"(^\s*([-+0-9.eE]+)\s*(m|mm|um|µm)?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw glat::ValidationError({"band: cannot parse length '" + s + "'"});
  double v = 0.0;
  try {
    v = std::stod(m[1].str());
  } catch (const std::exception&) {
    throw glat::ValidationError({"band: cannot parse length '" + s + "'"});
  }
  const std::string u = m[2].str();
  if (u == "mm") return v * 1e-3;
  if (u == "um" || u == "µm") return v * 1e-6;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graded lattice design, analysis and inspection"};
  app.set_version_flag("--version", glat::kToolVersion);
  std::string config, out = "out";
  std::size_t threads = 1;
  std::optional<unsigned long long> seed;
  app.add_option("--config", config, "Project config (JSON)")->required();
  app.add_option("--out", out, "Output directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for synthetic scans");
  app.require_subcommand(1);

  std::string band;
  int bins = 0;
  for (int s = 0; s < 6; ++s) {
    auto* sub = app.add_subcommand(glat::stage_name(glat::Stage(s)));
    if (glat::Stage(s) == glat::Stage::Inspect) {
      sub->add_option("--band", band, "Tolerance band, e.g. 50um or 0.05mm");
      sub->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);
    }
  }
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto cfg = glat::load_config(config);
    if (!band.empty()) cfg.inspection.band = parse_length(band);
    if (bins > 0) cfg.inspection.bins = bins;
    const auto stage = glat::stage_from_name(app.get_subcommands().front()->get_name());
    glat::RunOptions opt;
    opt.out_dir = out;
    opt.threads = threads;
    opt.seed = seed;
    const auto res = glat::run_pipeline(cfg, stage, opt);
    res.summary.write(std::cout);
    return 0;
  } catch (const glat::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const glat::ParameterError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const glat::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const glat::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
