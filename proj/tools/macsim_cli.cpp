// Command-line front end: generate | assess | compare.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "macsim/config.hpp"
#include "macsim/error.hpp"
#include "macsim/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kInfeasible = 2, kIo = 3 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<double> cutoff;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> thinning;
  std::optional<std::size_t> threads;
  std::optional<std::string> blocking;
  bool dump = false;
};

void add_run_options(CLI::App* cmd, std::string& config, Overrides& o) {
  cmd->add_option("-c,--config", config, "JSON run configuration")->required();
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("-o,--out", o.out, "output directory");
  cmd->add_option("--mode", o.mode, "original | extended");
  cmd->add_option("--cutoff", o.cutoff, "linkage cutoff");
  cmd->add_option("-S,--samples", o.samples, "number of snapshots");
  cmd->add_option("-d,--thinning", o.thinning, "kernel steps between snapshots");
  cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
  cmd->add_option("--blocking", o.blocking, "comma-separated blocking variables ('' for none)");
  cmd->add_flag("--dump-snapshots", o.dump, "write snapshots.bin per block");
}

macsim::RunConfig load(const std::string& path, const Overrides& o) {
  macsim::RunConfig cfg = macsim::load_run_config(path);
  if (o.seed) {
    cfg.seed = *o.seed;
  }
  if (o.out) cfg.output_dir = *o.out;
  if (o.mode) cfg.mode = macsim::parse_mode(*o.mode);
  if (o.cutoff) cfg.cutoff = *o.cutoff;
  if (o.samples) cfg.samples = *o.samples;
  if (o.thinning) cfg.thinning = *o.thinning;
  if (o.threads) cfg.threads = *o.threads;
  if (o.dump) cfg.dump_snapshots = true;
  if (o.blocking) {
    cfg.blocking.clear();
    std::stringstream ss(*o.blocking);
    for (std::string item; std::getline(ss, item, ',');) {
      if (!item.empty()) cfg.blocking.push_back(item);
    }
  }
  cfg.validate();
  return cfg;
}

void print_run(const macsim::RunResult& run, const macsim::RunConfig& cfg) {
  for (std::size_t k = 0; k < run.variants.size(); ++k) {
    const auto& agg = run.aggregates[k];
    for (const auto& w : agg.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << run.variants[k].name << ": grand mean " << agg.grand_mean << " over "
              << agg.records << " records in " << agg.included.size() << " blocks\n";
  }
  for (const auto& b : run.blocks) {
    if (b.status == macsim::BlockStatus::degenerate || b.status == macsim::BlockStatus::infeasible) {
      std::cerr << "warning: block " << b.key << " skipped (" << macsim::to_string(b.status)
                << "): " << b.note << '\n';
    }
  }
  std::cout << "results written to " << cfg.output_dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Record-linkage accuracy assessment by Markov-chain simulation"};
  app.require_subcommand(1);

  std::string gen_config;
  std::string gen_out = "synth";
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::size_t> gen_nx, gen_ny;
  bool gen_clean = false;
  auto* gen = app.add_subcommand("generate", "write a synthetic X/Y pair with known matches");
  gen->add_option("-c,--config", gen_config, "JSON generator settings");
  gen->add_option("-o,--out", gen_out, "output directory");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--n-x", gen_nx, "records in file X");
  gen->add_option("--n-y", gen_ny, "records in file Y");
  gen->add_flag("--no-perturb", gen_clean, "copy X records unchanged");

  std::string assess_config;
  Overrides assess_o;
  auto* assess = app.add_subcommand("assess", "estimate linkage accuracy for one method");
  add_run_options(assess, assess_config, assess_o);

  std::string compare_config;
  Overrides compare_o;
  auto* compare = app.add_subcommand("compare", "assess several methods on shared snapshots");
  add_run_options(compare, compare_config, compare_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*gen) {
      macsim::GeneratorConfig cfg;
      if (!gen_config.empty()) {
        std::ifstream in(gen_config);
        if (!in) throw macsim::IoError("cannot read " + gen_config);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = macsim::parse_generator_config(ss.str());
      }
      if (gen_seed) cfg.seed = *gen_seed;
      if (gen_nx) cfg.n_x = *gen_nx;
      if (gen_ny) cfg.n_y = *gen_ny;
      if (gen_clean) cfg.plan = macsim::PerturbationPlan::none();
      cfg.validate();
      const auto log = macsim::run_generate(cfg, gen_out);
      std::cout << "wrote " << cfg.n_x << " X and " << cfg.n_y << " Y records to " << gen_out
                << " (" << log.sa1_adjacent << " SA1 moves, " << log.bday_missing
                << " missing BDAY, " << log.sex_flip << " SEX flips)\n";
    } else if (*assess) {
      const auto cfg = load(assess_config, assess_o);
      print_run(macsim::run_assess(cfg), cfg);
    } else {
      const auto cfg = load(compare_config, compare_o);
      print_run(macsim::run_compare(cfg), cfg);
    }
  } catch (const macsim::InfeasibleMarginalsError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const macsim::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
