#include "macsim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>

#include "macsim/comparison.hpp"
#include "macsim/error.hpp"
#include "macsim/estimation.hpp"
#include "macsim/linker.hpp"
#include "macsim/record_io.hpp"
#include "macsim/rng.hpp"
#include "macsim/simulator.hpp"

namespace macsim {

std::string_view to_string(BlockStatus status) {
  switch (status) {
    case BlockStatus::ok: return "ok";
    case BlockStatus::empty: return "empty";
    case BlockStatus::degenerate: return "degenerate";
    case BlockStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

AlignedPair load_input(const RunConfig& cfg) {
  if (cfg.synthgen) return generate(*cfg.synthgen).pair;
  const auto& in = *cfg.input;
  RecordTable x = read_records(in.x, in.csv);
  RecordTable y = read_records(in.y, in.csv);
  if (in.alignment) {
    const auto pairs = read_alignment(*in.alignment);
    return align_by_map(std::move(x), std::move(y), pairs);
  }
  return align_by_id(std::move(x), std::move(y));
}

std::vector<ResolvedVariant> resolve_variants(const RunConfig& cfg) {
  std::vector<VariableSpec> linking;
  for (const auto& v : cfg.variables) {
    if (std::find(cfg.blocking.begin(), cfg.blocking.end(), v.name) == cfg.blocking.end()) {
      linking.push_back(v);
    }
  }
  if (linking.empty()) throw ConfigError("no linking variables left after removing blocking variables");

  std::vector<ResolvedVariant> out;
  if (cfg.variants.empty()) {
    out.push_back({"base", cfg.mode, linking, cfg.cutoff});
    return out;
  }
  for (const auto& v : cfg.variants) {
    ResolvedVariant r{v.name, v.mode.value_or(cfg.mode), linking, v.cutoff.value_or(cfg.cutoff)};
    for (auto& spec : r.specs) {
      if (const auto it = v.tolerances.find(spec.name); it != v.tolerances.end()) {
        spec.tolerance = it->second;
      }
      spec.validate();
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

MugProfile resolve_mug(const RunConfig& cfg, const ResolvedVariant& variant,
                       const AgreementMatrix& a, std::span<const double> theta) {
  if (!cfg.external_mug.empty()) {
    MugProfile mug;
    for (const auto& spec : variant.specs) mug.variables.push_back(cfg.external_mug.at(spec.name));
    return mug;
  }
  const std::size_t off = a.rows_x() * a.rows_y() - std::min(a.rows_x(), a.rows_y());
  const MugProfile raw = estimate_mug(a, theta);
  return smooth_mug(raw, smoothing_epsilon(off));
}

BlockResult process_block(const AlignedPair& pair, const RunConfig& cfg,
                          const std::vector<ResolvedVariant>& variants, const Block& block,
                          std::size_t index) {
  BlockResult out;
  out.index = index;
  out.key = block.key;
  const BlockLayout layout = layout_block(pair, block);
  out.n_x = layout.x_rows.size();
  out.n_y = layout.y_cols.size();
  out.excluded_x = layout.excluded_x;
  for (auto i : layout.x_rows) out.x_ids.push_back(pair.file_x.id(i));
  for (auto j : layout.y_cols) out.y_ids.push_back(pair.file_y.id(j));
  if (block.residual || out.n_x == 0) {
    out.status = BlockStatus::empty;
    out.note = block.residual ? "missing blocking value" : "no X record with its match in the block";
    return out;
  }

  const ResolvedVariant& driver = variants.front();
  const AgreementMatrix a0 = build_agreement_matrix(pair, layout, driver.specs, driver.mode);

  try {
    for (const auto& v : variants) {
      VariantOutcome o;
      o.theta = thresholds(v.specs, v.mode);
      o.mug = resolve_mug(cfg, v, a0, o.theta);
      for (std::size_t l = 0; l < v.specs.size(); ++l) {
        try {
          o.params.variables.push_back(transition_params(o.mug[l]));
        } catch (const InfeasibleMarginalsError& e) {
          throw InfeasibleMarginalsError(v.specs[l].name + ": " + e.what());
        }
      }
      o.observed = observed_links(a0, o.theta, o.mug, v.cutoff);
      out.variants.push_back(std::move(o));
    }
  } catch (const EstimationError& e) {
    out.status = BlockStatus::degenerate;
    out.note = e.what();
    out.variants.clear();
    return out;
  } catch (const DomainError& e) {
    // Unsmoothable external m/u/g surface here.
    throw InfeasibleMarginalsError(block.key + ": " + e.what());
  } catch (const InfeasibleMarginalsError& e) {
    if (!cfg.skip_infeasible_blocks) throw InfeasibleMarginalsError(block.key + ": " + e.what());
    out.status = BlockStatus::infeasible;
    out.note = e.what();
    out.variants.clear();
    return out;
  }

  std::vector<RelinkTally> tallies;
  for (const auto& o : out.variants) tallies.emplace_back(o.observed);

  std::optional<SnapshotWriter> dump;
  if (cfg.dump_snapshots) {
    const auto dir = cfg.output_dir / ("block_" + std::to_string(index));
    std::filesystem::create_directories(dir);
    dump.emplace(dir / "snapshots.bin", a0);
  }

  ChainConfig chain{cfg.samples, cfg.thinning, derive_seed(cfg.seed, block.key), driver.mode};
  SnapshotHasher hasher;
  AgreementMatrix first;
  out.distances.reserve(cfg.samples);
  run_chain(a0, out.variants.front().params, out.variants.front().theta, chain,
            [&](std::size_t s, const AgreementMatrix& state) {
              if (s == 1) first = state;
              out.distances.push_back({distance(state, first), distance(state, a0)});
              hasher.add(state);
              if (dump) dump->append(state);
              for (std::size_t k = 0; k < variants.size(); ++k) {
                const auto& o = out.variants[k];
                MugProfile mug = o.mug;
                if (cfg.reestimate_per_sample && cfg.external_mug.empty()) {
                  mug = resolve_mug(cfg, variants[k], state, o.theta);
                }
                tallies[k].add(observed_links(state, o.theta, mug, variants[k].cutoff));
              }
            });
  if (dump) dump->close();
  out.snapshot_hash = hasher.value();
  for (std::size_t k = 0; k < variants.size(); ++k) out.variants[k].report = tallies[k].report();
  return out;
}

}  // namespace

RunResult execute(const AlignedPair& pair, const RunConfig& cfg,
                  const std::vector<ResolvedVariant>& variants) {
  if (variants.empty()) throw ConfigError("no linking method to assess");
  RunResult run;
  run.variants = variants;
  for (const auto& s : variants.front().specs) run.link_variables.push_back(s.name);

  const BlockPartition partition = block_partition(pair, cfg.blocking);
  const std::size_t nblocks = partition.blocks.size();
  run.blocks.resize(nblocks);
  std::vector<std::exception_ptr> errors(nblocks);

  std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(nblocks, 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b = next++; b < nblocks; b = next++) {
      try {
        run.blocks[b] = process_block(pair, cfg, variants, partition.blocks[b], b);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t k = 0; k < variants.size(); ++k) {
    std::vector<BlockAccuracy> accs;
    for (const auto& b : run.blocks) {
      if (b.status != BlockStatus::ok) continue;
      const auto& o = b.variants[k];
      // The two accuracy views must agree exactly on every run.
      if (o.report.mean_per_record() != o.report.mean_per_simulation()) {
        throw std::logic_error("grand-mean identity violated in block " + b.key);
      }
      accs.push_back({b.key, o.report, o.observed.links().size()});
    }
    run.aggregates.push_back(accs.empty() ? AggregateReport{} : summarize(accs));
  }
  return run;
}

namespace {

void write_outputs(const RunConfig& cfg, const RunResult& run, bool compare) {
  std::filesystem::create_directories(cfg.output_dir);
  for (std::size_t k = 0; k < run.variants.size(); ++k) {
    const auto root = compare ? cfg.output_dir / run.variants[k].name : cfg.output_dir;
    std::filesystem::create_directories(root);
    for (const auto& b : run.blocks) {
      if (b.status == BlockStatus::ok) {
        write_block_reports(root / ("block_" + std::to_string(b.index)), run, b, k);
      }
    }
    write_summary(root / "summary.csv", run, k);
  }
  if (compare) write_comparison(cfg.output_dir / "compare.csv", run);
}

}  // namespace

RunResult run_assess(const RunConfig& cfg) {
  cfg.validate();
  RunConfig single = cfg;
  single.variants.clear();
  const AlignedPair pair = load_input(single);
  RunResult run = execute(pair, single, resolve_variants(single));
  write_outputs(single, run, false);
  return run;
}

RunResult run_compare(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.variants.size() < 2) throw ConfigError("compare needs at least two variants");
  const AlignedPair pair = load_input(cfg);
  RunResult run = execute(pair, cfg, resolve_variants(cfg));
  write_outputs(cfg, run, true);
  return run;
}

PerturbationLog run_generate(const GeneratorConfig& cfg, const std::filesystem::path& out_dir) {
  const SyntheticData data = generate(cfg);
  std::filesystem::create_directories(out_dir);
  write_records(out_dir / "X.csv", data.pair.file_x);
  write_records(out_dir / "Y.csv", data.pair.file_y);
  write_alignment(out_dir / "alignment.csv", data.pair);
  return data.log;
}

}  // namespace macsim
