#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "macsim/error.hpp"
#include "macsim/pipeline.hpp"
#include "macsim/record_io.hpp"

namespace macsim {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

// Quote a free-text field if it could break the row.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_mug(const std::filesystem::path& path, const std::vector<std::string>& names,
               const MugProfile& mug) {
  auto out = open_out(path);
  out << "variable,m,u,g\n";
  for (std::size_t l = 0; l < names.size(); ++l) {
    const auto& v = mug.variables.at(l);
    out << names[l] << ',' << format_number(v.m) << ',' << format_number(v.u) << ','
        << format_number(v.g) << '\n';
  }
}

void write_params(const std::filesystem::path& path, const std::vector<std::string>& names,
                  const TransitionParams& params) {
  auto out = open_out(path);
  out << "variable,p1,p2,q1,q2,q3\n";
  for (std::size_t l = 0; l < names.size(); ++l) {
    const auto& t = params.variables.at(l);
    out << names[l] << ',' << format_number(t.p1) << ',' << format_number(t.p2) << ','
        << format_number(t.q1) << ',' << format_number(t.q2) << ',' << format_number(t.q3) << '\n';
  }
}

void write_block_reports(const std::filesystem::path& dir, const RunResult& run,
                         const BlockResult& block, std::size_t variant) {
  std::filesystem::create_directories(dir);
  const auto& o = block.variants.at(variant);

  {
    auto out = open_out(dir / "distances.csv");
    out << "sample_index,distance_to_sample1,distance_to_A0\n";
    for (std::size_t s = 0; s < block.distances.size(); ++s) {
      out << s + 1 << ',' << format_number(block.distances[s][0]) << ','
          << format_number(block.distances[s][1]) << '\n';
    }
  }
  {
    auto out = open_out(dir / "per_record.csv");
    out << "x_entity_id,proportion\n";
    const auto pr = o.report.per_record();
    for (std::size_t i = 0; i < pr.size(); ++i) {
      out << block.x_ids[i] << ',' << format_number(pr[i]) << '\n';
    }
  }
  {
    auto out = open_out(dir / "per_simulation.csv");
    out << "sample_index,proportion\n";
    const auto ps = o.report.per_simulation();
    for (std::size_t s = 0; s < ps.size(); ++s) out << s + 1 << ',' << format_number(ps[s]) << '\n';
  }
  {
    auto out = open_out(dir / "observed_links.csv");
    out << "x_entity_id,y_entity_id,weight\n";
    for (const auto& link : o.observed.links()) {
      out << block.x_ids[link.x] << ',' << block.y_ids[link.y] << ',' << format_number(link.weight)
          << '\n';
    }
  }
  write_mug(dir / "mug.csv", run.link_variables, o.mug);
  write_params(dir / "params.csv", run.link_variables, o.params);
}

void write_summary(const std::filesystem::path& path, const RunResult& run, std::size_t variant) {
  auto out = open_out(path);
  out << "block_index,block_key,status,n_x,n_y,n_x_excluded,n_links,n_unlinked,"
         "mean_per_record,mean_per_simulation,min_per_record,max_per_record,"
         "min_per_simulation,max_per_simulation,snapshot_hash,note\n";
  std::size_t nx = 0, ny = 0, excluded = 0, links = 0, unlinked = 0;
  for (const auto& b : run.blocks) {
    nx += b.n_x;
    ny += b.n_y;
    excluded += b.excluded_x;
    out << b.index << ',' << csv_field(b.key) << ',' << to_string(b.status) << ',' << b.n_x << ','
        << b.n_y << ',' << b.excluded_x << ',';
    if (b.status == BlockStatus::ok) {
      const auto& o = b.variants.at(variant);
      const auto& r = o.report;
      links += o.observed.links().size();
      unlinked += r.observed_unlinked();
      out << o.observed.links().size() << ',' << r.observed_unlinked() << ','
          << format_number(r.mean_per_record()) << ',' << format_number(r.mean_per_simulation())
          << ',' << format_number(r.min_per_record()) << ',' << format_number(r.max_per_record())
          << ',' << format_number(r.min_per_simulation()) << ','
          << format_number(r.max_per_simulation()) << ',' << hex64(b.snapshot_hash) << ','
          << csv_field(o.observed.links().empty() ? "no observed links, excluded from ALL" : b.note)
          << '\n';
    } else {
      out << ",,,,,,,,," << csv_field(b.note) << '\n';
    }
  }
  const auto& agg = run.aggregates.at(variant);
  out << "ALL,ALL,ok," << nx << ',' << ny << ',' << excluded << ',' << links << ',' << unlinked
      << ',' << format_number(agg.grand_mean) << ',' << format_number(agg.grand_mean)
      << ",,,,,," << agg.included.size() << " blocks included\n";
}

void write_comparison(const std::filesystem::path& path, const RunResult& run) {
  auto out = open_out(path);
  out << "variant,mode,cutoff,grand_mean,delta_vs_first,records,blocks_included\n";
  const double base = run.aggregates.front().grand_mean;
  for (std::size_t k = 0; k < run.variants.size(); ++k) {
    const auto& v = run.variants[k];
    const auto& a = run.aggregates[k];
    out << csv_field(v.name) << ',' << to_string(v.mode) << ',' << format_number(v.cutoff) << ','
        << format_number(a.grand_mean) << ',' << format_number(a.grand_mean - base) << ','
        << a.records << ',' << a.included.size() << '\n';
  }
}

}  // namespace macsim
