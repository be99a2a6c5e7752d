#include "macsim/comparison.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "macsim/error.hpp"
#include "macsim/kernels.hpp"
#include "macsim/record_io.hpp"

namespace macsim {

double similarity(double x, double y, const VariableSpec& spec) {
  if (!(spec.t_range > 0.0)) throw ConfigError("variable '" + spec.name + "': range must be > 0");
  if (spec.is_missing(x) || spec.is_missing(y)) return kMissing;
  const double v = 1.0 - std::fabs(x - y) / spec.t_range;
  return v > 0.0 ? v : 0.0;
}

double threshold(const VariableSpec& spec) {
  spec.validate();
  return 1.0 - spec.tolerance / spec.t_range;
}

std::vector<double> thresholds(std::span<const VariableSpec> specs, Mode mode) {
  std::vector<double> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(mode == Mode::original ? 1.0 : threshold(s));
  return out;
}

bool agrees(double cell, double theta) {
  if (is_missing_cell(cell)) throw DomainError("agreement is undefined for a missing cell");
  return cell >= theta;
}

BlockPartition block_partition(const AlignedPair& pair, std::span<const std::string> blocking_vars) {
  BlockPartition out;
  if (blocking_vars.empty()) {
    Block all{"all", {}, {}, false};
    for (std::size_t i = 0; i < pair.file_x.size(); ++i) all.x_indices.push_back(i);
    for (std::size_t j = 0; j < pair.file_y.size(); ++j) all.y_indices.push_back(j);
    out.blocks.push_back(std::move(all));
    return out;
  }

  std::vector<std::size_t> xcols;
  std::vector<std::size_t> ycols;
  for (const auto& name : blocking_vars) {
    const auto xc = pair.file_x.find_column(name);
    const auto yc = pair.file_y.find_column(name);
    if (!xc || !yc) throw ConfigError("unknown blocking variable '" + name + "'");
    xcols.push_back(*xc);
    ycols.push_back(*yc);
  }

  std::map<std::vector<double>, Block> keyed;
  std::vector<Block> residual;
  auto assign = [&](const RecordTable& table, const std::vector<std::size_t>& cols, bool is_x) {
    std::vector<double> key(cols.size());
    for (std::size_t r = 0; r < table.size(); ++r) {
      bool missing = false;
      for (std::size_t k = 0; k < cols.size(); ++k) {
        key[k] = table.value(r, cols[k]);
        missing = missing || std::isnan(key[k]);
      }
      if (missing) {
        Block b{std::string(is_x ? "missing:x:" : "missing:y:") + table.id(r), {}, {}, true};
        (is_x ? b.x_indices : b.y_indices).push_back(r);
        residual.push_back(std::move(b));
        continue;
      }
      auto& block = keyed[key];
      (is_x ? block.x_indices : block.y_indices).push_back(r);
    }
  };
  assign(pair.file_x, xcols, true);
  assign(pair.file_y, ycols, false);

  for (auto& [key, block] : keyed) {
    std::string label;
    for (std::size_t k = 0; k < key.size(); ++k) {
      if (k) label += ';';
      label += blocking_vars[k] + "=" + format_number(key[k]);
    }
    block.key = std::move(label);
    out.blocks.push_back(std::move(block));
  }
  for (auto& b : residual) out.blocks.push_back(std::move(b));
  return out;
}

BlockLayout layout_block(const AlignedPair& pair, const Block& block) {
  std::unordered_map<std::size_t, std::size_t> in_block;
  in_block.reserve(block.y_indices.size());
  for (std::size_t k = 0; k < block.y_indices.size(); ++k) in_block.emplace(block.y_indices[k], k);

  BlockLayout layout;
  std::vector<char> used(block.y_indices.size(), 0);
  for (std::size_t i : block.x_indices) {
    const auto it = in_block.find(pair.alignment.at(i));
    if (it == in_block.end()) {
      ++layout.excluded_x;
      continue;
    }
    layout.x_rows.push_back(i);
    layout.y_cols.push_back(it->first);
    used[it->second] = 1;
  }
  for (std::size_t k = 0; k < block.y_indices.size(); ++k) {
    if (!used[k]) layout.y_cols.push_back(block.y_indices[k]);
  }
  return layout;
}

BlockLayout full_layout(const AlignedPair& pair) {
  Block all;
  for (std::size_t i = 0; i < pair.file_x.size(); ++i) all.x_indices.push_back(i);
  for (std::size_t j = 0; j < pair.file_y.size(); ++j) all.y_indices.push_back(j);
  return layout_block(pair, all);
}

AgreementMatrix build_agreement_matrix(const AlignedPair& pair, const BlockLayout& layout,
                                       std::span<const VariableSpec> specs, Mode mode) {
  const std::size_t rx = layout.x_rows.size();
  const std::size_t ry = layout.y_cols.size();
  AgreementMatrix a(rx, ry, specs.size(), mode);
  const auto& k = kernels::active();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> yvals(ry);
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const auto& spec = specs[l];
    spec.validate();
    const std::size_t xc = pair.file_x.column_index(spec.name);
    const std::size_t yc = pair.file_y.column_index(spec.name);
    for (std::size_t j = 0; j < ry; ++j) {
      const double v = pair.file_y.value(layout.y_cols[j], yc);
      yvals[j] = spec.is_missing(v) ? nan : v;
    }
    for (std::size_t i = 0; i < rx; ++i) {
      double xv = pair.file_x.value(layout.x_rows[i], xc);
      if (spec.is_missing(xv)) xv = nan;
      k.similarity_row(xv, yvals.data(), ry, spec.t_range, mode == Mode::original,
                       a.row(l, i).data());
    }
  }
  return a;
}

AgreementMatrix build_agreement_matrix(const AlignedPair& pair, std::span<const VariableSpec> specs,
                                       Mode mode) {
  return build_agreement_matrix(pair, full_layout(pair), specs, mode);
}

}  // namespace macsim
