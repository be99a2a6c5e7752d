#pragma once

#include <span>
#include <string>
#include <vector>

#include "macsim/datamodel.hpp"

namespace macsim {

/// Similarity 1 - |x - y| / T clamped to [0,1], or kMissing.
double similarity(double x, double y, const VariableSpec& spec);

/// Agreement threshold 1 - tolerance / T. Throws ConfigError unless
/// tolerance < T/2.
double threshold(const VariableSpec& spec);

/// Per-variable thresholds; original mode always uses 1.
std::vector<double> thresholds(std::span<const VariableSpec> specs, Mode mode);

/// True iff cell >= theta. Throws DomainError for a missing cell.
bool agrees(double cell, double theta);

struct Block {
  std::string key;
  std::vector<std::size_t> x_indices;
  std::vector<std::size_t> y_indices;
  bool residual = false;  // singleton holding a record with a missing blocking value
};

struct BlockPartition {
  std::vector<Block> blocks;
};

/// Groups records by the tuple of their blocking values. Blocks are ordered
/// by key; singleton residual blocks for records with a missing blocking
/// value follow. An empty list yields one block holding everything.
BlockPartition block_partition(const AlignedPair& pair, std::span<const std::string> blocking_vars);

/// Row/column order for one block's matrix: X records whose true match is in
/// the block come first with their partners on the diagonal; the other Y
/// records of the block follow.
struct BlockLayout {
  std::vector<std::size_t> x_rows;  // indices into file_x
  std::vector<std::size_t> y_cols;  // indices into file_y
  std::size_t excluded_x = 0;       // X records whose match lies outside the block
};

BlockLayout layout_block(const AlignedPair& pair, const Block& block);
BlockLayout full_layout(const AlignedPair& pair);

AgreementMatrix build_agreement_matrix(const AlignedPair& pair, const BlockLayout& layout,
                                       std::span<const VariableSpec> specs, Mode mode);
AgreementMatrix build_agreement_matrix(const AlignedPair& pair, std::span<const VariableSpec> specs,
                                       Mode mode);

}  // namespace macsim
