#include "macsim/simulator.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "macsim/error.hpp"
#include "macsim/kernels.hpp"

namespace macsim {

void ChainConfig::validate() const {
  if (samples < 1) throw ConfigError("samples (S) must be >= 1");
  if (thinning < 1) throw ConfigError("thinning (d) must be >= 1");
}

StepOutcome kernel_step(AgreementMatrix& state, const TransitionParams& params,
                        std::span<const double> theta, Rng& rng) {
  const std::size_t rx = state.rows_x();
  const std::size_t nv = state.variables();
  StepOutcome out;
  if (rx == 0 || nv == 0) return out;
  out.i = rng.below(rx);
  out.l = rng.below(nv);

  const double th = theta[out.l];
  auto row = state.row(out.l, out.i);
  double& diag = row[out.i];
  if (is_missing_cell(diag)) {
    out.kind = StepCase::skipped_missing;
    return out;
  }

  const auto& p = params[out.l];
  const bool agreed = diag >= th;
  if (rng.bernoulli(agreed ? p.p1 : p.p2)) {
    diag = 1.0 - diag;
    ++out.cells_changed;
  }
  const bool agrees_now = diag >= th;

  kernels::RowRule rule;
  rule.theta = th;
  rule.skip = out.i;
  if (agreed && !agrees_now) {
    out.kind = StepCase::agree_to_disagree;
    rule.force_agreeing = true;
    rule.flip_threshold = kernels::flip_threshold(p.q1);
  } else if (!agreed && agrees_now) {
    out.kind = StepCase::disagree_to_agree;
    rule.force_agreeing = true;
    rule.flip_threshold = kernels::flip_threshold(p.q2);
  } else if (!agreed) {
    out.kind = StepCase::disagree_stays;
    rule.flip_threshold = kernels::flip_threshold(p.q3);
  } else {
    return out;
  }
  rule.key = rng.next_u32();
  out.cells_changed += kernels::active().row_update(row.data(), row.size(), rule);
  return out;
}

void run_chain(const AgreementMatrix& a0, const TransitionParams& params,
               std::span<const double> theta, const ChainConfig& cfg, const SampleVisitor& visit) {
  cfg.validate();
  if (params.size() != a0.variables() || theta.size() != a0.variables()) {
    throw DomainError("transition parameters and thresholds must cover every variable");
  }
  for (double t : theta) {
    if (!(t > 0.5 && t <= 1.0)) throw DomainError("thresholds must lie in (0.5, 1]");
  }
  AgreementMatrix state = a0;
  Rng rng(cfg.seed);
  for (std::size_t s = 1; s <= cfg.samples; ++s) {
    for (std::size_t n = 0; n < cfg.thinning; ++n) kernel_step(state, params, theta, rng);
    visit(s, state);
  }
}

std::vector<ChainSample> simulate_chain(const AgreementMatrix& a0, const TransitionParams& params,
                                        std::span<const double> theta, const ChainConfig& cfg) {
  std::vector<ChainSample> samples;
  samples.reserve(cfg.samples);
  run_chain(a0, params, theta, cfg, [&](std::size_t s, const AgreementMatrix& m) {
    ChainSample sample{s, m, 0.0};
    if (!samples.empty()) sample.distance = distance(m, samples.front().matrix);
    samples.push_back(std::move(sample));
  });
  return samples;
}

double distance(const AgreementMatrix& sample, const AgreementMatrix& reference) {
  if (!sample.same_shape(reference)) throw DomainError("distance between matrices of different shape");
  if (sample.cell_count() == 0) return 0.0;
  const std::size_t changed = kernels::active().count_changed(
      sample.cells().data(), reference.cells().data(), sample.cell_count());
  return static_cast<double>(changed) / static_cast<double>(sample.cell_count());
}

void SnapshotHasher::add(const AgreementMatrix& m) {
  const auto cells = m.cells();
  h_ = fnv1a64(std::string_view(reinterpret_cast<const char*>(cells.data()),
                                cells.size() * sizeof(double)),
               h_);
}

namespace {

constexpr char kMagic[4] = {'M', 'C', 'S', 'M'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "snapshot format assumes little-endian");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("truncated snapshot file");
  return v;
}

}  // namespace

struct SnapshotWriter::Impl {
  std::ofstream out;
  std::filesystem::path path;
  std::streampos count_pos;
  std::uint64_t count = 0;
  std::size_t cells = 0;
};

SnapshotWriter::SnapshotWriter(const std::filesystem::path& path, const AgreementMatrix& shape)
    : impl_(std::make_unique<Impl>()) {
  impl_->path = path;
  impl_->out.open(path, std::ios::binary);
  if (!impl_->out) throw IoError("cannot open '" + path.string() + "' for writing");
  impl_->out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(impl_->out, kVersion);
  put<std::uint64_t>(impl_->out, shape.rows_x());
  put<std::uint64_t>(impl_->out, shape.rows_y());
  put<std::uint64_t>(impl_->out, shape.variables());
  put<std::uint8_t>(impl_->out, shape.mode() == Mode::original ? 0 : 1);
  impl_->count_pos = impl_->out.tellp();
  put<std::uint64_t>(impl_->out, 0);
  impl_->cells = shape.cell_count();
}

SnapshotWriter::~SnapshotWriter() {
  try {
    close();
  } catch (...) {
  }
}

void SnapshotWriter::append(const AgreementMatrix& m) {
  if (m.cell_count() != impl_->cells) throw DomainError("snapshot shape changed mid-stream");
  impl_->out.write(reinterpret_cast<const char*>(m.cells().data()),
                   static_cast<std::streamsize>(m.cell_count() * sizeof(double)));
  ++impl_->count;
}

void SnapshotWriter::close() {
  if (!impl_ || !impl_->out.is_open()) return;
  impl_->out.seekp(impl_->count_pos);
  put<std::uint64_t>(impl_->out, impl_->count);
  impl_->out.close();
  if (!impl_->out) throw IoError("failed writing '" + impl_->path.string() + "'");
}

std::vector<AgreementMatrix> read_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  char magic[4];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw IoError(path.string() + ": not a snapshot file");
  }
  if (get<std::uint32_t>(in) != kVersion) throw IoError(path.string() + ": unsupported version");
  const auto rx = get<std::uint64_t>(in);
  const auto ry = get<std::uint64_t>(in);
  const auto nv = get<std::uint64_t>(in);
  const Mode mode = get<std::uint8_t>(in) == 0 ? Mode::original : Mode::extended;
  const auto count = get<std::uint64_t>(in);
  std::vector<AgreementMatrix> out;
  out.reserve(count);
  for (std::uint64_t s = 0; s < count; ++s) {
    AgreementMatrix m(rx, ry, nv, mode);
    in.read(reinterpret_cast<char*>(m.cells().data()),
            static_cast<std::streamsize>(m.cell_count() * sizeof(double)));
    if (!in) throw IoError(path.string() + ": truncated snapshot data");
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace macsim
