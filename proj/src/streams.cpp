#include "mcqmc/streams.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "mcqmc/error.hpp"

namespace mcqmc {

std::string_view to_string(StreamKind kind) noexcept {
  switch (kind) {
    case StreamKind::Iid: return "IID";
    case StreamKind::CudLcg: return "CUD_LCG";
    case StreamKind::CudLfsr: return "CUD_LFSR";
  }
  return "?";
}

StreamKind stream_kind_from_string(std::string_view name) {
  if (name == "IID") return StreamKind::Iid;
  if (name == "CUD_LCG") return StreamKind::CudLcg;
  if (name == "CUD_LFSR") return StreamKind::CudLfsr;
  throw Error(ErrorKind::Config, "unknown stream kind '" + std::string(name) + "'");
}

// Multipliers and decimations come from tools/search_generators (see README).
const std::vector<LcgParams>& lcg_table() {
  static const std::vector<LcgParams> table = {
      {1021, 166},    {1031, 161},    {4093, 478},    {4099, 2153},
      {16381, 10980}, {16411, 10447}, {65521, 31998}, {65537, 60491},
  };
  return table;
}

const std::vector<LfsrParams>& lfsr_table() {
  // x^k + ... + 1, stored without the leading term.
  static const std::vector<LfsrParams> table = {
      {10, (1u << 3) | 1u, 10, 16},
      {11, (1u << 2) | 1u, 11, 27},
      {12, (1u << 6) | (1u << 4) | (1u << 1) | 1u, 12, 22},
      {13, (1u << 4) | (1u << 3) | (1u << 1) | 1u, 13, 35},
      {14, (1u << 10) | (1u << 6) | (1u << 1) | 1u, 14, 25},
      {15, (1u << 1) | 1u, 15, 38},
      {16, (1u << 12) | (1u << 3) | (1u << 1) | 1u, 16, 23},
      {17, (1u << 3) | 1u, 17, 26},
  };
  return table;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

double to_open_unit(double v) noexcept {
  if (v >= 1.0) v -= 1.0;
  if (v <= 0.0) v = std::numeric_limits<double>::denorm_min();
  return v;
}

StreamSpec sized_cud_spec(StreamKind kind, std::uint64_t n_steps, std::size_t block_dim,
                          std::uint64_t seed) {
  if (block_dim == 0) throw Error(ErrorKind::Config, "block_dim must be >= 1");
  StreamSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  spec.period_target = n_steps;
  spec.block_dim = block_dim;
  if (kind == StreamKind::CudLcg) {
    for (const auto& p : lcg_table()) {
      if (p.period() >= n_steps) {
        spec.lcg = p;
        return spec;
      }
    }
  } else if (kind == StreamKind::CudLfsr) {
    for (const auto& p : lfsr_table()) {
      if (p.period() >= n_steps) {
        spec.lfsr = p;
        return spec;
      }
    }
  } else {
    return spec;
  }
  throw Error(ErrorKind::Config, "no built-in " + std::string(to_string(kind)) +
                                     " generator has period >= " + std::to_string(n_steps));
}

namespace detail {

LcgSequence::LcgSequence(const LcgParams& params, std::uint64_t seed) : params_(params) {
  if (params.modulus < 3 || params.multiplier <= 1 || params.multiplier >= params.modulus) {
    throw Error(ErrorKind::Config, "LCG needs modulus >= 3 and 1 < multiplier < modulus");
  }
  state_ = 1 + seed % (params.modulus - 1);
}

LfsrSequence::LfsrSequence(const LfsrParams& params, std::uint64_t seed) : params_(params) {
  if (params.degree < 2 || params.degree > 62) throw Error(ErrorKind::Config, "LFSR degree out of range");
  if (params.width == 0 || params.width > params.degree) throw Error(ErrorKind::Config, "LFSR width must be in [1, degree]");
  if ((params.taps & 1u) == 0 || params.taps >> params.degree) {
    throw Error(ErrorKind::Config, "LFSR taps must include x^0 and stay below the degree");
  }
  if (params.decimation == 0) params_.decimation = params.degree;
  state_mask_ = (std::uint64_t{1} << params.degree) - 1;
  // Bit (k-1-j) of the window holds b_{t+j}; the tap for x^j reads it.
  feedback_mask_ = 0;
  for (unsigned j = 0; j < params.degree; ++j) {
    if ((params.taps >> j) & 1u) feedback_mask_ |= std::uint64_t{1} << (params.degree - 1 - j);
  }
  window_ = 1 + seed % params_.period();
}

void LfsrSequence::step_bit() noexcept {
  const std::uint64_t bit = static_cast<std::uint64_t>(std::popcount(window_ & feedback_mask_) & 1);
  window_ = ((window_ << 1) | bit) & state_mask_;
}

double LfsrSequence::next() noexcept {
  for (unsigned i = 0; i < params_.decimation; ++i) step_bit();
  const std::uint64_t top = window_ >> (params_.degree - params_.width);
  if (top == 0) return std::numeric_limits<double>::denorm_min();
  return std::ldexp(static_cast<double>(top), -static_cast<int>(params_.width));
}

}  // namespace detail

InnovationStream::InnovationStream(StreamSpec spec) : spec_(std::move(spec)) {
  if (spec_.block_dim == 0) throw Error(ErrorKind::Config, "block_dim must be >= 1");
  for (double s : spec_.shift) {
    if (!(s >= 0.0 && s < 1.0)) throw Error(ErrorKind::Config, "shift entries must lie in [0,1)");
  }
  std::uint64_t period = 0;
  switch (spec_.kind) {
    case StreamKind::Iid:
      source_ = std::mt19937_64(spec_.seed);
      return;
    case StreamKind::CudLcg: {
      if (!spec_.lcg) {
        auto sized = sized_cud_spec(spec_.kind, spec_.period_target, spec_.block_dim, spec_.seed);
        spec_.lcg = sized.lcg;
      }
      detail::LcgSequence seq(*spec_.lcg, spec_.seed);
      period = seq.period();
      source_ = seq;
      break;
    }
    case StreamKind::CudLfsr: {
      if (!spec_.lfsr) {
        auto sized = sized_cud_spec(spec_.kind, spec_.period_target, spec_.block_dim, spec_.seed);
        spec_.lfsr = sized.lfsr;
      }
      detail::LfsrSequence seq(*spec_.lfsr, spec_.seed);
      period = seq.period();
      source_ = seq;
      break;
    }
  }
  const std::uint64_t d = spec_.block_dim;
  capacity_ = d * period;
  const std::uint64_t lcm = std::lcm(d, period);
  if (lcm < d * period) skip_every_ = lcm;
}

std::optional<std::uint64_t> InnovationStream::period() const noexcept {
  if (spec_.kind == StreamKind::Iid) return std::nullopt;
  return *capacity_ / spec_.block_dim;
}

double InnovationStream::raw_next() {
  if (auto* mt = std::get_if<std::mt19937_64>(&source_)) {
    // 53 random bits, centred in their cell so neither 0 nor 1 can occur.
    return (static_cast<double>((*mt)() >> 11) + 0.5) * 0x1.0p-53;
  }
  if (capacity_ && emitted_ >= *capacity_) {
    throw Error(ErrorKind::Exhausted, "CUD stream emitted its full " + std::to_string(*capacity_) + " values");
  }
  if (skip_every_ != 0 && emitted_ != 0 && emitted_ % skip_every_ == 0) {
    std::visit([](auto& s) {
      if constexpr (!std::is_same_v<std::decay_t<decltype(s)>, std::mt19937_64>) s.next();
    }, source_);
  }
  return std::visit([](auto& s) -> double {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, std::mt19937_64>) {
      return 0.5;  // unreachable: handled above
    } else {
      return s.next();
    }
  }, source_);
}

double InnovationStream::next_scalar() {
  double v = raw_next();
  if (!spec_.shift.empty()) {
    v = to_open_unit(v + spec_.shift[emitted_ % spec_.shift.size()]);
  }
  ++emitted_;
  return v;
}

void InnovationStream::next_block(std::span<double> out) {
  for (double& v : out) v = next_scalar();
}

std::vector<double> InnovationStream::next_block(std::size_t d) {
  if (d == 0) throw Error(ErrorKind::DimensionMismatch, "block size must be >= 1");
  std::vector<double> out(d);
  next_block(std::span<double>(out));
  return out;
}

StreamSpec randomize(const StreamSpec& spec, std::uint64_t seed, std::size_t shift_dim) {
  if (spec.kind == StreamKind::Iid) throw Error(ErrorKind::Config, "randomize expects a CUD stream");
  if (shift_dim == 0) throw Error(ErrorKind::Config, "shift_dim must be >= 1");
  StreamSpec out = spec;
  std::mt19937_64 rng(splitmix64(seed));
  out.shift.resize(shift_dim);
  for (double& s : out.shift) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return out;
}

InnovationStream randomize(const InnovationStream& stream, std::uint64_t seed, std::size_t shift_dim) {
  InnovationStream out(randomize(stream.spec(), seed, shift_dim));
  // Replay up to the source cursor so both continue from the same position.
  for (std::uint64_t i = 0; i < stream.consumed(); ++i) out.next_scalar();
  return out;
}

std::vector<double> collect_scalars(const StreamSpec& spec, std::size_t count) {
  InnovationStream s(spec);
  std::vector<double> out(count);
  s.next_block(std::span<double>(out));
  return out;
}

}  // namespace mcqmc
