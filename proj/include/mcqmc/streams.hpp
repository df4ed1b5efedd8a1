#pragma once

// Driving sequences for update functions: IID pseudo-random, full-period CUD
// generators (multiplicative LCG, Tausworthe LFSR) and their randomly shifted
// (weakly CUD) variants.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mcqmc {

enum class StreamKind { Iid, CudLcg, CudLfsr };

std::string_view to_string(StreamKind kind) noexcept;
StreamKind stream_kind_from_string(std::string_view name);

/// Multiplicative congruential generator x <- a*x mod m. With m prime and a
/// a primitive root the state visits every residue 1..m-1 once per period.
struct LcgParams {
  std::uint64_t modulus = 0;
  std::uint64_t multiplier = 0;

  std::uint64_t period() const noexcept { return modulus - 1; }
  friend bool operator==(const LcgParams&, const LcgParams&) = default;
};

/// Tausworthe generator over the m-sequence of a primitive trinomial or
/// pentanomial of the given degree. `taps` holds bit j for every x^j term
/// below the leading one (bit 0 always set). Each output takes `width` bits of
/// the bit stream and then skips ahead `decimation` bits.
struct LfsrParams {
  unsigned degree = 0;
  std::uint64_t taps = 0;
  unsigned width = 0;
  unsigned decimation = 0;

  std::uint64_t period() const noexcept { return (std::uint64_t{1} << degree) - 1; }
  friend bool operator==(const LfsrParams&, const LfsrParams&) = default;
};

struct StreamSpec {
  StreamKind kind = StreamKind::Iid;
  std::uint64_t seed = 0;
  /// CUD kinds: pick the smallest built-in generator whose period is at least
  /// this many blocks. Ignored when explicit parameters are given; 0 selects
  /// the smallest built-in generator.
  std::uint64_t period_target = 0;
  std::optional<LcgParams> lcg;
  std::optional<LfsrParams> lfsr;
  /// Blocks of this size are read from the stream. For CUD kinds the stream
  /// then holds block_dim periods, arranged so that consecutive nonoverlapping
  /// blocks run through every cyclic block_dim-tuple of one period exactly
  /// once (one base value is skipped whenever the block starts would repeat).
  std::size_t block_dim = 1;
  /// Added mod 1 to scalar j as shift[j % shift.size()]. Empty means no shift.
  std::vector<double> shift;
};

/// The built-in generator tables, sorted by period.
const std::vector<LcgParams>& lcg_table();
const std::vector<LfsrParams>& lfsr_table();

/// Spec for a CUD stream that can drive `n_steps` updates consuming
/// `block_dim` scalars each, using the smallest built-in generator with
/// period >= n_steps. Throws Config when no built-in generator is large enough.
StreamSpec sized_cud_spec(StreamKind kind, std::uint64_t n_steps, std::size_t block_dim,
                          std::uint64_t seed);

/// SplitMix64 finalizer; used to derive independent seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

/// Maps v into the open unit interval: exact zero becomes the smallest
/// positive double, values at or above one wrap.
double to_open_unit(double v) noexcept;

namespace detail {

class LcgSequence {
 public:
  LcgSequence(const LcgParams& params, std::uint64_t seed);
  double next() noexcept {
    state_ = (params_.multiplier * state_) % params_.modulus;
    return static_cast<double>(state_) / static_cast<double>(params_.modulus);
  }
  std::uint64_t period() const noexcept { return params_.period(); }
  std::uint64_t state() const noexcept { return state_; }

 private:
  LcgParams params_;
  std::uint64_t state_;
};

class LfsrSequence {
 public:
  LfsrSequence(const LfsrParams& params, std::uint64_t seed);
  double next() noexcept;
  std::uint64_t period() const noexcept { return params_.period(); }
  std::uint64_t window() const noexcept { return window_; }

 private:
  void step_bit() noexcept;

  LfsrParams params_;
  std::uint64_t feedback_mask_;
  std::uint64_t state_mask_;
  std::uint64_t window_;
};

}  // namespace detail

/// A stateful cursor over one driving sequence. Copies are independent.
class InnovationStream {
 public:
  explicit InnovationStream(StreamSpec spec);

  /// Next value in (0,1). Throws Exhausted once a CUD stream has emitted all
  /// of its block_dim periods.
  double next_scalar();
  /// Fills `out` with the next out.size() scalars (one nonoverlapping block).
  void next_block(std::span<double> out);
  std::vector<double> next_block(std::size_t d);

  const StreamSpec& spec() const noexcept { return spec_; }
  bool is_cud() const noexcept { return spec_.kind != StreamKind::Iid; }
  /// Base generator period; nullopt for IID.
  std::optional<std::uint64_t> period() const noexcept;
  /// Total scalars the stream can emit; nullopt for IID.
  std::optional<std::uint64_t> capacity() const noexcept { return capacity_; }
  std::uint64_t consumed() const noexcept { return emitted_; }

 private:
  double raw_next();

  StreamSpec spec_;
  std::variant<std::mt19937_64, detail::LcgSequence, detail::LfsrSequence> source_;
  std::optional<std::uint64_t> capacity_;
  std::uint64_t skip_every_ = 0;  // emit count between skipped base values; 0 = never
  std::uint64_t emitted_ = 0;
};

/// Weakly CUD variant: same underlying sequence, plus a uniform random shift
/// of length `shift_dim` drawn from `seed`. shift_dim = block size gives a
/// blockwise Cranley-Patterson rotation; shift_dim = 1 shifts every scalar by
/// the same amount.
StreamSpec randomize(const StreamSpec& spec, std::uint64_t seed, std::size_t shift_dim = 1);
InnovationStream randomize(const InnovationStream& stream, std::uint64_t seed,
                           std::size_t shift_dim = 1);

/// Reads `count` scalars from a fresh stream built from `spec`.
std::vector<double> collect_scalars(const StreamSpec& spec, std::size_t count);

}  // namespace mcqmc
