#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcqmc/streams.hpp"

namespace mcqmc {

/// n points in [0,1]^d, stored row-major.
class PointSet {
 public:
  PointSet(std::size_t dim, std::vector<double> coords);
  static PointSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / dim_; }
  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  double coord(std::size_t i, std::size_t j) const noexcept { return coords_[i * dim_ + j]; }
  const std::vector<double>& coords() const noexcept { return coords_; }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

enum class DiscrepancyMethod { Exact1D, ExactGrid, SupEstimate };
std::string_view to_string(DiscrepancyMethod m) noexcept;

struct DiscrepancyReport {
  std::size_t n = 0;
  std::size_t d = 0;
  double star = 0.0;
  DiscrepancyMethod method = DiscrepancyMethod::Exact1D;
  bool exact = true;  // false only for SupEstimate, which is a lower bound
};

struct StarOptions {
  /// Exact evaluation is used while n^d stays within this many corners.
  double exact_budget = 1e8;
  bool allow_estimate = true;
  std::size_t sampled_anchors = 100000;
  std::uint64_t anchor_seed = 0x5eed5eedULL;
  /// Use the grid enumerator even in dimension 1 (for cross-checking).
  bool force_grid = false;
};

/// (1/n) #{i : x_i in [0,a)} - prod_j a_j.
double local_discrepancy(const PointSet& ps, std::span<const double> anchor);

/// Method star_discrepancy will use for n points in d dimensions. Throws
/// BudgetExceeded when the exact budget is exceeded and estimates are off.
DiscrepancyMethod planned_method(std::size_t n, std::size_t d, const StarOptions& opts = {});
DiscrepancyReport star_discrepancy(const PointSet& ps, const StarOptions& opts = {});

/// max_i max(i/n - x_(i), x_(i) - (i-1)/n) over the sorted sample.
double star_discrepancy_1d(std::span<const double> xs);
/// Exact sup over anchored boxes via critical-corner enumeration, any d.
double star_discrepancy_grid(const PointSet& ps);
/// Lower bound from all one-point corners plus `anchors` random grid corners.
double star_discrepancy_estimate(const PointSet& ps, std::size_t anchors, std::uint64_t seed);

/// Windows (u_i, ..., u_{i+d-1}) for i = 1..len-d+1.
PointSet overlapping_tuples(std::span<const double> scalars, std::size_t d);
/// Blocks (u_{d(i-1)+1}, ..., u_{di}) for i = 1..floor(len/d).
PointSet nonoverlapping_tuples(std::span<const double> scalars, std::size_t d);

enum class WindowKind { Overlapping, Nonoverlapping };
std::string_view to_string(WindowKind w) noexcept;

struct CudDiagnosticRow {
  WindowKind window = WindowKind::Overlapping;
  DiscrepancyReport report;
};

/// For every (n, d) pair: star discrepancy of the first n overlapping and the
/// first n nonoverlapping d-tuples of the stream. The stream is re-opened
/// with block_dim = d for each d so a CUD generator can supply n*d values.
std::vector<CudDiagnosticRow> cud_diagnostic(const StreamSpec& spec, std::span<const std::size_t> n_list,
                                             std::span<const std::size_t> d_list,
                                             const StarOptions& opts = {});

/// Star discrepancies of `replicates` independent IID streams (seeds derived
/// from `seed`), evaluated the same way as cud_diagnostic would.
std::vector<double> iid_star_samples(std::size_t n, std::size_t d, WindowKind window,
                                     std::size_t replicates, std::uint64_t seed,
                                     const StarOptions& opts = {});

double median(std::vector<double> values);

/// Header: stream,n,d,window_kind,star,method
void write_discrepancy_csv_header(std::ostream& os);
void write_discrepancy_csv_rows(std::ostream& os, std::string_view stream_label,
                                const std::vector<CudDiagnosticRow>& rows);

}  // namespace mcqmc
