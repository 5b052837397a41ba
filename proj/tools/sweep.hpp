// Parameter sweeps over generated traces (measured) and closed-form models.
//
// CSV layout: the algorithm's parameter columns, then for model sweeps one
// column per model term plus model_total, for measured sweeps n_accesses
// and measured_dmd, and for combined sweeps both groups plus ratio
// (measured_dmd / model_total). FFT sweeps that measure also carry
// coefficient = measured_dmd / (n^1.5 sqrt(log2 n)). The gqa sweep has its
// own fixed header: h,q,l,budget,d,d_asymptotic,cost_at_d.

#ifndef DMC_TOOLS_SWEEP_HPP
#define DMC_TOOLS_SWEEP_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dmc/core.hpp"

namespace dmc::cli {

enum class SweepMode { kModel, kMeasure, kBoth };

inline constexpr std::uint64_t kMeasureBudget = 10'000'000;

/// A measured point would exceed kMeasureBudget accesses.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter the algorithm needs has no values; a usage error.
class MissingParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SweepRequest {
  std::string alg;
  // Per-parameter value lists (n, m, l, k, c, x, h).
  std::map<std::string, std::vector<std::int64_t>, std::less<>> values;
  std::string q_range = "1..h";  // gqa; values not dividing h are skipped
  SweepMode mode = SweepMode::kModel;
  bool force = false;
  double budget = 1e5;  // gqa
  double l = 64.0;      // gqa
  AnalysisConfig config;
  std::size_t threads = 0;  // 0: DMC_THREADS or hardware concurrency
};

/// "a,b,c", "a..b" (step 1), "a..b:s" (step s), "a..b*f" (geometric).
/// A literal "h" as upper bound resolves to h_bound.
std::vector<std::int64_t> parse_range(std::string_view text,
                                      std::optional<std::int64_t> h_bound = {});

/// Worker count from DMC_THREADS, defaulting to hardware concurrency.
std::size_t sweep_threads();

void run_sweep(const SweepRequest& request, std::ostream& csv);

}  // namespace dmc::cli

#endif  // DMC_TOOLS_SWEEP_HPP
