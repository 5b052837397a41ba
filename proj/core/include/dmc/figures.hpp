// CSV tables behind the decision curves. Column headers are fixed:
//
//   gqa-dim : h,q,l,budget,d,d_asymptotic,cost_at_d
//   batch-n : n,k,c,x,unbatched_total,batched_total,savings
//   batch-c : n,k,c,unbatched_total,batched_total,difference
//
// Values are written with 12 significant digits.

#ifndef DMC_FIGURES_HPP
#define DMC_FIGURES_HPP

#include <cstdint>
#include <iosfwd>
#include <span>

namespace dmc {

/// Model dimension against group size for each head count under a fixed
/// budget; q runs over the divisors of h.
void write_gqa_dim_csv(std::ostream& out, std::span<const std::int64_t> heads,
                       double budget, double l, bool include_matmul = false);

/// Batched (x channels per pass) versus unbatched totals across image sizes.
void write_batch_by_size_csv(std::ostream& out,
                             std::span<const std::int64_t> sizes,
                             std::int64_t k, std::int64_t c, std::int64_t x);

/// All-channels-in-one-batch versus unbatched totals across channel counts.
void write_batch_by_channels_csv(std::ostream& out, std::int64_t n,
                                 std::int64_t k,
                                 std::span<const std::int64_t> channels);

}  // namespace dmc

#endif  // DMC_FIGURES_HPP
