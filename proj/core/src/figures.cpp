#include "dmc/figures.hpp"

#include <ostream>

#include "dmc/advisor.hpp"
#include "dmc/models.hpp"

namespace dmc {
namespace {

struct Row {
  std::ostream& out;
  bool first = true;
  template <typename T>
  Row& operator<<(const T& v) {
    if (!first) out << ',';
    first = false;
    out << v;
    return *this;
  }
  ~Row() { out << '\n'; }
};

}  // namespace

void write_gqa_dim_csv(std::ostream& out, std::span<const std::int64_t> heads,
                       double budget, double l, bool include_matmul) {
  const auto old = out.precision(12);
  out << "h,q,l,budget,d,d_asymptotic,cost_at_d\n";
  for (std::int64_t h : heads)
    for (std::int64_t q = 1; q <= h; ++q) {
      if (h % q != 0) continue;
      const GqaDimension r = advise_gqa_dim(budget, h, q, l, include_matmul);
      Row{out} << h << q << l << budget << r.d << r.d_asymptotic
               << r.cost_at_d;
    }
  out.precision(old);
}

void write_batch_by_size_csv(std::ostream& out,
                             std::span<const std::int64_t> sizes,
                             std::int64_t k, std::int64_t c, std::int64_t x) {
  const auto old = out.precision(12);
  out << "n,k,c,x,unbatched_total,batched_total,savings\n";
  for (std::int64_t n : sizes) {
    const double N = static_cast<double>(n);
    const double unbatched = model_batched(N, k, c, 1).total;
    const double batched = model_batched(N, k, c, x).total;
    Row{out} << n << k << c << x << unbatched << batched
             << 1.0 - batched / unbatched;
  }
  out.precision(old);
}

void write_batch_by_channels_csv(std::ostream& out, std::int64_t n,
                                 std::int64_t k,
                                 std::span<const std::int64_t> channels) {
  const auto old = out.precision(12);
  out << "n,k,c,unbatched_total,batched_total,difference\n";
  const double N = static_cast<double>(n);
  for (std::int64_t c : channels) {
    const double unbatched = model_batched(N, k, c, 1).total;
    const double batched = model_batched(N, k, c, c).total;
    Row{out} << n << k << c << unbatched << batched << batched - unbatched;
  }
  out.precision(old);
}

}  // namespace dmc
