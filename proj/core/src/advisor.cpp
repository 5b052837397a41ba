#include "dmc/advisor.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "dmc/models.hpp"
#include "dmc/tracegen.hpp"

namespace dmc {
namespace {

// Bisection on [lo, hi] where f(lo) and f(hi) differ in sign (a zero at
// either end counts as the root).
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double f_lo = f(lo);
  for (int it = 0; it < kBisectionMaxIter; ++it) {
    if (hi - lo <= kBisectionRelTol * std::abs(hi)) break;
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Crossover with_neighbourhood(double value) {
  return {value, static_cast<std::int64_t>(std::floor(value)),
          static_cast<std::int64_t>(std::ceil(value))};
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(4);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

AdvisorResult advise_batch(std::int64_t n, std::int64_t k, std::int64_t c) {
  if (n < 1 || k < 1 || c < 1)
    throw std::invalid_argument("n, k and c must be >= 1");
  if (k > n) throw std::invalid_argument("k must not exceed n");
  AdvisorResult out;
  out.parameter = "x";
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t x = 1; x <= c; ++x) {
    if (c % x != 0) continue;
    const double cost = model_batched(static_cast<double>(n), k, c, x).total;
    out.candidates.push_back({static_cast<double>(x), cost});
    if (cost < best) {
      best = cost;
      out.recommended = static_cast<double>(x);
    }
  }
  if (c == 1) out.notes.push_back("single channel: batching is undefined");
  if (c > 1) {
    try {
      const Crossover cross = crossover_image_size(k, c, c);
      out.crossovers.push_back(cross);
      out.notes.push_back("batching all " + std::to_string(c) +
                          " channels pays off above n* = " + sci(cross.value));
    } catch (const Infeasible&) {
      out.notes.push_back("no image-size crossover for x = c in range");
    }
  }
  return out;
}

double batching_savings(double n, std::int64_t k, std::int64_t c,
                        std::int64_t x) {
  return 1.0 - model_batched(n, k, c, x).total / model_batched(n, k, c, 1).total;
}

Crossover crossover_image_size(std::int64_t k, std::int64_t c,
                               std::int64_t x) {
  if (k < 1 || c < 1 || x < 1)
    throw std::invalid_argument("k, c and x must be >= 1");
  if (c % x != 0) throw std::invalid_argument("x must divide c");
  if (x < 2) throw std::invalid_argument("x must be > 1");
  auto diff = [&](double n) {
    return model_batched(n, k, c, x).total - model_batched(n, k, c, 1).total;
  };
  const double lo = static_cast<double>(k);
  const double f_lo = diff(lo);
  if (f_lo == 0.0) return with_neighbourhood(lo);
  double hi = std::max(1.0, lo);
  while (true) {
    hi *= 2.0;
    if (hi > kCrossoverSearchLimit) {
      hi = kCrossoverSearchLimit;
      if ((diff(hi) > 0) == (f_lo > 0))
        throw Infeasible("no batching crossover for n in [k, 1e7]");
      break;
    }
    if ((diff(hi) > 0) != (f_lo > 0)) break;
  }
  return with_neighbourhood(bisect(diff, std::max(lo, hi / 2.0), hi));
}

ChannelCrossover crossover_channels(std::int64_t n, std::int64_t k) {
  if (n < 1 || k < 1) throw std::invalid_argument("n and k must be >= 1");
  if (k > n) throw std::invalid_argument("k must not exceed n");
  const double N = static_cast<double>(n);
  auto diff_int = [&](std::int64_t c) {
    return model_batched(N, k, c, c).total - model_batched(N, k, c, 1).total;
  };
  // Continuous extension: c*sqrt(c)*D - (c*D + (c-1)*n^3).
  const double conv = model_conv(n, n, k).asymptotic;
  auto diff_real = [&](double c) {
    return c * std::sqrt(c) * conv - (c * conv + (c - 1.0) * N * N * N);
  };

  // The difference divided by c is increasing for c >= 2, so there is a
  // single sign change. Double until it is bracketed, then binary search.
  std::int64_t lo = 2;
  if (diff_int(lo) >= 0) return {lo, lo - 1, bisect(diff_real, 1.0, 2.0)};
  std::int64_t hi = 4;
  while (diff_int(hi) < 0) {
    lo = hi;
    hi *= 2;
    if (hi > static_cast<std::int64_t>(kCrossoverSearchLimit))
      throw Infeasible("no channel crossover below 1e7 channels");
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (diff_int(mid) < 0 ? lo : hi) = mid;
  }
  return {hi, lo, bisect(diff_real, static_cast<double>(lo),
                     static_cast<double>(hi))};
}

GqaDimension advise_gqa_dim(double budget, std::int64_t h, std::int64_t q,
                            double l, bool include_matmul) {
  if (!(budget > 0.0)) throw Infeasible("budget must be positive");
  if (h < 1 || q < 1) throw std::invalid_argument("h and q must be >= 1");
  if (h % q != 0) throw std::invalid_argument("q must divide h");
  if (!(l > 0.0)) throw std::invalid_argument("l must be positive");
  auto cost = [&](double d) {
    double c = model_gqa(l, d, h, q).total;
    if (include_matmul) c += l * d * d * d;
    return c;
  };

  double lo = 1.0, hi = 1.0;
  if (cost(1.0) <= budget) {
    while (cost(hi) <= budget) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw Infeasible("budget too large to invert");
    }
  } else {
    while (cost(lo) > budget) {
      hi = lo;
      lo /= 2.0;
      if (lo < 1e-300) throw Infeasible("budget below any feasible cost");
    }
  }
  for (int it = 0; it < kBisectionMaxIter; ++it) {
    if (hi - lo <= kBisectionRelTol * hi) break;
    const double mid = 0.5 * (lo + hi);
    (cost(mid) <= budget ? lo : hi) = mid;
  }

  GqaDimension out;
  out.d = lo;
  out.cost_at_d = cost(lo);
  out.d_asymptotic = std::cbrt(budget * static_cast<double>(q) /
                               static_cast<double>(h));
  out.l = l;
  out.include_matmul = include_matmul;
  return out;
}

ConvFftComparison compare_conv_fft(std::int64_t n, std::int64_t k) {
  if (!is_power_of_two(n)) throw std::invalid_argument("n must be a power of 2");
  if (k < 1 || k > n) throw std::invalid_argument("k must lie in [1, n]");
  ConvFftComparison out;
  out.spatial_cost = model_conv(n, n, k).asymptotic;
  out.fft_cost = model_fftconv_lower(n);
  out.spatial_cheaper = out.spatial_cost <= out.fft_cost;
  out.kernel_cube_exceeds_n = k * k * k > n;
  if (out.kernel_cube_exceeds_n)
    out.notes.push_back(
        "k^3 > n: the 2*sqrt(2)*k^3*n^2 term dominates spatial convolution, "
        "so FFT convolution is asymptotically cheaper");
  out.notes.push_back(
      "FFT cost is the lower bound 38.5*n^2.5*sqrt(log2 n); the reference "
      "figure 3.76e8 quoted for n=512 is not reproduced by it (bound gives " +
      sci(model_fftconv_lower(512)) + ")");
  return out;
}

OrientationRatios orientation_ratio(double m, double pixels, double k) {
  if (!(m > 0.0)) throw std::invalid_argument("m must be positive");
  if (!(pixels > 0.0)) throw std::invalid_argument("pixels must be positive");
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  auto dominant = [&](double height, double width) {
    return std::pow(k, 1.5) * height * std::pow(width, 1.5);
  };
  const double portrait = dominant(std::sqrt(pixels * m), std::sqrt(pixels / m));
  const double square = dominant(std::sqrt(pixels), std::sqrt(pixels));
  const double landscape =
      dominant(std::sqrt(pixels / m), std::sqrt(pixels * m));
  return {square / portrait, landscape / portrait};
}

}  // namespace dmc
