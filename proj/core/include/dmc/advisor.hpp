// Parameter advice derived by inverting the closed-form models: batch size
// for multi-channel convolution, the image size and channel count where
// batching stops paying off, the largest model dimension a GQA layout
// affords under a DMD budget, spatial versus FFT convolution, and the cost
// asymmetry between portrait and landscape images.

#ifndef DMC_ADVISOR_HPP
#define DMC_ADVISOR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmc {

struct Candidate {
  double value = 0.0;
  double cost = 0.0;
};

struct Crossover {
  double value = 0.0;          // real-valued break-even point
  std::int64_t below = 0;      // integer neighbourhood
  std::int64_t above = 0;
};

struct AdvisorResult {
  std::string parameter;
  double recommended = 0.0;
  std::vector<Candidate> candidates;
  std::vector<Crossover> crossovers;
  std::vector<std::string> notes;
};

/// Thrown when the inputs admit no answer (no crossover in range, budget
/// below the smallest feasible cost).
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kBisectionRelTol = 1e-6;
inline constexpr int kBisectionMaxIter = 200;
inline constexpr double kCrossoverSearchLimit = 1e7;

/// Exhaustive sweep of the batch size over the divisors of c.
AdvisorResult advise_batch(std::int64_t n, std::int64_t k, std::int64_t c);

/// 1 - D_batch(n,k,c,x) / D_batch(n,k,c,1).
double batching_savings(double n, std::int64_t k, std::int64_t c,
                        std::int64_t x);

/// Image size where batching x of c channels breaks even with no batching.
Crossover crossover_image_size(std::int64_t k, std::int64_t c, std::int64_t x);

struct ChannelCrossover {
  std::int64_t channels = 0;  // smallest c with batched cost >= unbatched
  std::int64_t last_saving = 0;  // largest c where one batch still pays
  double break_even = 0.0;    // real-valued root of the cost difference
};

/// Channel count beyond which processing all channels in one batch costs
/// more than processing them one at a time.
ChannelCrossover crossover_channels(std::int64_t n, std::int64_t k);

struct GqaDimension {
  double d = 0.0;             // largest d with cost <= budget
  double d_asymptotic = 0.0;  // (budget * q / h)^(1/3)
  double cost_at_d = 0.0;
  double l = 0.0;
  bool include_matmul = false;
};

/// Largest model dimension d under a DMD budget for h heads in groups of
/// q. With include_matmul the l*d^3 projection cost is added to the GQA
/// cost before inverting.
GqaDimension advise_gqa_dim(double budget, std::int64_t h, std::int64_t q,
                            double l = 64.0, bool include_matmul = false);

struct ConvFftComparison {
  double spatial_cost = 0.0;
  double fft_cost = 0.0;
  bool spatial_cheaper = true;
  bool kernel_cube_exceeds_n = false;  // k^3 > n: FFT wins asymptotically
  std::vector<std::string> notes;
};

ConvFftComparison compare_conv_fft(std::int64_t n, std::int64_t k);

struct OrientationRatios {
  double square_over_portrait = 0.0;     // m^(1/4)
  double landscape_over_portrait = 0.0;  // m^(1/2)
};

/// Dominant convolution cost k^1.5 h w^1.5 for the same pixel count in
/// portrait (h/w = m), square and landscape (h/w = 1/m) orientation.
OrientationRatios orientation_ratio(double m, double pixels, double k);

}  // namespace dmc

#endif  // DMC_ADVISOR_HPP
