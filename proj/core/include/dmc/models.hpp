// Closed-form data movement complexity models.
//
// Every model is a pure function of its size parameters and returns its
// individual terms next to the total, so callers can see which source of
// data movement dominates. All costs are dimensionless DMD units.

#ifndef DMC_MODELS_HPP
#define DMC_MODELS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dmc {

struct Term {
  std::string name;
  double value = 0.0;
};

/// Uniform record used for JSON/CSV export and the model registry.
struct Evaluation {
  std::string formula;
  std::vector<std::pair<std::string, double>> params;
  std::vector<Term> terms;
  double total = 0.0;
  std::vector<std::string> notes;

  /// Value of the named term; throws std::out_of_range if absent.
  double term(std::string_view name) const;
};

// ---- matrix multiplication ----------------------------------------------

/// m * (n*l)^1.5 for an (m x n) by (n x l) product.
double model_matmul(double m, double n, double l);

// ---- spatial convolution ------------------------------------------------

struct ConvModel {
  // Per reuse class, square images only (zero for h != w).
  double kernel_term = 0.0;  // k^2((n-k+1)^2-1) sqrt(2k^2-1)
  double row_term = 0.0;     // k(k-1)(n-3k+2)(n-k) sqrt(2k^2-1)
  double col_term = 0.0;     // (k-1)((n-k-1)^2-1) sqrt(nk+k^2)
  double component_total = 0.0;
  // Leading-order totals: 2 sqrt2 k^3 h w + k^1.5 h w^1.5.
  double asymptotic_kernel = 0.0;
  double asymptotic_column = 0.0;
  double asymptotic = 0.0;
  bool square = true;
  bool clamped = false;        // a component went negative and was zeroed
  bool out_of_regime = false;  // n < 3k: components are not meaningful
};

ConvModel model_conv(std::int64_t h, std::int64_t w, std::int64_t k);

struct BatchedModel {
  double conv_term = 0.0;    // c sqrt(x) D_conv(n, k)
  double result_term = 0.0;  // sqrt(x) (c/x - 1) n^3
  double total = 0.0;
};

BatchedModel model_batched(double n, std::int64_t k, std::int64_t c,
                           std::int64_t x);

struct Im2colModel {
  double kernel_term = 0.0;  // 2 sqrt2 k^3 n^2
  double column_term = 0.0;  // k^1.5 n^2.5
  double r_term = 0.0;       // k n^3
  double total = 0.0;
};

Im2colModel model_im2col(std::int64_t n, std::int64_t k);

/// Convolution counted in b-element cache blocks: D_conv(n, k) / sqrt(b).
double model_blocked_conv(std::int64_t n, std::int64_t k, std::int64_t b);

// ---- FFT ----------------------------------------------------------------

/// Distinct data touched by a recursive call at level L: (2L + 1.5) 2^L.
double fft_level_size(int level);

/// Divide-phase reuse sum with out-of-call overhead C(a) = overhead * a.
double fft_divide_sum(std::int64_t n, double overhead = 1.0);
/// Conquer-phase reuse sum; same closed form as the divide phase.
double fft_conquer_sum(std::int64_t n, double overhead = 1.0);

/// Distant reuses of omega[b] when the lowest recursion level holding it
/// is `level`: n / 2^(level+1) - 1, floored at zero.
double fft_distant_count_at_level(std::int64_t n, int level);
/// Same count keyed by root-of-unity index. omega[b] reaches down to level
/// log2(n) - v2(b); omega[0] reaches level 1, giving n/4 - 1.
double fft_distant_count(std::int64_t n, std::int64_t index);

struct FftComponents {
  std::vector<double> level_sizes;  // F(0) .. F(log2 n)
  double divide_sum = 0.0;
  double conquer_sum = 0.0;
  double overhead = 1.0;
};

FftComponents model_fft_components(std::int64_t n, double overhead = 1.0);

struct FftBounds {
  double lower = 0.0;  // 6.4 n^1.5 sqrt(log2 n)
  double upper = 0.0;  // 6.5 n^1.5 sqrt(log2 n)
};

FftBounds model_fft_bounds(std::int64_t n);

/// Lower bound for FFT convolution: 38.5 n^2.5 sqrt(log2 n).
double model_fftconv_lower(std::int64_t n);

/// Reference cost quoted for FFT convolution at n = 512, which the bound
/// above does not reproduce (it evaluates to ~6.85e8 with log base 2).
inline constexpr double kFftConvReference512 = 376e6;

// ---- attention ----------------------------------------------------------

struct AttentionModel {
  double head_cost = 0.0;  // l d^2.5 h + l d^3 / sqrt(h)
  double mha_cost = 0.0;   // l (h v d)^1.5 with v = d/h, i.e. l d^3
};

AttentionModel model_attention(std::int64_t l, std::int64_t d,
                               std::int64_t h);

struct GqaModel {
  std::int64_t groups = 0;  // p = h / q
  double cold_term = 0.0;   // p (d^2 + 2d^2/h)^1.5
  double reuse_term = 0.0;  // 2p(q-1)(d^2/h) sqrt(l^2 + 4d^2/h)
  double total = 0.0;
  double asymptotic = 0.0;  // p d^3
};

GqaModel model_gqa(double l, double d, std::int64_t h, std::int64_t q);

struct TransformerModel {
  std::vector<Term> stages;
  double forward_total = 0.0;  // n_layers * 2 l d^3
};

TransformerModel model_transformer(std::int64_t n_layers, double l, double d,
                                   double f);

/// m^1.5; same contract as cold_cost().
double model_cold(double m);

// ---- registry -----------------------------------------------------------

using ParamMap = std::map<std::string, double, std::less<>>;

struct ModelInfo {
  std::string name;
  std::string expression;
  std::vector<std::string> params;
  std::function<Evaluation(const ParamMap&)> evaluate;
};

const std::vector<ModelInfo>& model_registry();
const ModelInfo* find_model(std::string_view name);
/// Throws std::invalid_argument for unknown names or missing parameters.
Evaluation evaluate_model(std::string_view name, const ParamMap& params);

}  // namespace dmc

#endif  // DMC_MODELS_HPP
