#include "dmc/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dmc/reuse.hpp"
#include "dmc/tracegen.hpp"

namespace dmc {
namespace {

const double kSqrt2 = std::sqrt(2.0);

void require_positive(double v, const char* name) {
  if (!(v > 0.0))
    throw std::invalid_argument(std::string(name) + " must be positive");
}

void require_power_of_two(std::int64_t n) {
  if (!is_power_of_two(n)) throw std::invalid_argument("n must be a power of 2");
}

double log2_of(std::int64_t n) { return std::log2(static_cast<double>(n)); }

int ilog2(std::int64_t n) {
  int lg = 0;
  while ((std::int64_t{1} << lg) < n) ++lg;
  return lg;
}

double conv_asymptotic(double n, double k) {
  return 2.0 * kSqrt2 * k * k * k * n * n + std::pow(k, 1.5) * std::pow(n, 2.5);
}

// Shared closed form of the divide and conquer phase sums.
double fft_phase_sum(std::int64_t n, double overhead) {
  require_power_of_two(n);
  const int levels = ilog2(n);
  CompensatedSum total;
  for (int d = 2; d <= levels; ++d) {
    const double calls = std::ldexp(1.0, levels - d);
    const double f = fft_level_size(d - 1);
    const std::int64_t last = std::int64_t{1} << (d - 1);
    CompensatedSum inner;
    for (std::int64_t a = 0; a <= last; ++a)
      inner.add(std::sqrt(f + overhead * static_cast<double>(a)));
    total.add(calls * inner.value());
  }
  return total.value();
}

}  // namespace

double Evaluation::term(std::string_view name) const {
  for (const Term& t : terms)
    if (t.name == name) return t.value;
  throw std::out_of_range("no term named '" + std::string(name) + "'");
}

double model_matmul(double m, double n, double l) {
  require_positive(m, "m");
  require_positive(n, "n");
  require_positive(l, "l");
  return m * std::pow(n * l, 1.5);
}

ConvModel model_conv(std::int64_t h, std::int64_t w, std::int64_t k) {
  if (h < 1 || w < 1 || k < 1)
    throw std::invalid_argument("dimensions must be >= 1");
  if (k > std::min(h, w))
    throw std::invalid_argument("k must not exceed min(h, w)");
  ConvModel out;
  const double H = static_cast<double>(h), W = static_cast<double>(w),
               K = static_cast<double>(k);
  out.asymptotic_kernel = 2.0 * kSqrt2 * K * K * K * H * W;
  out.asymptotic_column = std::pow(K, 1.5) * H * std::pow(W, 1.5);
  out.asymptotic = out.asymptotic_kernel + out.asymptotic_column;
  out.square = h == w;
  if (!out.square) return out;

  const double n = H;
  auto clamp = [&](double v) {
    if (v < 0.0) {
      out.clamped = true;
      return 0.0;
    }
    return v;
  };
  const double short_reuse = std::sqrt(2.0 * K * K - 1.0);
  out.kernel_term =
      clamp(K * K * ((n - K + 1) * (n - K + 1) - 1.0) * short_reuse);
  out.row_term = clamp(K * (K - 1) * (n - 3 * K + 2) * (n - K) * short_reuse);
  out.col_term = clamp((K - 1) * ((n - K - 1) * (n - K - 1) - 1.0) *
                       std::sqrt(n * K + K * K));
  out.component_total = out.kernel_term + out.row_term + out.col_term;
  out.out_of_regime = h < 3 * k;
  return out;
}

BatchedModel model_batched(double n, std::int64_t k, std::int64_t c,
                           std::int64_t x) {
  if (k < 1 || c < 1 || x < 1)
    throw std::invalid_argument("k, c and x must be >= 1");
  if (!(n >= static_cast<double>(k)))
    throw std::invalid_argument("k must not exceed n");
  if (c % x != 0) throw std::invalid_argument("x must divide c");
  BatchedModel out;
  const double sx = std::sqrt(static_cast<double>(x));
  out.conv_term = static_cast<double>(c) * sx *
                  conv_asymptotic(n, static_cast<double>(k));
  out.result_term = sx * static_cast<double>(c / x - 1) * n * n * n;
  out.total = out.conv_term + out.result_term;
  return out;
}

Im2colModel model_im2col(std::int64_t n, std::int64_t k) {
  if (n < 1 || k < 1) throw std::invalid_argument("dimensions must be >= 1");
  if (k > n) throw std::invalid_argument("k must not exceed n");
  const double N = static_cast<double>(n), K = static_cast<double>(k);
  Im2colModel out;
  out.kernel_term = 2.0 * kSqrt2 * K * K * K * N * N;
  out.column_term = std::pow(K, 1.5) * std::pow(N, 2.5);
  out.r_term = K * N * N * N;
  out.total = out.kernel_term + out.column_term + out.r_term;
  return out;
}

double model_blocked_conv(std::int64_t n, std::int64_t k, std::int64_t b) {
  if (b < 1) throw std::invalid_argument("block size must be >= 1");
  return model_conv(n, n, k).asymptotic / std::sqrt(static_cast<double>(b));
}

double fft_level_size(int level) {
  if (level < 0) throw std::invalid_argument("level must be >= 0");
  return (2.0 * level + 1.5) * std::ldexp(1.0, level);
}

double fft_divide_sum(std::int64_t n, double overhead) {
  return fft_phase_sum(n, overhead);
}

double fft_conquer_sum(std::int64_t n, double overhead) {
  return fft_phase_sum(n, overhead);
}

double fft_distant_count_at_level(std::int64_t n, int level) {
  require_power_of_two(n);
  if (level < 0 || level > ilog2(n))
    throw std::invalid_argument("level must lie in [0, log2 n]");
  const double count = static_cast<double>(n) / std::ldexp(1.0, level + 1) - 1;
  return std::max(0.0, count);
}

double fft_distant_count(std::int64_t n, std::int64_t index) {
  require_power_of_two(n);
  if (index < 0 || index >= std::max<std::int64_t>(1, n / 2))
    throw std::invalid_argument("root-of-unity index out of range");
  if (index == 0) return fft_distant_count_at_level(n, 1);
  int twos = 0;
  while ((index >> twos & 1) == 0) ++twos;
  return fft_distant_count_at_level(n, ilog2(n) - twos);
}

FftComponents model_fft_components(std::int64_t n, double overhead) {
  require_power_of_two(n);
  FftComponents out;
  out.overhead = overhead;
  for (int level = 0; level <= ilog2(n); ++level)
    out.level_sizes.push_back(fft_level_size(level));
  out.divide_sum = fft_divide_sum(n, overhead);
  out.conquer_sum = fft_conquer_sum(n, overhead);
  return out;
}

FftBounds model_fft_bounds(std::int64_t n) {
  require_power_of_two(n);
  const double base = std::pow(static_cast<double>(n), 1.5) *
                      std::sqrt(log2_of(n));
  return {6.4 * base, 6.5 * base};
}

double model_fftconv_lower(std::int64_t n) {
  require_power_of_two(n);
  return 38.5 * std::pow(static_cast<double>(n), 2.5) * std::sqrt(log2_of(n));
}

AttentionModel model_attention(std::int64_t l, std::int64_t d,
                               std::int64_t h) {
  if (l < 1 || d < 1 || h < 1)
    throw std::invalid_argument("l, d and h must be >= 1");
  if (d % h != 0) throw std::invalid_argument("h must divide d");
  const double L = static_cast<double>(l), D = static_cast<double>(d),
               H = static_cast<double>(h);
  AttentionModel out;
  out.head_cost = L * std::pow(D, 2.5) * H + L * D * D * D / std::sqrt(H);
  // h * (d / h) is exactly d in integers, so the cost cannot depend on h.
  const std::int64_t hv = h * (d / h);
  out.mha_cost = L * std::pow(static_cast<double>(hv) * D, 1.5);
  return out;
}

GqaModel model_gqa(double l, double d, std::int64_t h, std::int64_t q) {
  require_positive(l, "l");
  require_positive(d, "d");
  if (h < 1 || q < 1) throw std::invalid_argument("h and q must be >= 1");
  if (h % q != 0) throw std::invalid_argument("q must divide h");
  GqaModel out;
  out.groups = h / q;
  const double p = static_cast<double>(out.groups), H = static_cast<double>(h);
  const double d2 = d * d;
  out.cold_term = p * std::pow(d2 + 2.0 * d2 / H, 1.5);
  out.reuse_term = 2.0 * p * static_cast<double>(q - 1) * (d2 / H) *
                   std::sqrt(l * l + 4.0 * d2 / H);
  out.total = out.cold_term + out.reuse_term;
  out.asymptotic = p * d2 * d;
  return out;
}

TransformerModel model_transformer(std::int64_t n_layers, double l, double d,
                                   double f) {
  if (n_layers < 1) throw std::invalid_argument("layer count must be >= 1");
  require_positive(l, "l");
  require_positive(d, "d");
  require_positive(f, "f");
  TransformerModel out;
  out.stages = {
      {"embedding", std::pow(d * l, 1.5)},
      {"positional_encoding", std::pow(d * l, 1.5)},
      {"masked_mha", l * d * d * d},
      {"mha", l * d * d * d},
      {"ffn", std::sqrt(4.0 * d * f)},
      {"linear", 3.0 * l * std::pow(d, 1.5)},
      {"softmax", 2.0 * std::pow(l, 2.5)},
  };
  out.forward_total = static_cast<double>(n_layers) * 2.0 * l * d * d * d;
  return out;
}

double model_cold(double m) { return cold_cost(m); }

// ---- registry -------------------------------------------------------------

namespace {

double need(const ParamMap& p, std::string_view key) {
  auto it = p.find(key);
  if (it == p.end())
    throw std::invalid_argument("missing parameter --" + std::string(key));
  return it->second;
}

double get_or(const ParamMap& p, std::string_view key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::int64_t need_int(const ParamMap& p, std::string_view key) {
  const double v = need(p, key);
  if (v != std::floor(v) || std::abs(v) > 9e15)
    throw std::invalid_argument("parameter --" + std::string(key) +
                                " must be an integer");
  return static_cast<std::int64_t>(v);
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(4);
  os << std::scientific << v;
  return os.str();
}

Evaluation make(std::string formula,
                std::vector<std::pair<std::string, double>> params,
                std::vector<Term> terms, double total) {
  Evaluation e;
  e.formula = std::move(formula);
  e.params = std::move(params);
  e.terms = std::move(terms);
  e.total = total;
  return e;
}

std::vector<ModelInfo> build_registry() {
  std::vector<ModelInfo> r;

  r.push_back({"matmul", "m*(n*l)^1.5", {"m", "n", "l"}, [](const ParamMap& p) {
                 const double m = need(p, "m"), n = need(p, "n"),
                              l = need(p, "l");
                 const double v = model_matmul(m, n, l);
                 return make("matmul", {{"m", m}, {"n", n}, {"l", l}},
                             {{"matmul", v}}, v);
               }});

  r.push_back(
      {"conv",
       "2*sqrt(2)*k^3*h*w + k^1.5*h*w^1.5 (square: n = h = w); components "
       "f, g, h of kernel, row-wise and column-wise reuses",
       {"n | h,w", "k"},
       [](const ParamMap& p) {
         const std::int64_t k = need_int(p, "k");
         std::int64_t h, w;
         if (p.contains("n")) {
           h = w = need_int(p, "n");
         } else {
           h = need_int(p, "h");
           w = need_int(p, "w");
         }
         const ConvModel m = model_conv(h, w, k);
         Evaluation e = make(
             "conv",
             {{"h", double(h)}, {"w", double(w)}, {"k", double(k)}},
             {{"asymptotic_kernel", m.asymptotic_kernel},
              {"asymptotic_column", m.asymptotic_column},
              {"kernel_reuse", m.kernel_term},
              {"row_reuse", m.row_term},
              {"column_reuse", m.col_term},
              {"component_total", m.component_total}},
             m.asymptotic);
         if (!m.square)
           e.notes.push_back(
               "reuse-class components are defined for square images only");
         if (m.out_of_regime)
           e.notes.push_back("n < 3k: component formulas are outside their "
                             "validity regime");
         if (m.clamped)
           e.notes.push_back("negative component values clamped to 0");
         return e;
       }});

  r.push_back({"batched",
               "c*sqrt(x)*(2*sqrt(2)*k^3*n^2 + k^1.5*n^2.5) + "
               "sqrt(x)*(c/x - 1)*n^3",
               {"n", "k", "c", "x"},
               [](const ParamMap& p) {
                 const double n = need(p, "n");
                 const std::int64_t k = need_int(p, "k"), c = need_int(p, "c"),
                                    x = need_int(p, "x");
                 const BatchedModel m = model_batched(n, k, c, x);
                 return make("batched",
                             {{"n", n}, {"k", double(k)}, {"c", double(c)},
                              {"x", double(x)}},
                             {{"conv", m.conv_term}, {"result", m.result_term}},
                             m.total);
               }});

  r.push_back({"im2col", "2*sqrt(2)*k^3*n^2 + k^1.5*n^2.5 + k*n^3",
               {"n", "k"}, [](const ParamMap& p) {
                 const std::int64_t n = need_int(p, "n"), k = need_int(p, "k");
                 const Im2colModel m = model_im2col(n, k);
                 return make("im2col", {{"n", double(n)}, {"k", double(k)}},
                             {{"kernel", m.kernel_term},
                              {"column", m.column_term},
                              {"r", m.r_term}},
                             m.total);
               }});

  r.push_back({"blockedconv",
               "(2*sqrt(2)*n^2*k^3 + n^2.5*k^1.5) / sqrt(b)",
               {"n", "k", "b"}, [](const ParamMap& p) {
                 const std::int64_t n = need_int(p, "n"), k = need_int(p, "k"),
                                    b = need_int(p, "b");
                 const double v = model_blocked_conv(n, k, b);
                 return make("blockedconv",
                             {{"n", double(n)}, {"k", double(k)},
                              {"b", double(b)}},
                             {{"blocked", v}}, v);
               }});

  r.push_back(
      {"fftcomponents",
       "F(L) = (2L+1.5)*2^L; divide/conquer sums "
       "sum_{d=2}^{log2 n} 2^(log2 n - d) sum_{a=0}^{2^(d-1)} "
       "sqrt(F(d-1) + C(a)), C(a) = overhead*a; distant reuse counts "
       "n/2^(X+1) - 1",
       {"n", "overhead (optional, default 1)", "index (optional)"},
       [](const ParamMap& p) {
         const std::int64_t n = need_int(p, "n");
         const double overhead = get_or(p, "overhead", 1.0);
         const FftComponents m = model_fft_components(n, overhead);
         std::vector<Term> terms;
         for (std::size_t L = 0; L < m.level_sizes.size(); ++L)
           terms.push_back({"F" + std::to_string(L), m.level_sizes[L]});
         terms.push_back({"divide_sum", m.divide_sum});
         terms.push_back({"conquer_sum", m.conquer_sum});
         const std::int64_t index =
             p.contains("index") ? need_int(p, "index") : 0;
         if (n >= 2)
           terms.push_back({"distant_count_omega" + std::to_string(index),
                            fft_distant_count(n, index)});
         Evaluation e = make("fftcomponents",
                             {{"n", double(n)}, {"overhead", overhead},
                              {"index", double(index)}},
                             std::move(terms), m.divide_sum + m.conquer_sum);
         e.notes.push_back(
             "total is divide_sum + conquer_sum; the roots-of-unity and "
             "remaining components have no closed form here");
         return e;
       }});

  r.push_back({"fftbounds", "[6.4, 6.5] * n^1.5 * sqrt(log2 n)", {"n"},
               [](const ParamMap& p) {
                 const std::int64_t n = need_int(p, "n");
                 const FftBounds b = model_fft_bounds(n);
                 Evaluation e = make("fftbounds", {{"n", double(n)}},
                                     {{"lower", b.lower}, {"upper", b.upper}},
                                     b.upper);
                 e.notes.push_back("total reports the upper bound");
                 return e;
               }});

  r.push_back({"fftconv", "38.5 * n^2.5 * sqrt(log2 n)  (>= 3*2n*D_fft(n))",
               {"n"}, [](const ParamMap& p) {
                 const std::int64_t n = need_int(p, "n");
                 const double v = model_fftconv_lower(n);
                 Evaluation e = make("fftconv", {{"n", double(n)}},
                                     {{"lower_bound", v}}, v);
                 e.notes.push_back(
                     "reference figure 3.76e8 quoted for n=512 is not "
                     "reproduced by this bound (" +
                     format_number(model_fftconv_lower(512)) +
                     " at n=512, log base 2); both values are reported, "
                     "neither is corrected");
                 return e;
               }});

  r.push_back({"attention", "l*d^2.5*h + l*d^3/sqrt(h)", {"l", "d", "h"},
               [](const ParamMap& p) {
                 const std::int64_t l = need_int(p, "l"), d = need_int(p, "d"),
                                    h = need_int(p, "h");
                 const AttentionModel m = model_attention(l, d, h);
                 Evaluation e = make(
                     "attention",
                     {{"l", double(l)}, {"d", double(d)}, {"h", double(h)}},
                     {{"head", m.head_cost}, {"mha", m.mha_cost}},
                     m.head_cost);
                 e.notes.push_back(
                     "simplified head cost assumes l, h << d; the "
                     "h*l^2.5*d^1.5 intermediate term is dropped");
                 return e;
               }});

  r.push_back({"mha", "l*(h*v*d)^1.5 = l*d^3 with v = d/h", {"l", "d", "h"},
               [](const ParamMap& p) {
                 const std::int64_t l = need_int(p, "l"), d = need_int(p, "d"),
                                    h = need_int(p, "h");
                 const AttentionModel m = model_attention(l, d, h);
                 return make(
                     "mha",
                     {{"l", double(l)}, {"d", double(d)}, {"h", double(h)}},
                     {{"mha", m.mha_cost}}, m.mha_cost);
               }});

  r.push_back({"gqa",
               "p*(d^2 + 2d^2/h)^1.5 + 2p(q-1)(d^2/h)*sqrt(l^2 + 4d^2/h), "
               "p = h/q; asymptotically p*d^3",
               {"l", "d", "h", "q"}, [](const ParamMap& p) {
                 const double l = need(p, "l"), d = need(p, "d");
                 const std::int64_t h = need_int(p, "h"), q = need_int(p, "q");
                 const GqaModel m = model_gqa(l, d, h, q);
                 Evaluation e = make(
                     "gqa",
                     {{"l", l}, {"d", d}, {"h", double(h)}, {"q", double(q)},
                      {"p", double(m.groups)}},
                     {{"cold", m.cold_term},
                      {"reuse", m.reuse_term},
                      {"asymptotic", m.asymptotic}},
                     m.total);
                 e.notes.push_back("score matrix taken as d x d");
                 return e;
               }});

  r.push_back(
      {"transformer",
       "stages: (dl)^1.5, (dl)^1.5, ld^3, ld^3, sqrt(4df), 3ld^1.5, "
       "2l^2.5; forward pass layers*2*l*d^3",
       {"layers", "l", "d", "f"}, [](const ParamMap& p) {
         const std::int64_t layers = need_int(p, "layers");
         const double l = need(p, "l"), d = need(p, "d"), f = need(p, "f");
         const TransformerModel m = model_transformer(layers, l, d, f);
         Evaluation e = make("transformer",
                             {{"layers", double(layers)},
                              {"l", l},
                              {"d", d},
                              {"f", f}},
                             m.stages, m.forward_total);
         e.notes.push_back("ffn stage sqrt(4df) is evaluated as-printed");
         return e;
       }});

  r.push_back({"cold", "m^1.5", {"m"}, [](const ParamMap& p) {
                 const double m = need(p, "m");
                 const double v = model_cold(m);
                 return make("cold", {{"m", m}}, {{"cold", v}}, v);
               }});

  return r;
}

}  // namespace

const std::vector<ModelInfo>& model_registry() {
  static const std::vector<ModelInfo> registry = build_registry();
  return registry;
}

const ModelInfo* find_model(std::string_view name) {
  for (const ModelInfo& m : model_registry())
    if (m.name == name) return &m;
  return nullptr;
}

Evaluation evaluate_model(std::string_view name, const ParamMap& params) {
  const ModelInfo* info = find_model(name);
  if (info == nullptr)
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
  return info->evaluate(params);
}

}  // namespace dmc
