// Deterministic memory traces of the analysed kernels.
//
// Scalars that live in registers (running sums, loop counters) are not
// traced; array reads and result writes are. Objects are declared inputs
// first, temporaries in creation order, outputs last, and object ids equal
// their declaration position.

#ifndef DMC_TRACEGEN_HPP
#define DMC_TRACEGEN_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "dmc/core.hpp"

namespace dmc {

struct MatmulParams {
  std::int64_t m = 1, n = 1, l = 1;
};
struct ConvParams {
  std::int64_t h = 1, w = 1, k = 1;
};
struct BatchParams {
  std::int64_t n = 1, k = 1, c = 1, x = 1;
};
struct Im2colParams {
  std::int64_t n = 1, k = 1;
};
struct FftParams {
  std::int64_t n = 1;
};
struct FftConv2dParams {
  std::int64_t n = 1;
};

using GenSpec = std::variant<MatmulParams, ConvParams, Im2colParams,
                             BatchParams, FftParams, FftConv2dParams>;

/// Algorithm tag as used on the command line: matmul, conv, im2col,
/// batchconv, fft, fftconv2d.
std::string_view algorithm_name(const GenSpec& spec);

/// Throws std::invalid_argument with a user-facing message.
void validate(const GenSpec& spec);

/// Exact number of accesses generate(spec) will emit, from closed forms.
std::uint64_t expected_accesses(const GenSpec& spec);

Trace generate(const GenSpec& spec);

/// C[m][l] = A[m][n] * B[n][l], i-j-k order; 2mnl + ml accesses.
Trace gen_matmul(std::int64_t m, std::int64_t n, std::int64_t l);

/// Valid sliding-window convolution of an h x w image with a k x k kernel.
/// Per tap: K[y][x] then I[i+y][j+x]; one R[i][j] write per window.
Trace gen_conv(std::int64_t h, std::int64_t w, std::int64_t k);

/// Window copy into R (one row per window, k*k columns) followed by the
/// matrix-vector product of R with the flattened kernel.
Trace gen_im2col(std::int64_t n, std::int64_t k);

/// c channels processed x at a time: batch -> window -> channel -> taps,
/// with one accumulate access to the shared R[i][j] per channel.
Trace gen_batched_conv(std::int64_t n, std::int64_t k, std::int64_t c,
                       std::int64_t x);

/// Recursive radix-2 FFT with per-call even/odd copy objects and a shared
/// roots-of-unity table of n/2 entries.
Trace gen_fft(std::int64_t n);

/// FFT-based 2D convolution: 2D transforms (rows then columns) of the image
/// and the padded kernel, pointwise product, inverse 2D transform.
Trace gen_fft_conv2d(std::int64_t n);

bool is_power_of_two(std::int64_t n);

}  // namespace dmc

#endif  // DMC_TRACEGEN_HPP
