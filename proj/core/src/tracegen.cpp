#include "dmc/tracegen.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dmc {
namespace {

enum class Role { kInput, kTemp, kOutput };

// Collects objects and accesses under provisional handles, then renumbers
// objects so ids follow the role ordering (inputs, temps, outputs).
class TraceBuilder {
 public:
  std::uint32_t add(std::string name, std::uint64_t size, Role role) {
    objects_.push_back({std::move(name), size, role});
    return static_cast<std::uint32_t>(objects_.size() - 1);
  }

  void touch(std::uint32_t handle, std::uint64_t offset) {
    accesses_.push_back({handle, offset});
  }

  void reserve(std::uint64_t n) { accesses_.reserve(n); }

  Trace build() && {
    std::vector<std::uint32_t> order(objects_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return objects_[a].role < objects_[b].role;
    });
    std::vector<ObjectId> remap(objects_.size());
    std::vector<DataObject> table;
    table.reserve(objects_.size());
    for (std::uint32_t pos = 0; pos < order.size(); ++pos) {
      remap[order[pos]] = pos;
      Pending& p = objects_[order[pos]];
      table.push_back({pos, std::move(p.name), p.size});
    }
    for (Access& a : accesses_) a.object = remap[a.object];
    return Trace(std::move(table), std::move(accesses_));
  }

 private:
  struct Pending {
    std::string name;
    std::uint64_t size;
    Role role;
  };
  std::vector<Pending> objects_;
  std::vector<Access> accesses_;
};

using u64 = std::uint64_t;

u64 log2_exact(std::int64_t n) {
  u64 lg = 0;
  while ((std::int64_t{1} << lg) < n) ++lg;
  return lg;
}

void require_positive(std::initializer_list<std::int64_t> dims) {
  for (auto d : dims)
    if (d < 1) throw std::invalid_argument("dimensions must be >= 1");
}

// A strided window onto one object.
struct View {
  std::uint32_t object;
  u64 offset = 0;
  u64 stride = 1;
  u64 at(u64 i) const { return offset + i * stride; }
};

class FftEmitter {
 public:
  FftEmitter(TraceBuilder& builder, std::optional<std::uint32_t> omega,
             std::int64_t root_n)
      : b_(builder), omega_(omega), root_n_(static_cast<u64>(root_n)) {}

  // Emits FFT(size) over `in`. When `out` is given the conquer loop writes
  // into it instead of a fresh Y object. Returns where the result lives.
  View run(View in, u64 size, std::optional<View> out, Role y_role) {
    if (size == 1) {
      b_.touch(in.object, in.at(0));
      if (out) {
        b_.touch(out->object, out->at(0));
        return *out;
      }
      return in;
    }
    const u64 half = size / 2;
    const std::string tag = std::to_string(size);

    const auto even = b_.add("fft" + tag + "_even", half, Role::kTemp);
    for (u64 i = 0; i < half; ++i) {
      b_.touch(in.object, in.at(2 * i));
      b_.touch(even, i);
    }
    const View f_even = run(View{even}, half, std::nullopt, Role::kTemp);

    const auto odd = b_.add("fft" + tag + "_odd", half, Role::kTemp);
    for (u64 i = 0; i < half; ++i) {
      b_.touch(in.object, in.at(2 * i + 1));
      b_.touch(odd, i);
    }
    const View f_odd = run(View{odd}, half, std::nullopt, Role::kTemp);

    const View y = out ? *out : View{b_.add("fft" + tag + "_y", size, y_role)};
    const u64 step = root_n_ / size;
    for (u64 k = 0; k < half; ++k) {
      b_.touch(f_even.object, f_even.at(k));
      b_.touch(*omega_, k * step);
      b_.touch(f_odd.object, f_odd.at(k));
      b_.touch(y.object, y.at(k));
      b_.touch(y.object, y.at(k + half));
    }
    return y;
  }

  // Row transforms into a fresh buffer, then column transforms into dst.
  void run_2d(std::uint32_t src, std::uint32_t dst) {
    const u64 n = root_n_;
    const auto rows = b_.add("fft2d_rows", n * n, Role::kTemp);
    for (u64 r = 0; r < n; ++r)
      run(View{src, r * n, 1}, n, View{rows, r * n, 1}, Role::kTemp);
    for (u64 c = 0; c < n; ++c)
      run(View{rows, c, n}, n, View{dst, c, n}, Role::kTemp);
  }

 private:
  TraceBuilder& b_;
  std::optional<std::uint32_t> omega_;
  u64 root_n_;
};

// Accesses of one FFT(n) call tree: T(1) = 1, T(N) = 4.5N + 2T(N/2).
u64 fft_accesses(u64 n) { return n == 1 ? 1 : 9 * n * log2_exact(n) / 2 + n; }

}  // namespace

bool is_power_of_two(std::int64_t n) { return n >= 1 && (n & (n - 1)) == 0; }

std::string_view algorithm_name(const GenSpec& spec) {
  struct {
    std::string_view operator()(const MatmulParams&) const { return "matmul"; }
    std::string_view operator()(const ConvParams&) const { return "conv"; }
    std::string_view operator()(const Im2colParams&) const { return "im2col"; }
    std::string_view operator()(const BatchParams&) const {
      return "batchconv";
    }
    std::string_view operator()(const FftParams&) const { return "fft"; }
    std::string_view operator()(const FftConv2dParams&) const {
      return "fftconv2d";
    }
  } visitor;
  return std::visit(visitor, spec);
}

void validate(const GenSpec& spec) {
  std::visit(
      [](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MatmulParams>) {
          require_positive({p.m, p.n, p.l});
        } else if constexpr (std::is_same_v<P, ConvParams>) {
          require_positive({p.h, p.w, p.k});
          if (p.k > std::min(p.h, p.w))
            throw std::invalid_argument("k must not exceed min(h, w)");
        } else if constexpr (std::is_same_v<P, Im2colParams>) {
          require_positive({p.n, p.k});
          if (p.k > p.n) throw std::invalid_argument("k must not exceed n");
        } else if constexpr (std::is_same_v<P, BatchParams>) {
          require_positive({p.n, p.k, p.c, p.x});
          if (p.k > p.n) throw std::invalid_argument("k must not exceed n");
          if (p.c % p.x != 0) throw std::invalid_argument("x must divide c");
        } else {
          if (!is_power_of_two(p.n))
            throw std::invalid_argument("n must be a power of 2");
        }
      },
      spec);
}

std::uint64_t expected_accesses(const GenSpec& spec) {
  validate(spec);
  return std::visit(
      [](const auto& p) -> u64 {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MatmulParams>) {
          const u64 m = p.m, n = p.n, l = p.l;
          return 2 * m * n * l + m * l;
        } else if constexpr (std::is_same_v<P, ConvParams>) {
          const u64 wi = p.h - p.k + 1, wj = p.w - p.k + 1, k = p.k;
          return wi * wj * (2 * k * k + 1);
        } else if constexpr (std::is_same_v<P, Im2colParams>) {
          const u64 side = p.n - p.k + 1, k = p.k;
          return side * side * (4 * k * k + 1);
        } else if constexpr (std::is_same_v<P, BatchParams>) {
          const u64 side = p.n - p.k + 1, k = p.k;
          return static_cast<u64>(p.c) * side * side * (2 * k * k + 1);
        } else if constexpr (std::is_same_v<P, FftParams>) {
          return fft_accesses(p.n);
        } else {
          // A size-1 root with an output view copies its element.
          const u64 n = p.n;
          const u64 per_fft = n == 1 ? 2 : fft_accesses(n);
          return 3 * (2 * n * per_fft) + 3 * n * n;
        }
      },
      spec);
}

Trace generate(const GenSpec& spec) {
  return std::visit(
      [](const auto& p) -> Trace {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, MatmulParams>)
          return gen_matmul(p.m, p.n, p.l);
        else if constexpr (std::is_same_v<P, ConvParams>)
          return gen_conv(p.h, p.w, p.k);
        else if constexpr (std::is_same_v<P, Im2colParams>)
          return gen_im2col(p.n, p.k);
        else if constexpr (std::is_same_v<P, BatchParams>)
          return gen_batched_conv(p.n, p.k, p.c, p.x);
        else if constexpr (std::is_same_v<P, FftParams>)
          return gen_fft(p.n);
        else
          return gen_fft_conv2d(p.n);
      },
      spec);
}

Trace gen_matmul(std::int64_t m, std::int64_t n, std::int64_t l) {
  const GenSpec spec = MatmulParams{m, n, l};
  TraceBuilder b;
  b.reserve(expected_accesses(spec));
  const u64 M = m, N = n, L = l;
  const auto a = b.add("A", M * N, Role::kInput);
  const auto bm = b.add("B", N * L, Role::kInput);
  const auto c = b.add("C", M * L, Role::kOutput);
  for (u64 i = 0; i < M; ++i)
    for (u64 j = 0; j < L; ++j) {
      for (u64 k = 0; k < N; ++k) {
        b.touch(a, i * N + k);
        b.touch(bm, k * L + j);
      }
      b.touch(c, i * L + j);
    }
  return std::move(b).build();
}

Trace gen_conv(std::int64_t h, std::int64_t w, std::int64_t k) {
  const GenSpec spec = ConvParams{h, w, k};
  TraceBuilder b;
  b.reserve(expected_accesses(spec));
  const u64 H = h, W = w, K = k;
  const u64 out_h = H - K + 1, out_w = W - K + 1;
  const auto img = b.add("I", H * W, Role::kInput);
  const auto ker = b.add("K", K * K, Role::kInput);
  const auto res = b.add("R", out_h * out_w, Role::kOutput);
  for (u64 i = 0; i < out_h; ++i)
    for (u64 j = 0; j < out_w; ++j) {
      for (u64 y = 0; y < K; ++y)
        for (u64 x = 0; x < K; ++x) {
          b.touch(ker, y * K + x);
          b.touch(img, (i + y) * W + (j + x));
        }
      b.touch(res, i * out_w + j);
    }
  return std::move(b).build();
}

Trace gen_im2col(std::int64_t n, std::int64_t k) {
  const GenSpec spec = Im2colParams{n, k};
  TraceBuilder b;
  b.reserve(expected_accesses(spec));
  const u64 N = n, K = k, side = N - K + 1, taps = K * K;
  const auto img = b.add("I", N * N, Role::kInput);
  const auto ker = b.add("K", taps, Role::kInput);
  const auto cols = b.add("R", side * side * taps, Role::kTemp);
  const auto out = b.add("out", side * side, Role::kOutput);
  for (u64 i = 0; i < side; ++i)
    for (u64 j = 0; j < side; ++j) {
      const u64 row = i * side + j;
      u64 p = 0;
      for (u64 y = 0; y < K; ++y)
        for (u64 x = 0; x < K; ++x) {
          b.touch(img, (i + y) * N + (j + x));
          b.touch(cols, row * taps + p);
          ++p;
        }
    }
  for (u64 row = 0; row < side * side; ++row) {
    for (u64 p = 0; p < taps; ++p) {
      b.touch(cols, row * taps + p);
      b.touch(ker, p);
    }
    b.touch(out, row);
  }
  return std::move(b).build();
}

Trace gen_batched_conv(std::int64_t n, std::int64_t k, std::int64_t c,
                       std::int64_t x) {
  const GenSpec spec = BatchParams{n, k, c, x};
  TraceBuilder b;
  b.reserve(expected_accesses(spec));
  const u64 N = n, K = k, C = c, X = x, side = N - K + 1;
  std::vector<std::uint32_t> img(C), ker(C);
  for (u64 ch = 0; ch < C; ++ch)
    img[ch] = b.add("I" + std::to_string(ch), N * N, Role::kInput);
  for (u64 ch = 0; ch < C; ++ch)
    ker[ch] = b.add("K" + std::to_string(ch), K * K, Role::kInput);
  const auto res = b.add("R", side * side, Role::kOutput);
  for (u64 batch = 0; batch < C / X; ++batch)
    for (u64 i = 0; i < side; ++i)
      for (u64 j = 0; j < side; ++j)
        for (u64 ch = batch * X; ch < (batch + 1) * X; ++ch) {
          for (u64 y = 0; y < K; ++y)
            for (u64 xx = 0; xx < K; ++xx) {
              b.touch(ker[ch], y * K + xx);
              b.touch(img[ch], (i + y) * N + (j + xx));
            }
          b.touch(res, i * side + j);
        }
  return std::move(b).build();
}

Trace gen_fft(std::int64_t n) {
  const GenSpec spec = FftParams{n};
  TraceBuilder b;
  b.reserve(expected_accesses(spec));
  const auto input = b.add("A", static_cast<u64>(n), Role::kInput);
  std::optional<std::uint32_t> omega;
  if (n >= 2) omega = b.add("omega", static_cast<u64>(n / 2), Role::kInput);
  FftEmitter fft(b, omega, n);
  fft.run(View{input}, static_cast<u64>(n), std::nullopt, Role::kOutput);
  return std::move(b).build();
}

Trace gen_fft_conv2d(std::int64_t n) {
  const GenSpec spec = FftConv2dParams{n};
  TraceBuilder b;
  b.reserve(expected_accesses(spec));
  const u64 N = n, cells = N * N;
  const auto img = b.add("I", cells, Role::kInput);
  const auto ker = b.add("K_padded", cells, Role::kInput);
  std::optional<std::uint32_t> omega;
  if (n >= 2) omega = b.add("omega", N / 2, Role::kInput);
  FftEmitter fft(b, omega, n);

  const auto img_hat = b.add("I_hat", cells, Role::kTemp);
  fft.run_2d(img, img_hat);
  const auto ker_hat = b.add("K_hat", cells, Role::kTemp);
  fft.run_2d(ker, ker_hat);

  const auto product = b.add("P", cells, Role::kTemp);
  for (u64 e = 0; e < cells; ++e) {
    b.touch(img_hat, e);
    b.touch(ker_hat, e);
    b.touch(product, e);
  }
  // Inverse transform: same memory behaviour as the forward one.
  const auto result = b.add("R", cells, Role::kOutput);
  fft.run_2d(product, result);
  return std::move(b).build();
}

}  // namespace dmc
