#include <doctest.h>

#include <cmath>

#include "dmc/models.hpp"
#include "dmc/reuse.hpp"
#include "dmc/tracegen.hpp"
#include "helpers.hpp"

using namespace dmc;

namespace {

using Flat = std::vector<std::pair<std::string, std::uint64_t>>;

Flat flatten(const Trace& t) {
  Flat out;
  for (const Access& a : t.accesses()) out.emplace_back(t.object(a.object).name, a.offset);
  return out;
}

std::vector<std::string> names(const Trace& t) {
  std::vector<std::string> out;
  for (const DataObject& o : t.objects()) out.push_back(o.name);
  return out;
}

std::uint64_t fft_count(std::uint64_t n) {
  if (n == 1) return 1;
  return 9 * n / 2 + 2 * fft_count(n / 2);
}

}  // namespace

TEST_CASE("matmul trace by hand") {
  const Trace t = gen_matmul(1, 2, 1);
  CHECK(names(t) == std::vector<std::string>{"A", "B", "C"});
  CHECK(flatten(t) == Flat{{"A", 0}, {"B", 0}, {"A", 1}, {"B", 1}, {"C", 0}});
}

TEST_CASE("conv trace by hand") {
  const Trace t = gen_conv(3, 3, 2);
  CHECK(names(t) == std::vector<std::string>{"I", "K", "R"});
  const Flat f = flatten(t);
  REQUIRE(f.size() == 4 * 9);
  const Flat first{{"K", 0}, {"I", 0}, {"K", 1}, {"I", 1}, {"K", 2},
                   {"I", 3}, {"K", 3}, {"I", 4}, {"R", 0}};
  CHECK(Flat(f.begin(), f.begin() + 9) == first);
  CHECK(f.back() == Flat::value_type{"R", 3});
  CHECK(f[9 + 1] == Flat::value_type{"I", 1});  // window (0,1) starts at column 1
}

TEST_CASE("im2col trace by hand") {
  const Trace t = gen_im2col(2, 1);
  CHECK(names(t) == std::vector<std::string>{"I", "K", "R", "out"});
  CHECK(flatten(t) == Flat{{"I", 0}, {"R", 0}, {"I", 1}, {"R", 1},
                           {"I", 2}, {"R", 2}, {"I", 3}, {"R", 3},
                           {"R", 0}, {"K", 0}, {"out", 0},
                           {"R", 1}, {"K", 0}, {"out", 1},
                           {"R", 2}, {"K", 0}, {"out", 2},
                           {"R", 3}, {"K", 0}, {"out", 3}});
}

TEST_CASE("im2col rows are window-major and never alias") {
  const Trace t = gen_im2col(5, 3);
  const std::uint64_t taps = 9, windows = 9;
  const Flat f = flatten(t);
  for (std::uint64_t w = 0; w < windows; ++w)
    for (std::uint64_t p = 0; p < taps; ++p)
      CHECK(f[2 * (w * taps + p) + 1] == Flat::value_type{"R", w * taps + p});
}

TEST_CASE("fft of size 2 by hand") {
  const Trace t = gen_fft(2);
  CHECK(names(t) ==
        std::vector<std::string>{"A", "omega", "fft2_even", "fft2_odd", "fft2_y"});
  CHECK(flatten(t) == Flat{{"A", 0}, {"fft2_even", 0}, {"fft2_even", 0},
                           {"A", 1}, {"fft2_odd", 0}, {"fft2_odd", 0},
                           {"fft2_even", 0}, {"omega", 0}, {"fft2_odd", 0},
                           {"fft2_y", 0}, {"fft2_y", 1}});
  CHECK(gen_fft(1).size() == 1);
}

TEST_CASE("access counts match the closed forms") {
  for (std::int64_t m : {1, 3, 5})
    for (std::int64_t n : {1, 2, 7})
      for (std::int64_t l : {1, 4}) {
        const auto expect = static_cast<std::uint64_t>(2 * m * n * l + m * l);
        CHECK(gen_matmul(m, n, l).size() == expect);
        CHECK(expected_accesses(MatmulParams{m, n, l}) == expect);
      }
  for (std::int64_t h : {3, 8, 11})
    for (std::int64_t w : {3, 9})
      for (std::int64_t k : {1, 2, 3}) {
        const auto expect =
            static_cast<std::uint64_t>((h - k + 1) * (w - k + 1) * (2 * k * k + 1));
        CHECK(gen_conv(h, w, k).size() == expect);
        CHECK(expected_accesses(ConvParams{h, w, k}) == expect);
      }
  for (std::int64_t n : {4, 9})
    for (std::int64_t k : {1, 3}) {
      const auto W = static_cast<std::uint64_t>((n - k + 1) * (n - k + 1));
      CHECK(gen_im2col(n, k).size() == W * (4 * k * k + 1));
      for (std::int64_t c : {1, 4, 6})
        for (std::int64_t x : {1, 2}) {
          if (c % x) continue;
          const auto expect = static_cast<std::uint64_t>(c) * W * (2 * k * k + 1);
          CHECK(gen_batched_conv(n, k, c, x).size() == expect);
          CHECK(expected_accesses(BatchParams{n, k, c, x}) == expect);
        }
    }
  for (std::int64_t n : {1, 2, 4, 64, 1024}) {
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    CHECK(gen_fft(n).size() == fft_count(un));
    CHECK(fft_count(un) ==
          static_cast<std::uint64_t>(std::llround(
              4.5 * double(n) * std::log2(double(n)) + double(n))));
  }
  for (std::uint64_t n : {1, 2, 4, 16, 32}) {
    // A size-1 root writing into an output view costs 2 instead of 1.
    const std::uint64_t one_d = n == 1 ? 2 : fft_count(n);
    const std::uint64_t expect = 3 * 2 * n * one_d + 3 * n * n;
    CHECK(gen_fft_conv2d(static_cast<std::int64_t>(n)).size() == expect);
    CHECK(expected_accesses(FftConv2dParams{static_cast<std::int64_t>(n)}) == expect);
  }
}

TEST_CASE("generate dispatches and validates") {
  CHECK(algorithm_name(FftConv2dParams{4}) == "fftconv2d");
  CHECK(generate(ConvParams{6, 6, 2}).size() == gen_conv(6, 6, 2).size());

  auto message = [](const GenSpec& s) {
    try {
      validate(s);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(FftParams{7}) == "n must be a power of 2");
  CHECK(message(FftConv2dParams{12}) == "n must be a power of 2");
  CHECK(message(BatchParams{64, 3, 10, 3}) == "x must divide c");
  CHECK(message(ConvParams{4, 8, 5}) == "k must not exceed min(h, w)");
  CHECK(message(Im2colParams{3, 4}) == "k must not exceed n");
  CHECK(message(MatmulParams{0, 1, 1}) == "dimensions must be >= 1");
  CHECK(message(MatmulParams{2, 2, 2}).empty());
  CHECK_THROWS_AS(generate(FftParams{6}), std::invalid_argument);
}

TEST_CASE("single-channel batched conv is plain conv") {
  for (std::int64_t n : {5, 10})
    for (std::int64_t k : {1, 2, 3}) {
      const Trace b = gen_batched_conv(n, k, 1, 1);
      const Trace c = gen_conv(n, n, k);
      REQUIRE(b.size() == c.size());
      for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(b.object_index(b.accesses()[i].object) ==
              c.object_index(c.accesses()[i].object));
        CHECK(b.accesses()[i].offset == c.accesses()[i].offset);
      }
      CHECK(stack_distances_fast(b) == stack_distances_fast(c));
    }
}

TEST_CASE("kernel reuses spike at distance 2k^2 - 1") {
  for (std::int64_t k : {2, 3, 4}) {
    const std::int64_t n = 24;
    const DmdReport r = analyze(gen_conv(n, n, k), {});
    const auto spike = static_cast<std::uint64_t>(2 * k * k - 1);
    CAPTURE(k);
    // Shortest reuse in the trace: one per horizontal window step for every
    // tap that has a right-hand neighbour in the kernel.
    REQUIRE(r.histogram.begin()->first == spike);
    CHECK(r.histogram.at(spike) ==
          static_cast<std::uint64_t>(k * (k - 1) * (n - k + 1) * (n - k)));
  }
}

namespace {

// Distant reuses of omega[index]: reuses made by a call at the lowest level
// that touches omega[index] whose previous touch came from a larger call.
// The call size is read off the F_even object accessed just before omega.
std::int64_t distant_reuses(std::int64_t n, std::uint64_t index) {
  const Trace t = gen_fft(n);
  const ObjectId omega = 1;
  REQUIRE(t.object(omega).name == "omega");
  std::vector<std::uint64_t> sizes;
  const auto acc = t.accesses();
  for (std::size_t i = 1; i < acc.size(); ++i) {
    if (acc[i].object != omega || acc[i].offset != index) continue;
    const std::string& prev = t.object(acc[i - 1].object).name;
    REQUIRE(prev.starts_with("fft"));
    // F_even of a size-S call is the result of its size-S/2 child: either
    // "fft<S/2>_y" or, for S = 2, "fft2_even".
    std::uint64_t size = std::stoull(prev.substr(3));
    if (prev.ends_with("_y")) size *= 2;
    sizes.push_back(size);
  }
  if (sizes.empty()) return 0;
  const std::uint64_t lowest = *std::min_element(sizes.begin(), sizes.end());
  std::int64_t count = 0;
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] == lowest && sizes[i - 1] > lowest) ++count;
  return count;
}

}  // namespace

TEST_CASE("roots-of-unity distant reuse counts from the trace") {
  CHECK(distant_reuses(16, 0) == 3);
  CHECK(distant_reuses(16, 2) == 0);
  CHECK(distant_reuses(16, 4) == 1);
  for (std::int64_t n : {4, 8, 32, 64})
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(n / 2); ++b) {
      CAPTURE(n);
      CAPTURE(b);
      CHECK(distant_reuses(n, b) ==
            static_cast<std::int64_t>(fft_distant_count(n, static_cast<std::int64_t>(b))));
    }
}

TEST_CASE("fft conv object count") {
  for (std::int64_t n : {2, 4, 8}) {
    const auto expect = static_cast<std::size_t>(3 + 3 * (2 * n * (3 * n - 4) + 2) + 1);
    CHECK(gen_fft_conv2d(n).objects().size() == expect);
  }
  CHECK(gen_fft_conv2d(2).objects().size() == 34);
}

TEST_CASE("object ids follow declaration order: inputs, temps, outputs") {
  const Trace t = gen_fft(8);
  for (std::size_t i = 0; i < t.objects().size(); ++i)
    CHECK(t.objects()[i].id == i);
  CHECK(t.objects().front().name == "A");
  CHECK(t.objects().back().name == "fft8_y");
}
