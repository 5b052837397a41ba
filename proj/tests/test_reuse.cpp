#include <doctest.h>

#include <cmath>

#include "dmc/reuse.hpp"
#include "dmc/tracegen.hpp"
#include "helpers.hpp"

using namespace dmc;
using test::letters;
using test::random_trace;

namespace {
const std::vector<std::uint64_t> kAbbbca{0, 0, 1, 1, 0, 3};
}

TEST_CASE("inclusive distances on abbbca") {
  const Trace t = letters("abbbca");
  CHECK(stack_distances_oracle(t).values == kAbbbca);
  CHECK(stack_distances_fast(t).values == kAbbbca);
}

TEST_CASE("small hand examples") {
  CHECK(stack_distances_fast(letters("aa")).values ==
        std::vector<std::uint64_t>{0, 1});
  CHECK(stack_distances_fast(letters("abab")).values ==
        std::vector<std::uint64_t>{0, 0, 2, 2});
  CHECK(stack_distances_fast(letters("abcdcba")).values ==
        std::vector<std::uint64_t>{0, 0, 0, 0, 2, 3, 4});
  CHECK(stack_distances_fast(Trace{}).values.empty());
}

TEST_CASE("fast engine equals the oracle on seeded random traces") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto n_objects = static_cast<ObjectId>(1 + seed % 17);
    const Trace t = random_trace(seed, 500 + 97 * seed, n_objects, 1 + seed % 40);
    CAPTURE(seed);
    CHECK(stack_distances_fast(t) == stack_distances_oracle(t));
  }
}

TEST_CASE("timestamp compaction preserves distances") {
  // Few live data and many accesses force repeated compaction.
  const Trace t = random_trace(99, 20'000, 3, 4);
  CHECK(stack_distances_fast(t) == stack_distances_oracle(t));
  const Trace cyclic = gen_matmul(4, 4, 4);
  CHECK(stack_distances_fast(cyclic) == stack_distances_oracle(cyclic));
}

TEST_CASE("million-access trace agrees with the oracle on its prefix") {
  const Trace big = random_trace(7, 1'000'000, 64, 32);
  const DistanceSequence fast = stack_distances_fast(big);
  REQUIRE(fast.size() == big.size());
  const std::size_t prefix = 10'000;
  const Trace head(
      {big.objects().begin(), big.objects().end()},
      {big.accesses().begin(), big.accesses().begin() + prefix});
  const DistanceSequence oracle = stack_distances_oracle(head);
  CHECK(std::equal(oracle.values.begin(), oracle.values.end(),
                   fast.values.begin()));
  for (std::uint64_t d : fast.values) CHECK_LE(d, big.total_elements());
}

TEST_CASE("accumulate prices reuses and cold misses") {
  const Trace t = letters("abbbca");
  const auto d = stack_distances_fast(t);
  const auto sizes = touched_object_sizes(t);
  AnalysisConfig config;

  const DmdReport ex = accumulate_dmd(d, config, sizes);
  CHECK(ex.reuse_dmd == doctest::Approx(2.0 + std::sqrt(3.0)).epsilon(1e-15));
  CHECK(ex.cold_dmd == 0.0);
  CHECK(ex.n_cold == 3);
  CHECK(ex.n_distinct == 3);
  CHECK(ex.n_reuses() == 3);
  CHECK(ex.histogram == std::map<std::uint64_t, std::uint64_t>{{1, 2}, {3, 1}});
  CHECK(ex.consistent());

  config.cold_policy = ColdPolicy::kFootprintBound;
  CHECK(accumulate_dmd(d, config, sizes).cold_dmd ==
        doctest::Approx(3.0 * std::sqrt(3.0)));

  // per_object charges whole objects, touched or not element-wise.
  const Trace wide({{0, "x", 4}, {1, "y", 9}, {2, "z", 16}}, {{0, 0}, {1, 3}, {0, 0}});
  config.cold_policy = ColdPolicy::kPerObject;
  const DmdReport po = analyze(wide, config);
  CHECK(po.cold_dmd == doctest::Approx(8.0 + 27.0));
  CHECK(po.reuse_dmd == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("cold cost is m^1.5") {
  CHECK(cold_cost(0.0) == 0.0);
  CHECK(cold_cost(4.0) == 8.0);
  CHECK(cold_cost(100.0) == doctest::Approx(1000.0));
  CHECK_THROWS_AS(cold_cost(-1.0), std::invalid_argument);
}

TEST_CASE("block transform maps elements onto aligned blocks") {
  const Trace t({{0, "a", 6}, {1, "b", 3}}, {{0, 0}, {0, 5}, {1, 0}, {1, 2}});
  const Trace blocked = apply_block_transform(t, build_layout(t.objects(), 4));
  // a occupies [0, 6), b is placed at 8.
  std::vector<ObjectId> ids;
  for (const Access& a : blocked.accesses()) ids.push_back(a.object);
  CHECK(ids == std::vector<ObjectId>{0, 1, 2, 2});
  CHECK(blocked.objects().size() == 3);

  const Trace other({{5, "q", 2}}, {{5, 0}});
  CHECK_THROWS_AS(apply_block_transform(other, build_layout(t.objects(), 4)),
                  TraceError);
}

TEST_CASE("sequential re-scan collapses distances by the block size") {
  std::vector<Access> scan;
  for (int pass = 0; pass < 2; ++pass)
    for (std::uint64_t i = 0; i < 64; ++i) scan.push_back({0, i});
  const Trace t({{0, "v", 64}}, scan);
  AnalysisConfig c;
  const DmdReport element = analyze(t, c);
  c.block_size = 4;
  const DmdReport block = analyze(t, c);
  CHECK(element.histogram == std::map<std::uint64_t, std::uint64_t>{{64, 64}});
  // Within a block the next three accesses hit at distance 1; across passes
  // every block is reused at distance 16.
  CHECK(block.histogram ==
        std::map<std::uint64_t, std::uint64_t>{{1, 96}, {16, 16}});
}

TEST_CASE("block distance never exceeds element distance") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Trace t = random_trace(seed, 3000, 6, 50);
    for (std::int64_t b : {2, 4, 16}) {
      const auto element = stack_distances_fast(t);
      const auto block =
          stack_distances_fast(apply_block_transform(t, build_layout(t.objects(), b)));
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (element.is_cold(i)) continue;
        REQUIRE_FALSE(block.is_cold(i));
        REQUIRE(block[i] <= element[i]);
      }
    }
  }
}

TEST_CASE("engines give identical reports") {
  const Trace t = gen_fft(64);
  for (ColdPolicy p : {ColdPolicy::kExclude, ColdPolicy::kFootprintBound,
                       ColdPolicy::kPerObject}) {
    AnalysisConfig c;
    c.cold_policy = p;
    c.granularity_bits = 8;
    c.block_size = 2;
    CHECK(analyze(t, c, Engine::kFast) == analyze(t, c, Engine::kOracle));
  }
}

TEST_CASE("granularity scaling through analyze") {
  const Trace t = gen_conv(12, 12, 3);
  AnalysisConfig c;
  c.cold_policy = ColdPolicy::kFootprintBound;
  const DmdReport base = analyze(t, c);
  for (std::int64_t s : {2, 4, 16}) {
    c.granularity_bits = s;
    const DmdReport r = analyze(t, c);
    const double root = std::sqrt(static_cast<double>(s));
    CHECK(test::rel_diff(r.reuse_dmd, root * base.reuse_dmd) < 1e-15);
    CHECK(test::rel_diff(r.cold_dmd, root * base.cold_dmd) < 1e-15);
    CHECK(r.consistent());
  }
}
