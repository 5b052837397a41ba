#include "dmc/reuse.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace dmc {
namespace {

constexpr std::uint32_t kNever = std::numeric_limits<std::uint32_t>::max();

class Fenwick {
 public:
  void reset(std::size_t n) { tree_.assign(n + 1, 0); }

  // Linear-time build from 0/1 marks.
  void build(const std::vector<std::uint32_t>& marks) {
    tree_.assign(marks.size() + 1, 0);
    for (std::size_t i = 1; i < tree_.size(); ++i) {
      tree_[i] += marks[i - 1];
      const std::size_t parent = i + (i & (~i + 1));
      if (parent < tree_.size()) tree_[parent] += tree_[i];
    }
  }

  void add(std::size_t pos, std::int32_t delta) {
    for (std::size_t i = pos + 1; i < tree_.size(); i += i & (~i + 1))
      tree_[i] = static_cast<std::uint32_t>(static_cast<std::int64_t>(tree_[i]) +
                                            delta);
  }

  // Sum over [0, pos).
  std::uint64_t prefix(std::size_t pos) const {
    std::uint64_t s = 0;
    for (std::size_t i = pos; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::uint32_t> tree_;
};

}  // namespace

DistanceSequence stack_distances_oracle(const Trace& trace) {
  DistanceSequence out;
  out.values.reserve(trace.size());
  // Most recently used datum at the back.
  std::vector<std::uint64_t> stack;
  for (std::uint64_t key : trace.element_keys()) {
    auto it = std::find(stack.rbegin(), stack.rend(), key);
    if (it == stack.rend()) {
      out.values.push_back(DistanceSequence::kCold);
      stack.push_back(key);
      continue;
    }
    out.values.push_back(static_cast<std::uint64_t>(it - stack.rbegin()) + 1);
    stack.erase(std::next(it).base());
    stack.push_back(key);
  }
  return out;
}

DistanceSequence stack_distances_fast(const Trace& trace) {
  const std::vector<std::uint64_t> keys = trace.element_keys();
  DistanceSequence out;
  out.values.reserve(keys.size());
  if (keys.empty()) return out;

  // last[key] is the compacted timestamp of the datum's latest access;
  // owner[t] is the datum whose latest access sits at timestamp t.
  std::vector<std::uint32_t> last(trace.total_elements(), kNever);
  std::size_t capacity = 1024;
  std::vector<std::uint64_t> owner(capacity, kNever);
  Fenwick marks;
  marks.reset(capacity);
  std::size_t now = 0;
  std::uint64_t live = 0;

  auto compact = [&] {
    std::vector<std::uint64_t> kept;
    kept.reserve(live);
    for (std::size_t t = 0; t < now; ++t)
      if (owner[t] != kNever) kept.push_back(owner[t]);
    capacity = std::max<std::size_t>(1024, 2 * kept.size());
    if (capacity >= kNever)
      throw std::length_error("footprint too large for the fast engine");
    owner.assign(capacity, kNever);
    std::vector<std::uint32_t> bits(capacity, 0);
    for (std::size_t t = 0; t < kept.size(); ++t) {
      owner[t] = kept[t];
      last[kept[t]] = static_cast<std::uint32_t>(t);
      bits[t] = 1;
    }
    marks.build(bits);
    now = kept.size();
  };

  for (std::uint64_t key : keys) {
    if (now == capacity) compact();
    const std::uint32_t prev = last[key];
    if (prev == kNever) {
      out.values.push_back(DistanceSequence::kCold);
      ++live;
    } else {
      // Every live mark is older than `now`, so the marks at or after prev
      // are exactly the distinct data touched since (and including) key.
      out.values.push_back(live - marks.prefix(prev));
      marks.add(prev, -1);
      owner[prev] = kNever;
    }
    marks.add(now, +1);
    owner[now] = key;
    last[key] = static_cast<std::uint32_t>(now);
    ++now;
  }
  return out;
}

std::vector<std::uint64_t> touched_object_sizes(const Trace& trace) {
  std::vector<bool> touched(trace.objects().size(), false);
  for (const Access& a : trace.accesses())
    touched[trace.object_index(a.object)] = true;
  std::vector<std::uint64_t> sizes;
  for (std::size_t i = 0; i < touched.size(); ++i)
    if (touched[i]) sizes.push_back(trace.objects()[i].size);
  return sizes;
}

DmdReport accumulate_dmd(const DistanceSequence& distances,
                         const AnalysisConfig& config,
                         std::span<const std::uint64_t> touched_sizes) {
  config.validate();
  DmdReport report;
  report.n_accesses = distances.size();
  for (std::uint64_t d : distances.values) {
    if (d == DistanceSequence::kCold)
      ++report.n_cold;
    else
      ++report.histogram[d];
  }
  report.n_distinct = report.n_cold;

  CompensatedSum reuse;
  for (const auto& [distance, count] : report.histogram)
    reuse.add(static_cast<double>(count) *
              std::sqrt(static_cast<double>(distance)));
  report.reuse_dmd = reuse.value();

  switch (config.cold_policy) {
    case ColdPolicy::kExclude:
      report.cold_dmd = 0.0;
      break;
    case ColdPolicy::kFootprintBound:
      report.cold_dmd = cold_cost(static_cast<double>(report.n_distinct));
      break;
    case ColdPolicy::kPerObject: {
      CompensatedSum cold;
      for (std::uint64_t m : touched_sizes)
        cold.add(cold_cost(static_cast<double>(m)));
      report.cold_dmd = cold.value();
      break;
    }
  }
  return report;
}

Trace apply_block_transform(const Trace& trace, const LayoutTable& layout) {
  if (layout.block_size < 1)
    throw std::invalid_argument("layout block size must be >= 1");
  const std::uint64_t b = layout.block_size;
  std::vector<Access> accesses;
  accesses.reserve(trace.size());
  std::map<std::uint64_t, bool> blocks;
  for (const Access& a : trace.accesses()) {
    auto base = layout.bases.find(a.object);
    if (base == layout.bases.end())
      throw TraceError("object " + std::to_string(a.object) +
                       " is not covered by the layout");
    if (a.offset >= layout.sizes.at(a.object))
      throw TraceError("offset " + std::to_string(a.offset) +
                       " lies outside the layout range of object " +
                       std::to_string(a.object));
    const std::uint64_t block = (base->second + a.offset) / b;
    if (block >= std::numeric_limits<ObjectId>::max())
      throw TraceError("block id overflow");
    blocks.emplace(block, true);
    accesses.push_back({static_cast<ObjectId>(block), 0});
  }
  std::vector<DataObject> objects;
  objects.reserve(blocks.size());
  for (const auto& [block, unused] : blocks)
    objects.push_back(
        {static_cast<ObjectId>(block), "block" + std::to_string(block), 1});
  return Trace(std::move(objects), std::move(accesses));
}

double cold_cost(double m) {
  if (!(m >= 0.0)) throw std::invalid_argument("footprint must be >= 0");
  return m * std::sqrt(m);
}

DmdReport analyze(const Trace& trace, const AnalysisConfig& config,
                  Engine engine) {
  config.validate();
  auto run = [&](const Trace& t) {
    const DistanceSequence d = engine == Engine::kFast
                                   ? stack_distances_fast(t)
                                   : stack_distances_oracle(t);
    const auto sizes = touched_object_sizes(t);
    return accumulate_dmd(d, config, sizes);
  };
  DmdReport report;
  if (config.block_size > 1 && !trace.objects().empty()) {
    const LayoutTable layout = build_layout(trace.objects(), config.block_size);
    report = run(apply_block_transform(trace, layout));
  } else {
    report = run(trace);
  }
  return scale_granularity(report, config.granularity_bits);
}

}  // namespace dmc
