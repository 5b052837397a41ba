#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "dmc/advisor.hpp"
#include "dmc/models.hpp"
#include "dmc/reuse.hpp"
#include "dmc/tracegen.hpp"

namespace dmc::cli {
namespace {

std::int64_t to_int(std::string_view s, std::optional<std::int64_t> h_bound) {
  if (s == "h") {
    if (!h_bound) throw std::invalid_argument("'h' bound only valid for --q");
    return *h_bound;
  }
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  return v;
}

double to_double(std::string_view s) {
  std::istringstream in{std::string(s)};
  double v = 0;
  in >> v;
  if (in.fail() || !in.eof())
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  return v;
}

struct AlgInfo {
  std::string_view name;
  std::vector<std::string_view> params;
  std::string_view model;
};

const std::vector<AlgInfo>& algorithms() {
  static const std::vector<AlgInfo> algs = {
      {"matmul", {"m", "n", "l"}, "matmul"},
      {"conv", {"n", "k"}, "conv"},
      {"im2col", {"n", "k"}, "im2col"},
      {"batchconv", {"n", "k", "c", "x"}, "batched"},
      {"fft", {"n"}, "fftbounds"},
      {"fftconv2d", {"n"}, "fftconv"},
  };
  return algs;
}

using Point = std::vector<std::int64_t>;

GenSpec spec_for(std::string_view alg, const Point& p) {
  if (alg == "matmul") return MatmulParams{p[0], p[1], p[2]};
  if (alg == "conv") return ConvParams{p[0], p[0], p[1]};
  if (alg == "im2col") return Im2colParams{p[0], p[1]};
  if (alg == "batchconv") return BatchParams{p[0], p[1], p[2], p[3]};
  if (alg == "fft") return FftParams{p[0]};
  return FftConv2dParams{p[0]};
}

ParamMap model_params(const AlgInfo& alg, const Point& p) {
  ParamMap m;
  for (std::size_t i = 0; i < alg.params.size(); ++i)
    m.emplace(std::string(alg.params[i]), static_cast<double>(p[i]));
  return m;
}

std::string describe(const AlgInfo& alg, const Point& p) {
  std::string s;
  for (std::size_t i = 0; i < alg.params.size(); ++i) {
    if (i) s += ' ';
    s += std::string(alg.params[i]) + "=" + std::to_string(p[i]);
  }
  return s;
}

struct PointResult {
  Evaluation model;
  DmdReport measured;
  std::exception_ptr error;
};

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

void gqa_sweep(const SweepRequest& req, std::ostream& csv) {
  auto heads = req.values.find("h");
  if (heads == req.values.end() || heads->second.empty())
    throw MissingParameter("sweep --alg gqa needs --h");
  csv.precision(12);
  csv << "h,q,l,budget,d,d_asymptotic,cost_at_d\n";
  for (std::int64_t h : heads->second) {
    for (std::int64_t q : parse_range(req.q_range, h)) {
      if (q < 1 || q > h || h % q != 0) continue;
      const GqaDimension r = advise_gqa_dim(req.budget, h, q, req.l);
      csv << h << ',' << q << ',' << req.l << ',' << req.budget << ',' << r.d
          << ',' << r.d_asymptotic << ',' << r.cost_at_d << '\n';
    }
  }
}

}  // namespace

std::vector<std::int64_t> parse_range(std::string_view text,
                                      std::optional<std::int64_t> h_bound) {
  std::vector<std::int64_t> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{}
                                           : text.substr(comma + 1);
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(to_int(item, h_bound));
      continue;
    }
    const std::int64_t lo = to_int(item.substr(0, dots), h_bound);
    std::string_view rest = item.substr(dots + 2);
    const auto colon = rest.find(':');
    const auto star = rest.find('*');
    if (star != std::string_view::npos) {
      const std::int64_t hi = to_int(rest.substr(0, star), h_bound);
      const double factor = to_double(rest.substr(star + 1));
      if (!(factor > 1.0) || lo < 1)
        throw std::invalid_argument("geometric range needs lo >= 1, factor > 1");
      std::int64_t last = 0;
      for (double v = static_cast<double>(lo); v <= static_cast<double>(hi) + 1e-9;
           v *= factor) {
        const auto iv = static_cast<std::int64_t>(std::llround(v));
        if (iv != last) out.push_back(iv);
        last = iv;
      }
      continue;
    }
    const std::int64_t hi = to_int(rest.substr(0, colon), h_bound);
    const std::int64_t step =
        colon == std::string_view::npos ? 1 : to_int(rest.substr(colon + 1), {});
    if (step < 1) throw std::invalid_argument("range step must be >= 1");
    if (hi < lo) throw std::invalid_argument("empty range '" + std::string(item) + "'");
    for (std::int64_t v = lo; v <= hi; v += step) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

std::size_t sweep_threads() {
  if (const char* env = std::getenv("DMC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void run_sweep(const SweepRequest& req, std::ostream& csv) {
  if (req.alg == "gqa") {
    if (req.mode != SweepMode::kModel)
      throw std::invalid_argument("gqa sweeps are model-only");
    gqa_sweep(req, csv);
    return;
  }
  const auto& algs = algorithms();
  auto it = std::find_if(algs.begin(), algs.end(),
                         [&](const AlgInfo& a) { return a.name == req.alg; });
  if (it == algs.end())
    throw std::invalid_argument("unknown sweep algorithm '" + req.alg + "'");
  const AlgInfo& alg = *it;

  // Matmul sweeps default to square shapes when only n is given.
  auto values = req.values;
  if (alg.name == "matmul") {
    if (!values.contains("m") && values.contains("n")) values["m"] = values["n"];
    if (!values.contains("l") && values.contains("n")) values["l"] = values["n"];
  }

  std::vector<Point> points{{}};
  for (std::string_view name : alg.params) {
    auto v = values.find(name);
    if (v == values.end() || v->second.empty())
      throw MissingParameter("sweep --alg " + req.alg + " needs --" +
                                  std::string(name));
    std::vector<Point> next;
    for (const Point& p : points)
      for (std::int64_t value : v->second) {
        Point q = p;
        q.push_back(value);
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }

  const bool measure = req.mode != SweepMode::kModel;
  const bool model = req.mode != SweepMode::kMeasure;
  for (const Point& p : points) {
    const GenSpec spec = spec_for(alg.name, p);
    validate(spec);
    if (measure && !req.force) {
      const std::uint64_t count = expected_accesses(spec);
      if (count > kMeasureBudget)
        throw BudgetExceeded("point " + describe(alg, p) + " needs " +
                             std::to_string(count) + " accesses (limit " +
                             std::to_string(kMeasureBudget) +
                             "); pass --force to run it");
    }
  }

  std::vector<PointResult> results(points.size());
  const std::size_t threads = req.threads ? req.threads : sweep_threads();
  parallel_for(points.size(), threads, [&](std::size_t i) {
    try {
      if (model)
        results[i].model = evaluate_model(alg.model, model_params(alg, points[i]));
      if (measure)
        results[i].measured = analyze(generate(spec_for(alg.name, points[i])),
                                      req.config);
    } catch (...) {
      results[i].error = std::current_exception();
    }
  });
  for (const PointResult& r : results)
    if (r.error) std::rethrow_exception(r.error);

  csv.precision(12);
  bool first = true;
  for (std::string_view name : alg.params) {
    csv << (first ? "" : ",") << name;
    first = false;
  }
  if (model) {
    for (const Term& t : results.front().model.terms) csv << ',' << t.name;
    csv << ",model_total";
  }
  if (measure) {
    csv << ",n_accesses,measured_dmd";
    if (alg.name == "fft") csv << ",coefficient";
  }
  if (model && measure) csv << ",ratio";
  csv << '\n';

  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    const PointResult& r = results[i];
    for (std::size_t j = 0; j < p.size(); ++j) csv << (j ? "," : "") << p[j];
    if (model) {
      for (const Term& t : r.model.terms) csv << ',' << t.value;
      csv << ',' << r.model.total;
    }
    if (measure) {
      csv << ',' << r.measured.n_accesses << ',' << r.measured.total();
      if (alg.name == "fft") {
        const double n = static_cast<double>(p[0]);
        const double scale = std::pow(n, 1.5) * std::sqrt(std::log2(n));
        csv << ',' << (scale > 0 ? r.measured.total() / scale : 0.0);
      }
    }
    if (model && measure) csv << ',' << r.measured.total() / r.model.total;
    csv << '\n';
  }
}

}  // namespace dmc::cli
