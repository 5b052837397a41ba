#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dmc/advisor.hpp"
#include "dmc/json.hpp"
#include "dmc/models.hpp"
#include "dmc/reuse.hpp"
#include "dmc/trace_io.hpp"
#include "dmc/tracegen.hpp"
#include "sweep.hpp"

namespace dmc::cli {
namespace {

// Raised for missing or conflicting flags that CLI11 cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using OptInt = std::optional<std::int64_t>;

std::int64_t need(const OptInt& v, const char* flag, std::string_view alg) {
  if (!v)
    throw UsageError(std::string(alg) + " needs --" + flag);
  return *v;
}

struct GenFlags {
  std::string alg;
  OptInt n, m, l, h, w, k, c, x;
  std::string out;
};

GenSpec gen_spec(const GenFlags& f) {
  const std::string_view a = f.alg;
  if (a == "matmul") {
    const std::int64_t n = need(f.n, "n", a);
    return MatmulParams{f.m.value_or(n), n, f.l.value_or(n)};
  }
  if (a == "conv") {
    const std::int64_t k = need(f.k, "k", a);
    if (f.n) return ConvParams{*f.n, *f.n, k};
    return ConvParams{need(f.h, "h", a), need(f.w, "w", a), k};
  }
  if (a == "im2col") return Im2colParams{need(f.n, "n", a), need(f.k, "k", a)};
  if (a == "batchconv")
    return BatchParams{need(f.n, "n", a), need(f.k, "k", a), need(f.c, "c", a),
                       f.x.value_or(1)};
  if (a == "fft") return FftParams{need(f.n, "n", a)};
  if (a == "fftconv2d") return FftConv2dParams{need(f.n, "n", a)};
  throw UsageError("unknown algorithm '" + f.alg + "'");
}

const std::vector<std::string> kAlgorithms = {"matmul",    "conv", "im2col",
                                              "batchconv", "fft",  "fftconv2d"};

int cmd_gen(const GenFlags& f, std::ostream& out, std::ostream& err) {
  const GenSpec spec = gen_spec(f);
  validate(spec);
  const Trace trace = generate(spec);
  if (f.out.empty() || f.out == "-") {
    write_dmt(out, trace);
    err << trace.objects().size() << " objects, " << trace.size()
        << " accesses\n";
  } else {
    save_dmt(f.out, trace);
    out << "wrote " << f.out << ": " << trace.objects().size() << " objects, "
        << trace.size() << " accesses\n";
  }
  return kExitOk;
}

struct AnalyzeFlags {
  std::string trace;
  std::int64_t bits = 1;
  std::int64_t block = 1;
  std::string cold = "exclude";
  bool oracle = false;
  std::string report;
};

int cmd_analyze(const AnalyzeFlags& f, std::ostream& out) {
  AnalysisConfig config;
  config.granularity_bits = f.bits;
  config.block_size = f.block;
  config.cold_policy = parse_cold_policy(f.cold);
  config.validate();
  const Trace trace = load_dmt(f.trace);
  const DmdReport report =
      analyze(trace, config, f.oracle ? Engine::kOracle : Engine::kFast);
  const std::string text = to_json(report).dump(2) + "\n";
  if (f.report.empty() || f.report == "-") {
    out << text;
  } else {
    std::ofstream file(f.report);
    if (!file) throw std::invalid_argument("cannot write " + f.report);
    file << text;
  }
  return kExitOk;
}

void list_models(std::ostream& out) {
  for (const ModelInfo& m : model_registry()) {
    out << m.name << " (";
    for (std::size_t i = 0; i < m.params.size(); ++i)
      out << (i ? ", " : "") << m.params[i];
    out << "): " << m.expression << '\n';
  }
}

struct ModelFlags {
  std::string name;
  bool list = false;
  std::map<std::string, double> values;
};

const std::vector<std::string> kModelParams = {
    "n", "m", "l", "h", "w", "k", "c", "x", "b",
    "d", "q", "f", "layers", "overhead", "index"};

int cmd_model(const ModelFlags& f, std::ostream& out, std::ostream& err) {
  if (f.list) {
    list_models(out);
    return kExitOk;
  }
  if (f.name.empty()) throw UsageError("model needs a name or --list");
  if (!find_model(f.name)) {
    err << "unknown model '" << f.name << "'; available:\n";
    list_models(err);
    return kExitUsage;
  }
  ParamMap params(f.values.begin(), f.values.end());
  out << to_json(evaluate_model(f.name, params)).dump(2) << '\n';
  return kExitOk;
}

struct SweepFlags {
  std::string alg;
  std::map<std::string, std::string> ranges;
  std::string q = "1..h";
  bool model = false, measure = false, both = false;
  std::string csv;
  bool force = false;
  double budget = 1e5;
  double l = 64.0;
};

const std::vector<std::string> kSweepParams = {"n", "m", "l", "h",
                                               "k", "c", "x"};

int cmd_sweep(const SweepFlags& f, std::ostream& out) {
  SweepRequest req;
  req.alg = f.alg;
  if (f.model + f.measure + f.both > 1)
    throw UsageError("--model, --measure and --both are exclusive");
  req.mode = f.both      ? SweepMode::kBoth
             : f.measure ? SweepMode::kMeasure
                         : SweepMode::kModel;
  for (const auto& [name, text] : f.ranges) req.values[name] = parse_range(text);
  req.q_range = f.q;
  req.force = f.force;
  req.budget = f.budget;
  req.l = f.l;
  if (f.csv.empty() || f.csv == "-") {
    run_sweep(req, out);
  } else {
    std::ostringstream buffer;
    run_sweep(req, buffer);
    std::ofstream file(f.csv);
    if (!file) throw std::invalid_argument("cannot write " + f.csv);
    file << buffer.str();
    out << "wrote " << f.csv << '\n';
  }
  return kExitOk;
}

struct AdviseFlags {
  std::string kind;
  OptInt n, k, c, h, q;
  double l = 64.0;
  std::optional<double> budget;
  bool include_matmul = false;
  double m = 2.0;
  double pixels = 1024.0 * 1024.0;
  double kernel = 3.0;
};

int cmd_advise(const AdviseFlags& f, std::ostream& out) {
  const std::string_view kind = f.kind;
  Json j;
  if (kind == "batch") {
    const AdvisorResult r =
        advise_batch(need(f.n, "n", kind), need(f.k, "k", kind),
                     need(f.c, "c", kind));
    j = to_json(r);
  } else if (kind == "channels") {
    const ChannelCrossover r =
        crossover_channels(need(f.n, "n", kind), need(f.k, "k", kind));
    j = Json{{"parameter", "c"}, {"recommended", r.last_saving}};
    j["crossover"] = to_json(r);
    j["notes"] = Json::array(
        {"batching all c channels costs less than no batching up to c = " +
         std::to_string(r.last_saving)});
  } else if (kind == "gqa-dim") {
    if (!f.budget) throw UsageError("gqa-dim needs --budget");
    const GqaDimension r =
        advise_gqa_dim(*f.budget, need(f.h, "h", kind), need(f.q, "q", kind),
                       f.l, f.include_matmul);
    j = Json{{"parameter", "d"}, {"recommended", r.d}};
    j["result"] = to_json(r);
  } else if (kind == "conv-vs-fft") {
    const ConvFftComparison r =
        compare_conv_fft(need(f.n, "n", kind), need(f.k, "k", kind));
    j = Json{{"parameter", "algorithm"},
             {"recommended", r.spatial_cheaper ? "spatial" : "fft"}};
    j["comparison"] = to_json(r);
  } else if (kind == "orientation") {
    const double k = f.k ? static_cast<double>(*f.k) : f.kernel;
    const OrientationRatios r = orientation_ratio(f.m, f.pixels, k);
    j = Json{{"parameter", "orientation"}, {"recommended", "portrait"}};
    j["ratios"] = to_json(r);
  } else {
    throw UsageError("unknown advice kind '" + f.kind + "'");
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Data movement distance lab"};
  app.require_subcommand(1);
  // "--h" is a parameter (head count, image height), so help is long-only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_help_all_flag("--help-all");

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an access trace (.dmt)");
  gen_cmd->add_option("--alg", gen.alg, "Algorithm")
      ->required()
      ->check(CLI::IsMember(kAlgorithms));
  gen_cmd->add_option("--n", gen.n);
  gen_cmd->add_option("--m", gen.m);
  gen_cmd->add_option("--l", gen.l);
  gen_cmd->add_option("--h", gen.h);
  gen_cmd->add_option("--w", gen.w);
  gen_cmd->add_option("--k", gen.k);
  gen_cmd->add_option("--c", gen.c);
  gen_cmd->add_option("--x", gen.x);
  gen_cmd->add_option("--out", gen.out, "Output path; stdout if omitted");

  AnalyzeFlags an;
  auto* an_cmd = app.add_subcommand("analyze", "Measure DMD of a trace");
  an_cmd->add_option("trace", an.trace, "Trace file (.dmt)")->required();
  an_cmd->add_option("--bits", an.bits, "Granularity s: distance scaled by s");
  an_cmd->add_option("--block", an.block, "Cache block size b");
  an_cmd->add_option("--cold", an.cold, "Cold-miss policy")
      ->check(CLI::IsMember({"exclude", "footprint_bound", "per_object"}));
  an_cmd->add_flag("--oracle", an.oracle, "Use the naive stack-scan engine");
  an_cmd->add_option("--report", an.report, "JSON output path; stdout if omitted");

  ModelFlags mo;
  auto* mo_cmd = app.add_subcommand("model", "Evaluate a closed-form model");
  mo_cmd->add_option("name", mo.name, "Model name");
  mo_cmd->add_flag("--list", mo.list, "List every model");
  for (const std::string& p : kModelParams)
    mo_cmd->add_option_function<double>(
        "--" + p, [&mo, p](double v) { mo.values[p] = v; });

  SweepFlags sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Sweep parameters, emit CSV");
  sw_cmd->add_option("--alg", sw.alg)
      ->required()
      ->check(CLI::IsMember({"matmul", "conv", "im2col", "batchconv", "fft",
                             "fftconv2d", "gqa"}));
  for (const std::string& p : kSweepParams)
    if (p != "l")
      sw_cmd->add_option_function<std::string>(
          "--" + p, [&sw, p](const std::string& v) { sw.ranges[p] = v; },
          "Values: a,b | a..b | a..b:step | a..b*factor");
  sw_cmd->add_option_function<std::string>(
      "--l", [&sw](const std::string& v) { sw.ranges["l"] = v; },
      "Values (matmul) or sequence length (gqa)");
  sw_cmd->add_option("--q", sw.q, "gqa group sizes; 'h' is the head count");
  sw_cmd->add_flag("--model", sw.model);
  sw_cmd->add_flag("--measure", sw.measure);
  sw_cmd->add_flag("--both", sw.both);
  sw_cmd->add_option("--csv", sw.csv, "Output path; stdout if omitted");
  sw_cmd->add_flag("--force", sw.force, "Allow points over 1e7 accesses");
  sw_cmd->add_option("--budget", sw.budget, "gqa DMD budget");

  AdviseFlags ad;
  auto* ad_cmd = app.add_subcommand("advise", "Recommend a parameter");
  ad_cmd->add_option("kind", ad.kind)
      ->required()
      ->check(CLI::IsMember(
          {"batch", "channels", "gqa-dim", "conv-vs-fft", "orientation"}));
  ad_cmd->add_option("--n", ad.n);
  ad_cmd->add_option("--k", ad.k);
  ad_cmd->add_option("--c", ad.c);
  ad_cmd->add_option("--h", ad.h);
  ad_cmd->add_option("--q", ad.q);
  ad_cmd->add_option("--l", ad.l);
  ad_cmd->add_option("--budget", ad.budget);
  ad_cmd->add_flag("--include-matmul", ad.include_matmul);
  ad_cmd->add_option("--m", ad.m, "Aspect ratio h/w for orientation");
  ad_cmd->add_option("--pixels", ad.pixels);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (const CLI::App* sub = app.get_subcommands().empty()
                                  ? nullptr
                                  : app.get_subcommands().front())
      err << sub->help();
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out, err);
    if (an_cmd->parsed()) return cmd_analyze(an, out);
    if (mo_cmd->parsed()) return cmd_model(mo, out, err);
    if (sw_cmd->parsed()) {
      if (sw.ranges.contains("l") && sw.alg == "gqa")
        sw.l = std::stod(sw.ranges.extract("l").mapped());
      return cmd_sweep(sw, out);
    }
    return cmd_advise(ad, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MissingParameter& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace dmc::cli
