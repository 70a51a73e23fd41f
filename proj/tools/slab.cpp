#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slab/calibration.hpp"
#include "slab/corpus.hpp"
#include "slab/dichotomy.hpp"
#include "slab/errors.hpp"
#include "slab/manifest.hpp"
#include "slab/maximal.hpp"
#include "slab/multilinear.hpp"
#include "slab/parallel.hpp"
#include "slab/simplex.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInvariant = 4;

struct Option {
  std::string name;
  std::string help;
};

// Effective settings of one run: command-line flags override "[command]"
// sections of the config file, which override bare config keys.
class Settings {
 public:
  Settings(std::string command, slab::Config file, std::map<std::string, std::string> flags)
      : command_(std::move(command)), file_(std::move(file)), flags_(std::move(flags)) {}

  std::string string(const std::string& key, const std::string& fallback) {
    const std::string v = resolved().get_string(key, fallback);
    resolved_json_[key] = v;
    return v;
  }
  // Lookups that do not enter the manifest (output paths, worker count).
  std::string peek_string(const std::string& key, const std::string& fallback) {
    return resolved().get_string(key, fallback);
  }
  long long peek_integer(const std::string& key, long long fallback) { return resolved().get_int(key, fallback); }
  double real(const std::string& key, double fallback) {
    const double v = resolved().get_double(key, fallback);
    resolved_json_[key] = v;
    return v;
  }
  long long integer(const std::string& key, long long fallback) {
    const long long v = resolved().get_int(key, fallback);
    resolved_json_[key] = v;
    return v;
  }
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const std::uint64_t v = resolved().get_uint(key, fallback);
    resolved_json_[key] = v;
    return v;
  }
  bool has(const std::string& key) { return resolved().has(key); }
  const json& used() const { return resolved_json_; }

  // Rejects config keys that no option of this command reads.
  void check_keys(const std::set<std::string>& allowed, const std::set<std::string>& commands) const {
    for (const auto& [key, value] : file_.values()) {
      const auto dot = key.find('.');
      if (dot != std::string::npos) {
        const std::string section = key.substr(0, dot);
        if (section != command_ && commands.count(section)) continue;
        const std::string bare = section == command_ ? key.substr(dot + 1) : key;
        if (!allowed.count(bare)) throw slab::ConfigError("config key '" + key + "': unknown option");
      } else if (!allowed.count(key)) {
        throw slab::ConfigError("config key '" + key + "': unknown option for " + command_);
      }
    }
  }

 private:
  const slab::Config& resolved() {
    if (!merged_) {
      for (const auto& [key, value] : file_.values())
        if (key.find('.') == std::string::npos) merged_cfg_.set(key, value);
      const std::string prefix = command_ + ".";
      for (const auto& [key, value] : file_.values())
        if (key.rfind(prefix, 0) == 0) merged_cfg_.set(key.substr(prefix.size()), value);
      for (const auto& [key, value] : flags_) merged_cfg_.set(key, value);
      merged_ = true;
    }
    return merged_cfg_;
  }
  std::string command_;
  slab::Config file_;
  std::map<std::string, std::string> flags_;
  slab::Config merged_cfg_;
  bool merged_ = false;
  json resolved_json_ = json::object();
};

std::string data_root() {
  const char* env = std::getenv("SLAB_DATA_DIR");
  return env && *env ? std::string(env) : std::string(".");
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw slab::IOError("cannot write " + path);
  out << text;
  if (!out) throw slab::IOError("write failed for " + path);
}

std::string sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

slab::Simplex axis_simplex(int d, int k) {
  std::vector<slab::Vec> raw;
  for (int i = 0; i < k; ++i) {
    slab::Vec v = slab::Vec::Zero(d);
    v[i] = 1.0;
    raw.push_back(v);
  }
  return slab::normalize_simplex(raw, d);
}

slab::Simplex load_simplex(Settings& s, int d, int k) {
  const std::string path = s.string("simplex", "");
  if (path.empty()) return axis_simplex(d, k);
  std::ifstream in(path);
  if (!in) throw slab::IOError("cannot read simplex file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    throw slab::ConfigError("config key 'simplex': " + path + " is not valid JSON");
  }
  return slab::Simplex::from_json(j);
}

slab::GridField load_set(Settings& s) {
  const std::string path = s.string("set", "");
  if (path.empty()) throw slab::ConfigError("config key 'set': a set file is required");
  return slab::read_set(path);
}

struct RunContext {
  std::string command;
  Settings* settings = nullptr;
  std::uint64_t seed = 0;
  int level = 0;
  std::string out;
  slab::CalibratedConstants constants;
  bool have_constants = false;
};

struct RunOutput {
  json result;
  std::string csv;  // plot data, written next to the report when non-empty
  std::vector<std::string> breaches;
};

using Runner = std::function<RunOutput(RunContext&)>;

// ---- experiments ----

RunOutput run_generate(RunContext& ctx) {
  Settings& s = *ctx.settings;
  slab::CorpusSpec spec;
  spec.grid.d = static_cast<int>(s.integer("d", 2));
  spec.grid.n = static_cast<int>(s.integer("n", 256));
  spec.grid.N = s.real("N", static_cast<double>(spec.grid.n));
  const std::string kind = s.string("kind", "random");
  if (kind == "random") {
    spec = slab::CorpusSpec::random_set(spec.grid, s.real("density", 0.5), ctx.seed);
  } else if (kind == "lattice") {
    spec = slab::CorpusSpec::lattice(spec.grid, s.real("spacing", 4.0 * spec.grid.h()));
  } else if (kind == "shells") {
    const double r0 = s.real("radius", 4.0);
    const double rmax = s.real("max-radius", 0.5 * spec.grid.N);
    std::vector<double> radii;
    if (s.has("radius-ratio"))
      radii = slab::geometric_radii(r0, s.real("radius-ratio", 2.0), rmax);
    else
      radii = slab::arithmetic_radii(r0, s.real("period", 16.0), rmax);
    spec = slab::CorpusSpec::shells(spec.grid, radii, s.real("thickness", 4.0));
  } else if (kind == "cantor") {
    spec = slab::CorpusSpec::cantor(spec.grid, s.real("ratio", 1.0 / 3.0), static_cast<int>(s.integer("depth", 2)));
  } else {
    throw slab::ConfigError("config key 'kind': expected random, lattice, shells or cantor");
  }
  const slab::GridField a = slab::generate(spec);
  const std::string format = s.string("format", "binary");
  const std::string set_path = sibling(ctx.out, format == "json" ? ".set.json" : ".slab");
  if (format == "json")
    write_text(set_path, slab::set_to_json(a).dump() + "\n");
  else if (format == "binary")
    slab::write_set_binary(a, set_path);
  else
    throw slab::ConfigError("config key 'format': expected binary or json");
  RunOutput out;
  const double delta = slab::density(a);
  out.result = {{"spec", spec.to_json()}, {"set_file", set_path}, {"density", delta}};
  if (!(delta > 0.0 && delta <= 1.0)) out.breaches.push_back("density outside (0, 1]");
  return out;
}

RunOutput run_calibrate(RunContext& ctx) {
  slab::CalibrationOptions opt;
  opt.seed = ctx.seed;
  opt.pinned_candidates = static_cast<int>(ctx.settings->integer("candidates", opt.pinned_candidates));
  opt.pinned_draws = static_cast<int>(ctx.settings->integer("draws", opt.pinned_draws));
  const slab::CalibrationResult r = slab::calibrate(opt);
  ctx.constants = r.constants;
  ctx.have_constants = true;
  RunOutput out;
  out.result = r.to_json();
  for (const auto& c : r.cases)
    if (c.report.branch == slab::Branch::indeterminate) out.breaches.push_back("calibration case " + c.name + " is indeterminate");
  return out;
}

RunOutput dichotomy_common(RunContext& ctx, bool pinned) {
  Settings& s = *ctx.settings;
  const slab::GridField a = load_set(s);
  const int d = a.spec().d;
  const int k = static_cast<int>(s.integer("k", 1));
  const slab::Simplex simplex = load_simplex(s, d, k);
  slab::DichotomyParams p;
  p.eps = s.real("eps", 0.02);
  p.eta = s.real("eta", 0.75);
  const double lambda = s.real("lambda", pinned ? 4.5 : 10.0);
  p.lambda = lambda;
  p.lambda0 = lambda;
  p.lambda1 = pinned ? s.real("lambda1", lambda) : lambda;
  const slab::DichotomyLimits limits = ctx.have_constants ? slab::limits_from(ctx.constants, pinned) : slab::DichotomyLimits{};
  slab::DichotomyReport r;
  if (pinned) {
    slab::PinnedOptions po;
    po.candidates = static_cast<int>(s.integer("candidates", po.candidates));
    po.draws = static_cast<int>(s.integer("draws", po.draws));
    po.grid_points = static_cast<int>(s.integer("grid-points", po.grid_points));
    r = slab::check_pinned(a, simplex, p, limits, ctx.level, ctx.seed, po);
  } else {
    r = slab::check_unpinned(a, simplex, p, limits, ctx.level, ctx.seed,
                             static_cast<int>(s.integer("samples", 4096)));
  }
  RunOutput out;
  out.result = r.to_json();
  out.result["calibrated"] = ctx.have_constants;
  if (r.branch == slab::Branch::indeterminate)
    out.breaches.push_back("no witness and annulus mass below the calibrated floor");
  return out;
}

RunOutput run_dichotomy(RunContext& ctx) {
  const std::string mode = ctx.settings->string("mode", "unpinned");
  if (mode != "unpinned" && mode != "pinned") throw slab::ConfigError("config key 'mode': expected unpinned or pinned");
  return dichotomy_common(ctx, mode == "pinned");
}

RunOutput run_pinned(RunContext& ctx) { return dichotomy_common(ctx, true); }

RunOutput run_decay(RunContext& ctx) {
  Settings& s = *ctx.settings;
  const int d = static_cast<int>(s.integer("d", 3));
  const int j = static_cast<int>(s.integer("j", 1));
  const double rmax = s.real("max-radius", 1000.0);
  const int bins = static_cast<int>(s.integer("bins", 24));
  const double tolerance = s.real("tolerance", 0.05);
  const slab::Simplex simplex = load_simplex(s, d, j);
  const slab::EnvelopeReport base = slab::square_function_envelope(slab::NestedRule(simplex, j, ctx.level), 1.0, rmax, bins);
  const slab::EnvelopeReport fine = slab::square_function_envelope(slab::NestedRule(simplex, j, ctx.level + 1), 1.0, rmax, bins);
  RunOutput out;
  const double drift = std::abs(fine.envelope_constant - base.envelope_constant) / base.envelope_constant;
  out.result = {{"d", d},
                {"j", j},
                {"envelope_constant", base.envelope_constant},
                {"envelope_constant_refined", fine.envelope_constant},
                {"relative_drift", drift},
                {"derivative_constant", base.tilde_constant},
                {"derivative_grows", base.tilde_grows}};
  out.csv = base.to_csv();
  if (drift > tolerance) out.breaches.push_back("envelope constant drifts under level increase");
  const bool expect_growth = d == j + 1;
  if (d > j && expect_growth != base.tilde_grows)
    out.breaches.push_back(expect_growth ? "derivative square function does not grow" : "derivative square function grows");
  return out;
}

std::vector<slab::GridField> probe_corpus(Settings& s, const slab::GridSpec& grid, double scale, std::uint64_t seed) {
  return slab::probe_fields(grid, scale, static_cast<int>(s.integer("bands", 3)), seed);
}

RunOutput run_maximal(RunContext& ctx) {
  Settings& s = *ctx.settings;
  const int d = static_cast<int>(s.integer("d", 3));
  const int j = static_cast<int>(s.integer("j", 1));
  const int n = static_cast<int>(s.integer("n", 64));
  const double lambda0 = s.real("lambda0", 8.0);
  const double lambda1 = s.real("lambda1", 2.0 * lambda0);
  const double N = s.real("N", 4.0 * lambda1);
  const int q = static_cast<int>(s.integer("q", 8));
  const double tolerance = s.real("tolerance", 0.10);
  const slab::Simplex simplex = load_simplex(s, d, j);
  const slab::NestedRule rule(simplex, j, ctx.level);
  const auto corpus = probe_corpus(s, slab::GridSpec{d, N, n, 2}, lambda0 / 2.0, ctx.seed);
  const slab::LambdaGrid grid(lambda0, lambda1, q);
  const auto base = slab::l2_ratio_maximal(corpus, rule, grid);
  const auto refined = slab::l2_ratio_maximal(corpus, rule, grid.refined());
  RunOutput out;
  const double drift = std::abs(refined.max_ratio - base.max_ratio) / base.max_ratio;
  out.result = {{"d", d},
                {"j", j},
                {"ratios", base.ratios},
                {"max_ratio", base.max_ratio},
                {"max_ratio_refined_scales", refined.max_ratio},
                {"relative_drift", drift},
                {"no_bound_expected", base.dimension_flag}};
  std::ostringstream csv;
  csv.precision(17);
  csv << "member,ratio,ratio_refined_scales\n";
  for (std::size_t i = 0; i < base.ratios.size(); ++i) csv << i << ',' << base.ratios[i] << ',' << refined.ratios[i] << '\n';
  out.csv = csv.str();
  if (ctx.have_constants && !base.dimension_flag && base.max_ratio > ctx.constants.C_max)
    out.result["exceeds_calibrated_constant"] = true;
  if (drift > tolerance) out.breaches.push_back("maximal ratio unstable under scale refinement");
  return out;
}

RunOutput run_thm61(RunContext& ctx) {
  Settings& s = *ctx.settings;
  const int d = static_cast<int>(s.integer("d", 3));
  const int j = static_cast<int>(s.integer("j", 1));
  const int n = static_cast<int>(s.integer("n", 64));
  const double lambda0 = s.real("lambda0", 8.0);
  const double spread = s.real("spread", 16.0);
  const int q = static_cast<int>(s.integer("q", 8));
  const int octaves = static_cast<int>(s.integer("octaves", 6));
  const double slope_floor = s.real("min-slope", 1.0 / 3.0 - 0.1);
  const slab::Simplex simplex = load_simplex(s, d, j);
  const slab::NestedRule rule(simplex, j, ctx.level);
  const double N = s.real("N", 2.0 * spread * lambda0);
  const auto corpus = probe_corpus(s, slab::GridSpec{d, N, n, 2}, 2.0 * lambda0, ctx.seed);
  std::vector<double> Ls;
  for (int e = -octaves; e <= 0; ++e) Ls.push_back(std::ldexp(lambda0, e));
  const auto r = slab::thm61_scaling(corpus, rule, slab::LambdaGrid(lambda0, spread * lambda0, q), Ls);
  RunOutput out;
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"L", row.L}, {"ratio", row.ratio}, {"bound", row.bound}, {"pass", row.pass}, {"octave_ratios", row.octave_ratios}});
  out.result = {{"d", d}, {"j", j}, {"constant", r.constant}, {"slope", r.slope}, {"rows", rows}, {"pass", r.pass}};
  out.csv = r.to_csv();
  if (!r.pass) out.breaches.push_back("a ratio exceeds the calibrated power bound");
  if (r.slope < slope_floor) out.breaches.push_back("log-log slope below the required floor");
  return out;
}

RunOutput run_equivalence(RunContext& ctx) {
  Settings& s = *ctx.settings;
  const int d = static_cast<int>(s.integer("d", 3));
  const int k = static_cast<int>(s.integer("k", 2));
  const int cases = static_cast<int>(s.integer("cases", 50));
  const int draws = static_cast<int>(s.integer("draws", 10000));
  const int n = static_cast<int>(s.integer("n", d >= 4 ? 16 : 32));
  const double sigmas = s.real("sigmas", 3.0);
  const auto r = slab::equivalence_sweep(d, k, cases, draws, ctx.level, n, ctx.seed);
  RunOutput out;
  out.result = r.to_json();
  std::ostringstream csv;
  csv.precision(17);
  csv << "case,lambda,nested,monte_carlo,combined_stderr,z\n";
  for (std::size_t i = 0; i < r.cases.size(); ++i) {
    const auto& c = r.cases[i];
    csv << i << ',' << c.lambda << ',' << c.nested << ',' << c.monte_carlo << ',' << c.combined_stderr << ',' << c.z << '\n';
  }
  out.csv = csv.str();
  if (r.max_z > sigmas) out.breaches.push_back("a discrepancy exceeds the combined standard error bound");
  return out;
}

RunOutput run_lemma41(RunContext& ctx) {
  Settings& s = *ctx.settings;
  const slab::GridField a = load_set(s);
  const double eta = s.real("eta", 0.02);
  const double lambda = s.real("lambda", std::pow(eta, 4) * a.spec().N);
  const int k = static_cast<int>(s.integer("k", 1));
  const auto r = slab::lemma41_check(a, eta, lambda, k);
  RunOutput out;
  out.result = {{"delta", r.delta},           {"eta", r.eta},       {"lambda", r.lambda},
                {"k", r.k},                   {"inner", r.inner},   {"inner_ratio", r.inner_ratio},
                {"cross_term", r.f_f1},       {"smoothed_energy", r.f1_f1},
                {"cross_dominates", r.cross_dominates}, {"bulk_deficit_ratio", r.bulk_deficit_ratio}};
  if (!r.cross_dominates) out.breaches.push_back("cross term below the smoothed energy");
  if (ctx.have_constants && r.inner_ratio > ctx.constants.C_41) out.result["exceeds_calibrated_constant"] = true;
  return out;
}

RunOutput run_lemma42(RunContext& ctx) {
  Settings& s = *ctx.settings;
  const slab::GridField a = load_set(s);
  const int d = a.spec().d;
  const int j = static_cast<int>(s.integer("j", 1));
  const double eta = s.real("eta", 0.05);
  const double lambda = s.real("lambda", 8.0);
  const slab::Simplex simplex = load_simplex(s, d, j);
  const slab::NestedRule rule(simplex, j, ctx.level);
  const auto r = slab::lemma42_check(a, eta, lambda, rule, static_cast<int>(s.integer("samples", 2048)), ctx.seed);
  RunOutput out;
  out.result = {{"eta", r.eta},
                {"lambda", r.lambda},
                {"j", r.j},
                {"inner", r.inner},
                {"inner_stderr", r.inner_stderr},
                {"inner_ratio", r.inner_ratio},
                {"majorant", r.majorant},
                {"multiplier_constant", r.multiplier_constant},
                {"model_peak_ratio", r.model_peak_ratio}};
  if (r.model_peak_ratio > 1.0 + 1e-12) out.breaches.push_back("model multiplier exceeds eta^(4/5)");
  if (ctx.have_constants && r.inner_ratio > ctx.constants.C_42) out.result["exceeds_calibrated_constant"] = true;
  return out;
}

struct Command {
  std::string name;
  std::string help;
  std::vector<Option> options;
  Runner run;
  int default_level;
  std::uint64_t default_seed;
};

std::vector<Command> commands() {
  const std::vector<Option> set_opts{{"set", "indicator set file (binary or JSON)"}, {"simplex", "simplex JSON file"}};
  return {
      {"calibrate", "fix the calibrated constants and write a manifest",
       {{"candidates", "pinned x candidates"}, {"draws", "rotations per pin probability"}}, run_calibrate, 5, 0xCA11B},
      {"generate", "write a corpus set",
       {{"kind", "random|lattice|shells|cantor"}, {"d", "dimension"}, {"n", "cells per axis"}, {"N", "box side"},
        {"density", "random density"}, {"spacing", "lattice spacing"}, {"radius", "first shell radius"},
        {"period", "shell spacing"}, {"radius-ratio", "geometric shell ratio"}, {"max-radius", "largest shell radius"},
        {"thickness", "shell thickness"}, {"ratio", "cantor kept fraction"}, {"depth", "cantor depth"},
        {"format", "binary|json"}},
       run_generate, 5, 1},
      {"dichotomy", "many configurations or concentrated spectral mass",
       [&] {
         auto o = set_opts;
         o.insert(o.end(), {{"mode", "unpinned|pinned"}, {"k", "simplex size"}, {"eps", "epsilon"}, {"eta", "eta"},
                            {"lambda", "scale (lower scale when pinned)"}, {"lambda1", "upper scale when pinned"},
                            {"samples", "count samples in d > 2"}, {"candidates", "pinned x candidates"},
                            {"draws", "rotations per pin probability"}, {"grid-points", "scales in the pinned grid"}});
         return o;
       }(),
       run_dichotomy, 5, 1},
      {"pinned", "pinned dichotomy",
       [&] {
         auto o = set_opts;
         o.insert(o.end(), {{"k", "simplex size"}, {"eps", "epsilon"}, {"eta", "eta"}, {"lambda", "lower scale"},
                            {"lambda1", "upper scale"}, {"candidates", "x candidates"},
                            {"draws", "rotations per pin probability"}, {"grid-points", "scales in the grid"}});
         return o;
       }(),
       run_pinned, 4, 1},
      {"decay", "square function envelopes",
       {{"d", "dimension"}, {"j", "vertex count"}, {"simplex", "simplex JSON file"}, {"max-radius", "largest |xi|"},
        {"bins", "radial bins"}, {"tolerance", "allowed relative drift"}},
       run_decay, 3, 1},
      {"maximal", "L2 ratios of the maximal average",
       {{"d", "dimension"}, {"j", "vertex count"}, {"simplex", "simplex JSON file"}, {"n", "cells per axis"}, {"N", "box side"},
        {"lambda0", "lower scale"}, {"lambda1", "upper scale"}, {"q", "scale grid density"}, {"bands", "wave packet bands"},
        {"tolerance", "allowed relative drift"}},
       run_maximal, 3, 1},
      {"thm61", "decay of the mollified maximal operator in L",
       {{"d", "dimension"}, {"j", "vertex count"}, {"simplex", "simplex JSON file"}, {"n", "cells per axis"}, {"N", "box side"},
        {"lambda0", "lower scale"}, {"spread", "lambda1 / lambda0"}, {"q", "scale grid density"}, {"octaves", "L octaves below lambda0"},
        {"bands", "wave packet bands"}, {"min-slope", "required log-log slope"}},
       run_thm61, 3, 1},
      {"equivalence", "nested quadrature against rotation Monte Carlo",
       {{"d", "dimension"}, {"k", "vertex count"}, {"cases", "random cases"}, {"draws", "rotations per case"},
        {"n", "cells per axis"}, {"sigmas", "allowed combined standard errors"}},
       run_equivalence, 3, 7},
      {"lemma41", "smoothing at scale lambda / eta",
       [&] {
         auto o = set_opts;
         o.insert(o.end(), {{"eta", "eta"}, {"lambda", "scale"}, {"k", "power"}});
         return o;
       }(),
       run_lemma41, 5, 1},
      {"lemma42", "high-frequency part of the sphere average",
       [&] {
         auto o = set_opts;
         o.insert(o.end(), {{"j", "vertex count"}, {"eta", "eta"}, {"lambda", "scale"}, {"samples", "x samples"}});
         return o;
       }(),
       run_lemma42, 5, 1},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on simplex configurations in dense sets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", slab::version());

  const auto cmds = commands();
  std::set<std::string> command_names;
  for (const auto& c : cmds) command_names.insert(c.name);

  struct Parsed {
    std::string config, out, manifest;
    std::uint64_t seed = 0;
    int threads = 0;
    int level = 0;
    std::map<std::string, std::string> raw;
  };
  std::map<std::string, Parsed> parsed;
  std::map<std::string, CLI::App*> subs;
  for (const auto& c : cmds) {
    Parsed& p = parsed[c.name];
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", p.config, "INI config file");
    sub->add_option("--seed", p.seed, "random seed");
    sub->add_option("--threads", p.threads, "worker threads (default: all cores)");
    sub->add_option("--level", p.level, "quadrature level");
    sub->add_option("--out", p.out, "report path");
    sub->add_option("--manifest", p.manifest, "manifest with calibrated constants");
    for (const auto& o : c.options) sub->add_option("--" + o.name, p.raw[o.name], o.help);
    subs[c.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const Command* cmd = nullptr;
  for (const auto& c : cmds)
    if (subs[c.name]->parsed()) cmd = &c;
  CLI::App* sub = subs[cmd->name];
  Parsed& p = parsed[cmd->name];

  try {
    slab::Config file;
    if (!p.config.empty()) file = slab::Config::parse_file(p.config);
    std::map<std::string, std::string> flags;
    for (const auto& o : cmd->options)
      if (sub->count("--" + o.name)) flags[o.name] = p.raw[o.name];
    for (const char* common : {"seed", "threads", "level", "out", "manifest"})
      if (sub->count(std::string("--") + common)) flags.erase(common);
    std::set<std::string> allowed{"seed", "threads", "level", "out", "manifest", "include"};
    for (const auto& o : cmd->options) allowed.insert(o.name);
    Settings settings(cmd->name, file, flags);
    settings.check_keys(allowed, command_names);

    RunContext ctx;
    ctx.command = cmd->name;
    ctx.settings = &settings;
    ctx.seed = sub->count("--seed") ? p.seed : settings.unsigned_integer("seed", cmd->default_seed);
    ctx.level = sub->count("--level") ? p.level : static_cast<int>(settings.integer("level", cmd->default_level));
    const int threads = sub->count("--threads") ? p.threads
                                                : static_cast<int>(settings.peek_integer("threads", static_cast<long long>(std::thread::hardware_concurrency())));
    if (threads < 1) throw slab::ConfigError("config key 'threads': expected a positive integer");
    slab::set_thread_count(threads);
    ctx.out = sub->count("--out") ? p.out : settings.peek_string("out", (fs::path(data_root()) / (cmd->name + ".json")).string());
    const std::string manifest_path = sub->count("--manifest") ? p.manifest : settings.peek_string("manifest", "");
    if (!manifest_path.empty()) {
      ctx.constants = slab::RunManifest::load(manifest_path).constants;
      ctx.have_constants = true;
    }

    const auto start = std::chrono::steady_clock::now();
    RunOutput result = cmd->run(ctx);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    slab::RunManifest manifest;
    manifest.version = slab::version();
    json config = settings.used();
    config["command"] = cmd->name;
    config["level"] = ctx.level;
    manifest.config = config;
    manifest.seed = ctx.seed;
    manifest.constants = ctx.constants;

    json report{{"command", cmd->name},
                {"manifest_hash", manifest.hash()},
                {"version", slab::version()},
                {"result", result.result},
                {"invariants_passed", result.breaches.empty()},
                {"breaches", result.breaches}};
    manifest.seconds = seconds;
    if (cmd->name == "calibrate") {
      manifest.save(ctx.out);
      write_text(sibling(ctx.out, ".report.json"), report.dump(2) + "\n");
    } else {
      write_text(ctx.out, report.dump(2) + "\n");
      manifest.save(sibling(ctx.out, ".manifest.json"));
    }
    if (!result.csv.empty()) write_text(sibling(ctx.out, ".csv"), result.csv);
    std::cout << cmd->name << ": wrote " << ctx.out << " (manifest " << manifest.hash() << ")\n";
    for (const auto& b : result.breaches) std::cerr << "invariant breached: " << b << '\n';
    return result.breaches.empty() ? 0 : kExitInvariant;
  } catch (const slab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const slab::IOError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const slab::Error& e) {
    std::cerr << "numerical precondition failed: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}
