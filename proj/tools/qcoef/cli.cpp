#include "qcoef/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "qcoef/analysis.hpp"
#include "qcoef/errors.hpp"
#include "qcoef/parallel.hpp"
#include "qcoef/sampler.hpp"
#include "qcoef/system_io.hpp"
#include "qcoef/thermodynamics.hpp"
#include "qcoef/transport.hpp"
#include "qcoef/word_set.hpp"

#ifndef QCOEF_VERSION
#define QCOEF_VERSION "0.0.0"
#endif
#ifndef QCOEF_DEFAULT_SYSTEMS_DIR
#define QCOEF_DEFAULT_SYSTEMS_DIR ""
#endif

namespace qcoef::cli {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(std::size_t v) { return std::to_string(v); }

struct Common {
  std::string system = "gamma3";
  std::string r = "2";
  std::string n = "8";
  std::size_t samples = 100000;
  double eps = 1e-6;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::string out_dir;
  unsigned threads = 0;
  int restarts = 5;
  int max_iters = 300;
};

std::vector<double> parse_reals(const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw PreconditionError("not a number: '" + tok + "'");
    v.push_back(x);
  }
  if (v.empty()) throw PreconditionError("empty number list");
  return v;
}

std::size_t parse_count(const std::string& tok) {
  std::size_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw PreconditionError("not a positive integer: '" + tok + "'");
  return v;
}

std::filesystem::path systems_dir() {
  if (const char* env = std::getenv("QCOEF_SYSTEMS_DIR")) return env;
  return QCOEF_DEFAULT_SYSTEMS_DIR;
}

/// CSV body plus the run manifest that goes in front of it.
class Report {
 public:
  Report(std::string subcommand, const Common& c) : subcommand_(std::move(subcommand)), common_(c) {}

  void param(const std::string& key, const std::string& value) { params_.emplace_back(key, value); }
  void param(const std::string& key, double value) { param(key, num(value)); }
  void system_id(std::string id) { system_id_ = std::move(id); }
  void note(const std::string& line) { notes_.push_back(line); }
  std::ostringstream& body() { return body_; }

  void emit(std::ostream& out) const {
    const std::string text = render();
    out << text;
    if (!common_.out_dir.empty()) {
      std::filesystem::create_directories(common_.out_dir);
      const auto path = std::filesystem::path(common_.out_dir) / (subcommand_ + ".csv");
      std::ofstream f(path);
      if (!f) throw PreconditionError("cannot write " + path.string());
      f << text;
    }
  }

 private:
  std::string render() const {
    std::ostringstream os;
    os << "# subcommand: " << subcommand_ << "\n";
    os << "# system_id: " << system_id_ << "\n";
    os << "# parameters:";
    for (const auto& [k, v] : params_) os << " " << k << "=" << v;
    os << "\n";
    os << "# seed: " << common_.seed << "\n";
    os << "# version: qcoef " << QCOEF_VERSION << "\n";
    os << "# timestamp: " << timestamp() << "\n";
    for (const auto& n : notes_) os << "# " << n << "\n";
    os << body_.str();
    return os.str();
  }

  static std::string timestamp() {
    if (const char* fixed = std::getenv("QCOEF_TIMESTAMP")) return fixed;
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  std::string subcommand_;
  const Common& common_;
  std::string system_id_;
  std::vector<std::pair<std::string, std::string>> params_;
  std::vector<std::string> notes_;
  std::ostringstream body_;
};

InfiniteIFS load(const Common& c) { return load_system(c.system, systems_dir()); }

double single_r(const Common& c) {
  const auto rs = parse_reals(c.r);
  if (rs.size() != 1) throw PreconditionError("this subcommand takes a single --r");
  return rs[0];
}

std::size_t single_n(const Common& c) {
  const auto ns = parse_n_spec(c.n);
  if (ns.size() != 1) throw PreconditionError("this subcommand takes a single --n");
  return ns[0];
}

void write_points(std::ostream& os, const std::vector<Point>& pts, int dim, const char* x,
                  const char* y) {
  os << x;
  if (dim == 2) os << "," << y;
  os << "\n";
  for (const Point& p : pts) {
    os << num(p.x);
    if (dim == 2) os << "," << num(p.y);
    os << "\n";
  }
}

DiscreteMeasure read_atoms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open atom list " + path);
  DiscreteMeasure m;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.find_first_not_of("0123456789.-+eE, \t") != std::string::npos) continue;
    }
    const auto v = parse_reals(line);
    if (v.size() == 2) m.atoms.push_back({v[0], 0.0});
    else if (v.size() == 3) m.atoms.push_back({v[0], v[1]});
    else throw PreconditionError("atom rows are x,mass or x,y,mass");
    m.masses.push_back(v.back());
  }
  return m;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  std::string status;
  std::string detail;
};

bool in_cylinder(const InfiniteIFS& s, const Word& w, Point x) {
  for (Symbol j : w.symbols) x = s.map(j).inverse()(x);
  return s.domain().contains(x, 1e-9);
}

std::vector<Check> verify_system(const InfiniteIFS& s, const Common& c) {
  std::vector<Check> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok ? "PASS" : "FAIL", std::move(detail)});
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      add(name, false, e.what());
    }
  };

  guarded("ratio_formula", [&] {
    double worst = 0.0;
    const std::size_t upto = s.finite() ? s.maps().size() : 1000;
    for (Symbol j = 1; j <= upto; ++j) {
      const Similarity m = s.map(j);
      const Point a = s.domain().center(), b = a + Point{0.37 * s.domain().diameter() / 2, 0.0};
      worst = std::max(worst, std::abs(distance(m(a), m(b)) - s.ratio(j) * distance(a, b)) /
                                  distance(a, b));
    }
    add("ratio_formula", worst <= 1e-10, "max relative error " + num(worst));
  });
  guarded("probability_sum", [&] {
    CompensatedSum sum;
    const std::size_t m = s.explicit_count();
    for (Symbol j = 1; j <= m; ++j) sum.add(s.probability(j));
    if (!s.finite()) sum.add(s.probs().tail_sum(m));
    add("probability_sum", std::abs(sum.total() - 1.0) <= 1e-12,
        "|sum - 1| = " + num(std::abs(sum.total() - 1.0)));
  });
  guarded("pressure_at_1_0", [&] {
    const PressureValue p = pressure(s, 1.0, 0.0, 1e-12);
    add("pressure_at_1_0", std::abs(p.value) <= 1e-10, "P(1,0) = " + num(p.value));
  });
  guarded("beta_at_1", [&] {
    const double b = beta(s, 1.0, c.tol);
    add("beta_at_1", std::abs(b) <= 1e-9, "beta(1) = " + num(b));
  });
  guarded("temperature_curve", [&] {
    const auto grid = unit_grid(21);
    const TemperatureCurve t = temperature_curve(s, grid, 1e-8);
    add("temperature_curve", t.strictly_decreasing && t.midpoint_convex,
        "min decrease " + num(t.min_decrease) + ", min convexity residual " +
            num(t.min_convexity_residual));
  });
  for (double r : {1.0, 2.0}) {
    const std::string name = "kappa_routes_r" + num(r);
    guarded(name, [&] {
      const DimensionResult d = quantization_dimension(s, r, c.tol);
      add(name, std::abs(d.kappa - d.kappa_via_beta) <= 10.0 * c.tol,
          "kappa_r = " + num(d.kappa) + ", via beta " + num(d.kappa_via_beta));
    });
  }
  if (s.thermodynamics_only()) {
    out.push_back({"separation", "SKIP", "thermodynamics-only system"});
    out.push_back({"sampler_frequencies", "SKIP", "thermodynamics-only system"});
  } else {
    guarded("separation", [&] {
      const std::size_t prefix = std::max<std::size_t>(2, std::min<std::size_t>(s.explicit_count() + 8, 32));
      const SeparationReport rep =
          validate_separation(s, s.finite() ? s.maps().size() : prefix, 2);
      add("separation", rep.passed, "min gap " + num(rep.min_gap));
    });
    guarded("sampler_frequencies", [&] {
      const std::size_t count = 20000;
      const EmpiricalMeasure em = sample(s, count, 1e-6, c.seed);
      double worst = 0.0;
      const Symbol top = s.finite() ? std::min<Symbol>(3, s.maps().size()) : 3;
      std::vector<Word> words;
      for (Symbol a = 1; a <= top; ++a) {
        words.push_back(Word{a});
        for (Symbol b = 1; b <= top; ++b) words.push_back(Word{a, b});
      }
      for (const Word& w : words) {
        const double p = cylinder_mass(s, w);
        std::size_t hits = 0;
        for (const Point& x : em.points) hits += in_cylinder(s, w, x) ? 1 : 0;
        const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(count));
        worst = std::max(worst, std::abs(static_cast<double>(hits) / count - p) / sigma);
      }
      add("sampler_frequencies", worst <= 4.0, "max deviation " + num(worst) + " sigma");
    });
  }
  if (!s.finite() && s.hull(std::max<std::uint64_t>(s.j0(), s.explicit_count()))) {
    guarded("truncation_mass", [&] {
      double worst = 0.0;
      const std::uint64_t from = std::max<std::uint64_t>(s.j0(), s.explicit_count());
      for (std::uint64_t N = from; N < from + 10; ++N) {
        const FiniteTruncation t = truncate(s, N);
        CompensatedSum sum;
        for (double p : t.probs) sum.add(p);
        worst = std::max(worst, std::abs(sum.total() - 1.0));
      }
      add("truncation_mass", worst <= 1e-12, "max |sum - 1| = " + num(worst));
    });
  }
  return out;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, Common& c, const std::vector<std::string>& which) {
  auto has = [&](const char* k) { return std::find(which.begin(), which.end(), k) != which.end(); };
  sub->add_option("--system", c.system, "System spec path or builtin name")->capture_default_str();
  if (has("r")) sub->add_option("--r", c.r, "Quantization order(s), comma separated")->capture_default_str();
  if (has("n")) sub->add_option("--n", c.n, "n, list a,b,c, doubling range a:b, or a:b:step")->capture_default_str();
  if (has("samples")) sub->add_option("--samples", c.samples, "Monte-Carlo sample size")->capture_default_str();
  if (has("eps")) sub->add_option("--eps", c.eps, "Sampling accuracy")->capture_default_str();
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--tol", c.tol, "Solver tolerance")->capture_default_str();
  sub->add_option("--out", c.out_dir, "Also write <out>/<subcommand>.csv");
  sub->add_option("--threads", c.threads, "Worker thread cap (0 = all cores)");
  if (has("lloyd")) {
    sub->add_option("--restarts", c.restarts, "Lloyd restarts")->capture_default_str();
    sub->add_option("--max-iters", c.max_iters, "Lloyd iteration cap")->capture_default_str();
  }
}

LloydOptions lloyd_options(const Common& c) {
  LloydOptions lo;
  lo.seed = c.seed;
  lo.restarts = c.restarts;
  lo.max_iters = c.max_iters;
  lo.tol = c.tol;
  return lo;
}

void sampling_params(Report& rep, const Common& c, const EmpiricalMeasure& em) {
  rep.param("samples", num(c.samples));
  rep.param("eps", c.eps);
  rep.note("sampler: " + em.generator + " depth=" + num(em.coding_depth) +
           " spatial_error=" + num(em.spatial_error));
}

}  // namespace

std::vector<std::size_t> parse_n_spec(const std::string& spec) {
  std::vector<std::size_t> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::size_t> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(parse_count(tok));
    if (parts.size() < 2 || parts.size() > 3 || parts[0] == 0 || parts[1] < parts[0])
      throw PreconditionError("bad n range '" + spec + "'");
    if (parts.size() == 2) {
      for (std::size_t n = parts[0]; n <= parts[1]; n *= 2) out.push_back(n);
    } else {
      if (parts[2] == 0) throw PreconditionError("n range step must be positive");
      for (std::size_t n = parts[0]; n <= parts[1]; n += parts[2]) out.push_back(n);
    }
    return out;
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const std::size_t n = parse_count(tok);
    if (n == 0) throw PreconditionError("n must be at least 1");
    if (!out.empty() && n <= out.back()) throw PreconditionError("n values must increase");
    out.push_back(n);
  }
  if (out.empty()) throw PreconditionError("empty n specification");
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantization dimensions and coefficients of infinite self-similar measures", "qcoef"};
  app.set_version_flag("--version", std::string("qcoef ") + QCOEF_VERSION);
  app.require_subcommand(1);
  Common c;

  double q = 0.0, t = 0.0;
  std::string q_list;
  auto* pressure_cmd = app.add_subcommand("pressure", "Evaluate P(q,t) with a certified tail bound");
  add_common(pressure_cmd, c, {});
  pressure_cmd->add_option("--q", q, "q")->required();
  pressure_cmd->add_option("--t", t, "t")->required();

  auto* beta_cmd = app.add_subcommand("beta", "Temperature function beta(q) on a grid");
  add_common(beta_cmd, c, {});
  beta_cmd->add_option("--q", q_list, "Comma separated q values (default: 21-point grid)");

  auto* dim_cmd = app.add_subcommand("dim", "Quantization dimension kappa_r");
  add_common(dim_cmd, c, {"r"});

  auto* sample_cmd = app.add_subcommand("sample", "Sample the self-similar measure");
  add_common(sample_cmd, c, {"samples", "eps"});

  auto* lloyd_cmd = app.add_subcommand("lloyd", "Lloyd quantizer on a Monte-Carlo sample");
  add_common(lloyd_cmd, c, {"r", "n", "samples", "eps", "lloyd"});

  std::optional<double> kappa;
  auto* cons_cmd = app.add_subcommand("constructive", "Word-set quantizer from the F_n construction");
  add_common(cons_cmd, c, {"r", "n", "samples", "eps"});
  cons_cmd->add_option("--kappa", kappa, "kappa > kappa_r (default 1.05 kappa_r)");

  std::string mu_path, nu_path, method = "auto";
  auto* w_cmd = app.add_subcommand("wasserstein", "Exact rho_r between two discrete measures");
  w_cmd->add_option("--mu", mu_path, "CSV of x[,y],mass rows")->required();
  w_cmd->add_option("--nu", nu_path, "CSV of x[,y],mass rows")->required();
  w_cmd->add_option("--r", c.r, "Order")->capture_default_str();
  w_cmd->add_option("--method", method, "auto, 1d or assignment")
      ->check(CLI::IsMember({"auto", "1d", "assignment"}));
  w_cmd->add_option("--out", c.out_dir, "Also write <out>/wasserstein.csv");

  std::string curve_method = "lloyd";
  auto* curve_cmd = app.add_subcommand("curve", "Distortion and coefficient curve over n");
  add_common(curve_cmd, c, {"r", "n", "samples", "eps", "lloyd"});
  curve_cmd->add_option("--kappa", kappa, "Coefficient exponent (default kappa_r)");
  curve_cmd->add_option("--method", curve_method, "lloyd or constructive")
      ->check(CLI::IsMember({"lloyd", "constructive"}));

  double kappa_minus = 0.55, kappa_plus = 0.75;
  auto* witness_cmd = app.add_subcommand("witness", "Finite-grid witnesses for the coefficient bounds");
  add_common(witness_cmd, c, {"r", "n", "samples", "eps", "lloyd"});
  witness_cmd->add_option("--kappa-minus", kappa_minus, "Exponent below kappa_r")->capture_default_str();
  witness_cmd->add_option("--kappa-plus", kappa_plus, "Exponent above kappa_r")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "Run the property checks on a system");
  add_common(verify_cmd, c, {});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_thread_count(c.threads);
    if (*pressure_cmd) {
      const InfiniteIFS s = load(c);
      Report rep("pressure", c);
      rep.system_id(s.id());
      rep.param("tol", c.tol);
      const PressureValue p = pressure(s, q, t, c.tol);
      rep.body() << "q,t,value,tail_bound,terms\n"
                 << num(q) << "," << num(t) << "," << num(p.value) << "," << num(p.tail_bound)
                 << "," << p.terms_used << "\n";
      rep.emit(out);
    } else if (*beta_cmd) {
      const InfiniteIFS s = load(c);
      Report rep("beta", c);
      rep.system_id(s.id());
      rep.param("tol", c.tol);
      const std::vector<double> grid = q_list.empty() ? unit_grid(21) : parse_reals(q_list);
      rep.body() << "q,beta,residual\n";
      for (double qq : grid) {
        const double b = beta(s, qq, c.tol);
        const double res = std::abs(pressure(s, qq, b, 1e-14).value);
        rep.body() << num(qq) << "," << num(b) << "," << num(res) << "\n";
      }
      rep.emit(out);
    } else if (*dim_cmd) {
      const InfiniteIFS s = load(c);
      Report rep("dim", c);
      rep.system_id(s.id());
      rep.param("r", c.r);
      rep.param("tol", c.tol);
      rep.body() << "r,kappa_r,residual,eta,q_r,kappa_via_beta\n";
      for (double r : parse_reals(c.r)) {
        const DimensionResult d = quantization_dimension(s, r, c.tol);
        rep.body() << num(r) << "," << num(d.kappa) << "," << num(d.residual) << "," << num(d.eta)
                   << "," << num(d.q_r) << "," << num(d.kappa_via_beta) << "\n";
      }
      rep.emit(out);
    } else if (*sample_cmd) {
      const InfiniteIFS s = load(c);
      const EmpiricalMeasure em = sample(s, c.samples, c.eps, c.seed);
      Report rep("sample", c);
      rep.system_id(s.id());
      sampling_params(rep, c, em);
      write_points(rep.body(), em.points, em.dimension, "x", "y");
      rep.emit(out);
    } else if (*lloyd_cmd) {
      const InfiniteIFS s = load(c);
      const double r = single_r(c);
      const std::size_t n = single_n(c);
      const EmpiricalMeasure em = sample(s, c.samples, c.eps, c.seed);
      const Quantizer qz = lloyd(em, n, r, lloyd_options(c));
      Report rep("lloyd", c);
      rep.system_id(s.id());
      rep.param("r", r);
      rep.param("n", num(n));
      rep.param("restarts", std::to_string(c.restarts));
      rep.param("max_iters", std::to_string(c.max_iters));
      rep.param("tol", c.tol);
      sampling_params(rep, c, em);
      rep.note("distortion: " + num(qz.distortion_estimate) + " stderr: " + num(qz.distortion_stderr) +
               " iterations: " + num(qz.iterations));
      for (const auto& w : qz.warnings) rep.note("warning: " + w);
      write_points(rep.body(), qz.centers, em.dimension, "cx", "cy");
      rep.emit(out);
    } else if (*cons_cmd) {
      const InfiniteIFS s = load(c);
      const double r = single_r(c);
      const std::size_t n = single_n(c);
      const EmpiricalMeasure em = sample(s, c.samples, c.eps, c.seed);
      const ConstructiveResult res = constructive_quantizer(s, em, n, r, kappa, c.tol);
      Report rep("constructive", c);
      rep.system_id(s.id());
      rep.param("r", r);
      rep.param("n", num(n));
      rep.param("kappa", res.kappa);
      rep.param("tol", c.tol);
      sampling_params(rep, c, em);
      rep.note("kappa_r: " + num(res.kappa_r) + " eta: " + num(res.eta) + " alpha: " + num(res.alpha) +
               " N: " + std::to_string(res.N) + " card_F_n: " + num(res.words.words.size()) +
               " rho_N: " + num(res.words.rho));
      rep.note("distortion: " + num(res.quantizer.distortion_estimate) +
               " stderr: " + num(res.quantizer.distortion_stderr) + " bound_sum: " +
               num(res.bound_sum) + " C: " + num(res.ratio));
      write_points(rep.body(), res.quantizer.centers, s.dimension(), "cx", "cy");
      rep.emit(out);
    } else if (*w_cmd) {
      const double r = single_r(c);
      const DiscreteMeasure mu = read_atoms(mu_path), nu = read_atoms(nu_path);
      std::string used = method;
      if (used == "auto")
        used = (mu.dimension() == 1 && nu.dimension() == 1 && r >= 1.0) ? "1d" : "assignment";
      const TransportResult tr =
          used == "1d" ? wasserstein_1d(mu, nu, r) : wasserstein_assignment(mu, nu, r);
      Report rep("wasserstein", c);
      rep.system_id("discrete");
      rep.param("r", r);
      rep.param("mu", mu_path);
      rep.param("nu", nu_path);
      rep.param("method", used);
      rep.note("rho_r: " + num(tr.rho) + " cost: " + num(tr.cost) + " (exact)");
      rep.body() << "i,j,mass\n";
      for (const auto& e : tr.coupling) rep.body() << e.i << "," << e.j << "," << num(e.mass) << "\n";
      rep.emit(out);
    } else if (*curve_cmd) {
      const InfiniteIFS s = load(c);
      const double r = single_r(c);
      const auto grid = parse_n_spec(c.n);
      const EmpiricalMeasure em = sample(s, c.samples, c.eps, c.seed);
      DistortionCurve curve;
      if (curve_method == "lloyd") {
        curve = lloyd_curve(em, grid, r, lloyd_options(c), s.id());
      } else {
        curve.r = r;
        curve.system_id = s.id();
        curve.seeds = {c.seed};
        for (std::size_t n : grid) {
          const ConstructiveResult res = constructive_quantizer(s, em, n, r, std::nullopt, c.tol);
          curve.entries.push_back({n, res.quantizer.distortion_estimate,
                                   res.quantizer.distortion_stderr, CurveMethod::constructive});
        }
      }
      const double k = kappa.value_or(quantization_dimension(s, r, c.tol).kappa);
      const auto coeffs = coefficient_curve(curve, k);
      Report rep("curve", c);
      rep.system_id(s.id());
      rep.param("r", r);
      rep.param("n", c.n);
      rep.param("kappa", k);
      rep.param("method", curve_method);
      sampling_params(rep, c, em);
      if (curve.entries.size() >= 4) {
        try {
          const DimensionEstimate est = estimate_dimension(curve);
          rep.note("dimension_estimate: " + num(est.dimension) + " ci95: [" + num(est.ci_low) + ", " +
                   num(est.ci_high) + "]");
        } catch (const InsufficientDataError& e) {
          rep.note(std::string("dimension_estimate: unavailable (") + e.what() + ")");
        }
      }
      rep.body() << "n,V,stderr,coeff\n";
      for (std::size_t i = 0; i < curve.entries.size(); ++i) {
        const CurveEntry& e = curve.entries[i];
        rep.body() << e.n << "," << num(e.V) << "," << num(e.std_error) << "," << num(coeffs[i].value)
                   << "\n";
      }
      rep.emit(out);
    } else if (*witness_cmd) {
      const InfiniteIFS s = load(c);
      const double r = single_r(c);
      const auto grid = parse_n_spec(c.n);
      WitnessOptions wo;
      wo.samples = c.samples;
      wo.eps = c.eps;
      wo.seed = c.seed;
      wo.restarts = c.restarts;
      wo.max_iters = c.max_iters;
      wo.tol = c.tol;
      const WitnessReport w = coefficient_witness(s, r, kappa_minus, kappa_plus, grid, wo);
      Report rep("witness", c);
      rep.system_id(s.id());
      rep.param("r", r);
      rep.param("n", c.n);
      rep.param("kappa_minus", kappa_minus);
      rep.param("kappa_plus", kappa_plus);
      rep.param("samples", num(c.samples));
      rep.param("eps", c.eps);
      rep.note("kappa_r: " + num(w.kappa_r));
      rep.note("lower witness: min " + num(w.lower_min) + " > " + num(kLowerWitnessRatio) +
               " x median " + num(w.lower_median) + " -> " + (w.lower_pass ? "PASS" : "FAIL"));
      rep.note("upper witness: last-third slope " + num(w.upper_slope) + " < 0 -> " +
               (w.upper_pass ? "PASS" : "FAIL"));
      rep.note("critical (kappa_r, not thresholded): last-third slope " + num(w.critical_slope));
      rep.note("finite-grid witnesses are heuristic evidence, not limits");
      rep.body() << "n,V,stderr,coeff_minus,coeff_plus,coeff_critical\n";
      for (std::size_t i = 0; i < w.curve.entries.size(); ++i) {
        const CurveEntry& e = w.curve.entries[i];
        rep.body() << e.n << "," << num(e.V) << "," << num(e.std_error) << "," << num(w.lower[i].value)
                   << "," << num(w.upper[i].value) << "," << num(w.critical[i].value) << "\n";
      }
      rep.emit(out);
    } else if (*verify_cmd) {
      const InfiniteIFS s = load(c);
      Report rep("verify", c);
      rep.system_id(s.id());
      rep.param("tol", c.tol);
      const auto checks = verify_system(s, c);
      bool ok = true;
      rep.body() << "check,status,detail\n";
      for (const Check& ch : checks) {
        ok = ok && ch.status != "FAIL";
        rep.body() << ch.name << "," << ch.status << ",\"" << ch.detail << "\"\n";
      }
      rep.emit(out);
      return ok ? kExitOk : kExitPrecondition;
    }
    return kExitOk;
  } catch (const BudgetError& e) {
    err << "qcoef: budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const PreconditionError& e) {
    err << "qcoef: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    err << "qcoef: error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace qcoef::cli
