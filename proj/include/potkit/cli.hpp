#pragma once

// Command-line front-end. Parsing produces a RunConfig; run() dispatches it
// and returns the exit code together with the standard output and standard
// error documents, so the whole CLI can be driven in-process.

#include "potkit/dirichlet.hpp"
#include "potkit/domain_io.hpp"
#include "potkit/equilibrium.hpp"
#include "potkit/green.hpp"
#include "potkit/hausdorff.hpp"
#include "potkit/kv.hpp"
#include "potkit/means.hpp"
#include "potkit/measure_io.hpp"
#include "potkit/potential.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace potkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNotConverged = 3;

struct RunConfig {
  std::string subcommand;
  std::string format;  // kv | csv; empty picks the subcommand default
  std::uint64_t seed = 0;
  unsigned threads = 1;

  // geometry
  std::string domain = "disc";
  std::string center = "0,0";
  double radius = 1.0;
  std::string vertices;
  std::vector<std::string> z;

  // solve-dirichlet / harmonic-measure
  std::string f = "re";
  bool mc = false;
  std::size_t n_samples = 10000;
  double eps = 1e-6;
  int max_steps = 10000;
  std::size_t n_nodes = 512;
  std::string interval;
  std::string arc;

  // equilibrium / capacity
  std::string generator = "circle";
  std::size_t n = 200;
  std::string a = "-1,0";
  std::string b = "1,0";
  double theta0 = 0.0;
  double theta1 = kPi;
  std::string measure_file;
  std::string out;
  double tol = 1e-8;
  int max_iters = 5000;

  // green / bw-check
  std::string pole = "0,0";
  bool check = false;
  int n_probes = 50;
  std::string coeffs;
  std::string coeffs_file;

  // hausdorff
  std::string cloud = "segment";
  std::size_t n_points = 10000;
  double p = 1.0;
  std::string deltas;
  bool with_capacity = false;

  // means
  std::string field = "abs2";
  double mollify = 0.0;

  /// Parameters of the chosen subcommand in declaration order, as echoed in
  /// the output header.
  std::vector<std::pair<std::string, std::string>> echo;
};

struct RunOutput {
  int exit_code = kExitOk;
  std::string out;
  std::string err;
};

namespace detail {

inline std::string show(const std::string& s) { return s; }
inline std::string show(double v) { return format_real(v); }
inline std::string show(bool v) { return v ? "true" : "false"; }
template <std::integral T>
  requires(!std::same_as<T, bool>)
std::string show(T v) {
  return std::to_string(v);
}
inline std::string show(const std::vector<std::string>& v) {
  std::string joined;
  for (std::size_t i = 0; i < v.size(); ++i) joined += (i ? ";" : "") + v[i];
  return joined;
}

inline const CLI::Validator& finite_positive() {
  static const CLI::Validator v(
      [](std::string& s) -> std::string {
        double x = 0.0;
        if (!CLI::detail::lexical_cast(s, x) || !std::isfinite(x) || !(x > 0.0)) return "must be a finite positive number, got " + s;
        return {};
      },
      "POSITIVE", "finite_positive");
  return v;
}

inline const CLI::Validator& finite_real() {
  static const CLI::Validator v(
      [](std::string& s) -> std::string {
        double x = 0.0;
        if (!CLI::detail::lexical_cast(s, x) || !std::isfinite(x)) return "must be a finite number, got " + s;
        return {};
      },
      "REAL", "finite_real");
  return v;
}

/// Declares options and remembers, per subcommand, how to echo them.
class Registry {
 public:
  explicit Registry(RunConfig& cfg) : cfg_(cfg) {}

  template <typename T>
  CLI::Option* add(CLI::App* sub, const std::string& flag, T& var, const std::string& help) {
    entries_[sub].emplace_back(key_of(flag), [&var] { return show(var); });
    return sub->add_option(flag, var, help)->capture_default_str();
  }

  CLI::Option* flag(CLI::App* sub, const std::string& flag, bool& var, const std::string& help) {
    entries_[sub].emplace_back(key_of(flag), [&var] { return show(var); });
    return sub->add_flag(flag, var, help);
  }

  void echo(CLI::App* sub) {
    cfg_.echo.clear();
    for (const auto& [key, fn] : entries_[sub]) cfg_.echo.emplace_back(key, fn());
  }

 private:
  static std::string key_of(const std::string& flag) {
    std::string key = flag.substr(flag.find_first_not_of('-'));
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
  }

  RunConfig& cfg_;
  std::map<CLI::App*, std::vector<std::pair<std::string, std::function<std::string()>>>> entries_;
};

/// Re-raises input errors from fn with the responsible flag named.
template <typename Fn>
auto flagged(std::string_view flag, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!is_input_error(e.kind())) throw;
    if (e.message().rfind("--", 0) == 0) throw;
    throw Error(e.kind(), fmt::format("{}: {}", flag, e.message()));
  }
}

inline std::vector<double> parse_real_list(std::string_view text, std::string_view flag) {
  std::vector<double> values;
  for (auto item : split(text, ','))
    if (!item.empty()) values.push_back(parse_real(item, flag));
  return values;
}

/// Pairs of reals separated by commas, semicolons or whitespace.
inline std::vector<cplx> parse_coefficients(std::string_view text, std::string_view flag) {
  std::string normal(text);
  for (char& ch : normal)
    if (ch == ',' || ch == ';' || ch == '\n' || ch == '\t' || ch == '\r') ch = ' ';
  std::vector<double> reals;
  for (auto item : split(normal, ' '))
    if (!item.empty()) reals.push_back(parse_real(item, flag));
  if (reals.empty() || reals.size() % 2 != 0)
    throw Error(ErrorKind::ParseError, fmt::format("{}: expected an even number of reals (re, im pairs)", flag));
  std::vector<cplx> out;
  for (std::size_t i = 0; i < reals.size(); i += 2) out.emplace_back(reals[i], reals[i + 1]);
  return out;
}

inline std::string read_file(const std::string& path, std::string_view flag) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, fmt::format("{}: cannot open '{}'", flag, path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline ComplexPoint point_or_infinity(std::string_view text, std::string_view flag) {
  if (trim(text) == "inf") return ComplexPoint::infinity();
  return parse_complex(text, flag);
}

inline DomainSpec make_domain(const RunConfig& c) {
  return flagged("--domain", [&]() -> DomainSpec {
    const ComplexPoint centre = flagged("--center", [&] { return parse_complex(c.center, "--center"); });
    if (c.domain == "disc") return DomainSpec::disc(centre, c.radius);
    if (c.domain == "half_plane") return DomainSpec::half_plane();
    if (c.domain == "disc_complement") return DomainSpec::disc_complement(centre, c.radius);
    if (c.domain == "polygon")
      return flagged("--vertices", [&] { return DomainSpec::polygon(parse_point_list(c.vertices, "--vertices")); });
    return load_domain(c.domain);
  });
}

inline std::vector<ComplexPoint> make_points(const RunConfig& c) {
  std::vector<ComplexPoint> pts;
  for (const auto& s : c.z) pts.push_back(flagged("--z", [&] { return parse_complex(s, "--z"); }));
  return pts;
}

inline BoundaryFunction make_boundary_function(const RunConfig& c) {
  return flagged("--f", [&]() -> BoundaryFunction {
    const std::string_view f = c.f;
    if (f == "re") return BoundaryFunction::re();
    if (f == "im") return BoundaryFunction::im();
    if (f == "re2") return BoundaryFunction::re2();
    if (f.starts_with("const:")) return BoundaryFunction::constant(parse_real(f.substr(6), "--f"));
    if (f.starts_with("indicator:")) {
      const auto t = parse_real_list(f.substr(10), "--f");
      if (t.size() != 2) throw Error(ErrorKind::ParseError, "expected indicator:t0,t1");
      return BoundaryFunction::indicator_arc(t[0], t[1]);
    }
    throw Error(ErrorKind::ParseError, fmt::format("unknown boundary function '{}'", f));
  });
}

inline ScalarField make_field(const RunConfig& c) {
  return flagged("--field", [&]() -> ScalarField {
    const std::string_view f = c.field;
    if (f == "re") return fields::re();
    if (f == "im") return fields::im();
    if (f == "abs2") return fields::abs2();
    if (f == "pos_re") return fields::positive_part_re();
    if (f.starts_with("const:")) return fields::constant(parse_real(f.substr(6), "--field"));
    if (f.starts_with("re_pow:")) return fields::re_pow(static_cast<int>(parse_integer(f.substr(7), "--field")));
    if (f.starts_with("im_pow:")) return fields::im_pow(static_cast<int>(parse_integer(f.substr(7), "--field")));
    if (f.starts_with("log:")) return fields::log_distance(parse_complex(f.substr(4), "--field"));
    throw Error(ErrorKind::ParseError, fmt::format("unknown field '{}'", f));
  });
}

inline NodeSystem make_node_system(const RunConfig& c) {
  return flagged("--generator", [&]() -> NodeSystem {
    const auto centre = [&] { return flagged("--center", [&] { return parse_complex(c.center, "--center"); }); };
    if (c.generator == "circle") return NodeSystem::circle(c.n, centre(), c.radius);
    if (c.generator == "segment")
      return NodeSystem::segment(flagged("--a", [&] { return parse_complex(c.a, "--a"); }),
                                 flagged("--b", [&] { return parse_complex(c.b, "--b"); }), c.n);
    if (c.generator == "arc") return NodeSystem::circle_arc(centre(), c.radius, c.theta0, c.theta1, c.n);
    if (c.generator == "polyline") {
      const auto v = flagged("--vertices", [&] { return parse_point_list(c.vertices, "--vertices"); });
      return NodeSystem::polyline(v, c.n);
    }
    if (c.generator == "polygon") {
      const auto d = flagged("--vertices", [&] { return DomainSpec::polygon(parse_point_list(c.vertices, "--vertices")); });
      return NodeSystem::polygon_boundary(d, c.n);
    }
    if (c.generator == "measure")
      return flagged("--measure-file", [&] { return NodeSystem::from_measure(load_measure(c.measure_file)); });
    throw Error(ErrorKind::ParseError, fmt::format("unknown generator '{}'", c.generator));
  });
}

inline PointCloud make_cloud(const RunConfig& c) {
  return flagged("--cloud", [&]() -> PointCloud {
    const auto centre = [&] { return flagged("--center", [&] { return parse_complex(c.center, "--center"); }); };
    if (c.cloud == "segment")
      return PointCloud::polyline_sample({flagged("--a", [&] { return parse_complex(c.a, "--a"); }),
                                          flagged("--b", [&] { return parse_complex(c.b, "--b"); })},
                                         c.n_points);
    if (c.cloud == "circle") return PointCloud::circle_sample(c.n_points, centre(), c.radius);
    if (c.cloud == "point") return PointCloud::explicit_points({centre()});
    if (c.cloud == "polyline")
      return PointCloud::polyline_sample(flagged("--vertices", [&] { return parse_point_list(c.vertices, "--vertices"); }),
                                         c.n_points);
    throw Error(ErrorKind::ParseError, fmt::format("unknown cloud '{}'", c.cloud));
  });
}

/// Output document: header parameters then results, as `key = value` lines
/// or as `# key = value` comments above a CSV table.
class Document {
 public:
  Document(const RunConfig& c, bool csv) : csv_(csv) {
    kv("command", c.subcommand);
    kv("seed", std::to_string(c.seed));
    kv("format", csv ? "csv" : "kv");
    for (const auto& [k, v] : c.echo) kv(k, v);
  }

  bool csv() const noexcept { return csv_; }

  void kv(std::string_view key, std::string_view value) { out_ << (csv_ ? "# " : "") << key << " = " << value << '\n'; }
  void kv(std::string_view key, double value) { kv(key, format_real(value)); }
  void kv(std::string_view key, bool value) { kv(key, value ? std::string_view("true") : std::string_view("false")); }
  void kv(std::string_view key, std::size_t value) { kv(key, std::to_string(value)); }
  void kv(std::string_view key, int value) { kv(key, std::to_string(value)); }
  void kv(std::string_view key, const char* value) { kv(key, std::string_view(value)); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  bool csv_;
  std::ostringstream out_;
};

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_solve_dirichlet(const RunConfig& c, Document& doc) {
  const DomainSpec d = make_domain(c);
  const BoundaryFunction f = make_boundary_function(c);
  const auto pts = make_points(c);
  if (pts.empty()) throw Error(ErrorKind::InvalidArgument, "--z: at least one evaluation point is required");
  if (!c.mc && d.kind() != DomainKind::Disc)
    throw Error(ErrorKind::InvalidArgument, "--domain: the exact solver needs a disc; pass --mc for other domains");
  int code = kExitOk;
  if (doc.csv()) doc.row(c.mc ? std::vector<std::string>{"z_re", "z_im", "mean", "std_error", "n_absorbed", "n_escaped"}
                              : std::vector<std::string>{"z_re", "z_im", "value"});
  for (const auto& z : pts) {
    if (!c.mc) {
      const auto& disc = std::get<Disc>(d.variant());
      const double v = flagged("--z", [&] { return poisson_solve(disc.center, disc.radius, f, z, c.n_nodes); });
      if (doc.csv()) doc.row({format_real(z.re()), format_real(z.im()), format_real(v)});
      else doc.kv("value", v);
      continue;
    }
    McEstimate est;
    try {
      est = flagged("--z", [&] { return wos_solve(d, f, z, c.n_samples, {c.eps, c.max_steps, c.seed, c.threads}); });
    } catch (const TooFewAbsorbedError& e) {
      est = e.estimate();
      code = kExitNotConverged;
    }
    if (doc.csv()) {
      doc.row({format_real(z.re()), format_real(z.im()), format_real(est.mean), format_real(est.std_error),
               std::to_string(est.n_absorbed), std::to_string(est.n_escaped)});
    } else {
      doc.kv("mean", est.mean);
      doc.kv("std_error", est.std_error);
      doc.kv("n_absorbed", est.n_absorbed);
      doc.kv("n_escaped", est.n_escaped);
      doc.kv("mean_steps", est.mean_steps);
    }
  }
  return code;
}

inline int cmd_harmonic_measure(const RunConfig& c, Document& doc) {
  const DomainSpec d = make_domain(c);
  const auto pts = make_points(c);
  if (pts.empty()) throw Error(ErrorKind::InvalidArgument, "--z: at least one evaluation point is required");
  const bool half_plane = d.kind() == DomainKind::UpperHalfPlane;
  std::vector<double> interval;
  std::optional<BoundaryArc> arc;
  if (half_plane) {
    interval = parse_real_list(c.interval, "--interval");
    if (interval.size() != 2 || std::isnan(interval[0]) || std::isnan(interval[1]) || !(interval[0] <= interval[1]))
      throw Error(ErrorKind::InvalidArgument, "--interval: expected a,b with a <= b");
  } else {
    const auto t = parse_real_list(c.arc, "--arc");
    if (t.size() != 2) throw Error(ErrorKind::InvalidArgument, "--arc: expected t0,t1 boundary parameters");
    arc = flagged("--arc", [&] { return BoundaryArc(d, t[0], t[1]); });
  }

  int code = kExitOk;
  if (doc.csv()) doc.row(c.mc ? std::vector<std::string>{"z_re", "z_im", "mean", "std_error"} : std::vector<std::string>{"z_re", "z_im", "omega"});
  for (const auto& z : pts) {
    double mean = 0.0, se = 0.0;
    if (!c.mc) {
      mean = flagged("--z", [&]() -> double {
        if (half_plane) return harmonic_measure_halfplane(z, interval[0], interval[1]);
        if (d.kind() == DomainKind::Disc) return harmonic_measure_disc(*arc, z);
        if (const auto* comp = d.get_if<DiscComplement>()) {
          const MoebiusMap to_disc(0.0, comp->radius, 1.0, -comp->center.value());
          return pushforward_measure(to_disc, d, DomainSpec::unit_disc(), z, *arc);
        }
        throw Error(ErrorKind::InvalidArgument, "--domain: polygons need --mc");
      });
    } else if (half_plane) {
      if (c.n_samples < 100) throw Error(ErrorKind::InvalidArgument, "--n-samples: at least 100 samples are required");
      flagged("--z", [&] { return distance_to_boundary(d, z); });
      std::vector<double> hits(c.n_samples, 0.0);
      potkit::detail::parallel_for(hits.size(), c.threads, [&](std::size_t i) {
        RngStream rng(c.seed, i);
        const double x = sample_exit_halfplane(z, rng);
        hits[i] = (x >= interval[0] && x <= interval[1]) ? 1.0 : 0.0;
      });
      const double n = static_cast<double>(hits.size());
      mean = pairwise_sum(hits) / n;
      se = std::sqrt(mean * (1.0 - mean) / (n - 1.0));
    } else {
      McEstimate est;
      const auto f = BoundaryFunction::indicator_arc(arc->t0, arc->t1);
      try {
        est = flagged("--z", [&] { return wos_solve(d, f, z, c.n_samples, {c.eps, c.max_steps, c.seed, c.threads}); });
      } catch (const TooFewAbsorbedError& e) {
        est = e.estimate();
        code = kExitNotConverged;
      }
      mean = est.mean;
      se = est.std_error;
    }
    if (doc.csv()) {
      if (c.mc) doc.row({format_real(z.re()), format_real(z.im()), format_real(mean), format_real(se)});
      else doc.row({format_real(z.re()), format_real(z.im()), format_real(mean)});
    } else if (c.mc) {
      doc.kv("mean", mean);
      doc.kv("std_error", se);
    } else {
      doc.kv("omega", mean);
    }
  }
  return code;
}

inline void report_equilibrium(const EquilibriumResult& r, Document& doc, bool with_measure) {
  if (doc.csv() && with_measure) {
    doc.kv("energy", r.energy);
    doc.kv("capacity", r.capacity);
    doc.kv("converged", r.converged);
    doc.row({"x", "y", "weight", "element_length"});
    const auto& mu = r.measure;
    for (std::size_t i = 0; i < mu.size(); ++i)
      doc.row({format_real(mu.nodes()[i].re()), format_real(mu.nodes()[i].im()), format_real(mu.weights()[i]),
               format_real(mu.element_lengths()[i])});
    return;
  }
  doc.kv("capacity", r.capacity);
  doc.kv("energy", r.energy);
  doc.kv("frostman_residual", r.frostman_residual);
  doc.kv("projected_gradient_norm", r.projected_gradient_norm);
  doc.kv("iterations", r.iterations);
  doc.kv("converged", r.converged);
  if (with_measure) {
    const auto& w = r.measure.weights();
    doc.kv("n_nodes", r.measure.size());
    doc.kv("min_weight", *std::min_element(w.begin(), w.end()));
    doc.kv("max_weight", *std::max_element(w.begin(), w.end()));
  }
}

inline int cmd_equilibrium(const RunConfig& c, Document& doc, bool with_measure) {
  const NodeSystem ns = make_node_system(c);
  if (ns.size() < 2) {
    // A single node carries an atom: infinite energy, zero capacity.
    doc.kv("capacity", 0.0);
    doc.kv("energy", "inf");
    doc.kv("converged", true);
    return kExitOk;
  }
  const auto r = flagged("--generator", [&] { return minimize_energy(ns, {c.max_iters, c.tol}); });
  report_equilibrium(r, doc, with_measure);
  if (with_measure && !c.out.empty()) flagged("--out", [&] { save_measure(r.measure, c.out); });
  return r.converged ? kExitOk : kExitNotConverged;
}

inline int cmd_green(const RunConfig& c, Document& doc) {
  const DomainSpec d = make_domain(c);
  const ComplexPoint pole = flagged("--pole", [&] { return point_or_infinity(c.pole, "--pole"); });
  const GreenSpec g = flagged("--pole", [&] { return GreenSpec(d, pole); });
  const auto pts = make_points(c);
  if (!c.check && pts.empty()) throw Error(ErrorKind::InvalidArgument, "--z: give evaluation points or pass --check");
  if (c.check) {
    const auto r = green_axioms_check(g, c.n_probes, c.seed);
    doc.kv("axioms_pass", r.passed());
    doc.kv("nonnegative", r.nonnegative);
    doc.kv("harmonic", r.harmonic);
    doc.kv("logarithmic_pole", r.logarithmic_pole);
    doc.kv("boundary_decay", r.boundary_decay);
    doc.kv("min_value", r.min_value);
    doc.kv("max_harmonic_laplacian", r.max_harmonic_laplacian);
    doc.kv("max_pole_laplacian", r.max_pole_laplacian);
    doc.kv("max_boundary_value", r.max_boundary_value);
  }
  if (doc.csv() && !pts.empty()) doc.row({"z_re", "z_im", "g"});
  for (const auto& z : pts) {
    const double v = flagged("--z", [&] { return green_eval(g, z); });
    if (doc.csv()) doc.row({format_real(z.re()), format_real(z.im()), format_real(v)});
    else doc.kv("g", v);
  }
  return kExitOk;
}

inline int cmd_bw_check(const RunConfig& c, Document& doc) {
  if (c.coeffs.empty() == c.coeffs_file.empty())
    throw Error(ErrorKind::InvalidArgument, "--coeffs: give exactly one of --coeffs or --coeffs-file");
  const auto coefficients = c.coeffs.empty()
                                ? flagged("--coeffs-file", [&] { return parse_coefficients(read_file(c.coeffs_file, "--coeffs-file"), "--coeffs-file"); })
                                : flagged("--coeffs", [&] { return parse_coefficients(c.coeffs, "--coeffs"); });
  const PolynomialC poly = flagged(c.coeffs.empty() ? "--coeffs-file" : "--coeffs", [&] { return PolynomialC(coefficients); });
  const ComplexPoint centre = flagged("--center", [&] { return parse_complex(c.center, "--center"); });
  std::vector<ComplexPoint> probes = make_points(c);
  if (probes.empty()) {
    for (int k = 0; k < c.n_probes; ++k) {
      RngStream rng(c.seed, static_cast<std::uint64_t>(k));
      const double ratio = 1.0 + 2.0 * rng.uniform_open();
      probes.emplace_back(centre.value() + c.radius * ratio * std::polar(1.0, kTwoPi * rng.uniform()));
    }
  }
  const auto r = flagged("--z", [&] { return bernstein_walsh_check(poly, probes, centre.value(), c.radius); });
  const auto sup = sup_norm_on_disc(poly, 1024, centre.value(), c.radius);
  doc.kv("degree", r.degree);
  doc.kv("sup_norm", r.sup_norm);
  doc.kv("sup_angle", sup.angle);
  doc.kv("n_checked", probes.size());
  doc.kv("min_relative_margin", *std::min_element(r.relative_margins.begin(), r.relative_margins.end()));
  doc.kv("holds", r.holds);
  if (doc.csv()) {
    doc.row({"z_re", "z_im", "abs_p", "bound", "relative_margin"});
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double bound = r.margins[i] / r.relative_margins[i];
      doc.row({format_real(probes[i].re()), format_real(probes[i].im()), format_real(bound - r.margins[i]), format_real(bound),
               format_real(r.relative_margins[i])});
    }
  }
  return kExitOk;
}

inline int cmd_hausdorff(const RunConfig& c, Document& doc) {
  const PointCloud cloud = make_cloud(c);
  const std::vector<double> deltas =
      c.deltas.empty() ? default_deltas(cloud) : parse_real_list(c.deltas, "--deltas");
  const auto profile = flagged("--deltas", [&] { return hausdorff_profile(cloud, c.p, deltas); });
  doc.kv("extrapolated", profile.extrapolated);
  doc.kv("monotone", profile.monotone);
  doc.kv("stable", profile.stable());
  doc.kv("box_dimension", box_dimension(cloud, deltas));
  int code = kExitOk;
  if (c.with_capacity) {
    try {
      const auto r = capacity_hausdorff_report(cloud, c.p, deltas, {c.max_iters, c.tol});
      doc.kv("capacity_estimate", r.capacity_estimate);
      doc.kv("consistent", r.consistent);
      doc.kv("both_vanish", r.both_vanish);
    } catch (const NotConvergedError& e) {
      doc.kv("capacity_estimate", e.result().capacity);
      doc.kv("capacity_converged", false);
      code = kExitNotConverged;
    }
  }
  if (doc.csv()) {
    doc.row({"delta", "estimate"});
    for (std::size_t i = 0; i < profile.deltas.size(); ++i) doc.row({format_real(profile.deltas[i]), format_real(profile.values[i])});
  } else {
    for (std::size_t i = 0; i < profile.deltas.size(); ++i) doc.kv(fmt::format("estimate[{}]", format_real(profile.deltas[i])), profile.values[i]);
  }
  return code;
}

inline int cmd_means(const RunConfig& c, Document& doc) {
  const ScalarField f = make_field(c);
  const ComplexPoint centre = flagged("--center", [&] { return parse_complex(c.center, "--center"); });
  const double at_centre = flagged("--center", [&] { return f(centre); });
  const double surface = flagged("--field", [&] { return surface_mean(f, centre, c.radius, c.n_nodes); });
  const double space = flagged("--field", [&] { return space_mean(f, centre, c.radius); });
  doc.kv("center_value", at_centre);
  doc.kv("surface_mean", surface);
  doc.kv("space_mean", space);
  doc.kv("submean_margin", std::isinf(at_centre) ? kPosInf : surface - at_centre);
  if (c.mollify > 0.0) doc.kv("mollified", flagged("--mollify", [&] { return mollify(f, MollifierSpec(c.mollify), centre); }));
  return kExitOk;
}

}  // namespace detail

/// Builds the argument grammar into app, storing values in cfg.
inline void build_app(CLI::App& app, RunConfig& cfg, detail::Registry& reg) {
  using detail::finite_positive;
  using detail::finite_real;
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", cfg.seed, "random seed (default 0)")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads for Monte Carlo; never changes the output")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();
  app.add_option("--format", cfg.format, "output format: kv or csv")->check(CLI::IsMember({"kv", "csv"}));

  auto domain_flags = [&](CLI::App* s) {
    reg.add(s, "--domain", cfg.domain, "disc | half_plane | disc_complement | polygon | path to a domain file");
    reg.add(s, "--center", cfg.center, "disc centre re,im");
    reg.add(s, "--radius", cfg.radius, "disc radius")->check(finite_positive());
    reg.add(s, "--vertices", cfg.vertices, "polygon vertices x,y; x,y; ...");
  };

  auto* sd = app.add_subcommand("solve-dirichlet", "harmonic extension of boundary data");
  domain_flags(sd);
  reg.add(sd, "--f", cfg.f, "re | im | re2 | const:c | indicator:t0,t1");
  reg.add(sd, "--z", cfg.z, "evaluation point re,im (repeatable)");
  reg.flag(sd, "--mc", cfg.mc, "walk-on-spheres Monte Carlo instead of the Poisson integral");
  reg.add(sd, "--n-samples", cfg.n_samples, "Monte Carlo samples")->check(CLI::Range(std::size_t{100}, std::size_t{1} << 40));
  reg.add(sd, "--eps", cfg.eps, "absorption shell width")->check(finite_positive());
  reg.add(sd, "--max-steps", cfg.max_steps, "walk step cap")->check(CLI::Range(1, 100000000));
  reg.add(sd, "--n-nodes", cfg.n_nodes, "Poisson quadrature nodes")->check(CLI::Range(std::size_t{16}, std::size_t{1} << 24));

  auto* hm = app.add_subcommand("harmonic-measure", "harmonic measure of a boundary piece");
  domain_flags(hm);
  reg.add(hm, "--z", cfg.z, "evaluation point re,im (repeatable)");
  reg.add(hm, "--interval", cfg.interval, "half-plane interval a,b (inf allowed)");
  reg.add(hm, "--arc", cfg.arc, "boundary parameter arc t0,t1 in [0,1)");
  reg.flag(hm, "--mc", cfg.mc, "estimate by sampling exits");
  reg.add(hm, "--n-samples", cfg.n_samples, "Monte Carlo samples")->check(CLI::Range(std::size_t{100}, std::size_t{1} << 40));
  reg.add(hm, "--eps", cfg.eps, "absorption shell width")->check(finite_positive());
  reg.add(hm, "--max-steps", cfg.max_steps, "walk step cap")->check(CLI::Range(1, 100000000));

  auto generator_flags = [&](CLI::App* s) {
    reg.add(s, "--generator", cfg.generator, "circle | segment | arc | polyline | polygon | measure");
    reg.add(s, "--n", cfg.n, "number of nodes")->check(CLI::Range(std::size_t{1}, std::size_t{20000}));
    reg.add(s, "--center", cfg.center, "circle or arc centre re,im");
    reg.add(s, "--radius", cfg.radius, "circle or arc radius")->check(finite_positive());
    reg.add(s, "--a", cfg.a, "segment start re,im");
    reg.add(s, "--b", cfg.b, "segment end re,im");
    reg.add(s, "--theta0", cfg.theta0, "arc start angle")->check(finite_real());
    reg.add(s, "--theta1", cfg.theta1, "arc end angle")->check(finite_real());
    reg.add(s, "--vertices", cfg.vertices, "polyline or polygon vertices x,y; x,y; ...");
    reg.add(s, "--measure-file", cfg.measure_file, "nodes from a measure file");
    reg.add(s, "--tol", cfg.tol, "projected-gradient tolerance")->check(finite_positive());
    reg.add(s, "--max-iters", cfg.max_iters, "iteration cap")->check(CLI::Range(0, 100000000));
  };
  auto* eq = app.add_subcommand("equilibrium", "equilibrium measure by energy minimisation");
  generator_flags(eq);
  reg.add(eq, "--out", cfg.out, "write the equilibrium measure file here");
  auto* cap = app.add_subcommand("capacity", "logarithmic capacity");
  generator_flags(cap);

  auto* gr = app.add_subcommand("green", "Green's function values and axiom checks");
  domain_flags(gr);
  reg.add(gr, "--pole", cfg.pole, "pole re,im or inf");
  reg.add(gr, "--z", cfg.z, "evaluation point re,im (repeatable)");
  reg.flag(gr, "--check", cfg.check, "run the axioms check at random probes");
  reg.add(gr, "--n-probes", cfg.n_probes, "probes per axiom")->check(CLI::Range(10, 100000));

  auto* bw = app.add_subcommand("bw-check", "Bernstein-Walsh growth bound");
  reg.add(bw, "--coeffs", cfg.coeffs, "coefficients re,im; re,im; ... lowest degree first");
  reg.add(bw, "--coeffs-file", cfg.coeffs_file, "file of coefficient pairs, lowest degree first");
  reg.add(bw, "--center", cfg.center, "disc centre re,im");
  reg.add(bw, "--radius", cfg.radius, "disc radius")->check(finite_positive());
  reg.add(bw, "--z", cfg.z, "probe re,im outside the disc (repeatable)");
  reg.add(bw, "--n-probes", cfg.n_probes, "random probes when no --z is given")->check(CLI::Range(1, 1000000));

  auto* hd = app.add_subcommand("hausdorff", "box-cover Hausdorff measure profile");
  reg.add(hd, "--cloud", cfg.cloud, "segment | circle | point | polyline");
  reg.add(hd, "--n", cfg.n_points, "sample points")->check(CLI::Range(std::size_t{3}, std::size_t{10000000}));
  reg.add(hd, "--a", cfg.a, "segment start re,im");
  reg.add(hd, "--b", cfg.b, "segment end re,im");
  reg.add(hd, "--center", cfg.center, "circle centre or the single point re,im");
  reg.add(hd, "--radius", cfg.radius, "circle radius")->check(finite_positive());
  reg.add(hd, "--vertices", cfg.vertices, "polyline vertices x,y; x,y; ...");
  reg.add(hd, "--p", cfg.p, "exponent in (0, 4]")->check(CLI::Range(0.0, 4.0))->check(finite_positive());
  reg.add(hd, "--deltas", cfg.deltas, "descending cell sizes d1,d2,... (default: 0.025 to 0.0025 of the extent)");
  reg.flag(hd, "--capacity", cfg.with_capacity, "also compute the capacity and the consistency report");
  reg.add(hd, "--tol", cfg.tol, "projected-gradient tolerance for --capacity")->check(finite_positive());
  reg.add(hd, "--max-iters", cfg.max_iters, "iteration cap for --capacity")->check(CLI::Range(0, 100000000));

  auto* mn = app.add_subcommand("means", "circle and disc means of a scalar field");
  reg.add(mn, "--field", cfg.field, "re | im | abs2 | pos_re | const:c | re_pow:k | im_pow:k | log:x,y");
  reg.add(mn, "--center", cfg.center, "centre re,im");
  reg.add(mn, "--radius", cfg.radius, "radius")->check(finite_positive());
  reg.add(mn, "--n-nodes", cfg.n_nodes, "circle quadrature nodes")->check(CLI::Range(std::size_t{16}, std::size_t{1} << 24));
  reg.add(mn, "--mollify", cfg.mollify, "also report the mollified value at this scale (0 = off)")
      ->check(CLI::Range(0.0, 1e300));
}

/// Parses arguments (without the program name). On failure returns the
/// output to print instead.
inline std::variant<RunConfig, RunOutput> parse(const std::vector<std::string>& args) {
  RunConfig cfg;
  detail::Registry reg(cfg);
  CLI::App app("potkit: numerical potential theory in the complex plane", "potkit");
  build_app(app, cfg, reg);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return RunOutput{kExitOk, app.help(), {}};
  } catch (const CLI::ParseError& e) {
    return RunOutput{kExitInput, {}, fmt::format("error: {}\n\n{}", e.what(), app.help())};
  }
  for (auto* sub : app.get_subcommands()) {
    cfg.subcommand = sub->get_name();
    reg.echo(sub);
  }
  if (cfg.format.empty()) cfg.format = cfg.subcommand == "hausdorff" ? "csv" : "kv";
  return cfg;
}

inline RunOutput run(const RunConfig& cfg) {
  RunOutput result;
  detail::Document doc(cfg, cfg.format == "csv");
  try {
    const auto& s = cfg.subcommand;
    if (s == "solve-dirichlet") result.exit_code = detail::cmd_solve_dirichlet(cfg, doc);
    else if (s == "harmonic-measure") result.exit_code = detail::cmd_harmonic_measure(cfg, doc);
    else if (s == "equilibrium") result.exit_code = detail::cmd_equilibrium(cfg, doc, true);
    else if (s == "capacity") result.exit_code = detail::cmd_equilibrium(cfg, doc, false);
    else if (s == "green") result.exit_code = detail::cmd_green(cfg, doc);
    else if (s == "bw-check") result.exit_code = detail::cmd_bw_check(cfg, doc);
    else if (s == "hausdorff") result.exit_code = detail::cmd_hausdorff(cfg, doc);
    else if (s == "means") result.exit_code = detail::cmd_means(cfg, doc);
    else throw Error(ErrorKind::InvalidArgument, "unknown subcommand " + s);
  } catch (const NotConvergedError& e) {
    result.exit_code = kExitNotConverged;
    result.err = fmt::format("error [{}]: {}\n", to_string(e.kind()), e.message());
  } catch (const Error& e) {
    result.exit_code = is_input_error(e.kind()) ? kExitInput : kExitNotConverged;
    result.err = fmt::format("error [{}]: {}\n", to_string(e.kind()), e.message());
    if (result.exit_code == kExitInput) return result;
  }
  result.out = doc.str();
  if (result.exit_code == kExitNotConverged && result.err.empty()) result.err = "warning: the solver did not converge\n";
  return result;
}

/// Parse then run.
inline RunOutput run(const std::vector<std::string>& args) {
  auto parsed = parse(args);
  if (auto* out = std::get_if<RunOutput>(&parsed)) return *out;
  return run(std::get<RunConfig>(parsed));
}

}  // namespace potkit::cli
