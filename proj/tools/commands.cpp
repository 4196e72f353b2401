#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "output.hpp"
#include "qimaging/scan.hpp"
#include "qimaging/tomography.hpp"

namespace qimaging::cli {

namespace {

using json = nlohmann::ordered_json;
using std::numbers::pi;

struct Options {
  std::vector<double> t{1.0};
  std::vector<double> gamma{0.0};
  std::vector<double> phi;
  std::size_t phi_points = 0;
  std::vector<double> xi;
  std::uint64_t shots = 0;
  std::uint64_t seed = kDefaultSeed;
  std::string method;
  std::string out;
  std::string format = "csv";
  bool degrees = false;
  std::string t_map;
  std::string gamma_map;
  std::string grid_prefix;

  CLI::Option* phi_opt = nullptr;
  CLI::Option* phi_points_opt = nullptr;
  CLI::Option* xi_opt = nullptr;
};

double angle_in(double v, const Options& o) { return o.degrees ? v * pi / 180.0 : v; }

void require_finite(const std::vector<double>& vs, const char* what) {
  for (double v : vs)
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " values must be finite");
}

void require_unit_interval(const std::vector<double>& vs, const char* what) {
  require_finite(vs, what);
  for (double v : vs)
    if (v < 0.0 || v > 1.0) throw ConfigError(std::string(what) + " must lie in [0, 1]");
}

double single(const std::vector<double>& vs, const char* what) {
  if (vs.size() != 1) throw ConfigError(std::string(what) + " takes a single value for this command");
  return vs.front();
}

std::vector<double> gammas(const Options& o) {
  require_finite(o.gamma, "--gamma");
  std::vector<double> out;
  for (double g : o.gamma) out.push_back(angle_in(g, o));
  return out;
}

std::vector<double> phases(const Options& o, std::vector<double> fallback) {
  if (o.phi_opt && o.phi_opt->count()) {
    require_finite(o.phi, "--phi");
    std::vector<double> out;
    for (double p : o.phi) out.push_back(angle_in(p, o));
    return out;
  }
  if (o.phi_points_opt && o.phi_points_opt->count()) {
    if (o.phi_points == 0) throw ConfigError("--phi-points must be at least 1");
    return uniform_phases(o.phi_points);
  }
  return fallback;
}

std::optional<std::uint64_t> shots(const Options& o) {
  return o.shots ? std::optional<std::uint64_t>(o.shots) : std::nullopt;
}

std::optional<EstimationMethod> method(const Options& o) {
  if (o.method.empty()) return std::nullopt;
  return o.method == "two_point" ? EstimationMethod::two_point : EstimationMethod::least_squares;
}

const char* method_name(EstimationMethod m) {
  return m == EstimationMethod::two_point ? "two_point" : "least_squares";
}

ProbeState probe_from(const Options& o) {
  if (o.xi_opt && o.xi_opt->count()) {
    const double xi = single(o.xi, "--xi");
    require_unit_interval({xi}, "--xi");
    return prepare_werner(xi);
  }
  return prepare_probe();
}

json probe_config(const ProbeState& p) {
  return p.kind == ProbeKind::bell ? json{{"kind", "bell"}} : json{{"kind", "werner"}, {"xi", p.xi}};
}

Table matrix_table(std::string name, const ComplexMatrix& m) {
  Table t{std::move(name), {"row", "col", "re", "im"}, {}};
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      t.add({std::int64_t{r}, std::int64_t{c}, round_sig15(m(r, c).real()), round_sig15(m(r, c).imag())});
  return t;
}

double value_or_nan(const std::optional<double>& v) { return v.value_or(std::nan("")); }

// ---- commands ----

Report cmd_probe(const Options& o) {
  const ProbeState probe = probe_from(o);
  Report r;
  r.config = {{"command", "probe"}, {"probe", probe_config(probe)}, {"wires", probe.rho.reg().wires()}};
  r.tables.push_back(matrix_table("probe", probe.rho.matrix()));
  return r;
}

Report cmd_chi(const Options& o) {
  require_unit_interval(o.t, "--T");
  const ObjectParams obj(single(o.t, "--T"), single(gammas(o), "--gamma"));
  Report r;
  r.config = {{"command", "chi"}, {"T", obj.t()}, {"gamma", obj.gamma()}, {"basis", "sigma/sqrt(2): I, X, Y, Z"}};
  r.tables.push_back(matrix_table("chi", chi_matrix(object_channel(obj)).entries));
  return r;
}

Report cmd_schmidt(const Options& o) {
  const ProbeState probe = probe_from(o);
  const Wires a{"i1", "i2"}, b{"s1", "s2"};
  const SchmidtData sd = operator_schmidt(probe.rho, a, b);
  Report r;
  r.config = {{"command", "schmidt"}, {"probe", probe_config(probe)}, {"a_wires", a}, {"b_wires", b}};
  Table coeffs{"coefficients", {"term", "r", "hermitian"}, {}};
  Table ops{"operators", {"term", "block", "row", "col", "re", "im"}, {}};
  for (std::size_t l = 0; l < sd.rank(); ++l) {
    coeffs.add({static_cast<std::int64_t>(l), round_sig15(sd.r[l]), sd.hermitian_gauge});
    for (const auto& [block, m] : {std::pair{"A", &sd.a_ops[l]}, std::pair{"B", &sd.b_ops[l]}})
      for (Eigen::Index i = 0; i < m->rows(); ++i)
        for (Eigen::Index j = 0; j < m->cols(); ++j)
          ops.add({static_cast<std::int64_t>(l), std::string(block), std::int64_t{i}, std::int64_t{j},
                   round_sig15((*m)(i, j).real()), round_sig15((*m)(i, j).imag())});
  }
  r.tables.push_back(std::move(coeffs));
  r.tables.push_back(std::move(ops));
  return r;
}

Report cmd_probabilities(const Options& o) {
  require_unit_interval(o.t, "--T");
  const ProbeState probe = probe_from(o);
  const auto gs = gammas(o);
  const auto phis = phases(o, {0.0});
  const auto rows = probability_grid_serial(probe, o.t, gs, phis, shots(o), o.seed);
  Report r;
  r.config = {{"command", "probabilities"}, {"probe", probe_config(probe)}, {"T", o.t}, {"gamma", gs},
              {"phi", phis}, {"shots", o.shots}};
  Table t{"probabilities", {"t", "gamma", "phi", "p_h", "p_g"}, {}};
  for (const auto& row : rows) t.add({row.t, row.gamma, row.phi, row.p_h, row.p_g});
  r.tables.push_back(std::move(t));
  return r;
}

Report cmd_sweep(const Options& o) {
  require_unit_interval(o.t, "--T");
  const ObjectParams obj(single(o.t, "--T"), single(gammas(o), "--gamma"));
  const auto phis = phases(o, uniform_phases(24));
  if (phis.size() < 2) throw ConfigError("sweep needs at least 2 phase points");

  const SignalState sig = run_pipeline(prepare_probe(), obj, mode_mixer());
  Table samples{"samples", {"phi", "p_h", "p_g"}, {}};
  std::vector<PhaseSample> ps;
  for (std::size_t k = 0; k < phis.size(); ++k) {
    const auto p = detection_probabilities(sig, measurement_pair(phis[k]));
    double p_h = p.p_h, p_g = p.p_g;
    if (o.shots) {
      const auto c = sample_detections(p.p_h, o.shots, derive_seed(o.seed, k));
      p_h = static_cast<double>(c.n_h) / static_cast<double>(o.shots);
      p_g = static_cast<double>(c.n_g) / static_cast<double>(o.shots);
    }
    samples.add({phis[k], p_h, p_g});
    ps.push_back({phis[k], p_h});
  }
  const auto m = method(o).value_or(phis.size() == 2 ? EstimationMethod::two_point : EstimationMethod::least_squares);
  ObjectEstimate est;
  try {
    est = estimate_object(ps, m, shots(o));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Table footer{"estimate", {"t_hat", "gamma_hat", "stderr_t", "stderr_gamma", "method", "degenerate"}, {}};
  footer.add({est.t_hat, est.gamma_hat, value_or_nan(est.stderr_t), value_or_nan(est.stderr_gamma),
              std::string(method_name(est.method)), est.degenerate});

  Report r;
  r.config = {{"command", "sweep"}, {"T", obj.t()}, {"gamma", obj.gamma()}, {"phi", phis}, {"shots", o.shots},
              {"method", method_name(m)}};
  r.tables.push_back(std::move(samples));
  r.tables.push_back(std::move(footer));
  return r;
}

Report cmd_werner(const Options& o) {
  require_unit_interval(o.t, "--T");
  const ObjectParams obj(single(o.t, "--T"), single(gammas(o), "--gamma"));
  std::vector<double> xis = o.xi;
  if (!(o.xi_opt && o.xi_opt->count())) xis = {0.0, 0.25, 0.5, 2.0 / 3.0, 0.75, 0.9, 1.0};
  require_unit_interval(xis, "--xi");
  const auto phis = phases(o, uniform_phases(24));
  if (phis.size() < 3) throw ConfigError("werner needs at least 3 phase points to fit the fringe");

  Table t{"werner",
          {"xi", "modulation_amplitude", "visibility_raw", "visibility_conditioned", "ppt_min_eigenvalue", "offset",
           "p_click"},
          {}};
  for (std::size_t w = 0; w < xis.size(); ++w) {
    const ProbeState probe = prepare_werner(xis[w]);
    const auto rows = probability_grid_serial(probe, {obj.t()}, {obj.gamma()}, phis, shots(o), derive_seed(o.seed, w));
    std::vector<double> ph, cond;
    double click = 0.0;
    for (const auto& row : rows) {
      ph.push_back(row.p_h);
      const double c = row.p_h + row.p_g;
      cond.push_back(c > 0.0 ? row.p_h / c : 0.5);
      click += c;
    }
    const FringeFit raw = fit_fringe(phis, ph);
    const FringeFit conditioned = fit_fringe(phis, cond);
    const double ppt = min_eigenvalue(partial_transpose(probe.rho, Wires{"i2", "s2"}));
    t.add({xis[w], 2.0 * raw.amplitude(), raw.amplitude() / raw.offset,
           conditioned.amplitude() / conditioned.offset, ppt, raw.offset, click / static_cast<double>(rows.size())});
  }
  Report r;
  r.config = {{"command", "werner"}, {"T", obj.t()}, {"gamma", obj.gamma()}, {"xi", xis}, {"phi", phis},
              {"shots", o.shots}, {"ppt_cut", {{"a", {"s1", "i1"}}, {"b", {"i2", "s2"}}}}};
  r.tables.push_back(std::move(t));
  return r;
}

struct Grid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;
};

Grid read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  Grid g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const auto first = field.find_first_not_of(" \t");
      const auto last = field.find_last_not_of(" \t");
      double v = 0.0;
      const char* b = first == std::string::npos ? field.data() : field.data() + first;
      const char* e = first == std::string::npos ? field.data() : field.data() + last + 1;
      const auto res = std::from_chars(b, e, v);
      if (b == e || res.ec != std::errc() || res.ptr != e)
        throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: '" + field + "'");
      g.values.push_back(v);
      ++count;
    }
    if (line.back() == ',') throw ConfigError(path + ":" + std::to_string(lineno) + ": trailing comma");
    if (g.height == 0) g.width = count;
    else if (count != g.width) throw ConfigError(path + ":" + std::to_string(lineno) + ": ragged row");
    ++g.height;
  }
  if (in.bad()) throw IoError("cannot read " + path);
  if (g.height == 0) throw ConfigError(path + ": empty map");
  return g;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << content;
  if (!f) throw IoError("cannot write " + path);
}

Report cmd_image(const Options& o, std::size_t& pixel_errors) {
  Grid tg = read_grid(o.t_map);
  Grid gg = read_grid(o.gamma_map);
  if (tg.width != gg.width || tg.height != gg.height)
    throw ConfigError("T map is " + std::to_string(tg.height) + "x" + std::to_string(tg.width) + " but gamma map is " +
                      std::to_string(gg.height) + "x" + std::to_string(gg.width));
  for (double& g : gg.values) g = angle_in(g, o);
  ImageMaps maps(tg.width, tg.height, tg.values, gg.values);

  const ScanConfig cfg{phases(o, {0.0, pi / 2}), shots(o), o.seed, method(o)};
  configure_threads_from_env();
  const ImageEstimate res = image_scan(maps, cfg);
  pixel_errors = res.error_count();

  Table t{"image",
          {"row", "col", "t_true", "gamma_true", "t_hat", "gamma_hat", "stderr_t", "stderr_gamma", "t_error",
           "gamma_error", "degenerate", "error"},
          {}};
  std::vector<double> t_hat(maps.size()), g_hat(maps.size()), t_err(maps.size()), g_err(maps.size());
  const double nan = std::nan("");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& px = res.pixels[i];
    const auto& e = px.estimate;
    t_hat[i] = px.ok() ? e.t_hat : nan;
    g_hat[i] = px.ok() ? e.gamma_hat : nan;
    t_err[i] = t_hat[i] - maps.t(i);
    g_err[i] = std::isnan(g_hat[i]) ? nan : normalize_angle(g_hat[i] - normalize_angle(maps.gamma(i)));
    t.add({static_cast<std::int64_t>(i / maps.width()), static_cast<std::int64_t>(i % maps.width()), maps.t(i),
           normalize_angle(maps.gamma(i)), t_hat[i], g_hat[i], px.ok() ? value_or_nan(e.stderr_t) : nan,
           px.ok() ? value_or_nan(e.stderr_gamma) : nan, t_err[i], g_err[i], px.ok() && e.degenerate, px.error});
  }
  if (!o.grid_prefix.empty()) {
    const std::pair<const char*, const std::vector<double>*> grids[] = {
        {"t_hat.csv", &t_hat}, {"gamma_hat.csv", &g_hat}, {"t_error.csv", &t_err}, {"gamma_error.csv", &g_err}};
    for (const auto& [suffix, values] : grids) {
      std::ostringstream os;
      write_grid(os, *values, maps.width());
      write_file(o.grid_prefix + suffix, os.str());
    }
  }

  Report r;
  r.config = {{"command", "image"},
              {"t_map", o.t_map},
              {"gamma_map", o.gamma_map},
              {"width", maps.width()},
              {"height", maps.height()},
              {"phi", cfg.phi_sweep},
              {"shots", o.shots},
              {"method", method_name(cfg.method.value_or(cfg.phi_sweep.size() == 2 ? EstimationMethod::two_point
                                                                                   : EstimationMethod::least_squares))}};
  r.tables.push_back(std::move(t));
  return r;
}

// ---- option wiring ----

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Output file (default: stdout)");
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", o.seed, "Root seed for sampling")->capture_default_str();
  sub->add_flag("--degrees", o.degrees, "Read input angles in degrees");
}

void add_object(CLI::App* sub, Options& o, bool lists) {
  sub->add_option("--T", o.t, lists ? "Transmission amplitude(s)" : "Transmission amplitude")->delimiter(',');
  sub->add_option("--gamma", o.gamma, lists ? "Transmission phase(s)" : "Transmission phase")->delimiter(',');
}

// Option handles are per subcommand; run() binds those of the parsed one.
struct Handles {
  CLI::Option* phi = nullptr;
  CLI::Option* phi_points = nullptr;
  CLI::Option* xi = nullptr;
};

void add_phases(CLI::App* sub, Options& o, Handles& h) {
  h.phi = sub->add_option("--phi", o.phi, "Explicit phase list a,b,c")->delimiter(',');
  h.phi_points = sub->add_option("--phi-points", o.phi_points, "Number of evenly spaced phases in [0, 2pi)");
  h.phi->excludes(h.phi_points);
}

void add_shots(CLI::App* sub, Options& o) {
  sub->add_option("--shots", o.shots, "Runs per phase setting (0: exact probabilities)");
}

void add_method(CLI::App* sub, Options& o) {
  sub->add_option("--method", o.method, "Estimator")->check(CLI::IsMember({"two_point", "least_squares"}));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation of imaging with undetected photons as ancilla-assisted process tomography"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;
  std::vector<std::pair<CLI::App*, Handles>> handles;

  auto* probe = app.add_subcommand("probe", "Dump the four-wire probe density matrix");
  handles.push_back({probe, {nullptr, nullptr, probe->add_option("--xi", o.xi, "Werner mixing parameter")}});
  add_common(probe, o);

  auto* chi = app.add_subcommand("chi", "Dump the object chi matrix");
  add_object(chi, o, false);
  add_common(chi, o);
  handles.push_back({chi, {}});

  auto* schmidt = app.add_subcommand("schmidt", "Operator Schmidt decomposition of the probe, idlers | signals");
  handles.push_back({schmidt, {nullptr, nullptr, schmidt->add_option("--xi", o.xi, "Werner mixing parameter")}});
  add_common(schmidt, o);

  auto* probs = app.add_subcommand("probabilities", "Detection probabilities over a T x gamma x phi grid");
  add_object(probs, o, true);
  Handles probs_h;
  add_phases(probs, o, probs_h);
  probs_h.xi = probs->add_option("--xi", o.xi, "Werner mixing parameter");
  handles.push_back({probs, probs_h});
  add_shots(probs, o);
  add_common(probs, o);

  auto* sweep = app.add_subcommand("sweep", "Phase sweep and (T, gamma) recovery for one object");
  add_object(sweep, o, false);
  Handles sweep_h;
  add_phases(sweep, o, sweep_h);
  handles.push_back({sweep, sweep_h});
  add_shots(sweep, o);
  add_method(sweep, o);
  add_common(sweep, o);

  auto* werner = app.add_subcommand("werner", "Fringe amplitude, visibility and PPT for Werner probes");
  add_object(werner, o, false);
  Handles werner_h;
  add_phases(werner, o, werner_h);
  werner_h.xi = werner->add_option("--xi", o.xi, "Mixing parameter list")->delimiter(',');
  handles.push_back({werner, werner_h});
  add_shots(werner, o);
  add_common(werner, o);

  auto* image = app.add_subcommand("image", "Pixel-wise reconstruction of T and gamma maps");
  image->add_option("--t-map", o.t_map, "Headerless CSV grid of T values")->required();
  image->add_option("--gamma-map", o.gamma_map, "Headerless CSV grid of gamma values")->required();
  image->add_option("--grid-prefix", o.grid_prefix, "Also write <prefix>t_hat.csv and friends");
  Handles image_h;
  add_phases(image, o, image_h);
  handles.push_back({image, image_h});
  add_shots(image, o);
  add_method(image, o);
  add_common(image, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  for (const auto& [sub, h] : handles)
    if (sub->parsed()) {
      o.phi_opt = h.phi;
      o.phi_points_opt = h.phi_points;
      o.xi_opt = h.xi;
    }

  std::size_t pixel_errors = 0;
  try {
    Report report;
    if (probe->parsed()) report = cmd_probe(o);
    else if (chi->parsed()) report = cmd_chi(o);
    else if (schmidt->parsed()) report = cmd_schmidt(o);
    else if (probs->parsed()) report = cmd_probabilities(o);
    else if (sweep->parsed()) report = cmd_sweep(o);
    else if (werner->parsed()) report = cmd_werner(o);
    else report = cmd_image(o, pixel_errors);
    report.seed = o.seed;

    std::ostringstream os;
    if (o.format == "json") write_json(os, report);
    else write_csv(os, report);
    if (o.out.empty()) out << os.str();
    else write_file(o.out, os.str());
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (pixel_errors) {
    err << "error: " << pixel_errors << " pixel(s) failed; see the error column\n";
    return kExitPixelErrors;
  }
  return kExitOk;
}

}  // namespace qimaging::cli
