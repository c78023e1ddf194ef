// qst: command-line front end for transfer-fidelity grids.
//
// Exit codes: 0 ok, 2 configuration error, 3 non-convergence or failed
// check, 4 I/O error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qst/calibration.hpp"
#include "qst/chain.hpp"
#include "qst/convention.hpp"
#include "qst/harper.hpp"
#include "qst/io.hpp"
#include "qst/parallel.hpp"
#include "qst/qdp.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNoConvergence = 3;
constexpr int kIoError = 4;

struct Common {
  int n = 100;
  std::string boundary = "open";
  double j = 0.5;
  double delta = 1.0;
  std::string model = "heisenberg";
  std::string out;
  unsigned threads = qst::default_threads();
  double tol = 1e-3;

  qst::ChainSpec spec() const {
    qst::ChainSpec s{n, qst::boundary_from_string(boundary), j, delta, qst::magnon_model_from_string(model)};
    s.validate();
    return s;
  }
};

struct Grid {
  std::optional<int> l_min, l_max;
  double t_min = 0.0;
  double t_max = 10.0;
  double dt = 0.1;

  qst::GridAxes axes(const qst::ChainSpec& s) const {
    qst::GridAxes a{l_min.value_or(1), l_max.value_or(s.n), t_min, t_max, dt};
    a.validate(s);
    return a;
  }
};

struct Qdp {
  int site = 1;
  double t0 = 0.0;
  std::optional<double> gamma_abs, delta_abs;
  double delta_phase = 0.0;
  bool absolute = false;
  std::string backend = "automatic";
  std::string part = "scattering";

  qst::Gate gate() const { return qst::Gate::from_moduli(gamma_abs, delta_abs, delta_phase); }
};

struct Harper {
  double g = 1.0;
  double tau = 0.1;
  double eta = std::sqrt(2.0);
  int kicks = 100;
  int qdp_site = 0;
  int qdp_kick = 0;
  std::optional<double> alpha2;
  bool averaged = false;
};

void add_grid(CLI::App* sub, Grid& g) {
  sub->add_option("--l-min", g.l_min, "first target site (default 1)");
  sub->add_option("--l-max", g.l_max, "last target site (default N)");
  sub->add_option("--t-min", g.t_min, "first time")->capture_default_str();
  sub->add_option("--t-max", g.t_max, "last time")->capture_default_str();
  sub->add_option("--dt", g.dt, "time step")->capture_default_str();
}

void add_event(CLI::App* sub, Qdp& q) {
  sub->add_option("--site", q.site, "interruption site m")->capture_default_str();
  sub->add_option("--t0", q.t0, "interruption time")->capture_default_str();
}

void add_gate(CLI::App* sub, Qdp& q) {
  sub->add_option("--gamma-abs", q.gamma_abs, "|gamma| of the gate");
  sub->add_option("--delta-abs", q.delta_abs, "|delta| of the gate");
  sub->add_option("--delta-phase", q.delta_phase, "phase of delta (radians)")->capture_default_str();
  sub->add_option("--backend", q.backend, "two-magnon backend: automatic|ring_exact|dense_pairs|bethe_line")
      ->capture_default_str();
}

void add_harper(CLI::App* sub, Harper& h) {
  sub->add_option("--g", h.g, "potential strength")->capture_default_str();
  sub->add_option("--tau", h.tau, "kick interval")->capture_default_str();
  sub->add_option("--eta", h.eta, "commensuration parameter")->capture_default_str();
  sub->add_option("--kicks", h.kicks, "number of kicks")->capture_default_str();
  sub->add_option("--qdp-site", h.qdp_site, "measured site (0: none)")->capture_default_str();
  sub->add_option("--qdp-kick", h.qdp_kick, "kick after which the site is measured")->capture_default_str();
  sub->add_option("--alpha2", h.alpha2, "|alpha|^2 of the input qubit");
}

nlohmann::json common_json(const Common& c) {
  return {{"chain", qst::chain_json(c.spec())}, {"tol", c.tol}};
}

nlohmann::json grid_json(const qst::GridAxes& a) {
  return {{"l_min", a.l_min}, {"l_max", a.l_max}, {"t_min", a.t_min}, {"t_max", a.t_max}, {"dt", a.dt}};
}

nlohmann::json gate_json(const qst::Gate& g) {
  return {{"gamma", {g.gamma.real(), g.gamma.imag()}}, {"delta", {g.delta.real(), g.delta.imag()}}};
}

qst::CsvTable table_from_grid(const qst::FidelityGrid& g) {
  qst::CsvTable tab;
  tab.sites = g.sites;
  tab.times = g.times;
  for (Eigen::Index r = 0; r < g.values.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(g.values.cols()));
    for (Eigen::Index c = 0; c < g.values.cols(); ++c) row[static_cast<std::size_t>(c)] = g.values(r, c);
    tab.values.push_back(std::move(row));
  }
  return tab;
}

void emit(const Common& c, const std::string& command, const qst::CsvTable& tab, const nlohmann::json& params) {
  if (c.out.empty()) {
    qst::write_csv(std::cout, tab);
    return;
  }
  qst::write_outputs(c.out, tab, qst::meta_json(command, params));
}

qst::QdpOptions qdp_options(const Common& c, const Qdp& q) {
  qst::QdpOptions o;
  o.backend = qst::two_magnon_backend_from_string(q.backend);
  o.quadrature.tolerance = c.tol;
  return o;
}

void run_grid(const Common& c, const Grid& gr, const Qdp* q, qst::Scenario sc, const std::string& command) {
  const auto spec = c.spec();
  const auto axes = gr.axes(spec);
  qst::QdpEvent ev;
  nlohmann::json params = common_json(c);
  params["grid"] = grid_json(axes);
  params["scenario"] = qst::to_string(sc);
  qst::QdpOptions opts;
  if (q) {
    opts = qdp_options(c, *q);
    const bool unitary = sc != qst::Scenario::projective_qdp && sc != qst::Scenario::difference;
    ev = unitary ? qst::QdpEvent::unitary(q->site, q->t0, q->gate()) : qst::QdpEvent::projective(q->site, q->t0);
    params["event"] = {{"site", q->site}, {"t0", q->t0}};
    if (unitary) {
      params["event"]["gate"] = gate_json(*ev.gate);
      params["backend"] = q->backend;
    }
  }
  const qst::QdpEngine engine(spec, opts);
  const auto grid = qst::fill_grid(engine, sc, ev, axes, c.threads);
  if (grid.max_leakage > 0.0) params["max_leakage"] = grid.max_leakage;
  emit(c, command, table_from_grid(grid), params);
}

qst::HarperSpec harper_spec(const Common& c, const Harper& h) {
  qst::HarperSpec s{c.n, h.g, h.eta, h.tau, qst::boundary_from_string(c.boundary)};
  s.validate();
  return s;
}

qst::InitialState harper_input(const Harper& h, double fallback) {
  const double a2 = h.alpha2.value_or(fallback);
  if (!(a2 >= 0.0 && a2 <= 1.0)) throw std::invalid_argument("--alpha2 must lie in [0, 1]");
  return {std::sqrt(a2), std::sqrt(1.0 - a2)};
}

void run_harper(const Common& c, const Harper& h, bool detector) {
  const auto spec = harper_spec(c, h);
  const auto in = harper_input(h, detector ? 0.5 : 0.75);
  if (h.kicks < 0) throw std::invalid_argument("--kicks must be >= 0");
  if (detector && h.qdp_site < 1) throw std::invalid_argument("detector needs --qdp-site >= 1");
  if (h.qdp_site != 0 && (h.qdp_site < 1 || h.qdp_site > spec.n)) throw std::out_of_range("--qdp-site outside chain");
  if (h.qdp_kick < 0 || h.qdp_kick > h.kicks) throw std::invalid_argument("--qdp-kick must lie in [0, kicks]");

  qst::CsvTable tab;
  for (int l = 1; l <= spec.n; ++l) tab.sites.push_back(l);
  const auto free = qst::propagate_series(spec, h.kicks, in);
  const auto unit = qst::propagate_series(spec, h.kicks, {0.0, 1.0});
  for (int k = 0; k <= h.kicks; ++k) {
    tab.times.push_back(k * spec.tau);
    Eigen::VectorXd row;
    if (h.qdp_site != 0 && k >= h.qdp_kick) {
      const auto r = qst::qdp_and_detect(spec, h.qdp_site, h.qdp_kick, k, in);
      row = detector ? r.f : (h.averaged ? r.averaged : r.fidelity);
    } else if (detector) {
      row = Eigen::VectorXd::Zero(spec.n);
    } else {
      row = h.averaged ? qst::harper_fidelity_averaged(unit[static_cast<std::size_t>(k)].amps)
                       : qst::harper_fidelity(free[static_cast<std::size_t>(k)], in);
    }
    tab.values.emplace_back(row.data(), row.data() + row.size());
  }
  nlohmann::json params = {{"n", spec.n}, {"boundary", qst::to_string(spec.boundary)}, {"g", spec.g},
                           {"tau", spec.tau}, {"eta", spec.eta}, {"kicks", h.kicks},
                           {"qdp_site", h.qdp_site}, {"qdp_kick", h.qdp_kick},
                           {"alpha2", std::norm(in.alpha)}, {"averaged", h.averaged}};
  emit(c, detector ? "detector" : "harper", tab, params);
}

std::vector<double> parse_times(const std::string& s) {
  std::vector<double> ts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double t = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad time '" + item + "'");
    ts.push_back(t);
  }
  if (ts.empty()) throw std::invalid_argument("empty time list");
  return ts;
}

int print_report(const qst::CheckReport& rep, const std::string& title) {
  std::cout << title << "  tolerance " << qst::format_number(rep.tolerance) << '\n';
  for (const auto& e : rep.entries)
    std::cout << "  " << e.label << "  t=" << qst::format_number(e.t) << "  max|dev|=" << qst::format_number(e.deviation)
              << '\n';
  std::cout << (rep.passed() ? "ok" : "FAILED") << "  max|dev|=" << qst::format_number(rep.max_deviation()) << '\n';
  return rep.passed() ? kOk : kNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum state transfer through spin chains"};
  app.require_subcommand(1);
  app.set_config("--config", "", "file of key = value lines; flags given on the command line take precedence");
  Common c;
  app.add_option("--n", c.n, "number of sites")->capture_default_str();
  app.add_option("--boundary", c.boundary, "open|closed|semi-infinite")->capture_default_str();
  app.add_option("--j", c.j, "coupling J")->capture_default_str();
  app.add_option("--delta", c.delta, "anisotropy Delta")->capture_default_str();
  app.add_option("--model", c.model, "heisenberg|bare-hopping")->capture_default_str();
  app.add_option("--out", c.out, "output CSV (a .meta.json sidecar is written next to it); stdout if omitted");
  app.add_option("--threads", c.threads, "worker threads (results do not depend on it)");
  app.add_option("--tol", c.tol, "tolerance for quadrature and checks")->capture_default_str();
  app.add_flag_function("--version", [](std::int64_t) {
    std::cout << "qst " << qst::kVersion << " convention " << qst::convention_hash() << '\n';
    throw CLI::Success();
  }, "print version and convention hash");

  Grid grid;
  Qdp q;
  Harper h;
  bool oracle_unitary = false, oracle_projective = false;
  std::string times = "0.5,1,2,5";

  auto* fid = app.add_subcommand("fidelity", "Bloch-averaged fidelity of free evolution");
  add_grid(fid, grid);

  auto* diff = app.add_subcommand("qdp-diff", "fidelity change from a projective measurement at (m, t0)");
  add_grid(diff, grid);
  add_event(diff, q);
  diff->add_flag("--absolute", q.absolute, "print the interrupted fidelity instead of the difference");

  auto* uni = app.add_subcommand("unitary-qdp", "fidelity change from a local gate at (m, t0)");
  add_grid(uni, grid);
  add_event(uni, q);
  add_gate(uni, q);
  uni->add_flag("--absolute", q.absolute, "print the interrupted fidelity instead of the difference");

  auto* split = app.add_subcommand("two-magnon-split", "two-magnon contribution, bound or scattering part");
  add_grid(split, grid);
  add_event(split, q);
  add_gate(split, q);
  split->add_option("--part", q.part, "bound|scattering")->capture_default_str();

  auto* harper = app.add_subcommand("harper", "kicked Harper transfer fidelity");
  add_harper(harper, h);
  harper->add_flag("--averaged", h.averaged, "Bloch-averaged instead of the --alpha2 input");

  auto* det = app.add_subcommand("detector", "kicked Harper detector function x_tilde - x");
  add_harper(det, h);

  auto* orc = app.add_subcommand("oracle-check", "compare fidelity profiles against exact diagonalization (N <= 12)");
  add_event(orc, q);
  add_gate(orc, q);
  orc->add_flag("--projective", oracle_projective, "projective interruption");
  orc->add_flag("--unitary", oracle_unitary, "gate interruption");
  orc->add_option("--times", times, "comma-separated readout times")->capture_default_str();

  auto* cal = app.add_subcommand("calibrate", "one-magnon propagators against exact diagonalization");
  cal->add_option("--times", times, "comma-separated times")->capture_default_str();

  for (auto* sub : {fid, diff, uni, split, harper, det, orc, cal}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*fid) run_grid(c, grid, nullptr, qst::Scenario::free, "fidelity");
    if (*diff)
      run_grid(c, grid, &q, q.absolute ? qst::Scenario::projective_qdp : qst::Scenario::difference, "qdp-diff");
    if (*uni)
      run_grid(c, grid, &q, q.absolute ? qst::Scenario::unitary_qdp : qst::Scenario::unitary_difference, "unitary-qdp");
    if (*split) {
      const auto part = qst::two_magnon_part_from_string(q.part);
      if (part == qst::TwoMagnonPart::total) throw std::invalid_argument("--part must be bound or scattering");
      run_grid(c, grid, &q, part == qst::TwoMagnonPart::bound ? qst::Scenario::split_bound : qst::Scenario::split_scattering,
               "two-magnon-split");
    }
    if (*harper) run_harper(c, h, false);
    if (*det) run_harper(c, h, true);
    if (*orc) {
      if (oracle_projective && oracle_unitary) throw std::invalid_argument("choose one of --projective and --unitary");
      const auto spec = c.spec();
      qst::QdpEvent ev;
      if (oracle_projective) ev = qst::QdpEvent::projective(q.site, q.t0);
      if (oracle_unitary) ev = qst::QdpEvent::unitary(q.site, q.t0, q.gate());
      if (ev.kind != qst::QdpKind::none) ev.validate(spec);
      const auto rep = qst::oracle_check(spec, ev, parse_times(times), qdp_options(c, q), c.tol);
      return print_report(rep, "oracle-check N=" + std::to_string(spec.n));
    }
    if (*cal) {
      const auto spec = qst::open_chain(12, 0.5, 1.0);
      std::cout << "convention " << qst::convention_hash() << '\n';
      const auto ts = parse_times(times);
      int rc = print_report(qst::calibrate_green1(spec, ts, qst::Green1Method::momentum_sum, 1e-10), "calibrate N=12 open");
      rc = std::max(rc, print_report(qst::calibrate_green1(spec, ts, qst::Green1Method::bessel, 1e-10), "calibrate N=12 open"));
      return rc;
    }
  } catch (const qst::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const qst::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  }
  return kOk;
}
