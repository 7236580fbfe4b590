#include "scatter/cli.hpp"

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scatter/acceptance.hpp"
#include "scatter/factorization.hpp"
#include "scatter/io.hpp"
#include "scatter/levinson.hpp"
#include "scatter/parallel.hpp"
#include "scatter/spectrum.hpp"

namespace scatter {

namespace {

struct Args {
  std::vector<std::string> specs;
  std::vector<double> spacings;
  double kmin = 0.0, kmax = 0.0, alpha_max = 0.0;
  int points = 0;
  std::string out, format = "csv";
  std::vector<std::string> tols;
};

/// Tolerance overrides accepted by --tol NAME=VALUE.
struct Tolerances {
  double half = 1e-8;
  double root = 1e-10;
  double null = 1e-6;
  double anchor = 0.1;
  double step = 0.0;
  double phase_step = 0.01;
  double det = 1e-8;
  double grid = 512;
};

Tolerances parse_tolerances(const std::vector<std::string>& items) {
  Tolerances t;
  std::map<std::string, double*> fields{{"half", &t.half},   {"root", &t.root},          {"null", &t.null},
                                        {"anchor", &t.anchor}, {"step", &t.step},        {"phase_step", &t.phase_step},
                                        {"det", &t.det},     {"grid", &t.grid}};
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidSpec, "--tol expects NAME=VALUE, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    const auto it = fields.find(name);
    if (it == fields.end()) throw Error(ErrorKind::InvalidSpec, "unknown tolerance '" + name + "'");
    try {
      std::size_t used = 0;
      *it->second = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::InvalidSpec, "tolerance '" + name + "' is not a number");
    }
  }
  return t;
}

PropagationOptions propagation(const Tolerances& t) {
  PropagationOptions o;
  o.step = t.step;
  o.phase_step = t.phase_step;
  o.det_tolerance = t.det;
  return o;
}

ScanOptions scan_options(const Args& a, const Tolerances& t) {
  ScanOptions s;
  s.alpha_max = a.alpha_max;
  s.root_tolerance = t.root;
  s.null_tolerance = t.null;
  s.grid_points = static_cast<int>(t.grid);
  s.propagation = propagation(t);
  return s;
}

const ValidatedPotential single_spec(const Args& a) {
  if (a.specs.size() != 1) throw Error(ErrorKind::InvalidSpec, "this subcommand takes exactly one --spec");
  return load_spec(a.specs.front());
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidSpec, "--points must be positive");
  if (!(lo > 0.0) || !(hi >= lo)) throw Error(ErrorKind::InvalidSpec, "k range needs 0 < kmin <= kmax");
  std::vector<double> ks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ks[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return ks;
}

std::vector<std::string> amplitude_columns(Index n) {
  std::vector<std::string> cols{"k"};
  for (const char* name : {"rho", "rho_tilde", "tau", "tau_tilde"})
    for (Index i = 1; i <= n; ++i)
      for (Index j = 1; j <= n; ++j) {
        const std::string tag = std::string(name) + "_" + std::to_string(i) + std::to_string(j);
        cols.push_back("re_" + tag);
        cols.push_back("im_" + tag);
      }
  cols.push_back("unitarity");
  return cols;
}

std::vector<double> amplitude_row(const AmplitudeSet& a) {
  std::vector<double> row{a.k};
  for (const CMatrix* m : {&a.rho, &a.rho_tilde, &a.tau, &a.tau_tilde})
    for (Index i = 0; i < m->rows(); ++i)
      for (Index j = 0; j < m->cols(); ++j) {
        row.push_back((*m)(i, j).real());
        row.push_back((*m)(i, j).imag());
      }
  row.push_back(unitarity_residual(s_matrix(a)));
  return row;
}

Table amplitude_table(const std::vector<AmplitudeSet>& sets, Index n) {
  Table t{amplitude_columns(n), {}};
  for (const auto& a : sets) t.rows.push_back(amplitude_row(a));
  return t;
}

int cmd_amplitudes(const Args& a, std::ostream& out) {
  const Tolerances t = parse_tolerances(a.tols);
  const ValidatedPotential p = single_spec(a);
  const auto ks = linear_grid(a.kmin > 0 ? a.kmin : 0.01, a.kmax > 0 ? a.kmax : 10.0, a.points > 0 ? a.points : 200);
  const auto opts = propagation(t);
  const auto sets = parallel_map(ks.size(), [&](std::size_t i) { return amplitudes(p, ks[i], opts); });
  emit(amplitude_table(sets, p.channels()), parse_format(a.format), a.out, out);
  return 0;
}

int cmd_spectrum(const Args& a, std::ostream& out, std::ostream& err) {
  const Tolerances t = parse_tolerances(a.tols);
  const ValidatedPotential p = single_spec(a);
  const Format format = parse_format(a.format);
  const ScanOptions opts = scan_options(a, t);
  const BoundScan scan = find_bound_states(p, opts);
  const HalfBoundInfo half = half_bound_count(p, t.half, opts.propagation);
  for (const auto& w : scan.warnings) err << "warning " << w << '\n';

  int n_bound = 0;
  for (const auto& b : scan.roots) n_bound += b.multiplicity;
  if (format == Format::json) {
    nlohmann::json j;
    j["bound_states"] = nlohmann::json::array();
    for (const auto& b : scan.roots)
      j["bound_states"].push_back({{"alpha", b.alpha}, {"energy", -b.alpha * b.alpha}, {"multiplicity", b.multiplicity}});
    j["n_bound"] = n_bound;
    j["n_half"] = half.count;
    j["channels"] = p.channels();
    j["half_bound_tolerance"] = half.tolerance;
    j["phi_prime_eigenvalues"] = nlohmann::json::array();
    for (Index i = 0; i < half.eigenvalues.size(); ++i)
      j["phi_prime_eigenvalues"].push_back({half.eigenvalues(i).real(), half.eigenvalues(i).imag()});
    out << j.dump(2) << '\n';
  } else {
    Table table{{"alpha", "energy", "multiplicity"}, {}};
    for (const auto& b : scan.roots) table.rows.push_back({b.alpha, -b.alpha * b.alpha, double(b.multiplicity)});
    write_table(table, Format::csv, out);
    out << std::setprecision(17) << "# n_bound=" << n_bound << " n_half=" << half.count << " channels=" << p.channels()
        << '\n';
    out << "# phi_prime_eigenvalues=";
    for (Index i = 0; i < half.eigenvalues.size(); ++i)
      out << (i ? ";" : "") << half.eigenvalues(i).real() << (half.eigenvalues(i).imag() < 0 ? "" : "+")
          << half.eigenvalues(i).imag() << 'i';
    out << " tolerance=" << half.tolerance << '\n';
  }
  if (!a.out.empty()) {
    Table samples{{"alpha", "det", "sigma_ratio"}, {}};
    for (std::size_t i = 0; i < scan.alpha.size(); ++i)
      samples.rows.push_back({scan.alpha[i], scan.det[i], scan.sigma_ratio[i]});
    emit(samples, format, a.out, out);
  }
  return 0;
}

int cmd_levinson(const Args& a, std::ostream& out) {
  const Tolerances t = parse_tolerances(a.tols);
  const ValidatedPotential p = single_spec(a);
  LevinsonOptions opts;
  opts.scan = scan_options(a, t);
  opts.phase.anchor_tolerance = t.anchor;
  opts.phase.propagation = opts.scan.propagation;
  if (a.kmin > 0 || a.kmax > 0 || a.points > 0)
    opts.k_grid = default_k_grid(p.range(), a.points > 0 ? a.points : 2000, a.kmin > 0 ? a.kmin : 1e-3, a.kmax);
  const LevinsonResult r = levinson_check(p, opts);
  if (parse_format(a.format) == Format::json) {
    nlohmann::json j{{"eta0", r.eta0}, {"eta0_over_pi", r.eta0 / kPi}, {"predicted", r.predicted},
                     {"residual", r.residual}, {"n_bound", r.n_bound}, {"n_half", r.n_half}, {"channels", r.channels}};
    out << j.dump(2) << '\n';
  } else {
    out << std::setprecision(17) << "eta0=" << r.eta0 << "\neta0_over_pi=" << r.eta0 / kPi << "\npredicted=" << r.predicted
        << "\nresidual=" << r.residual << "\nn_bound=" << r.n_bound << "\nn_half=" << r.n_half
        << "\nchannels=" << r.channels << '\n';
  }
  return 0;
}

int cmd_phase(const Args& a, std::ostream& out) {
  const Tolerances t = parse_tolerances(a.tols);
  const ValidatedPotential p = single_spec(a);
  PhaseOptions opts;
  opts.anchor_tolerance = t.anchor;
  opts.propagation = propagation(t);
  const auto grid = default_k_grid(p.range(), a.points > 0 ? a.points : 2000, a.kmin > 0 ? a.kmin : 1e-3, a.kmax);
  const PhaseCurve curve = phase_curve(p, grid, opts);
  Table table{{"k", "eta_over_pi"}, {}};
  for (auto it = curve.samples.rbegin(); it != curve.samples.rend(); ++it) table.rows.push_back({it->k, it->eta / kPi});
  emit(table, parse_format(a.format), a.out, out);
  return 0;
}

int cmd_spiral(const Args& a, std::ostream& out) {
  const Tolerances t = parse_tolerances(a.tols);
  const ValidatedPotential p = single_spec(a);
  const auto opts = propagation(t);
  const double kmax = a.kmax > 0 ? a.kmax : 5.0;
  const int n = a.points > 0 ? a.points : 500;
  const auto ks = linear_grid(a.kmin > 0 ? a.kmin : kmax / n, kmax, n);
  const AmplitudeSet zero = threshold_amplitudes(p, kDefaultThresholdKs, opts);
  const auto sets = parallel_map(ks.size(), [&](std::size_t i) { return amplitudes(p, ks[i], opts); });
  Table table{{"k", "re_rho11", "im_rho11"}, {{0.0, zero.rho(0, 0).real(), zero.rho(0, 0).imag()}}};
  for (const auto& s : sets) table.rows.push_back({s.k, s.rho(0, 0).real(), s.rho(0, 0).imag()});
  emit(table, parse_format(a.format), a.out, out);
  return 0;
}

int cmd_compose(const Args& a, std::ostream& out) {
  const Tolerances t = parse_tolerances(a.tols);
  if (a.specs.empty()) throw Error(ErrorKind::InvalidSpec, "compose needs at least one --spec");
  if (a.spacings.size() + 1 != a.specs.size())
    throw Error(ErrorKind::InvalidSpec, "compose needs one --spacing per spec after the first");
  std::vector<ValidatedPotential> pieces;
  std::vector<double> offsets{0.0};
  for (double s : a.spacings) offsets.push_back(offsets.back() + s);
  for (std::size_t i = 0; i < a.specs.size(); ++i) {
    pieces.push_back(load_spec(a.specs[i]));
    if (i > 0) {
      const double prev_hi = offsets[i - 1] + pieces[i - 1].range();
      const double lo = offsets[i] - pieces[i].range();
      if (lo < prev_hi - 1e-12 * std::max(1.0, std::abs(prev_hi)))
        throw Error(ErrorKind::OverlappingCells, "spec " + std::to_string(i) + " overlaps its left neighbour");
    }
    if (pieces[i].channels() != pieces.front().channels())
      throw Error(ErrorKind::InvalidSpec, "all composed specs must have the same channel count");
  }
  const auto ks = linear_grid(a.kmin > 0 ? a.kmin : 0.01, a.kmax > 0 ? a.kmax : 10.0, a.points > 0 ? a.points : 200);
  const auto opts = propagation(t);
  const auto sets = parallel_map(ks.size(), [&](std::size_t i) {
    std::vector<TransferFactor> fs;
    for (std::size_t j = 0; j < pieces.size(); ++j)
      fs.push_back(factor_from_amplitudes(translate_amplitudes(amplitudes(pieces[j], ks[i], opts), offsets[j])));
    return amplitudes_from_factor(compose_factors(fs));
  });
  emit(amplitude_table(sets, pieces.front().channels()), parse_format(a.format), a.out, out);
  return 0;
}

int cmd_selftest(std::ostream& out) {
  bool ok = true;
  for (const auto& r : run_acceptance()) {
    out << format_result(r) << '\n';
    ok = ok && r.pass;
  }
  return ok ? 0 : 2;
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multichannel one-dimensional scattering toolkit"};
  app.require_subcommand(1);
  Args args;

  auto add_common = [&](CLI::App* sub, bool many_specs) {
    auto* spec = sub->add_option("--spec", args.specs, "potential spec file (JSON)");
    if (!many_specs) spec->expected(1);
    sub->add_option("--kmin", args.kmin, "smallest wavenumber");
    sub->add_option("--kmax", args.kmax, "largest wavenumber");
    sub->add_option("--points", args.points, "number of grid points");
    sub->add_option("--out", args.out, "output path (default stdout)");
    sub->add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", args.tols, "tolerance override NAME=VALUE");
  };

  auto* amp = app.add_subcommand("amplitudes", "amplitude matrices over a k grid");
  auto* spec = app.add_subcommand("spectrum", "bound and half-bound states");
  auto* lev = app.add_subcommand("levinson", "Levinson phase check");
  auto* phase = app.add_subcommand("phase", "continuous S-matrix phase eta(k)/pi");
  auto* spiral = app.add_subcommand("spiral", "rho11(k) from threshold to kmax");
  auto* compose = app.add_subcommand("compose", "amplitudes of specs placed side by side");
  auto* self = app.add_subcommand("selftest", "run the acceptance suite");
  for (auto* s : {amp, spec, lev, phase, spiral}) add_common(s, false);
  add_common(compose, true);
  compose->add_option("--spacing", args.spacings, "centre-to-centre distance to the next spec");
  for (auto* s : {spec, lev}) s->add_option("--alpha-max", args.alpha_max, "upper end of the bound-state scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error kind=UsageError message=" << one_line(e.what()) << '\n';
    return 1;
  }

  try {
    if (*amp) return cmd_amplitudes(args, out);
    if (*spec) return cmd_spectrum(args, out, err);
    if (*lev) return cmd_levinson(args, out);
    if (*phase) return cmd_phase(args, out);
    if (*spiral) return cmd_spiral(args, out);
    if (*compose) return cmd_compose(args, out);
    if (*self) return cmd_selftest(out);
  } catch (const Error& e) {
    err << "error kind=" << to_string(e.kind()) << " message=" << one_line(e.what()) << '\n';
    return is_validation_error(e.kind()) ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error kind=Internal message=" << one_line(e.what()) << '\n';
    return 2;
  }
  return 1;
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace scatter
