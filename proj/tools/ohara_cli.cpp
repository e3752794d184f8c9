// ohara: command-line front end.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ohara/io.hpp"
#include "ohara/ohara.hpp"

using namespace ohara;
using nlohmann::json;

namespace {

struct Config {
  std::string curve;
  double alpha = 2.0, p = 1.0;
  std::optional<double> beta;
  std::size_t M = 256;
  std::size_t band = 2;
  std::string phi = "synthetic:3", psi = "synthetic:3";
  std::string out;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Config& c, bool fields) {
  cmd->add_option("--curve", c.curve, "curve file (JSON or CSV) or synthetic:circle|ellipse|wobble|random")->required();
  cmd->add_option("--alpha", c.alpha, "alpha");
  cmd->add_option("--p", c.p, "p");
  cmd->add_option("--beta", c.beta, "Hoelder weight exponent in (0, 1]");
  cmd->add_option("--M", c.M, "arclength samples (even, >= 16)");
  cmd->add_option("--band", c.band, "diagonal correction half-width in cells");
  cmd->add_option("--out", c.out, "output path");
  cmd->add_option("--seed", c.seed, "seed for synthetic fields");
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  if (fields) {
    cmd->add_option("--phi", c.phi, "field file or synthetic:K");
    cmd->add_option("--psi", c.psi, "field file or synthetic:K");
  }
}

ClosedCurve load_curve(const Config& c) {
  const std::string& s = c.curve;
  if (s.rfind("synthetic:", 0) == 0) {
    const std::string kind = s.substr(10);
    if (kind == "circle") return ClosedCurve::from_samples(synthetic::circle(64), true, c.M);
    if (kind == "ellipse") return ClosedCurve::from_samples(synthetic::ellipse(256, 2.0, 1.0), true, c.M);
    if (kind == "wobble") return ClosedCurve::from_samples(synthetic::wobbly_circle(256, 0.05, 3), true, c.M);
    if (kind == "random") return ClosedCurve::from_samples(synthetic::random_curve(c.seed, 64), true, c.M);
    throw ValidationError("unknown synthetic curve: " + kind);
  }
  const io::CurveFile f = io::read_curve(s);
  return ClosedCurve::from_samples(f.points, f.closed, c.M);
}

Field load_field(const std::string& spec, const ClosedCurve& curve, std::uint64_t seed) {
  if (spec.rfind("synthetic:", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(spec.substr(10));
    } catch (const std::exception&) {
      throw ValidationError("synthetic field needs a mode count: " + spec);
    }
    require(k >= 1 && static_cast<std::size_t>(k) < curve.size() / 4, "synthetic field mode count out of range");
    return synthetic::random_field(seed, curve, k);
  }
  return io::read_field(spec, curve);
}

EnergyParams params(const Config& c) { return EnergyParams::make(c.alpha, c.p, c.beta); }

QuadratureOptions quad(const Config& c) {
  QuadratureOptions q;
  q.band = c.band;
  q.threads = c.threads;
  return q;
}

void emit(const json& j, const Config& c) {
  std::cout << j.dump(2) << "\n";
  if (!c.out.empty()) io::write_text(c.out, j.dump(2) + "\n");
}

int check_flags(const std::vector<std::pair<std::size_t, std::size_t>>& flagged) {
  if (flagged.empty()) return 0;
  std::cerr << "error: numerical: " << flagged.size() << " flagged pairs\n";
  return 2;
}

json result_json(const QuadratureResult& r) {
  return {{"value", r.value}, {"error_estimate", r.error_estimate}, {"offband", r.offband},
          {"band_part", r.band_part}, {"flagged_pairs", r.flagged.size()}};
}

// Fixed seeds keep the suites reproducible.
struct Instance {
  ClosedCurve curve;
  Field phi, psi;
};

Instance random_instance(std::uint64_t seed, std::size_t M) {
  ClosedCurve c = ClosedCurve::from_samples(synthetic::random_curve(seed, 64), true, M);
  Field a = synthetic::random_field(seed * 7919 + 1, c, 3);
  Field b = synthetic::random_field(seed * 7919 + 2, c, 3);
  return {std::move(c), std::move(a), std::move(b)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

json suite_fd(const EnergyParams& e, const Config& c, bool& ok) {
  const Instance in = random_instance(c.seed, c.M);
  const Perturbation a(in.curve, in.phi), b(in.curve, in.psi);
  const PerturbationPair pp(a, b);
  const QuadratureOptions q = quad(c);
  const double g = first_variation(in.curve, a, e, q).value;
  const double g_fd = fd_energy_gradient(in.curve, in.phi, e, 0.0, q).richardson;
  double pointwise = 0.0;
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<std::size_t> pick(0, in.curve.size() - 1);
  for (int t = 0; t < 20; ++t) {
    std::size_t i = pick(rng), j = pick(rng);
    const long k = std::abs(static_cast<long>(i) - static_cast<long>(j));
    const long M = static_cast<long>(in.curve.size());
    if (std::min<long>(k, M - k) <= 4 || 2 * k == M) {  // D has a kink at the antipode
      --t;
      continue;
    }
    const double gv = first_variation_density(a, pair_frame(in.curve, i, j), e).sum();
    const double fd = fd_first_variation_density(in.curve, in.phi, i, j, e).richardson;
    pointwise = std::max(pointwise, std::abs(gv - fd) / std::max(std::abs(fd), 1e-8 * in.curve.length()));
  }
  const SecondVariation h = full_second_variation(in.curve, pp, e, q);
  const double h_fd = fd_energy_hessian(in.curve, in.phi, in.psi, e, 0.0, q).richardson;
  const double gap1 = std::max(rel(g, g_fd), pointwise);
  const double gap2 = rel(h.total(), h_fd);
  ok = ok && gap1 <= 1e-6 && gap2 <= 1e-4;
  return {{"alpha", e.alpha}, {"p", e.p}, {"first_variation", g}, {"fd_first_variation", g_fd},
          {"max_relative_fd_gap", gap1}, {"second_variation", h.total()}, {"integral_of_H", h.pointwise.value},
          {"cut_locus_term", h.cut_locus}, {"fd_second_variation", h_fd}, {"relative_second_gap", gap2}};
}

json suite_limits(const EnergyParams& e, const Config& c, bool& ok) {
  json reports = json::array();
  double worst = 0.0;
  const ClosedCurve circle = ClosedCurve::from_samples(synthetic::circle(64), true, c.M);
  const ClosedCurve ellipse = ClosedCurve::from_samples(synthetic::ellipse(256, 2.0, 1.0), true, c.M);
  for (const ClosedCurve* cv : {&circle, &ellipse}) {
    const Field fa = synthetic::random_field(c.seed, *cv, 3), fb = synthetic::random_field(c.seed + 1, *cv, 3);
    const Perturbation a(*cv, fa), b(*cv, fb);
    const PerturbationPair pp(a, b);
    for (LimitKind k : {LimitKind::m_alpha, LimitKind::r1, LimitKind::r2, LimitKind::s1, LimitKind::s2, LimitKind::s3,
                        LimitKind::s4, LimitKind::s5})
      for (std::size_t s = 0; s < 8; ++s) {
        const LimitReport r = diagonal_limit(pp, e, s * cv->size() / 8, k);
        worst = std::max(worst, r.relative_gap);
      }
  }
  ok = ok && worst <= 1e-4;
  return {{"alpha", e.alpha}, {"p", e.p}, {"max_relative_gap", worst}};
}

json suite_circle(const EnergyParams& e, const Config& c, bool& ok) {
  const double ref = circle_energy_reference(e.alpha, e.p);
  const double E = energy(ClosedCurve::from_samples(synthetic::circle(64), true, c.M), e, quad(c)).value;
  ok = ok && rel(E, ref) <= 1e-8;
  return {{"alpha", e.alpha}, {"p", e.p}, {"energy", E}, {"reference", ref}, {"relative_gap", rel(E, ref)}};
}

json suite_chain(const EnergyParams& e, const Config& c, bool& ok) {
  const Instance in = random_instance(c.seed, c.M);
  const Perturbation a(in.curve, in.phi), b(in.curve, in.psi);
  const ChainReport r = holder_chain_check(in.curve, PerturbationPair(a, b), e, quad(c));
  json entries = json::array();
  for (const auto& x : r.entries) entries.push_back({{"term", x.label}, {"lhs", x.lhs}, {"rhs", x.rhs}});
  ok = ok && r.holds();
  return {{"alpha", e.alpha}, {"p", e.p}, {"holds", r.holds()}, {"entries", entries}};
}

int run(int argc, char** argv) {
  CLI::App app{"O'Hara (alpha,p) knot energies of closed curves"};
  app.require_subcommand(1);
  Config c;
  std::string kind = "M", which = "all", suite = "all";
  std::optional<std::size_t> at;
  std::optional<double> sigma, q_exp, radius;
  std::size_t steps = 50, modes = 8;
  bool free_length = false;

  auto* energy_cmd = app.add_subcommand("energy", "energy and its error estimate");
  add_common(energy_cmd, c, false);
  auto* grad_cmd = app.add_subcommand("gradient", "first variation against --phi");
  add_common(grad_cmd, c, true);
  auto* hess_cmd = app.add_subcommand("hessian-form", "second variation against --phi, --psi");
  add_common(hess_cmd, c, true);
  auto* dens_cmd = app.add_subcommand("density", "pair grid export (M, G or H), optionally weighted by --beta");
  add_common(dens_cmd, c, true);
  dens_cmd->add_option("--kind", kind, "M, G or H")->check(CLI::IsMember({"M", "G", "H"}));
  auto* lim_cmd = app.add_subcommand("limits", "diagonal-limit reports");
  add_common(lim_cmd, c, true);
  lim_cmd->add_option("--which", which, "limit name or all");
  lim_cmd->add_option("--at", at, "grid index of s (default: 8 equally spaced points)");
  auto* norm_cmd = app.add_subcommand("norms", "seminorm reports of phi' (or tau without --phi)");
  add_common(norm_cmd, c, true);
  norm_cmd->add_option("--sigma", sigma, "Gagliardo smoothness (default (alpha p - 1)/(2p))");
  norm_cmd->add_option("--q", q_exp, "Gagliardo exponent (default 2p)");
  norm_cmd->add_option("--R", radius, "local modulus radius (default 8L/M)");
  auto* flow_cmd = app.add_subcommand("flow", "L2 gradient descent with backtracking");
  add_common(flow_cmd, c, false);
  flow_cmd->add_option("--steps", steps, "accepted steps to attempt");
  flow_cmd->add_option("--modes", modes, "trigonometric modes per coordinate in the gradient");
  flow_cmd->add_flag("--free-length", free_length, "do not hold the length fixed");
  auto* verify_cmd = app.add_subcommand("verify", "oracle suites");
  verify_cmd->add_option("--curve", c.curve, "unused; suites build their own curves");
  verify_cmd->add_option("--alpha", c.alpha, "alpha");
  verify_cmd->add_option("--p", c.p, "p");
  verify_cmd->add_option("--M", c.M, "arclength samples");
  verify_cmd->add_option("--band", c.band, "diagonal correction half-width");
  verify_cmd->add_option("--seed", c.seed, "instance seed");
  verify_cmd->add_option("--threads", c.threads, "worker threads");
  verify_cmd->add_option("--out", c.out, "output path");
  verify_cmd->add_option("--suite", suite, "fd, limits, circle, chain or all")
      ->check(CLI::IsMember({"fd", "limits", "circle", "chain", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 1;
  }

  const EnergyParams e = params(c);
  const QuadratureOptions q = quad(c);

  if (*verify_cmd) {
    bool ok = true;
    json out;
    if (suite == "fd" || suite == "all") out["fd"] = suite_fd(e, c, ok);
    if (suite == "limits" || suite == "all") out["limits"] = suite_limits(e, c, ok);
    if (suite == "circle" || suite == "all") out["circle"] = suite_circle(e, c, ok);
    if (suite == "chain" || suite == "all") out["chain"] = suite_chain(e, c, ok);
    out["pass"] = ok;
    emit(out, c);
    if (!ok) std::cerr << "error: numerical: verification gap above tolerance\n";
    return ok ? 0 : 2;
  }

  const ClosedCurve curve = load_curve(c);

  if (*energy_cmd) {
    const QuadratureResult r = energy(curve, e, q);
    json j = result_json(r);
    j["energy"] = r.value;
    j["M"] = curve.size();
    j["length"] = curve.length();
    emit(j, c);
    return check_flags(r.flagged);
  }
  if (*grad_cmd) {
    const Perturbation a(curve, load_field(c.phi, curve, c.seed));
    const QuadratureResult r = first_variation(curve, a, e, q);
    json j = result_json(r);
    j["first_variation"] = r.value;
    emit(j, c);
    return check_flags(r.flagged);
  }
  if (*hess_cmd) {
    const Perturbation a(curve, load_field(c.phi, curve, c.seed));
    const Perturbation b(curve, load_field(c.psi, curve, c.seed + 1));
    const SecondVariation r = full_second_variation(curve, PerturbationPair(a, b), e, q);
    json j = result_json(r.pointwise);
    j["integral_of_H"] = r.pointwise.value;
    j["cut_locus_term"] = r.cut_locus;
    j["second_variation"] = r.total();
    j["value"] = r.total();  // band split and error estimate refer to integral_of_H
    emit(j, c);
    return check_flags(r.pointwise.flagged);
  }
  if (*dens_cmd) {
    const GridKind gk = kind == "M" ? GridKind::density : kind == "G" ? GridKind::first_variation
                                                                      : GridKind::second_variation;
    std::optional<Perturbation> a, b;
    std::optional<PerturbationPair> pp;
    if (gk != GridKind::density) a.emplace(curve, load_field(c.phi, curve, c.seed));
    if (gk == GridKind::second_variation) {
      b.emplace(curve, load_field(c.psi, curve, c.seed + 1));
      pp.emplace(*a, *b);
    }
    const PairGrid g = density_grid(curve, e, gk, c.beta, a ? &*a : nullptr, pp ? &*pp : nullptr, q);
    const json summary = io::grid_summary(g);
    std::cout << summary.dump(2) << "\n";
    if (!c.out.empty()) {
      io::write_text(c.out, io::grid_csv(g));
      io::write_text(c.out + ".json", summary.dump(2) + "\n");
    }
    return check_flags(g.flagged);
  }
  if (*lim_cmd) {
    const Perturbation a(curve, load_field(c.phi, curve, c.seed));
    const Perturbation b(curve, load_field(c.psi, curve, c.seed + 1));
    const PerturbationPair pp(a, b);
    std::vector<LimitKind> kinds;
    if (which == "all")
      kinds = {LimitKind::m_alpha, LimitKind::r1, LimitKind::r2, LimitKind::s1, LimitKind::s2,
               LimitKind::s3,      LimitKind::s4, LimitKind::s5, LimitKind::n_tangent, LimitKind::n_derivative};
    else
      kinds = {parse_limit(which)};
    std::vector<std::size_t> points;
    if (at) {
      require(*at < curve.size(), "--at must be a grid index below M");
      points = {*at};
    } else {
      for (std::size_t s = 0; s < 8; ++s) points.push_back(s * curve.size() / 8);
    }
    const double beta = c.beta.value_or(1.0);
    json arr = json::array();
    for (LimitKind k : kinds)
      for (std::size_t s : points) arr.push_back(io::limit_json(diagonal_limit(pp, e, s, k, beta)));
    emit(arr, c);
    return 0;
  }
  if (*norm_cmd) {
    const bool has_phi = norm_cmd->count("--phi") > 0;
    const Field u = has_phi ? load_field(c.phi, curve, c.seed).derivative() : curve.tangents();
    const double sg = sigma.value_or(e.sigma()), qq = q_exp.value_or(2.0 * e.p);
    const double beta = c.beta.value_or(e.beta);
    const double R = radius.value_or(8.0 * curve.length() / static_cast<double>(curve.size()));
    const SeminormReport gag = gagliardo_seminorm(u, sg, qq, q);
    json j = {{"field", has_phi ? "phi'" : "tau"},
              {"sigma", sg},
              {"q", qq},
              {"beta", beta},
              {"gagliardo", gag.value},
              {"gagliardo_error_estimate", gag.error_estimate},
              {"holder", holder_seminorm(u, beta, q).value},
              {"local_modulus", local_modulus(u, beta, R, q).value},
              {"R", R},
              {"lipschitz_sup", lipschitz_sup(u).value},
              {"little_holder", is_little_holder(u, beta)},
              {"sobolev_linf", sobolev_linf_norm(u, sg, qq, q)}};
    if (has_phi) {
      const ProductCheck pc = product_seminorm_check(curve, load_field(c.phi, curve, c.seed), beta, sg, qq, q);
      j["product_check"] = {{"lhs", pc.lhs}, {"rhs", pc.rhs}, {"holds", pc.holds()},
                            {"gagliardo_lhs", pc.gagliardo_lhs}, {"gagliardo_rhs", pc.gagliardo_rhs}};
    }
    emit(j, c);
    return 0;
  }
  if (*flow_cmd) {
    FlowOptions fo;
    fo.modes = modes;
    fo.fix_length = !free_length;
    fo.quadrature = q;
    FlowState st = start_flow(curve, e, fo);
    json snaps = json::array();
    snaps.push_back({{"step", 0}, {"curve", io::curve_json(st.curve)}});
    while (st.step < steps && !st.halted) {
      st = flow_step(std::move(st), e, fo);
      if (!st.halted) snaps.push_back({{"step", st.step}, {"curve", io::curve_json(st.curve)}});
    }
    json j = {{"steps", st.step},
              {"initial_energy", st.energy.front()},
              {"final_energy", st.energy.back()},
              {"length", st.curve.length()},
              {"halted", st.halted}};
    std::cout << j.dump(2) << "\n";
    if (!c.out.empty()) {
      io::write_text(c.out, io::flow_trace_csv(st));
      std::filesystem::path sp(c.out);
      sp.replace_extension();
      io::write_text(sp.string() + "_snapshots.json", json{{"snapshots", snaps}}.dump() + "\n");
    }
    if (st.halted) {
      std::cerr << "error: numerical: " << st.diagnostic << "\n";
      return 2;
    }
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "error: numerical: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: numerical: " << e.what() << "\n";
    return 2;
  }
}
