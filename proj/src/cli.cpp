#include "hybrid/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/SVD>

#include "hybrid/hafnian.hpp"
#include "hybrid/json_io.hpp"
#include "hybrid/parallel.hpp"
#include "hybrid/pipeline.hpp"
#include "hybrid/sampling.hpp"

#ifndef HYBRID_SAMPLER_VERSION
#define HYBRID_SAMPLER_VERSION "0.0.0"
#endif

namespace hybrid::cli {

namespace {

using io::json;
using Clock = std::chrono::steady_clock;

struct ToleranceFlag {
  const char* name;
  double Tolerances::*field;
};

constexpr ToleranceFlag kToleranceFlags[] = {
    {"hermiticity", &Tolerances::hermiticity},     {"orthonormality", &Tolerances::orthonormality},
    {"stability", &Tolerances::stability},         {"degeneracy", &Tolerances::degeneracy},
    {"symplectic", &Tolerances::symplectic},       {"reconstruction", &Tolerances::reconstruction},
    {"squeeze-clamp", &Tolerances::squeeze_clamp}, {"c-symmetry", &Tolerances::c_symmetry},
    {"imaginary", &Tolerances::imaginary},         {"negative-clamp", &Tolerances::negative_clamp},
    {"correlator", &Tolerances::correlator},       {"moments", &Tolerances::moments},
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string format_complex(cplx z) {
  const double im = z.imag() == 0.0 ? 0.0 : z.imag();  // drop the sign of -0
  return format_short(z.real()) + (im < 0.0 ? " - " : " + ") + format_short(std::abs(im)) + "i";
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

CountsVector parse_counts(const std::string& text) {
  CountsVector counts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int value = std::stoi(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      if (value < 0) throw ConfigError("counts", "entries must be nonnegative");
      counts.push_back(value);
    } catch (const std::logic_error&) {
      throw ConfigError("counts", "'" + item + "' is not an integer");
    }
  }
  if (counts.empty()) throw ConfigError("counts", "empty counts list");
  return counts;
}

struct Context {
  std::string subcommand;
  std::string config_path;
  std::string config_bytes;
  Tolerances tol;
  json parameters = json::object();
  std::optional<std::uint64_t> seed;
  Clock::time_point start = Clock::now();

  SystemConfig load() {
    config_bytes = io::read_file(config_path);
    return load_config(config_bytes);
  }

  json manifest() const {
    json m;
    m["tool"] = "hybrid-sampler";
    m["version"] = HYBRID_SAMPLER_VERSION;
    m["subcommand"] = subcommand;
    m["config_digest"] = config_bytes.empty() ? json(nullptr) : json("fnv1a64:" + hex64(fnv1a(config_bytes)));
    m["parameters"] = parameters;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["threads"] = worker_count();
    m["simd"] = std::string(simd::to_string(simd::active_kernels().isa));
    m["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start).count();
    return m;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("out", "cannot write " + path);
  f << text;
}

json blocks_json(const CouplingBlocks& b) {
  return {{"eps_a", io::matrix_to_json(b.eps_a)},       {"eps_ph", io::matrix_to_json(b.eps_ph)},
          {"chi_phph", io::matrix_to_json(b.chi_phph)}, {"chi_pha", io::matrix_to_json(b.chi_pha)},
          {"chit_aa", io::matrix_to_json(b.chit_aa)},   {"chit_pha", io::matrix_to_json(b.chit_pha)}};
}

json stability_json(const StabilityReport& s) {
  json eig = json::array();
  for (cplx z : s.symplectic_eigenvalues) eig.push_back(io::complex_to_json(z));
  return {{"positive_definite", s.positive_definite},
          {"min_eigenvalue", s.min_eigenvalue},
          {"bdg_positive_definite", s.bdg_positive_definite},
          {"bdg_min_eigenvalue", s.bdg_min_eigenvalue},
          {"symplectic_eigenvalues", eig},
          {"max_imaginary", s.max_imaginary},
          {"min_quasiparticle_energy", s.min_quasiparticle_energy},
          {"stable", s.stable}};
}

std::string distribution_csv(const OutcomeDistribution& dist) {
  std::string csv;
  for (const std::string& label : dist.labels) csv += label + ",";
  csv += "probability\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    for (int m : dist.counts_at(i)) csv += std::to_string(m) + ",";
    csv += format_double(dist.probabilities[i]) + "\n";
  }
  return csv;
}

json distribution_meta(const OutcomeDistribution& dist, const GaussianState& g) {
  return {{"cutoff", dist.cutoff},
          {"labels", dist.labels},
          {"outcomes", dist.size()},
          {"captured_mass", dist.captured_mass},
          {"fingerprint", hex64(dist.fingerprint)},
          {"clamped_negative", dist.clamped},
          {"min_raw_probability", dist.min_raw_probability},
          {"recommended_cutoff", recommended_cutoff(g)}};
}

// Writes a tabular payload either to files (with sidecar metadata and
// manifest) or to the streams.
void emit_table(Context& ctx, const std::string& csv, const json& meta, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
  if (!out_path.empty()) {
    write_text(out_path, csv);
    write_text(out_path + ".meta.json", meta.dump(2) + "\n");
    write_text(out_path + ".manifest.json", ctx.manifest().dump(2) + "\n");
    out << "wrote " << out_path << "\n";
  } else {
    out << csv;
    err << json{{"meta", meta}, {"manifest", ctx.manifest()}}.dump() << "\n";
  }
}

struct Check {
  std::vector<std::string> lines;
  bool ok = true;

  void add(bool pass, const std::string& name, const std::string& detail) {
    lines.push_back(std::string(pass ? "PASS " : "FAIL ") + name + ": " + detail);
    ok = ok && pass;
  }
  void skip(const std::string& name, const std::string& why) { lines.push_back("SKIP " + name + ": " + why); }
};

int run_validate(Context& ctx, int cutoff_request, std::ostream& out) {
  const SystemConfig cfg = ctx.load();
  const Tolerances& tol = ctx.tol;
  Check report;

  Pipeline p = run_pipeline(cfg, Stage::Hamiltonian, tol);
  if (p.basis) {
    const double res = p.basis->orthonormality_residual();
    report.add(res < 1e-8, "orthonormality", "Gram residual " + format_short(res));
  }
  const double herm = std::max(max_abs(p.blocks.eps_a - p.blocks.eps_a.adjoint()),
                               max_abs(p.blocks.chit_aa - p.blocks.chit_aa.transpose()));
  report.add(herm < tol.hermiticity, "block symmetry", "residual " + format_short(herm));
  const double h_herm = p.hamiltonian->bdg_hermiticity_residual();
  report.add(h_herm < tol.hermiticity, "hamiltonian hermiticity", "residual " + format_short(h_herm));
  report.add(p.stability->stable, "stability",
             "min quasiparticle energy " + format_short(p.stability->min_quasiparticle_energy) +
                 ", max |Im| " + format_short(p.stability->max_imaginary));
  if (!p.stability->stable) {
    for (const auto& line : report.lines) out << line << "\n";
    out << "RESULT FAIL\n";
    return kExitFailure;
  }

  p = run_pipeline(cfg, Stage::State, tol);
  const BogoliubovDecomposition& dec = *p.decomposition;
  const int M = dec.modes();
  const double symp = symplectic_residual(dec);
  report.add(symp < tol.symplectic, "symplectic", "residual " + format_short(symp));
  const double diag = diagonalization_residual(*p.hamiltonian, dec);
  report.add(diag < 1e-9, "diagonalization", "residual " + format_short(diag));

  const BlochMessiahFactors& f = *p.factors;
  report.add(f.reconstruction_residual < tol.reconstruction, "bloch-messiah reconstruction",
             "residual " + format_short(f.reconstruction_residual));
  const double unitary = std::max(max_abs(f.V.adjoint() * f.V - CMatrix::Identity(M, M)),
                                  max_abs(f.W.adjoint() * f.W - CMatrix::Identity(M, M)));
  report.add(unitary < 1e-10, "unitarity", "residual " + format_short(unitary));
  const RVector singular = Eigen::JacobiSVD<CMatrix>(dec.B).singularValues();
  const double svd_gap = (singular - RVector(f.r.array().sinh())).cwiseAbs().maxCoeff();
  report.add(svd_gap < 1e-9, "squeeze spectrum", "max r " + format_short(f.r.size() ? f.r(0) : 0.0) +
                                                     ", |sinh r - sv(B)| " + format_short(svd_gap));
  if (p.basis) {
    const ModeFunctions mf = mode_functions(f, p.basis, dec);
    const double norm_gap = (mf.bosonic_norms().array() - 1.0).abs().maxCoeff();
    report.add(norm_gap < 1e-8, "mode-function normalization", "residual " + format_short(norm_gap));
  }

  const GaussianState& g = *p.state;
  const double corr = max_abs(g.G - correlators_from_occupations(dec, cfg.temperature));
  report.add(corr < tol.correlator, "covariance vs correlators", "residual " + format_short(corr));
  const CMatrix normal = g.G.topLeftCorner(M, M);
  const double min_normal =
      Eigen::SelfAdjointEigenSolver<CMatrix>(0.5 * (normal + normal.adjoint()), Eigen::EigenvaluesOnly)
          .eigenvalues()(0);
  report.add(min_normal > -1e-10, "normal block PSD", "min eigenvalue " + format_short(min_normal));
  report.add(g.c_asymmetry < tol.c_symmetry, "base matrix symmetry", "residual " + format_short(g.c_asymmetry));
  const CMatrix ratio = g.G * (CMatrix::Identity(2 * M, 2 * M) + g.G).inverse();
  const double top_sv = Eigen::JacobiSVD<CMatrix>(ratio).singularValues()(0);
  report.add(top_sv < 1.0, "spectral bound", "largest singular value " + format_short(top_sv));

  const double vacuum = outcome_probability(g, CountsVector(static_cast<std::size_t>(M), 0), tol);
  report.add(vacuum > 0.0 && vacuum <= 1.0 + 1e-12, "vacuum probability", format_short(vacuum));

  int cutoff = cutoff_request;
  if (cutoff < 0) {
    // Largest cutoff whose worst-case per-outcome work, (sum_m (m+1)^2)^M,
    // stays near 2e7, but never below the recommended value.
    auto work = [M](int K) { return std::pow((K + 1.0) * (K + 2.0) * (2.0 * K + 3.0) / 6.0, M); };
    cutoff = 1;
    while (cutoff < 60 && work(cutoff + 1) <= 2e7) ++cutoff;
    cutoff = std::max(cutoff, recommended_cutoff(g));
  }
  while (cutoff > 0 && std::pow(cutoff + 1.0, M) > static_cast<double>(kMaxOutcomes)) --cutoff;
  ctx.parameters["cutoff"] = cutoff;
  const OutcomeDistribution dist = enumerate_distribution(g, cutoff, tol);
  report.add(dist.captured_mass <= 1.0 + 1e-9, "captured mass",
             format_short(dist.captured_mass) + " at cutoff " + std::to_string(cutoff) + ", " +
                 std::to_string(dist.clamped) + " clamped");
  if (dist.captured_mass > 1.0 - 1e-8) {
    const RVector gap = distribution_means(dist) - mean_occupations(g);
    const double worst = gap.size() ? gap.cwiseAbs().maxCoeff() : 0.0;
    report.add(worst < tol.moments, "moments", "max |enumerated - mean occupation| " + format_short(worst));
  } else {
    report.skip("moments", "captured mass below 1 - 1e-8; raise --cutoff");
  }

  for (const auto& line : report.lines) out << line << "\n";
  out << (report.ok ? "RESULT PASS\n" : "RESULT FAIL\n");
  return report.ok ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid photon-atom Gaussian boson sampler", "hybrid-sampler"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HYBRID_SAMPLER_VERSION);

  Context ctx;
  std::string config_path, matrix_path, counts_text, out_path;
  int cutoff = -1;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  bool photons_only = false;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration JSON")->required();
    for (const ToleranceFlag& t : kToleranceFlags) {
      sub->add_option(std::string("--tol-") + t.name, ctx.tol.*(t.field), "tolerance override")
          ->capture_default_str();
    }
  };

  CLI::App* build = app.add_subcommand("build", "coupling blocks, Hamiltonian and stability report");
  add_config(build);
  CLI::App* decompose = app.add_subcommand("decompose", "quasiparticle energies and Bloch-Messiah factors");
  add_config(decompose);
  CLI::App* cov = app.add_subcommand("covariance", "covariance G, base matrix C and mean occupations");
  add_config(cov);
  CLI::App* pdf = app.add_subcommand("pdf", "enumerate the outcome distribution");
  add_config(pdf);
  pdf->add_option("--cutoff", cutoff, "per-mode count cutoff K")->required()->check(CLI::NonNegativeNumber);
  pdf->add_flag("--photons-only", photons_only, "marginalize over atom modes");
  pdf->add_option("--out", out_path, "CSV output file (metadata and manifest written alongside)");
  CLI::App* prob = app.add_subcommand("prob", "probability of one outcome");
  add_config(prob);
  prob->add_option("--counts", counts_text, "comma-separated counts N1,..,q1,..")->required();
  CLI::App* samp = app.add_subcommand("sample", "draw seeded samples");
  add_config(samp);
  samp->add_option("--cutoff", cutoff, "per-mode count cutoff K")->required()->check(CLI::NonNegativeNumber);
  samp->add_option("--n", n_samples, "number of samples")->required();
  samp->add_option("--seed", seed, "64-bit seed")->required();
  samp->add_option("--out", out_path, "CSV output file (manifest written alongside)");
  CLI::App* haf = app.add_subcommand("haf", "hafnian of a symmetric matrix");
  haf->add_option("--matrix", matrix_path, "matrix JSON")->required();
  CLI::App* validate = app.add_subcommand("validate", "run the invariant suite");
  add_config(validate);
  validate->add_option("--cutoff", cutoff, "cutoff for the enumeration checks (default: recommended)");
  CLI::App* scatter = app.add_subcommand("scatter-time", "scattering-time estimate");
  add_config(scatter);

  std::vector<const char*> argv{"hybrid-sampler"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << HYBRID_SAMPLER_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  ctx.subcommand = app.get_subcommands().front()->get_name();
  ctx.config_path = config_path;
  ctx.parameters["config"] = config_path;

  try {
    if (build->parsed()) {
      const Pipeline p = run_pipeline(ctx.load(), Stage::Hamiltonian, ctx.tol);
      json doc{{"partition", {{"M_a", p.blocks.partition().atoms}, {"M_ph", p.blocks.partition().photons}}},
               {"blocks", blocks_json(p.blocks)},
               {"H", io::matrix_to_json(p.hamiltonian->H)},
               {"hermiticity_residual", p.hamiltonian->bdg_hermiticity_residual()},
               {"stability", stability_json(*p.stability)}};
      if (p.basis) doc["orthonormality_residual"] = p.basis->orthonormality_residual();
      doc["manifest"] = ctx.manifest();
      out << doc.dump(2) << "\n";
      return kExitOk;
    }
    if (decompose->parsed()) {
      const Pipeline p = run_pipeline(ctx.load(), Stage::Factors, ctx.tol);
      const BlochMessiahFactors& f = *p.factors;
      json doc{{"energies", io::vector_to_json(p.decomposition->energies)},
               {"r", io::vector_to_json(f.r)},
               {"max_r", f.r.size() ? f.r(0) : 0.0},
               {"V", io::matrix_to_json(f.V)},
               {"W", io::matrix_to_json(f.W)},
               {"A", io::matrix_to_json(p.decomposition->A)},
               {"B", io::matrix_to_json(p.decomposition->B)},
               {"symplectic_residual", symplectic_residual(*p.decomposition)},
               {"reconstruction_residual", f.reconstruction_residual}};
      doc["manifest"] = ctx.manifest();
      out << doc.dump(2) << "\n";
      return kExitOk;
    }
    if (cov->parsed()) {
      const Pipeline p = run_pipeline(ctx.load(), Stage::State, ctx.tol);
      const GaussianState& g = *p.state;
      json doc{{"temperature", g.temperature},
               {"G", io::matrix_to_json(g.G)},
               {"C", io::matrix_to_json(g.C)},
               {"c_asymmetry", g.c_asymmetry},
               {"log_norm", g.log_norm},
               {"mean_occupations", io::vector_to_json(mean_occupations(g))},
               {"recommended_cutoff", recommended_cutoff(g)}};
      doc["manifest"] = ctx.manifest();
      out << doc.dump(2) << "\n";
      return kExitOk;
    }
    if (pdf->parsed()) {
      const SystemConfig cfg = ctx.load();
      if (photons_only && cfg.M_ph == 0) throw ConfigError("M_ph", "--photons-only needs at least one photon mode");
      ctx.parameters["cutoff"] = cutoff;
      ctx.parameters["photons_only"] = photons_only;
      const Pipeline p = run_pipeline(cfg, Stage::State, ctx.tol);
      OutcomeDistribution dist = enumerate_distribution(*p.state, cutoff, ctx.tol);
      if (photons_only) dist = marginalize(dist, photon_positions(dist, cfg.partition()));
      emit_table(ctx, distribution_csv(dist), distribution_meta(dist, *p.state), out_path, out, err);
      return kExitOk;
    }
    if (prob->parsed()) {
      const SystemConfig cfg = ctx.load();
      const CountsVector counts = parse_counts(counts_text);
      if (static_cast<int>(counts.size()) != cfg.modes()) {
        throw ConfigError("counts", "expected " + std::to_string(cfg.modes()) + " entries (M_a + M_ph), got " +
                                        std::to_string(counts.size()));
      }
      ctx.parameters["counts"] = counts;
      const Pipeline p = run_pipeline(cfg, Stage::State, ctx.tol);
      out << format_short(outcome_probability(*p.state, counts, ctx.tol)) << "\n";
      err << ctx.manifest().dump() << "\n";
      return kExitOk;
    }
    if (samp->parsed()) {
      ctx.parameters["cutoff"] = cutoff;
      ctx.parameters["n"] = n_samples;
      ctx.seed = seed;
      const Pipeline p = run_pipeline(ctx.load(), Stage::State, ctx.tol);
      const OutcomeDistribution dist = enumerate_distribution(*p.state, cutoff, ctx.tol);
      const std::vector<CountsVector> draws = sample(dist, n_samples, seed);
      std::string csv;
      for (std::size_t j = 0; j < dist.labels.size(); ++j) csv += (j ? "," : "") + dist.labels[j];
      csv += "\n";
      for (const CountsVector& s : draws) {
        for (std::size_t j = 0; j < s.size(); ++j) csv += (j ? "," : "") + std::to_string(s[j]);
        csv += "\n";
      }
      emit_table(ctx, csv, distribution_meta(dist, *p.state), out_path, out, err);
      return kExitOk;
    }
    if (haf->parsed()) {
      ctx.parameters = {{"matrix", matrix_path}};
      const CMatrix X = io::load_matrix_file(matrix_path);
      out << format_complex(hafnian(X)) << "\n";
      if (X.rows() <= kNaiveMaxDim) {
        const cplx naive = hafnian_naive(X);
        const cplx power = hafnian_powertrace(X);
        const double rel = std::abs(naive - power) / std::max(std::abs(naive), 1e-300);
        out << "naive: " << format_complex(naive) << "\n";
        out << "powertrace: " << format_complex(power) << "\n";
        out << "agreement: " << (std::abs(naive - power) <= std::max(1e-9 * std::abs(naive), 1e-12) ? "yes" : "no")
            << " (relative difference " << format_short(std::abs(naive) > 0.0 ? rel : std::abs(power)) << ")\n";
      }
      err << ctx.manifest().dump() << "\n";
      return kExitOk;
    }
    if (validate->parsed()) {
      const int code = run_validate(ctx, cutoff, out);
      err << ctx.manifest().dump() << "\n";
      return code;
    }
    if (scatter->parsed()) {
      out << format_short(estimate_scattering_time(ctx.load())) << "\n";
      err << ctx.manifest().dump() << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hybrid::cli
