#include <cmath>
#include <set>

#include "hybrid/json_io.hpp"
#include "hybrid/model.hpp"

namespace hybrid {

namespace {

using io::json;

// Raw direct blocks may carry input rounding; anything worse is a user error.
constexpr double kInputSymmetryTolerance = 1e-8;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "mode",     "M_a",       "M_ph",          "g_a_N0",        "delta_a", "delta_nu",
      "omega_nu", "rabi_drive_amp", "rabi_mode_amp", "mu",      "n_ex",    "temperature",
      "kappa_nu", "omega_r",   "N_atoms",       "grid",          "direct_blocks"};
  return keys;
}

const std::set<std::string>& block_keys() {
  static const std::set<std::string> keys = {"eps_a",   "eps_ph",  "chi_phph",
                                             "chi_pha", "chit_aa", "chit_pha"};
  return keys;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError(prefix + item.key(), "unknown key");
    }
  }
}

double read_real(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "must be finite");
  return x;
}

int read_count(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  const auto n = v.get<long long>();
  if (n < 0) throw ConfigError(key, "must be >= 0");
  if (n > 64) throw ConfigError(key, "more than 64 modes is outside the supported range");
  return static_cast<int>(n);
}

std::vector<double> read_list(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

CMatrix read_block(const json& blocks, const std::string& key, Eigen::Index rows, Eigen::Index cols) {
  const std::string field = "direct_blocks." + key;
  if (!blocks.contains(key)) return CMatrix::Zero(rows, cols);
  CMatrix m = io::matrix_from_json(blocks.at(key), field);
  if (m.size() == 0 && rows * cols == 0) return CMatrix::Zero(rows, cols);
  if (m.rows() != rows || m.cols() != cols) {
    throw ConfigError(field, "expected shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  return m;
}

CouplingBlocks read_direct_blocks(const json& blocks, int M_a, int M_ph) {
  if (!blocks.is_object()) throw ConfigError("direct_blocks", "expected an object");
  reject_unknown(blocks, block_keys(), "direct_blocks.");
  if (M_a > 0 && !blocks.contains("eps_a")) throw ConfigError("direct_blocks.eps_a", "missing key");
  if (M_ph > 0 && !blocks.contains("eps_ph")) throw ConfigError("direct_blocks.eps_ph", "missing key");

  CouplingBlocks b;
  b.eps_a = read_block(blocks, "eps_a", M_a, M_a);
  b.eps_ph = read_block(blocks, "eps_ph", M_ph, M_ph);
  b.chi_phph = read_block(blocks, "chi_phph", M_ph, M_ph);
  b.chi_pha = read_block(blocks, "chi_pha", M_ph, M_a);
  b.chit_aa = read_block(blocks, "chit_aa", M_a, M_a);
  b.chit_pha = read_block(blocks, "chit_pha", M_ph, M_a);

  if (max_abs(b.eps_a - b.eps_a.adjoint()) > kInputSymmetryTolerance) {
    throw ConfigError("direct_blocks.eps_a", "must be Hermitian");
  }
  if (max_abs(b.chi_phph - b.chi_phph.adjoint()) > kInputSymmetryTolerance) {
    throw ConfigError("direct_blocks.chi_phph", "must be Hermitian");
  }
  if (max_abs(b.chit_aa - b.chit_aa.transpose()) > kInputSymmetryTolerance) {
    throw ConfigError("direct_blocks.chit_aa", "must be symmetric");
  }
  for (int i = 0; i < M_ph; ++i) {
    for (int j = 0; j < M_ph; ++j) {
      const cplx e = b.eps_ph(i, j);
      if ((i != j && e != cplx{}) || (i == j && std::abs(e.imag()) > kInputSymmetryTolerance)) {
        throw ConfigError("direct_blocks.eps_ph", "must be a real diagonal matrix");
      }
    }
  }
  b.symmetrize();
  return b;
}

BlockSource read_mode(const json& doc) {
  const json& v = doc.at("mode");
  if (!v.is_string()) throw ConfigError("mode", "expected \"Geometry1D\" or \"DirectBlocks\"");
  const auto s = v.get<std::string>();
  if (s == "Geometry1D") return BlockSource::Geometry1D;
  if (s == "DirectBlocks") return BlockSource::DirectBlocks;
  throw ConfigError("mode", "expected \"Geometry1D\" or \"DirectBlocks\", got \"" + s + "\"");
}

void require(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ConfigError(key, "missing key");
}

void check_length(const std::vector<double>& v, int expected, const std::string& field, bool optional) {
  if (optional && v.empty()) return;
  if (static_cast<int>(v.size()) != expected) {
    throw ConfigError(field, "length " + std::to_string(v.size()) + " does not match M_ph = " +
                                 std::to_string(expected));
  }
}

}  // namespace

std::string_view to_string(BlockSource source) {
  return source == BlockSource::Geometry1D ? "Geometry1D" : "DirectBlocks";
}

void CouplingBlocks::check_dimensions() const {
  const auto Ma = eps_a.rows();
  const auto Mph = eps_ph.rows();
  auto expect = [](const CMatrix& m, Eigen::Index r, Eigen::Index c, const char* name) {
    if (m.rows() != r || m.cols() != c) {
      throw DimensionError(std::string(name) + " has shape " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", expected " + std::to_string(r) + "x" +
                           std::to_string(c));
    }
  };
  expect(eps_a, Ma, Ma, "eps_a");
  expect(eps_ph, Mph, Mph, "eps_ph");
  expect(chi_phph, Mph, Mph, "chi_phph");
  expect(chi_pha, Mph, Ma, "chi_pha");
  expect(chit_aa, Ma, Ma, "chit_aa");
  expect(chit_pha, Mph, Ma, "chit_pha");
}

void CouplingBlocks::symmetrize() {
  eps_a = (0.5 * (eps_a + eps_a.adjoint())).eval();
  eps_ph = (0.5 * (eps_ph + eps_ph.adjoint())).eval();
  chi_phph = (0.5 * (chi_phph + chi_phph.adjoint())).eval();
  chit_aa = (0.5 * (chit_aa + chit_aa.transpose())).eval();
}

void SystemConfig::validate() const {
  if (M_a < 0) throw ConfigError("M_a", "must be >= 0");
  if (M_ph < 0) throw ConfigError("M_ph", "must be >= 0");
  if (M_a + M_ph < 1) throw ConfigError("M_a", "M_a + M_ph must be >= 1");
  if (!std::isfinite(temperature) || temperature < 0.0) {
    throw ConfigError("temperature", "must be finite and >= 0");
  }
  if (!(grid.half_length > 0.0) || !std::isfinite(grid.half_length)) {
    throw ConfigError("grid.half_length", "must be > 0");
  }
  if (grid.points < 16) throw ConfigError("grid.points", "must be >= 16");
  if (delta_a && !(std::abs(*delta_a) > 0.0)) throw ConfigError("delta_a", "|delta_a| must be > 0");
  if (n_ex < 0.0) throw ConfigError("n_ex", "must be >= 0");
  if (N_atoms && *N_atoms < 0.0) throw ConfigError("N_atoms", "must be >= 0");

  const bool geometry = mode == BlockSource::Geometry1D;
  check_length(delta_nu, M_ph, "delta_nu", true);
  check_length(kappa_nu, M_ph, "kappa_nu", true);
  check_length(omega_nu, M_ph, "omega_nu", !geometry);
  check_length(rabi_mode_amp, M_ph, "rabi_mode_amp", !geometry);

  if (geometry) {
    if (direct_blocks) throw ConfigError("direct_blocks", "direct_blocks only valid in DirectBlocks mode");
    if (!delta_a) throw ConfigError("delta_a", "required in Geometry1D mode");
  } else {
    if (!direct_blocks) throw ConfigError("direct_blocks", "required in DirectBlocks mode");
    direct_blocks->check_dimensions();
    if (direct_blocks->partition() != partition()) {
      throw ConfigError("direct_blocks", "block shapes do not match M_a / M_ph");
    }
  }
}

SystemConfig load_config(std::string_view text) {
  const json doc = io::parse_document(text, "configuration");
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  reject_unknown(doc, known_keys(), "");

  for (const char* key : {"mode", "M_a", "M_ph", "temperature"}) require(doc, key);

  SystemConfig cfg;
  cfg.mode = read_mode(doc);
  cfg.M_a = read_count(doc, "M_a");
  cfg.M_ph = read_count(doc, "M_ph");
  cfg.temperature = read_real(doc, "temperature");

  // Mode consistency is checked before anything that depends on the mode.
  if (cfg.mode == BlockSource::Geometry1D && doc.contains("direct_blocks")) {
    throw ConfigError("direct_blocks", "direct_blocks only valid in DirectBlocks mode");
  }
  if (cfg.M_a + cfg.M_ph < 1) throw ConfigError("M_a", "M_a + M_ph must be >= 1");

  if (cfg.mode == BlockSource::Geometry1D) {
    for (const char* key : {"g_a_N0", "delta_a", "omega_nu", "rabi_drive_amp", "rabi_mode_amp", "mu"}) {
      require(doc, key);
    }
  } else {
    require(doc, "direct_blocks");
  }

  if (doc.contains("g_a_N0")) cfg.g_a_N0 = read_real(doc, "g_a_N0");
  if (doc.contains("delta_a")) cfg.delta_a = read_real(doc, "delta_a");
  if (doc.contains("delta_nu")) cfg.delta_nu = read_list(doc, "delta_nu");
  if (doc.contains("omega_nu")) cfg.omega_nu = read_list(doc, "omega_nu");
  if (doc.contains("rabi_drive_amp")) cfg.rabi_drive_amp = read_real(doc, "rabi_drive_amp");
  if (doc.contains("rabi_mode_amp")) cfg.rabi_mode_amp = read_list(doc, "rabi_mode_amp");
  if (doc.contains("mu")) cfg.mu = read_real(doc, "mu");
  if (doc.contains("n_ex")) cfg.n_ex = read_real(doc, "n_ex");
  if (doc.contains("kappa_nu")) cfg.kappa_nu = read_list(doc, "kappa_nu");
  if (doc.contains("omega_r")) cfg.omega_r = read_real(doc, "omega_r");
  if (doc.contains("N_atoms")) cfg.N_atoms = read_real(doc, "N_atoms");

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    if (!g.is_object()) throw ConfigError("grid", "expected an object");
    reject_unknown(g, {"half_length", "points"}, "grid.");
    if (g.contains("half_length")) {
      if (!g.at("half_length").is_number()) throw ConfigError("grid.half_length", "expected a number");
      cfg.grid.half_length = g.at("half_length").get<double>();
    }
    if (g.contains("points")) {
      if (!g.at("points").is_number_integer()) throw ConfigError("grid.points", "expected an integer");
      const auto p = g.at("points").get<long long>();
      if (p < 16) throw ConfigError("grid.points", "must be >= 16");
      if (p > 1'000'000) throw ConfigError("grid.points", "must be <= 1000000");
      cfg.grid.points = static_cast<int>(p);
    }
  }

  if (doc.contains("direct_blocks")) {
    cfg.direct_blocks = read_direct_blocks(doc.at("direct_blocks"), cfg.M_a, cfg.M_ph);
  }

  cfg.validate();
  return cfg;
}

SystemConfig load_config_file(const std::string& path) { return load_config(io::read_file(path)); }

}  // namespace hybrid
