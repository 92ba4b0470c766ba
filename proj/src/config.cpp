#include "qcl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace qcl {

namespace {

[[noreturn]] void fail(const std::string& name, int line, const std::string& message) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + message);
}

[[noreturn]] void fail(const std::string& name, const std::string& message) {
  throw ConfigError(name + ": " + message);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> tokens_of(const std::string& value) {
  std::istringstream stream(value);
  std::vector<std::string> out;
  for (std::string tok; stream >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
T parse_number(const std::string& name, int line, const std::string& token) {
  T value{};
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end)
    fail(name, line, "cannot parse number '" + token + "'");
  return value;
}

bool parse_bool(const std::string& name, int line, const std::string& token) {
  if (token == "true") return true;
  if (token == "false") return false;
  fail(name, line, "expected true or false, got '" + token + "'");
}

// Flat row-major list of re im pairs; the count must be 2 k^2 for square k.
Eigen::MatrixXcd parse_matrix(const std::string& name, int line, const std::string& value) {
  const std::vector<std::string> toks = tokens_of(value);
  if (toks.empty() || toks.size() % 2 != 0)
    fail(name, line, "matrix needs an even count of re im entries");
  const auto k = static_cast<Eigen::Index>(std::lround(std::sqrt(double(toks.size()) / 2.0)));
  if (2 * k * k != static_cast<Eigen::Index>(toks.size()))
    fail(name, line, "matrix entry count is not 2 k^2 for square k");
  Eigen::MatrixXcd m(k, k);
  for (Eigen::Index i = 0; i < k * k; ++i)
    m(i / k, i % k) = cxd(parse_number<double>(name, line, toks[2 * i]),
                          parse_number<double>(name, line, toks[2 * i + 1]));
  return m;
}

ModelKind parse_model_kind(const std::string& name, int line, const std::string& v) {
  if (v == "central_spin") return ModelKind::central_spin;
  if (v == "random_bath") return ModelKind::random_bath;
  if (v == "custom") return ModelKind::custom;
  if (v == "closed") return ModelKind::closed;
  fail(name, line, "unknown model kind '" + v + "'");
}

TargetKind parse_target_kind(const std::string& name, int line, const std::string& v) {
  if (v == "random") return TargetKind::random;
  if (v == "identity") return TargetKind::identity;
  if (v == "explicit") return TargetKind::explicit_matrix;
  fail(name, line, "unknown target kind '" + v + "'");
}

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::central_spin: return "central_spin";
    case ModelKind::random_bath: return "random_bath";
    case ModelKind::custom: return "custom";
    case ModelKind::closed: return "closed";
  }
  return "unknown";
}

// Keys meaningful for each model kind; anything else set in [model] is an error.
bool key_applies(ModelKind kind, const std::string& key) {
  if (key == "kind" || key == "t_final" || key == "intervals") return true;
  switch (kind) {
    case ModelKind::central_spin: return key == "q_b" || key == "couplings";
    case ModelKind::random_bath: return key == "n_b";
    case ModelKind::custom:
      return key == "n_a" || key == "n_b" || key == "h0" || key == "control";
    case ModelKind::closed: return key == "n_a" || key == "h0" || key == "control";
  }
  return false;
}

void validate(const std::string& name, const ExperimentConfig& cfg,
              const std::set<std::string>& model_keys) {
  const ModelSection& m = cfg.model;
  for (const std::string& key : model_keys)
    if (!key_applies(m.kind, key))
      fail(name, "key '" + key + "' does not apply to model kind '" +
                     std::string(to_string(m.kind)) + "'");
  if (!(m.t_final > 0.0)) fail(name, "t_final must be > 0");
  if (m.intervals < 1) fail(name, "intervals must be >= 1");
  switch (m.kind) {
    case ModelKind::central_spin:
      if (m.q_b < 1) fail(name, "q_b must be >= 1");
      if (m.couplings.size() != 0 && m.couplings.size() != m.q_b)
        fail(name, "couplings must list one value per bath spin");
      break;
    case ModelKind::random_bath:
      if (m.n_b < 1) fail(name, "n_b must be >= 1");
      break;
    case ModelKind::custom:
    case ModelKind::closed:
      if (m.n_a < 1) fail(name, "n_a must be >= 1");
      if (m.kind == ModelKind::custom && m.n_b < 1) fail(name, "n_b must be >= 1");
      if (m.h0.size() == 0) fail(name, "custom model requires h0");
      if (m.controls.empty()) fail(name, "custom model requires at least one control");
      break;
  }
  if (cfg.target.kind == TargetKind::explicit_matrix && cfg.target.matrix.size() == 0)
    fail(name, "explicit target requires matrix");
  if (cfg.target.kind != TargetKind::explicit_matrix && cfg.target.matrix.size() != 0)
    fail(name, "target matrix given but kind is not explicit");
  if (cfg.run.seeds.empty()) fail(name, "seeds must not be empty");
  if (cfg.run.jobs < 1) fail(name, "jobs must be >= 1");
  if (!(cfg.run.c0_amplitude >= 0.0)) fail(name, "c0_amplitude must be >= 0");
  if (cfg.rankscan.draws < 1) fail(name, "draws must be >= 1");
  if (!(cfg.rankscan.amplitude > 0.0)) fail(name, "amplitude must be > 0");
  try {
    cfg.ascent.validate();
  } catch (const std::invalid_argument& e) {
    fail(name, e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& name) {
  ExperimentConfig cfg;
  std::istringstream stream(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen_sections;
  std::set<std::string> seen_keys;
  std::set<std::string> model_keys;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text_line = trim(raw);
    if (text_line.empty()) continue;
    if (text_line.front() == '[') {
      if (text_line.back() != ']') fail(name, line, "unterminated section header");
      section = trim(text_line.substr(1, text_line.size() - 2));
      if (section != "model" && section != "target" && section != "optimizer" &&
          section != "run" && section != "rankscan")
        fail(name, line, "unknown section [" + section + "]");
      if (!seen_sections.insert(section).second)
        fail(name, line, "duplicate section [" + section + "]");
      continue;
    }
    const auto eq = text_line.find('=');
    if (eq == std::string::npos) fail(name, line, "expected key = value");
    if (section.empty()) fail(name, line, "key outside any section");
    const std::string key = trim(text_line.substr(0, eq));
    const std::string value = trim(text_line.substr(eq + 1));
    if (key.empty()) fail(name, line, "empty key");
    if (value.empty()) fail(name, line, "empty value for key '" + key + "'");
    // 'control' may repeat to list several control Hamiltonians.
    if (!(section == "model" && key == "control") &&
        !seen_keys.insert(section + "." + key).second)
      fail(name, line, "duplicate key '" + key + "' in [" + section + "]");

    if (section == "model") {
      model_keys.insert(key);
      if (key == "kind") cfg.model.kind = parse_model_kind(name, line, value);
      else if (key == "q_b") cfg.model.q_b = parse_number<int>(name, line, value);
      else if (key == "couplings") {
        const auto toks = tokens_of(value);
        cfg.model.couplings.resize(static_cast<Eigen::Index>(toks.size()));
        for (std::size_t i = 0; i < toks.size(); ++i)
          cfg.model.couplings(static_cast<Eigen::Index>(i)) =
              parse_number<double>(name, line, toks[i]);
      } else if (key == "n_b") cfg.model.n_b = parse_number<int>(name, line, value);
      else if (key == "n_a") cfg.model.n_a = parse_number<int>(name, line, value);
      else if (key == "t_final") cfg.model.t_final = parse_number<double>(name, line, value);
      else if (key == "intervals") cfg.model.intervals = parse_number<int>(name, line, value);
      else if (key == "h0") cfg.model.h0 = parse_matrix(name, line, value);
      else if (key == "control") cfg.model.controls.push_back(parse_matrix(name, line, value));
      else fail(name, line, "unknown key '" + key + "' in [model]");
    } else if (section == "target") {
      if (key == "kind") cfg.target.kind = parse_target_kind(name, line, value);
      else if (key == "matrix") cfg.target.matrix = parse_matrix(name, line, value);
      else fail(name, line, "unknown key '" + key + "' in [target]");
    } else if (section == "optimizer") {
      if (key == "gamma0") cfg.ascent.gamma0 = parse_number<double>(name, line, value);
      else if (key == "grow") cfg.ascent.grow = parse_number<double>(name, line, value);
      else if (key == "shrink") cfg.ascent.shrink = parse_number<double>(name, line, value);
      else if (key == "max_iters") cfg.ascent.max_iters = parse_number<int>(name, line, value);
      else if (key == "max_rejects_in_row")
        cfg.ascent.max_rejects_in_row = parse_number<int>(name, line, value);
      else if (key == "improvement_floor")
        cfg.ascent.improvement_floor = parse_number<double>(name, line, value);
      else if (key == "record_gradient_spectra")
        cfg.ascent.record_gradient_spectra = parse_bool(name, line, value);
      else if (key == "rank_tolerance")
        cfg.ascent.rank_tolerance = parse_number<double>(name, line, value);
      else fail(name, line, "unknown key '" + key + "' in [optimizer]");
    } else if (section == "run") {
      if (key == "seeds") {
        cfg.run.seeds.clear();
        for (const std::string& tok : tokens_of(value))
          cfg.run.seeds.push_back(parse_number<std::uint64_t>(name, line, tok));
      } else if (key == "out_dir") cfg.run.out_dir = value;
      else if (key == "emit_trace") cfg.run.emit_trace = parse_bool(name, line, value);
      else if (key == "emit_spectra") cfg.run.emit_spectra = parse_bool(name, line, value);
      else if (key == "emit_controls") cfg.run.emit_controls = parse_bool(name, line, value);
      else if (key == "c0") {
        if (value == "zero") cfg.run.c0 = StartKind::zero;
        else if (value == "random") cfg.run.c0 = StartKind::random;
        else fail(name, line, "c0 must be zero or random");
      } else if (key == "c0_amplitude")
        cfg.run.c0_amplitude = parse_number<double>(name, line, value);
      else if (key == "jobs") cfg.run.jobs = parse_number<int>(name, line, value);
      else fail(name, line, "unknown key '" + key + "' in [run]");
    } else {  // rankscan
      if (key == "mode") {
        if (value == "random_controls") cfg.rankscan.mode = ScanMode::random_controls;
        else if (value == "trajectory") cfg.rankscan.mode = ScanMode::trajectory;
        else fail(name, line, "mode must be random_controls or trajectory");
      } else if (key == "draws") cfg.rankscan.draws = parse_number<int>(name, line, value);
      else if (key == "amplitude")
        cfg.rankscan.amplitude = parse_number<double>(name, line, value);
      else fail(name, line, "unknown key '" + key + "' in [rankscan]");
    }
  }
  validate(name, cfg, model_keys);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

ControlSystem build_system(const ExperimentConfig& cfg, std::uint64_t seed) {
  const ModelSection& m = cfg.model;
  const Horizon horizon{m.intervals, m.t_final};
  try {
    switch (m.kind) {
      case ModelKind::central_spin: {
        const Eigen::VectorXd couplings =
            m.couplings.size() > 0 ? m.couplings : Eigen::VectorXd::Ones(m.q_b);
        return build_central_spin(m.q_b, couplings, horizon);
      }
      case ModelKind::random_bath:
        return build_random_bath(m.n_b, seed, horizon);
      case ModelKind::custom:
        return build_custom(m.h0, m.controls, m.n_a, m.n_b, horizon);
      case ModelKind::closed:
        return build_custom(m.h0, m.controls, m.n_a, 1, horizon);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  throw ConfigError("model: unknown kind");
}

TargetSpec build_target(const ExperimentConfig& cfg, const ControlSystem& sys,
                        std::uint64_t seed) {
  switch (cfg.target.kind) {
    case TargetKind::random:
      return random_target(sys.n_a, seed + kTargetSeedOffset);
    case TargetKind::identity:
      return TargetSpec{Eigen::MatrixXcd::Identity(sys.n_a, sys.n_a)};
    case TargetKind::explicit_matrix: {
      if (cfg.target.matrix.rows() != sys.n_a)
        throw ConfigError("target: matrix dimension does not match n_a");
      if (!is_unitary(cfg.target.matrix)) throw ConfigError("target: matrix is not unitary");
      return TargetSpec{cfg.target.matrix};
    }
  }
  throw ConfigError("target: unknown kind");
}

ControlVector initial_controls(const ExperimentConfig& cfg, const ControlSystem& sys,
                               std::uint64_t seed) {
  const Eigen::Index total = Eigen::Index(sys.horizon.intervals) * sys.n_controls();
  if (cfg.run.c0 == StartKind::zero) return ControlVector::Zero(total);
  Rng rng(seed + kStartSeedOffset);
  return cfg.run.c0_amplitude * rng.gaussian_vector(total);
}

}  // namespace qcl
