#include "bulksurf/model_file.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bulksurf/format.hpp"

namespace bulksurf {

SimConfig SimSettings::config() const {
  SimConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.max_halvings = max_halvings;
  c.blowup_threshold = blowup_threshold;
  c.record_every = record_every;
  c.lp_orders = lp_orders;
  c.rng_seed = seed;
  return c;
}

SimMeshes SimSettings::meshes(int n) const {
  if (n == 1) return make_interval_meshes(nx, length);
  return make_disk_meshes(nr, ntheta, R);
}

std::map<std::string, double> ModelSpec::parameter_map() const {
  return {params.begin(), params.end()};
}

ReactionSystem ModelSpec::build() const {
  ReactionSystem sys;
  sys.n = n;
  sys.m1 = m1;
  sys.m2 = m2;
  sys.d = d;
  sys.delta = delta;
  sys.bulk_names = bulk_names.empty() ? default_names("u", m1) : bulk_names;
  sys.surface_names = surface_names.empty() ? default_names("v", m2) : surface_names;
  auto pm = parameter_map();
  auto all = sys.all_names();
  for (const auto& e : F) sys.F.push_back(parse_expression(e, sys.bulk_names, pm));
  for (const auto& e : G) sys.G.push_back(parse_expression(e, all, pm));
  for (const auto& e : H) sys.H.push_back(parse_expression(e, all, pm));
  sys.A = A;
  sys.mass_weights = mass_weights;
  sys.mass_constants = mass_constants;
  sys.validate();
  return sys;
}

InitialData ModelSpec::initial_data() const {
  InitialData ic;
  ic.u = ic_u;
  ic.v = ic_v;
  ic.parameters = parameter_map();
  return ic;
}

ModelFileError::ModelFileError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + msg), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const { throw ModelFileError(source_, line, msg); }

  double number(const Entry& e) const {
    double v = 0.0;
    const std::string s = trim(e.value);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(e.line, "expected a number, got '" + s + "'");
    return v;
  }

  long integer(const Entry& e) const {
    long v = 0;
    const std::string s = trim(e.value);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) fail(e.line, "expected an integer, got '" + s + "'");
    return v;
  }

  std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    for (const auto& item : split_list(e.value)) out.push_back(number({item, e.line}));
    return out;
  }

  std::vector<std::string> names(const Entry& e) const {
    auto out = split_list(e.value);
    for (const auto& s : out) {
      if (!is_identifier(s)) fail(e.line, "invalid species name '" + s + "'");
    }
    return out;
  }

 private:
  std::string source_;
};

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"system", {"n", "m1", "m2", "d", "delta", "bulk_names", "surface_names"}},
      {"mass", {"a", "b", "L", "K"}},
      {"theorem", {"lambda", "cmr", "a", "b"}},
      {"sim", {"dt", "t_end", "nr", "ntheta", "R", "nx", "length", "seed", "lp_orders", "record_every",
               "blowup_threshold", "max_halvings"}},
  };
  return keys;
}

}  // namespace

ModelSpec parse_model_text(const std::string& text, const std::string& source) {
  Reader rd(source);
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::vector<std::pair<std::string, Entry>> params;
  std::vector<std::pair<std::vector<double>, int>> matrix_rows;
  std::set<std::string> seen_sections;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') rd.fail(lineno, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {"system", "params", "reactions", "matrixA", "mass", "theorem", "ic", "sim"};
      if (!known.count(section)) rd.fail(lineno, "unknown section [" + section + "]");
      if (!seen_sections.insert(section).second) rd.fail(lineno, "duplicate section [" + section + "]");
      continue;
    }
    if (section.empty()) rd.fail(lineno, "content before the first section header");
    if (section == "matrixA") {
      matrix_rows.emplace_back(rd.numbers({line, lineno}), lineno);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) rd.fail(lineno, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    Entry entry{trim(line.substr(eq + 1)), lineno};
    if (entry.value.empty()) rd.fail(lineno, "empty value for '" + key + "'");
    if (section == "params") {
      if (!is_identifier(key)) rd.fail(lineno, "invalid parameter name '" + key + "'");
      for (const auto& [k, e] : params) {
        if (k == key) rd.fail(lineno, "duplicate parameter '" + key + "'");
      }
      params.emplace_back(key, entry);
      continue;
    }
    auto allowed = allowed_keys().find(section);
    if (allowed != allowed_keys().end() && !allowed->second.count(key)) {
      rd.fail(lineno, "unknown key '" + key + "' in [" + section + "]");
    }
    if (!sections[section].emplace(key, entry).second) rd.fail(lineno, "duplicate key '" + key + "'");
  }

  ModelSpec spec;
  auto& sys = sections["system"];
  auto require = [&](const std::string& key) -> const Entry& {
    auto it = sys.find(key);
    if (it == sys.end()) rd.fail(0, "[system] lacks required key '" + key + "'");
    return it->second;
  };
  spec.n = static_cast<int>(rd.integer(require("n")));
  spec.m1 = static_cast<int>(rd.integer(require("m1")));
  spec.m2 = static_cast<int>(rd.integer(require("m2")));
  if (spec.n < 1) rd.fail(require("n").line, "n must be >= 1");
  if (spec.m1 < 1) rd.fail(require("m1").line, "m1 must be >= 1");
  if (spec.m2 < 0) rd.fail(require("m2").line, "m2 must be >= 0");
  if (spec.n == 1 && spec.m2 != 0) rd.fail(require("m2").line, "n = 1 requires m2 = 0");
  spec.d = rd.numbers(require("d"));
  if (static_cast<int>(spec.d.size()) != spec.m1) rd.fail(require("d").line, "d needs m1 entries");
  if (spec.m2 > 0) {
    spec.delta = rd.numbers(require("delta"));
    if (static_cast<int>(spec.delta.size()) != spec.m2) rd.fail(require("delta").line, "delta needs m2 entries");
  } else if (sys.count("delta")) {
    rd.fail(sys["delta"].line, "delta given but m2 = 0");
  }
  if (sys.count("bulk_names")) {
    spec.bulk_names = rd.names(sys["bulk_names"]);
    if (static_cast<int>(spec.bulk_names.size()) != spec.m1) rd.fail(sys["bulk_names"].line, "bulk_names needs m1 entries");
  }
  if (sys.count("surface_names")) {
    spec.surface_names = rd.names(sys["surface_names"]);
    if (static_cast<int>(spec.surface_names.size()) != spec.m2) rd.fail(sys["surface_names"].line, "surface_names needs m2 entries");
  }
  std::vector<std::string> bulk = spec.bulk_names.empty() ? default_names("u", spec.m1) : spec.bulk_names;
  std::vector<std::string> surf = spec.surface_names.empty() ? default_names("v", spec.m2) : spec.surface_names;
  std::vector<std::string> all = bulk;
  all.insert(all.end(), surf.begin(), surf.end());
  std::set<std::string> reserved(all.begin(), all.end());
  if (reserved.size() != all.size()) rd.fail(0, "species names must be distinct");

  for (const auto& [k, e] : params) {
    if (reserved.count(k)) rd.fail(e.line, "parameter '" + k + "' shadows a species name");
    if (k == "pos") rd.fail(e.line, "'pos' is reserved");
    spec.params.emplace_back(k, rd.number(e));
  }
  const auto pm = spec.parameter_map();

  auto& reactions = sections["reactions"];
  for (const auto& [key, e] : reactions) {
    bool ok = key.size() > 1 && (key[0] == 'F' || key[0] == 'G' || key[0] == 'H');
    long idx = 0;
    if (ok) {
      auto res = std::from_chars(key.data() + 1, key.data() + key.size(), idx);
      ok = res.ec == std::errc() && res.ptr == key.data() + key.size() && idx >= 1;
      long limit = key[0] == 'H' ? spec.m2 : spec.m1;
      if (ok && idx > limit) rd.fail(e.line, "reaction '" + key + "' exceeds the species count");
    }
    if (!ok) rd.fail(e.line, "unknown key '" + key + "' in [reactions]");
  }
  auto expression = [&](char kind, int idx, const std::vector<std::string>& vars) {
    std::string key = std::string(1, kind) + std::to_string(idx);
    auto it = reactions.find(key);
    if (it == reactions.end()) rd.fail(0, "[reactions] lacks '" + key + "'");
    try {
      parse_expression(it->second.value, vars, pm);
    } catch (const ParseError& err) {
      rd.fail(it->second.line, key + ": " + err.what());
    }
    return it->second.value;
  };
  for (int i = 1; i <= spec.m1; ++i) spec.F.push_back(expression('F', i, bulk));
  for (int i = 1; i <= spec.m1; ++i) spec.G.push_back(expression('G', i, all));
  for (int j = 1; j <= spec.m2; ++j) spec.H.push_back(expression('H', j, all));

  if (!matrix_rows.empty()) {
    const int m = spec.m1 + spec.m2;
    if (static_cast<int>(matrix_rows.size()) != m) rd.fail(matrix_rows.back().second, "[matrixA] needs m1 + m2 rows");
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i) {
      const auto& [row, line] = matrix_rows[i];
      if (static_cast<int>(row.size()) != m) rd.fail(line, "[matrixA] row needs m1 + m2 entries");
      for (int j = 0; j < m; ++j) A(i, j) = row[j];
    }
    try {
      validate_matrix_A(A, m);
    } catch (const std::invalid_argument& err) {
      rd.fail(matrix_rows.front().second, err.what());
    }
    spec.A = A;
  }

  if (sections.count("mass")) {
    auto& mass = sections["mass"];
    if (mass.count("a") || mass.count("b")) {
      if (!mass.count("a")) rd.fail(mass.begin()->second.line, "[mass] needs both a and b");
      MassWeights w;
      w.a = rd.numbers(mass["a"]);
      if (static_cast<int>(w.a.size()) != spec.m1) rd.fail(mass["a"].line, "a needs m1 entries");
      if (spec.m2 > 0) {
        if (!mass.count("b")) rd.fail(mass["a"].line, "[mass] needs both a and b");
        w.b = rd.numbers(mass["b"]);
        if (static_cast<int>(w.b.size()) != spec.m2) rd.fail(mass["b"].line, "b needs m2 entries");
      }
      spec.mass_weights = w;
    }
    if (mass.count("L") || mass.count("K")) {
      if (!mass.count("L") || !mass.count("K")) rd.fail(mass.begin()->second.line, "[mass] needs both L and K");
      spec.mass_constants = MassConstants{rd.number(mass["L"]), rd.number(mass["K"])};
    }
  }
  if (sections.count("theorem")) {
    auto& th = sections["theorem"];
    if (th.count("lambda")) spec.theorem.lambda = rd.number(th["lambda"]);
    if (th.count("cmr")) spec.theorem.cmr = rd.number(th["cmr"]);
    if (th.count("a")) spec.theorem.a = rd.number(th["a"]);
    if (th.count("b")) spec.theorem.b = rd.number(th["b"]);
    if (spec.theorem.a.has_value() != spec.theorem.b.has_value()) rd.fail(th.begin()->second.line, "[theorem] needs both a and b");
  }
  if (sections.count("ic")) {
    auto& ic = sections["ic"];
    std::map<std::string, std::string> u_by, v_by;
    for (const auto& [key, e] : ic) {
      bool ok = false;
      for (int i = 1; i <= spec.m1 && !ok; ++i) ok = key == "u" + std::to_string(i);
      for (int j = 1; j <= spec.m2 && !ok; ++j) ok = key == "v" + std::to_string(j);
      if (!ok) rd.fail(e.line, "unknown key '" + key + "' in [ic]");
      try {
        ScalarExpr(e.value, {"x", "y", "r", "theta"}, pm);
      } catch (const ParseError& err) {
        rd.fail(e.line, key + ": " + err.what());
      }
    }
    for (int i = 1; i <= spec.m1; ++i) {
      auto it = ic.find("u" + std::to_string(i));
      spec.ic_u.push_back(it == ic.end() ? "1" : it->second.value);
    }
    for (int j = 1; j <= spec.m2; ++j) {
      auto it = ic.find("v" + std::to_string(j));
      spec.ic_v.push_back(it == ic.end() ? "0.1" : it->second.value);
    }
  }
  if (sections.count("sim")) {
    auto& s = sections["sim"];
    SimSettings st;
    if (s.count("dt")) st.dt = rd.number(s["dt"]);
    if (s.count("t_end")) st.t_end = rd.number(s["t_end"]);
    if (s.count("nr")) st.nr = static_cast<int>(rd.integer(s["nr"]));
    if (s.count("ntheta")) st.ntheta = static_cast<int>(rd.integer(s["ntheta"]));
    if (s.count("R")) st.R = rd.number(s["R"]);
    if (s.count("nx")) st.nx = static_cast<int>(rd.integer(s["nx"]));
    if (s.count("length")) st.length = rd.number(s["length"]);
    if (s.count("seed")) st.seed = static_cast<std::uint64_t>(rd.integer(s["seed"]));
    if (s.count("record_every")) st.record_every = static_cast<int>(rd.integer(s["record_every"]));
    if (s.count("blowup_threshold")) st.blowup_threshold = rd.number(s["blowup_threshold"]);
    if (s.count("max_halvings")) st.max_halvings = static_cast<int>(rd.integer(s["max_halvings"]));
    if (s.count("lp_orders")) {
      st.lp_orders.clear();
      for (const auto& item : split_list(s["lp_orders"].value)) {
        st.lp_orders.push_back(static_cast<int>(rd.integer({item, s["lp_orders"].line})));
      }
    }
    try {
      st.config().validate();
    } catch (const std::invalid_argument& err) {
      rd.fail(s.begin()->second.line, err.what());
    }
    spec.sim = st;
  }
  try {
    spec.build();
  } catch (const std::exception& err) {
    rd.fail(0, err.what());
  }
  return spec;
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelFileError(path, 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str(), path);
}

namespace {

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

std::string join_names(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

}  // namespace

std::string serialize_model(const ModelSpec& spec) {
  std::ostringstream os;
  os << "[system]\n";
  os << "n = " << spec.n << "\nm1 = " << spec.m1 << "\nm2 = " << spec.m2 << "\n";
  os << "d = " << join_numbers(spec.d) << "\n";
  if (spec.m2 > 0) os << "delta = " << join_numbers(spec.delta) << "\n";
  if (!spec.bulk_names.empty()) os << "bulk_names = " << join_names(spec.bulk_names) << "\n";
  if (!spec.surface_names.empty()) os << "surface_names = " << join_names(spec.surface_names) << "\n";
  if (!spec.params.empty()) {
    os << "\n[params]\n";
    for (const auto& [k, v] : spec.params) os << k << " = " << format_double(v) << "\n";
  }
  os << "\n[reactions]\n";
  for (std::size_t i = 0; i < spec.F.size(); ++i) os << "F" << i + 1 << " = " << spec.F[i] << "\n";
  for (std::size_t i = 0; i < spec.G.size(); ++i) os << "G" << i + 1 << " = " << spec.G[i] << "\n";
  for (std::size_t j = 0; j < spec.H.size(); ++j) os << "H" << j + 1 << " = " << spec.H[j] << "\n";
  if (spec.A) {
    os << "\n[matrixA]\n";
    for (Eigen::Index i = 0; i < spec.A->rows(); ++i) {
      std::vector<double> row(spec.A->cols());
      for (Eigen::Index j = 0; j < spec.A->cols(); ++j) row[j] = (*spec.A)(i, j);
      os << join_numbers(row) << "\n";
    }
  }
  if (spec.mass_weights || spec.mass_constants) {
    os << "\n[mass]\n";
    if (spec.mass_weights) {
      os << "a = " << join_numbers(spec.mass_weights->a) << "\n";
      if (spec.m2 > 0) os << "b = " << join_numbers(spec.mass_weights->b) << "\n";
    }
    if (spec.mass_constants) {
      os << "L = " << format_double(spec.mass_constants->L) << "\nK = " << format_double(spec.mass_constants->K) << "\n";
    }
  }
  const auto& th = spec.theorem;
  if (th.lambda || th.cmr || th.a) {
    os << "\n[theorem]\n";
    if (th.lambda) os << "lambda = " << format_double(*th.lambda) << "\n";
    if (th.cmr) os << "cmr = " << format_double(*th.cmr) << "\n";
    if (th.a) os << "a = " << format_double(*th.a) << "\nb = " << format_double(*th.b) << "\n";
  }
  if (!spec.ic_u.empty() || !spec.ic_v.empty()) {
    os << "\n[ic]\n";
    for (std::size_t i = 0; i < spec.ic_u.size(); ++i) os << "u" << i + 1 << " = " << spec.ic_u[i] << "\n";
    for (std::size_t j = 0; j < spec.ic_v.size(); ++j) os << "v" << j + 1 << " = " << spec.ic_v[j] << "\n";
  }
  if (spec.sim) {
    const auto& s = *spec.sim;
    os << "\n[sim]\n";
    os << "dt = " << format_double(s.dt) << "\nt_end = " << format_double(s.t_end) << "\n";
    if (spec.n >= 2) {
      os << "nr = " << s.nr << "\nntheta = " << s.ntheta << "\nR = " << format_double(s.R) << "\n";
    } else {
      os << "nx = " << s.nx << "\nlength = " << format_double(s.length) << "\n";
    }
    os << "seed = " << s.seed << "\n";
    std::string orders;
    for (std::size_t q = 0; q < s.lp_orders.size(); ++q) orders += (q ? ", " : "") + std::to_string(s.lp_orders[q]);
    os << "lp_orders = " << orders << "\n";
    os << "record_every = " << s.record_every << "\n";
    os << "blowup_threshold = " << format_double(s.blowup_threshold) << "\n";
    os << "max_halvings = " << s.max_halvings << "\n";
  }
  return os.str();
}

}  // namespace bulksurf
