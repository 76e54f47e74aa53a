#ifndef SCHOTTKY_TOOLS_REPORT_HPP
#define SCHOTTKY_TOOLS_REPORT_HPP

#include <cstdlib>
#include <fstream>
#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <schottky/verify.hpp>

namespace schottky::cli {

using nlohmann::json;

// Exit statuses.
inline constexpr int exit_pass = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numeric = 2;
inline constexpr int exit_failed = 3;

inline const char* config_env = "SCHOTTKY_CONFIG";

inline int exit_code_for(ErrorCode c)
{
  switch (c) {
    case ErrorCode::invalid_argument:
    case ErrorCode::not_symmetric:
    case ErrorCode::not_positive_definite:
    case ErrorCode::singular_input:
    case ErrorCode::zero_matrix:
      return exit_usage;
    default:
      return exit_numeric;
  }
}

inline Real parse_real(const std::string& s)
{
  std::size_t used = 0;
  Real v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "cannot parse number '" + s + "'");
  return v;
}

// Parses "1.5", "-2i", "i", "0.3+1.2i", "1e-3-2.5e-1i".
inline Complex parse_complex(std::string s)
{
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }), s.end());
  if (s.empty() || s.back() != 'i') return {parse_real(s), 0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  const std::string re = split == std::string::npos ? "" : s.substr(0, split);
  std::string im = split == std::string::npos ? s : s.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  return {re.empty() ? 0 : parse_real(re), parse_real(im)};
}

inline std::vector<std::string> split(const std::string& s, char sep = ',')
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

inline json to_json(Complex c) { return json::array({c.real(), c.imag()}); }

inline json to_json(const CMatrix& m)
{
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline json to_json(const CVector& v)
{
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline json number(Real x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const verify::CheckRecord& c)
{
  json j = {{"name", c.name},
          {"ref", c.ref},
          {"measured", number(c.measured)},
          {"threshold", c.threshold},
          {"compare", c.compare == verify::Compare::at_most ? "<=" : ">="},
          {"pass", c.pass},
          {"note", c.note}};
  if (c.value) j["value"] = to_json(*c.value);
  return j;
}

// Scalar tolerances by config key; works for const and mutable configs.
template <class C>
auto real_fields(C& c)
{
  using P = decltype(&c.theta_eps);
  return std::vector<std::pair<const char*, P>>{{"theta_eps", &c.theta_eps},
                                                {"locus_tol", &c.locus_tol},
                                                {"singular_tol", &c.singular_tol},
                                                {"klein_tol", &c.klein_tol},
                                                {"closed_form_tol", &c.closed_form_tol},
                                                {"jacobi_tol", &c.jacobi_tol},
                                                {"quasi_period_tol", &c.quasi_period_tol},
                                                {"heat_tol", &c.heat_tol},
                                                {"vanishing_tol", &c.vanishing_tol},
                                                {"lattice_tol", &c.lattice_tol},
                                                {"proportionality_tol", &c.proportionality_tol},
                                                {"discrimination_floor", &c.discrimination_floor},
                                                {"hyper_symmetry_tol", &c.hyper_symmetry_tol},
                                                {"hyper_f4_tol", &c.hyper_f4_tol},
                                                {"hyper_s4_ratio", &c.hyper_s4_ratio},
                                                {"thetanull_floor", &c.thetanull_floor},
                                                {"thetanull_ceiling", &c.thetanull_ceiling},
                                                {"cross_ratio_tol", &c.cross_ratio_tol},
                                                {"wedge_tol", &c.wedge_tol},
                                                {"weight8_tol", &c.weight8_tol},
                                                {"conjugation_tol", &c.conjugation_tol},
                                                {"chi_modulus_tol", &c.chi_modulus_tol}};
}

inline json to_json(const verify::Config& c)
{
  json j = json::object();
  for (const auto& [key, ptr] : real_fields(c)) j[key] = *ptr;
  j["im_range"] = {c.im_low, c.im_high};
  j["seeds"] = c.seeds;
  j["threads"] = c.threads;
  j["precision"] = c.precision;
  j["klein_baseline"] = c.klein_baseline ? json(*c.klein_baseline) : json(nullptr);
  return j;
}

// Overlays keys from a JSON object; unknown keys are an error.
inline void apply_config(verify::Config& c, const json& j)
{
  if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "config must be a JSON object");
  std::map<std::string, Real*> reals;
  for (const auto& [key, ptr] : real_fields(c)) reals[key] = ptr;
  try {
    for (const auto& [key, value] : j.items()) {
      if (auto it = reals.find(key); it != reals.end()) {
        *it->second = value.get<Real>();
      } else if (key == "im_range") {
        if (!value.is_array() || value.size() != 2) throw Error(ErrorCode::invalid_argument, "im_range must be [low, high]");
        c.im_low = value[0].get<Real>();
        c.im_high = value[1].get<Real>();
      } else if (key == "seeds") {
        c.seeds = value.get<int>();
      } else if (key == "threads") {
        const int t = value.get<int>();
        if (t < 1) throw Error(ErrorCode::invalid_argument, "threads must be at least 1");
        c.threads = static_cast<unsigned>(t);
      } else if (key == "precision") {
        c.precision = value.get<std::string>();
      } else if (key == "klein_baseline") {
        c.klein_baseline = value.is_null() ? std::nullopt : std::optional<Real>(value.get<Real>());
      } else {
        throw Error(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("config type error: ") + e.what());
  }
}

inline json read_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, path + ": " + e.what());
  }
}

// Config file from the flag, else from the environment, else defaults.
inline verify::Config load_config(const std::string& flag_path)
{
  verify::Config c;
  std::string path = flag_path;
  if (path.empty())
    if (const char* env = std::getenv(config_env)) path = env;
  if (!path.empty()) apply_config(c, read_json_file(path));
  return c;
}

inline std::optional<Real> load_klein_baseline(const std::string& path)
{
  if (path.empty()) return std::nullopt;
  std::ifstream probe(path);
  if (!probe) return std::nullopt;
  const auto j = read_json_file(path);
  if (!j.contains("klein_ratio_median")) return std::nullopt;
  return j.at("klein_ratio_median").at("value").at(0).get<Real>();
}

struct Report
{
  std::string command;
  verify::Config config;
  std::vector<verify::SuiteResult> suites;
  json extra = json::object();
  double seconds = 0;

  bool pass() const
  {
    for (const auto& s : suites)
      if (!s.pass()) return false;
    return !suites.empty();
  }

  json to_json() const
  {
    json j;
    j["command"] = command;
    j["version"] = SCHOTTKY_VERSION;
    j["config"] = cli::to_json(config);
    j["suites"] = json::array();
    for (const auto& s : suites) {
      json checks = json::array();
      for (const auto& c : s.checks) checks.push_back(cli::to_json(c));
      j["suites"].push_back({{"id", s.id}, {"name", s.name}, {"pass", s.pass()}, {"checks", checks}, {"seconds", s.seconds}});
    }
    if (!extra.empty()) j["data"] = extra;
    j["pass"] = pass();
    j["seconds"] = seconds;
    return j;
  }

  std::string to_csv() const
  {
    std::ostringstream os;
    os.precision(17);
    os << "suite,suite_name,check,ref,measured,compare,threshold,pass\n";
    auto quote = [](const std::string& s) {
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    };
    for (const auto& s : suites)
      for (const auto& c : s.checks) {
        os << s.id << ',' << quote(s.name) << ',' << quote(c.name) << ',' << c.ref << ',';
        if (std::isfinite(c.measured)) os << c.measured;
        os << ',' << (c.compare == verify::Compare::at_most ? "<=" : ">=") << ',' << c.threshold << ','
           << (c.pass ? "true" : "false") << '\n';
      }
    return os.str();
  }
};

}  // namespace schottky::cli

#endif
