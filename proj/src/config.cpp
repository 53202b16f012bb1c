#include "hypcurv/config.hpp"

#include <algorithm>

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hypcurv::config {

using symfunc::CurvatureSpec;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Recursive-descent parser for the spec grammar.
struct SpecParser {
  const std::string& s;
  std::size_t pos = 0;

  explicit SpecParser(const std::string& text) : s(text) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) { ++pos; return true; }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("spec parse error at offset " +
                                std::to_string(pos) + ": " + what);
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    std::size_t b = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    if (pos == b) fail("expected identifier");
    return s.substr(b, pos - b);
  }

  double number() {
    skip_ws();
    std::size_t b = pos;
    while (pos < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
            s[pos] == '-' || s[pos] == '+' || s[pos] == 'e' || s[pos] == 'E'))
      ++pos;
    if (pos == b) fail("expected number");
    try {
      return std::stod(s.substr(b, pos - b));
    } catch (const std::exception&) {
      fail("malformed number '" + s.substr(b, pos - b) + "'");
    }
  }

  CurvatureSpec parse() {
    auto spec = parse_spec();
    skip_ws();
    if (pos != s.size()) fail("trailing characters");
    return spec;
  }

  CurvatureSpec parse_spec() {
    std::string name = ident();
    if (name == "quotient") {
      expect('(');
      int n = static_cast<int>(number());
      expect(',');
      int l = static_cast<int>(number());
      expect(')');
      return CurvatureSpec::quotient(n, l);
    }
    if (name == "sum" || name == "product") {
      expect('(');
      std::vector<std::pair<double, CurvatureSpec>> parts;
      do {
        double w = number();
        expect('*');
        parts.emplace_back(w, parse_spec());
      } while (eat(','));
      expect(')');
      return name == "sum" ? CurvatureSpec::concave_sum(std::move(parts))
                           : CurvatureSpec::concave_product(std::move(parts));
    }
    fail("unknown spec head '" + name + "'");
  }
};

struct Line {
  int number;
  std::string section;
  std::string key, value;
};

}  // namespace

CurvatureSpec parse_spec(const std::string& text) {
  return SpecParser(text).parse();
}

std::string ParseResult::render_errors() const {
  std::ostringstream os;
  for (const auto& e : errors) {
    if (e.line > 0) os << "line " << e.line << ": ";
    os << e.message << '\n';
  }
  return os.str();
}

ParseResult parse_config_text(const std::string& text) {
  ParseResult out;
  auto err = [&](int line, const std::string& m) {
    out.errors.push_back({line, m});
  };

  // Pass 1: lex into (section, key, value) with line numbers.
  std::vector<Line> lines;
  {
    std::istringstream is(text);
    std::string raw, section;
    int ln = 0;
    while (std::getline(is, raw)) {
      ++ln;
      std::string s = trim(raw);
      if (auto c = s.find('#'); c != std::string::npos) s = trim(s.substr(0, c));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') { err(ln, "unterminated section header"); continue; }
        section = trim(s.substr(1, s.size() - 2));
        if (section.empty()) err(ln, "empty section name");
        continue;
      }
      auto eq = s.find('=');
      if (eq == std::string::npos) { err(ln, "expected key = value"); continue; }
      std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
      if (key.empty()) { err(ln, "empty key"); continue; }
      if (section.empty()) { err(ln, "key outside any [section]"); continue; }
      lines.push_back({ln, section, key, value});
    }
  }

  // Pass 2: interpret.  Numeric helpers record errors instead of throwing.
  RunConfig& cfg = out.config;
  auto as_double = [&](const Line& l, double& dst) {
    try { dst = std::stod(l.value); }
    catch (const std::exception&) { err(l.number, "'" + l.key + "': not a number"); }
  };
  auto as_int = [&](const Line& l, int& dst) {
    try { dst = std::stoi(l.value); }
    catch (const std::exception&) { err(l.number, "'" + l.key + "': not an integer"); }
  };
  auto as_doubles = [&](const Line& l, std::vector<double>& dst) {
    std::string text = l.value;
    std::replace(text.begin(), text.end(), ',', ' ');  // commas optional in lists
    std::istringstream is(text);
    double v;
    dst.clear();
    while (is >> v) dst.push_back(v);
    if (!is.eof()) err(l.number, "'" + l.key + "': malformed number list");
  };

  std::map<std::string, double> dom_num{{"radius", 1.0}, {"a", 1.0}, {"b", 1.0}, {"p", 4.0}};
  std::string dom_kind = "ball";
  std::vector<Eigen::Vector2d> dom_verts;
  int dom_line = 0;
  bool saw_sigma = false;

  for (const auto& l : lines) {
    if (l.section == "domain") {
      dom_line = l.number;
      if (l.key == "kind") dom_kind = l.value;
      else if (dom_num.count(l.key)) as_double(l, dom_num[l.key]);
      else if (l.key == "vertices") {
        std::istringstream is(l.value);
        std::string pair_s;
        dom_verts.clear();
        while (std::getline(is, pair_s, ';')) {
          std::istringstream ps(pair_s);
          double x, y;
          if (ps >> x >> y) dom_verts.emplace_back(x, y);
          else err(l.number, "vertices: expected 'x y' pairs separated by ';'");
        }
      } else err(l.number, "unknown domain key '" + l.key + "'");
    } else if (l.section == "curvature") {
      if (l.key == "spec") {
        try { cfg.spec = parse_spec(l.value); }
        catch (const std::exception& e) { err(l.number, e.what()); }
      } else if (l.key == "sigma") {
        as_double(l, cfg.solver.sigma);
        saw_sigma = true;
      } else if (l.key == "sigmas") {
        as_doubles(l, cfg.sigmas);
        for (double s : cfg.sigmas)
          if (!(s > 0 && s < 1)) { err(l.number, "sigmas must lie in (0,1)"); break; }
        for (std::size_t i = 1; i < cfg.sigmas.size(); ++i)
          if (cfg.sigmas[i] <= cfg.sigmas[i - 1]) {
            err(l.number, "sigmas must be strictly increasing");
            break;
          }
      } else err(l.number, "unknown curvature key '" + l.key + "'");
    } else if (l.section == "solver") {
      if (l.key == "h") as_double(l, cfg.solver.grid_h);
      else if (l.key == "eps_start") as_double(l, cfg.solver.eps_start);
      else if (l.key == "eps_target") as_double(l, cfg.solver.eps_target);
      else if (l.key == "eps_floor_mult") as_double(l, cfg.solver.eps_floor_mult);
      else if (l.key == "max_iters") as_int(l, cfg.solver.newton.max_iters);
      else if (l.key == "abs_tol") as_double(l, cfg.solver.newton.abs_tol);
      else if (l.key == "jacobian") {
        if (l.value == "analytic") cfg.solver.jacobian_mode = solver::JacobianMode::Analytic;
        else if (l.value == "fd") cfg.solver.jacobian_mode = solver::JacobianMode::FiniteDifference;
        else err(l.number, "jacobian must be 'analytic' or 'fd'");
      } else if (l.key == "mode") {
        if (l.value == "grid") cfg.radial_mode = false;
        else if (l.value == "radial") cfg.radial_mode = true;
        else err(l.number, "mode must be 'grid' or 'radial'");
      } else if (l.key == "radial_cells") as_int(l, cfg.radial.num_cells);
      else err(l.number, "unknown solver key '" + l.key + "'");
    } else if (l.section == "verify") {
      if (l.key == "samples") as_int(l, cfg.structure_samples);
      else if (l.key == "seed") {
        try { cfg.seed = std::stoull(l.value); }
        catch (const std::exception&) { err(l.number, "'seed': not an integer"); }
      } else err(l.number, "unknown verify key '" + l.key + "'");
    } else {
      err(l.number, "unknown section [" + l.section + "]");
    }
  }

  // Semantic checks, still line-tagged where a line is known.
  if (!(cfg.solver.sigma > 0 && cfg.solver.sigma < 1) && saw_sigma)
    err(0, "sigma must lie in (0,1)");
  if (cfg.spec.is_quotient() && cfg.spec.l() >= cfg.spec.n())
    err(0, "spec requires l < n");
  if (cfg.solver.eps_target > cfg.solver.eps_start)
    err(0, "eps schedule must be non-increasing: eps_target > eps_start");
  if (cfg.solver.grid_h <= 0) err(0, "h must be positive");

  if (dom_kind == "ball") cfg.domain = domain::DomainSpec::ball(dom_num["radius"]);
  else if (dom_kind == "ellipse") cfg.domain = domain::DomainSpec::ellipse(dom_num["a"], dom_num["b"]);
  else if (dom_kind == "superellipse")
    cfg.domain = domain::DomainSpec::superellipse(dom_num["a"], dom_num["b"], dom_num["p"]);
  else if (dom_kind == "polygon") {
    if (dom_verts.size() < 3) err(dom_line, "polygon needs at least 3 vertices");
    else cfg.domain = domain::DomainSpec::polygon(dom_verts);
  } else err(dom_line, "unknown domain kind '" + dom_kind + "'");

  cfg.radial_delta = dom_num["radius"];
  return out;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    ParseResult r;
    r.errors.push_back({0, "cannot open config file '" + path + "'"});
    return r;
  }
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config_text(os.str());
}

}  // namespace hypcurv::config
