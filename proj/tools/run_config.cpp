#include "run_config.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "slagfib/exterior.hpp"

namespace slagfib::cli {

using nlohmann::json;

namespace {

// Reads one JSON object; every key must be consumed before finish().
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "must be an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback, double lo, double hi, bool open_lo = false) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(at(key), "must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x) || x > hi || x < lo || (open_lo && x == lo)) {
      fail(at(key), "must lie in " + std::string(open_lo ? "(" : "[") + fmt(lo) + ", " + fmt(hi) + "]");
    }
    return x;
  }

  double required_number(const std::string& key, double lo, double hi, bool open_lo = false) {
    if (!j_.contains(key)) fail(at(key), "is required");
    return number(key, 0.0, lo, hi, open_lo);
  }

  long integer(const std::string& key, long fallback, long lo, long hi) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(at(key), "must be an integer");
    const long x = v->get<long>();
    if (x < lo || x > hi) fail(at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      fail(at(key), "must be a non-negative integer");
    }
    return v->get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(at(key), "must be true or false");
    return v->get<bool>();
  }

  std::string choice(const std::string& key, const std::string& fallback, const std::set<std::string>& allowed) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string() || !allowed.count(v->get<std::string>())) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(at(key), "must be one of " + list);
    }
    return v->get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail(at(key), "unknown key");
    }
  }

 private:
  static std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Lattice parse_lattice(const json& j, const std::string& path, int n) {
  Fields f(j, path);
  const json* cubic = f.find("cubic");
  const json* hex = f.find("hexagonal");
  const json* gens = f.find("generators");
  f.finish();
  if ((cubic != nullptr) + (hex != nullptr) + (gens != nullptr) != 1) {
    Fields::fail(path, "give exactly one of cubic, hexagonal, generators");
  }
  if (cubic) {
    if (!cubic->is_number() || !(cubic->get<double>() > 0.0)) Fields::fail(path + ".cubic", "must be a positive side");
    return Lattice::cubic(n, cubic->get<double>());
  }
  if (hex) {
    if (n != 2) Fields::fail(path + ".hexagonal", "requires n = 2");
    if (!hex->is_number() || !(hex->get<double>() > 0.0)) Fields::fail(path + ".hexagonal", "must be a positive side");
    return Lattice::hexagonal(hex->get<double>());
  }
  if (!gens->is_array() || static_cast<int>(gens->size()) != n) {
    Fields::fail(path + ".generators", "must list n generator vectors");
  }
  Eigen::MatrixXd B(n, n);
  for (int c = 0; c < n; ++c) {
    const auto& v = (*gens)[c];
    if (!v.is_array() || static_cast<int>(v.size()) != n) {
      Fields::fail(path + ".generators[" + std::to_string(c) + "]", "must have n entries");
    }
    for (int r = 0; r < n; ++r) {
      if (!v[r].is_number()) Fields::fail(path + ".generators[" + std::to_string(c) + "]", "entries must be numbers");
      B(r, c) = v[r].get<double>();
    }
  }
  if (!(std::abs(B.determinant()) > 1e-12)) Fields::fail(path + ".generators", "generators are degenerate");
  return Lattice(B);
}

std::vector<double> number_list(const json& j, const std::string& path, double lo, double hi) {
  if (!j.is_array() || j.empty()) Fields::fail(path, "must be a non-empty list of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) Fields::fail(path, "entries must be numbers");
    const double x = v.get<double>();
    if (!(x > lo && x <= hi)) Fields::fail(path, "entries must lie in the documented range");
    out.push_back(x);
  }
  return out;
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c;
  Fields top(j, "");
  if (const json* v = top.find("name")) {
    if (!v->is_string() || v->get<std::string>().empty() ||
        v->get<std::string>().find_first_of("/\\") != std::string::npos) {
      Fields::fail("name", "must be a non-empty file stem");
    }
    c.name = v->get<std::string>();
  }
  const json* nj = top.find("n");
  if (!nj || !nj->is_number_integer()) Fields::fail("n", "is required and must be an integer");
  const int n = nj->get<int>();
  if (n < 1 || n > kMaxDim) Fields::fail("n", "must lie in [1, " + std::to_string(kMaxDim) + "]");

  const json* lj = top.find("lattice");
  if (!lj) Fields::fail("lattice", "is required");
  c.recipe.lattice = parse_lattice(*lj, "lattice", n);
  c.recipe.r = top.number("r", 1.0, 0.0, 100.0, true);
  c.recipe.epsilon = top.required_number("epsilon", 0.0, 10.0);
  c.recipe.seed = top.unsigned64("seed", 0);
  c.cutoff = static_cast<int>(top.integer("cutoff", 8, 1, 32));
  c.recipe.potential.poly_cap = static_cast<int>(top.integer("poly_cap", 3, 0, 6));
  c.recipe.group = top.choice("group", "none", {"none", "flip"});

  if (const json* p = top.find("potential")) {
    Fields f(*p, "potential");
    c.recipe.potential.band = static_cast<int>(f.integer("band", 2, 0, 8));
    c.recipe.potential.decay = f.number("decay", 4.0, 0.0, 20.0);
    f.finish();
  }
  if (const json* p = top.find("phase")) {
    Fields f(*p, "phase");
    c.recipe.phase.scale = f.number("scale", 1.0, 0.0, 100.0, true);
    c.recipe.phase.angle = f.number("angle", 0.0, -std::numbers::pi, std::numbers::pi);
    f.finish();
  }
  if (const json* p = top.find("grid")) {
    Fields f(*p, "grid");
    c.grid_points = static_cast<int>(f.integer("points_per_dim", 9, 1, 65));
    c.grid_radius = f.number("radius", 1.0, 0.0, 1e6, true);
    f.finish();
  }
  if (!(c.grid_radius < 1.5 * c.recipe.r)) Fields::fail("grid.radius", "must be below 3r/2");
  if (const json* p = top.find("tolerances")) {
    Fields f(*p, "tolerances");
    c.solve_tol = f.number("solve", 1e-10, 0.0, 1e-2, true);
    c.fiber_tol = f.number("fiber", 1e-8, 0.0, 1e-2, true);
    c.comparison_tol = f.number("comparison", 1e-6, 0.0, 1e-1, true);
    f.finish();
  }
  c.certificate.r = c.recipe.r;
  c.certificate.seed = c.recipe.seed;
  if (const json* p = top.find("certificate")) {
    Fields f(*p, "certificate");
    c.certificate.delta = f.number("delta", 0.2, 0.0, 10.0, true);
    c.certificate.delta0 = f.number("delta0", 0.25, 0.0, 10.0, true);
    c.certificate.probes = static_cast<int>(f.integer("probes", 64, 1, 4096));
    c.certificate.sigma_samples = static_cast<int>(f.integer("sigma_samples", 3, 0, 64));
    c.certificate.alpha = f.number("alpha", 0.5, 0.0, 1.0, true);
    if (c.certificate.alpha >= 1.0) Fields::fail("certificate.alpha", "must lie in (0, 1)");
    f.finish();
  }
  c.solve_points = {Eigen::VectorXd::Zero(n)};
  if (const json* p = top.find("solve")) {
    Fields f(*p, "solve");
    c.mode = f.choice("mode", "fixed-slope", {"fixed-slope", "newton"}) == "newton" ? SolveMode::Newton
                                                                                     : SolveMode::FixedSlope;
    c.max_iterations = static_cast<int>(f.integer("max_iterations", 200, 1, 100000));
    if (const json* pts = f.find("points")) {
      if (!pts->is_array() || pts->empty()) Fields::fail("solve.points", "must be a non-empty list of base points");
      c.solve_points.clear();
      for (const auto& y : *pts) {
        if (!y.is_array() || static_cast<int>(y.size()) != n) Fields::fail("solve.points", "each point needs n entries");
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) {
          if (!y[i].is_number()) Fields::fail("solve.points", "entries must be numbers");
          v(i) = y[i].get<double>();
        }
        if (!(v.norm() < 1.5 * c.recipe.r)) Fields::fail("solve.points", "points must lie in |y| < 3r/2");
        c.solve_points.push_back(v);
      }
    }
    f.finish();
  }
  if (const json* p = top.find("fibrate")) {
    Fields f(*p, "fibrate");
    c.derivatives = f.boolean("derivatives", true);
    c.embedding_samples = static_cast<int>(f.integer("embedding_samples", 32, 2, 256));
    f.finish();
  }
  if (const json* p = top.find("verify")) {
    Fields f(*p, "verify");
    c.verify.base_points = static_cast<int>(f.integer("base_points", 5, 1, 1000));
    if (const json* r = f.find("radii")) c.verify.radii = number_list(*r, "verify.radii", 0.0, 1e6);
    c.verify.samples_per_dim = static_cast<int>(f.integer("samples_per_dim", 32, 8, 256));
    if (const json* cj = f.find("collapsing")) {
      Fields cf(*cj, "verify.collapsing");
      CollapsingSpec cs;
      const json* cl = cf.find("lattice");
      cs.lattice = cl ? parse_lattice(*cl, "verify.collapsing.lattice", n) : Lattice::cubic(n, 1.0);
      const json* sc = cf.find("scales");
      if (!sc) Fields::fail("verify.collapsing.scales", "is required");
      cs.scales = number_list(*sc, "verify.collapsing.scales", 0.0, 1e6);
      for (std::size_t i = 1; i < cs.scales.size(); ++i) {
        if (!(cs.scales[i] < cs.scales[i - 1])) Fields::fail("verify.collapsing.scales", "must be decreasing");
      }
      if (cs.scales.size() < 2) Fields::fail("verify.collapsing.scales", "needs at least two scales");
      cs.mc_samples = cf.unsigned64("mc_samples", 1000000);
      if (cs.mc_samples < 1000) Fields::fail("verify.collapsing.mc_samples", "must be at least 1000");
      cf.finish();
      c.verify.collapsing = cs;
    }
    f.finish();
  }
  top.finish();
  if (!(c.certificate.delta < c.certificate.delta0)) Fields::fail("certificate.delta", "must be below delta0");
  c.echo = j;
  return c;
}

}  // namespace slagfib::cli
