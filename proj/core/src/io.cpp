#include "slagfib/io.hpp"

#include <fstream>
#include <sstream>

#include "slagfib/errors.hpp"
#include "slagfib/form_io.hpp"

namespace slagfib {

using nlohmann::json;
namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json structure_to_json(const GeneratedStructure& g) {
  const auto& r = g.recipe;
  return json{{"format", "slagfib.structure/1"},
              {"n", r.lattice.dim()},
              {"lattice", lattice_to_json(r.lattice)},
              {"r", r.r},
              {"epsilon", r.epsilon},
              {"seed", r.seed},
              {"rng", std::string(Rng::kName)},
              {"potential", {{"band", r.potential.band}, {"decay", r.potential.decay}, {"poly_cap", r.potential.poly_cap}}},
              {"group", r.group},
              {"phase", {{"scale", r.phase.scale}, {"angle", r.phase.angle}}},
              {"a", g.structure.a},
              {"theta", g.structure.theta},
              {"alpha", to_json(g.potentials.alpha)},
              {"beta", to_json(g.potentials.beta)}};
}

GeneratedStructure structure_from_json(const json& j) {
  try {
    if (j.value("format", std::string()) != "slagfib.structure/1") throw InvalidInput("not a structure record");
    GeneratedStructure g;
    auto& r = g.recipe;
    r.lattice = lattice_from_json(j.at("lattice"));
    if (j.at("n").get<int>() != r.lattice.dim()) throw InvalidInput("structure n disagrees with its lattice");
    r.r = j.at("r").get<double>();
    r.epsilon = j.at("epsilon").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("potential");
    r.potential.band = p.at("band").get<int>();
    r.potential.decay = p.at("decay").get<double>();
    r.potential.poly_cap = p.at("poly_cap").get<int>();
    r.group = j.at("group").get<std::string>();
    r.phase.scale = j.at("phase").at("scale").get<double>();
    r.phase.angle = j.at("phase").at("angle").get<double>();
    g.potentials.alpha = ambient_form_from_json(j.at("alpha"));
    g.potentials.beta = ambient_form_from_json(j.at("beta"));
    const FlatCalabiYau base(r.lattice, r.r);
    g.structure = perturb_structure(base, g.potentials.alpha, g.potentials.beta, r.epsilon, r.phase);
    if (g.structure.a != j.at("a").get<double>() || g.structure.theta != j.at("theta").get<double>()) {
      throw InvalidInput("stored (a, theta) do not match the rebuilt structure");
    }
    return g;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed structure record: ") + e.what());
  }
}

json certificate_to_json(const IFTCertificate& c) {
  return json{{"format", "slagfib.certificate/1"},
              {"Cbar", c.Cbar},
              {"deviation_bound", c.deviation_bound},
              {"residual_at_zero", c.residual_at_zero},
              {"delta", c.delta},
              {"delta0", c.delta0},
              {"r", c.r},
              {"hypotheses_ok", c.hypotheses_ok},
              {"elliptic_constant", c.elliptic_constant},
              {"smallest_singular", c.smallest_singular},
              {"contraction_at_zero", c.contraction_at_zero},
              {"sampled_inverse_norm", c.sampled_inverse_norm},
              {"contraction_bound", c.contraction_bound},
              {"probes", c.probes},
              {"base_samples", c.base_samples},
              {"section_samples", c.section_samples},
              {"seed", c.seed},
              {"rng", c.rng_name},
              {"alpha", c.alpha},
              {"cutoff", c.cutoff},
              {"grid_points", c.grid_points},
              {"norm_kind", c.norm_kind},
              {"margins",
               {{"deviation", 1.0 / (2.0 * c.Cbar) - c.deviation_bound},
                {"residual", c.delta / (4.0 * c.Cbar) - c.residual_at_zero},
                {"delta", c.delta0 - c.delta}}}};
}

IFTCertificate certificate_from_json(const json& j) {
  try {
    if (j.value("format", std::string()) != "slagfib.certificate/1") throw InvalidInput("not a certificate record");
    IFTCertificate c;
    c.Cbar = j.at("Cbar").get<double>();
    c.deviation_bound = j.at("deviation_bound").get<double>();
    c.residual_at_zero = j.at("residual_at_zero").get<double>();
    c.delta = j.at("delta").get<double>();
    c.delta0 = j.at("delta0").get<double>();
    c.r = j.at("r").get<double>();
    c.hypotheses_ok = j.at("hypotheses_ok").get<bool>();
    c.elliptic_constant = j.at("elliptic_constant").get<double>();
    c.smallest_singular = j.at("smallest_singular").get<double>();
    c.contraction_at_zero = j.at("contraction_at_zero").get<double>();
    c.sampled_inverse_norm = j.at("sampled_inverse_norm").get<double>();
    c.contraction_bound = j.at("contraction_bound").get<double>();
    c.probes = j.at("probes").get<int>();
    c.base_samples = j.at("base_samples").get<int>();
    c.section_samples = j.at("section_samples").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.rng_name = j.at("rng").get<std::string>();
    c.alpha = j.at("alpha").get<double>();
    c.cutoff = j.at("cutoff").get<int>();
    c.grid_points = j.at("grid_points").get<int>();
    c.norm_kind = j.at("norm_kind").get<std::string>();
    if (c.hypotheses_ok != IFTCertificate::evaluate(c.Cbar, c.deviation_bound, c.residual_at_zero, c.delta, c.delta0)) {
      throw InvalidInput("certificate flag disagrees with its constants");
    }
    return c;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed certificate record: ") + e.what());
  }
}

}  // namespace slagfib
