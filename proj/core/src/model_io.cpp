#include "fluxfsp/model_io.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fluxfsp/error.hpp"

namespace fluxfsp {

using nlohmann::json;

namespace {

std::vector<Count> count_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of integers");
  std::vector<Count> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ConfigError(std::string(what) + " must contain integers");
    out.push_back(v.get<Count>());
  }
  return out;
}

std::size_t species_index(const json& j, const std::vector<std::string>& species) {
  if (j.is_number_integer()) {
    const auto idx = j.get<long long>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= species.size()) {
      throw ConfigError("repressor index out of range");
    }
    return static_cast<std::size_t>(idx);
  }
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    for (std::size_t s = 0; s < species.size(); ++s) {
      if (species[s] == name) return s;
    }
    throw ConfigError("unknown repressor species '" + name + "'");
  }
  throw ConfigError("repressor must be a species index or name");
}

RateLaw parse_rate_law(const json& j, const std::vector<Count>& nu,
                       const std::vector<std::string>& species) {
  const auto type = j.at("type").get<std::string>();
  if (type == "mass_action") {
    MassAction law;
    law.rate = j.at("rate").get<double>();
    if (j.contains("reactants")) {
      law.reactants = count_vector(j.at("reactants"), "reactants");
    } else {
      law.reactants.resize(nu.size());
      for (std::size_t s = 0; s < nu.size(); ++s) law.reactants[s] = nu[s] < 0 ? -nu[s] : 0;
    }
    return law;
  }
  if (type == "hill_production") {
    HillProduction law;
    law.eta = j.value("eta", 1.0);
    law.base = j.at("base").get<double>();
    law.amplitude = j.at("amplitude").get<double>();
    law.threshold = j.at("threshold").get<double>();
    law.exponent = j.at("exponent").get<double>();
    law.repressor = species_index(j.at("repressor"), species);
    return law;
  }
  throw ConfigError("unknown rate_law type '" + type + "'");
}

}  // namespace

Model parse_model(std::string_view json_text) {
  try {
    const json doc = json::parse(json_text);
    auto species = doc.at("species").get<std::vector<std::string>>();
    std::vector<Reaction> reactions;
    for (const auto& r : doc.at("reactions")) {
      Reaction rxn;
      rxn.stoichiometry = count_vector(r.at("stoichiometry"), "stoichiometry");
      rxn.rate_law = parse_rate_law(r.at("rate_law"), rxn.stoichiometry, species);
      rxn.label = r.value("label", "");
      reactions.push_back(std::move(rxn));
    }
    ReactionNetwork network(std::move(species), std::move(reactions));
    State x0(count_vector(doc.at("initial_state"), "initial_state"));
    if (x0.size() != network.num_species()) {
      throw ConfigError("initial_state length does not match species count");
    }
    return Model{doc.value("name", "custom"), std::move(network), std::move(x0)};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  }
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string model_to_json(const Model& model) {
  const auto& net = model.network;
  json doc;
  doc["name"] = model.name;
  doc["species"] = net.species();
  doc["reactions"] = json::array();
  for (const auto& rxn : net.reactions()) {
    json r;
    r["stoichiometry"] = rxn.stoichiometry;
    r["label"] = rxn.label;
    if (const auto* ma = std::get_if<MassAction>(&rxn.rate_law)) {
      r["rate_law"] = {{"type", "mass_action"}, {"rate", ma->rate}, {"reactants", ma->reactants}};
    } else {
      const auto& h = std::get<HillProduction>(rxn.rate_law);
      r["rate_law"] = {{"type", "hill_production"}, {"eta", h.eta},
                       {"base", h.base},            {"amplitude", h.amplitude},
                       {"threshold", h.threshold},  {"exponent", h.exponent},
                       {"repressor", h.repressor}};
    }
    doc["reactions"].push_back(std::move(r));
  }
  doc["initial_state"] = std::vector<Count>(model.initial_state.counts().begin(),
                                            model.initial_state.counts().end());
  return doc.dump(2);
}

}  // namespace fluxfsp
