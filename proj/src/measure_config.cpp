#include "seedbank/measure_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace seedbank {

RateMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type")) {
    throw std::invalid_argument("measure spec must be an object with a \"type\" field");
  }
  const auto type = j.at("type").get<std::string>();
  try {
    if (type == "empty") return RateMeasure::empty();
    if (type == "atoms") {
      std::vector<Atom> atoms;
      for (const auto& pair : j.at("atoms")) {
        if (!pair.is_array() || pair.size() != 2) {
          throw std::invalid_argument("each atom must be a [rate, weight] pair");
        }
        atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      return RateMeasure::atoms(std::move(atoms));
    }
    if (type == "gamma") {
      return RateMeasure::gamma(j.at("a").get<double>(), j.at("b").get<double>(),
                                j.at("c").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed measure spec: ") + e.what());
  }
  throw std::invalid_argument("unknown measure type \"" + type + "\"");
}

nlohmann::json measure_to_json(const RateMeasure& m) {
  if (m.is_empty()) return {{"type", "empty"}};
  if (m.is_gamma()) {
    const auto& g = m.gamma_params();
    return {{"type", "gamma"}, {"a", g.shape}, {"b", g.rate}, {"c", g.total_mass}};
  }
  auto atoms = nlohmann::json::array();
  for (const auto& a : m.atom_list()) atoms.push_back({a.rate, a.weight});
  return {{"type", "atoms"}, {"atoms", atoms}};
}

RateMeasure parse_measure(const std::string& text) {
  std::error_code ec;
  if (!text.empty() && text.front() != '{' && std::filesystem::is_regular_file(text, ec)) {
    std::ifstream in(text);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_measure(buf.str());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("measure spec is not valid JSON: ") + e.what());
  }
  return measure_from_json(j);
}

}  // namespace seedbank
