#include "drdmft/io.hpp"

#include <cstring>
#include <fmt/format.h>
#include <fstream>

namespace drdmft {

namespace {
constexpr char kMagic[8] = {'D', 'O', 'R', 'B', 'C', '0', '1', '\0'};
}

json grid_to_json(const UniformGrid& grid) {
  json axes = json::array();
  for (int a = 0; a < grid.dim(); ++a) {
    axes.push_back({{"L", grid.axis(a).length}, {"h", grid.axis(a).spacing}, {"n", grid.axis(a).n}});
  }
  return {{"axes", axes}};
}

UniformGrid grid_from_json(const json& j) {
  std::vector<Axis> axes;
  for (const auto& a : j.at("axes")) {
    Axis ax;
    ax.length = a.at("L").get<double>();
    ax.spacing = a.at("h").get<double>();
    ax.n = a.at("n").get<int>();
    axes.push_back(ax);
  }
  return UniformGrid(std::move(axes));
}

json model_to_json(const ModelSpec& model) {
  json modes = json::array();
  for (const auto& m : model.modes) modes.push_back({{"omega", m.omega}, {"lambda", m.lambda}});
  json pot = {{"kind", potential_name(model.potential.kind)},
              {"softening", model.potential.softening},
              {"d", model.potential.d},
              {"k", model.potential.k}};
  if (model.potential.kind == PotentialSpec::Kind::Custom) {
    pot["xs"] = model.potential.xs;
    pot["vs"] = model.potential.vs;
  }
  return {{"potential", pot},
          {"interaction_softening", model.interaction_softening},
          {"n_electrons", model.n_electrons},
          {"interaction_enabled", model.interaction_enabled},
          {"modes", modes}};
}

ModelSpec model_from_json(const json& j) {
  ModelSpec m;
  const json& pot = j.at("potential");
  const std::string kind = pot.at("kind").get<std::string>();
  if (kind == "helium") {
    m.potential = PotentialSpec::soft_helium(pot.at("softening").get<double>());
  } else if (kind == "h2") {
    m.potential =
        PotentialSpec::soft_hydrogen_molecule(pot.at("d").get<double>(), pot.at("softening").get<double>());
  } else if (kind == "beryllium") {
    m.potential = PotentialSpec::soft_beryllium(pot.at("softening").get<double>());
  } else if (kind == "harmonic") {
    m.potential = PotentialSpec::harmonic(pot.at("k").get<double>());
  } else if (kind == "custom") {
    m.potential = PotentialSpec::custom(pot.at("xs").get<std::vector<double>>(),
                                        pot.at("vs").get<std::vector<double>>());
  } else {
    throw UnknownKind(fmt::format("unknown potential kind '{}'", kind));
  }
  m.interaction_softening = j.at("interaction_softening").get<double>();
  m.n_electrons = j.at("n_electrons").get<int>();
  m.interaction_enabled = j.at("interaction_enabled").get<bool>();
  for (const auto& mj : j.at("modes")) {
    m.modes.push_back({mj.at("omega").get<double>(), mj.at("lambda").get<double>()});
  }
  return m;
}

json settings_to_json(const SCFSettings& s) {
  return {{"eps_E", s.eps_E},
          {"eps_rho", s.eps_rho},
          {"eps_lambda", s.eps_lambda},
          {"eps_mu", s.eps_mu},
          {"max_outer", s.max_outer},
          {"max_orbital", s.max_orbital},
          {"max_occupation", s.max_occupation},
          {"mixing", s.mixing},
          {"n_floor", s.n_floor}};
}

SCFSettings settings_from_json(const json& j) {
  SCFSettings s;
  s.eps_E = j.value("eps_E", s.eps_E);
  s.eps_rho = j.value("eps_rho", s.eps_rho);
  s.eps_lambda = j.value("eps_lambda", s.eps_lambda);
  s.eps_mu = j.value("eps_mu", s.eps_mu);
  s.max_outer = j.value("max_outer", s.max_outer);
  s.max_orbital = j.value("max_orbital", s.max_orbital);
  s.max_occupation = j.value("max_occupation", s.max_occupation);
  s.mixing = j.value("mixing", s.mixing);
  s.n_floor = j.value("n_floor", s.n_floor);
  return s;
}

const Eigen::MatrixXd& Container::array(const std::string& name) const {
  for (const auto& [n, a] : arrays) {
    if (n == name) return a;
  }
  throw Error(fmt::format("container has no array '{}'", name));
}

void save_container(const std::filesystem::path& path, const Container& c) {
  json header = c.header;
  json arrays = json::array();
  for (const auto& [name, a] : c.arrays) {
    arrays.push_back({{"name", name}, {"rows", a.rows()}, {"cols", a.cols()}});
  }
  header["arrays"] = arrays;
  const std::string htext = header.dump();

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ResourceError(fmt::format("cannot open '{}' for writing", path.string()));
  f.write(kMagic, sizeof(kMagic));
  const std::uint64_t hlen = htext.size();
  f.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  f.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  for (const auto& [name, a] : c.arrays) {
    f.write(reinterpret_cast<const char*>(a.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(a.size())));
  }
  if (!f) throw ResourceError(fmt::format("write to '{}' failed", path.string()));
}

Container load_container(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ResourceError(fmt::format("cannot open '{}'", path.string()));
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(fmt::format("'{}' is not an orbital container", path.string()));
  }
  std::uint64_t hlen = 0;
  f.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string htext(hlen, '\0');
  f.read(htext.data(), static_cast<std::streamsize>(hlen));
  Container c;
  c.header = json::parse(htext);
  for (const auto& meta : c.header.at("arrays")) {
    const Eigen::Index rows = meta.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = meta.at("cols").get<Eigen::Index>();
    Eigen::MatrixXd a(rows, cols);
    f.read(reinterpret_cast<char*>(a.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(a.size())));
    c.arrays.emplace_back(meta.at("name").get<std::string>(), std::move(a));
  }
  if (!f) throw Error(fmt::format("truncated container '{}'", path.string()));
  return c;
}

void save_orbital_set(const std::filesystem::path& path, const OrbitalSet& basis,
                      const ModelSpec& model) {
  Container c;
  c.header = {{"type", "orbital_set"},
              {"grid", grid_to_json(basis.grid)},
              {"model", model_to_json(model)},
              {"model_hash", model_hash(model, basis.grid)},
              {"n_gs", basis.n_gs},
              {"n_es", basis.n_es}};
  c.arrays.emplace_back("orbitals", basis.orbitals);
  c.arrays.emplace_back("eigenvalues", basis.eigenvalues);
  save_container(path, c);
}

OrbitalSet load_orbital_set(const std::filesystem::path& path) {
  Container c = load_container(path);
  OrbitalSet b;
  b.grid = grid_from_json(c.header.at("grid"));
  b.orbitals = c.array("orbitals");
  b.eigenvalues = c.array("eigenvalues");
  b.n_gs = c.header.at("n_gs").get<int>();
  b.n_es = c.header.at("n_es").get<int>();
  return b;
}

void save_integral_table(const std::filesystem::path& path, const IntegralTable& table) {
  Container c;
  c.header = {{"type", "integral_table"},
              {"grid", grid_to_json(table.grid)},
              {"model", model_to_json(table.model)},
              {"model_hash", table.key},
              {"M", table.M},
              {"coulomb_enabled", table.coulomb_enabled},
              {"n_modes", table.model.n_modes()}};
  c.arrays.emplace_back("h", table.h);
  c.arrays.emplace_back("x_mom", table.x_mom);
  for (int a = 0; a < table.model.n_modes(); ++a) {
    c.arrays.emplace_back(fmt::format("q_mom_{}", a), table.q_mom[static_cast<std::size_t>(a)]);
    c.arrays.emplace_back(fmt::format("q_osc_{}", a), table.q_osc[static_cast<std::size_t>(a)]);
  }
  c.arrays.emplace_back("pair_rho", table.pair_rho);
  c.arrays.emplace_back("pair_pot", table.pair_pot);
  save_container(path, c);
}

IntegralTable load_integral_table(const std::filesystem::path& path) {
  Container c = load_container(path);
  IntegralTable t;
  t.grid = grid_from_json(c.header.at("grid"));
  t.model = model_from_json(c.header.at("model"));
  t.key = c.header.at("model_hash").get<std::uint64_t>();
  t.M = c.header.at("M").get<int>();
  t.coulomb_enabled = c.header.at("coulomb_enabled").get<bool>();
  t.h = c.array("h");
  t.x_mom = c.array("x_mom");
  for (int a = 0; a < c.header.at("n_modes").get<int>(); ++a) {
    t.q_mom.push_back(c.array(fmt::format("q_mom_{}", a)));
    t.q_osc.push_back(c.array(fmt::format("q_osc_{}", a)));
  }
  t.pair_rho = c.array("pair_rho");
  t.pair_pot = c.array("pair_pot");
  return t;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
  Container c;
  c.header = {{"type", "checkpoint"},
              {"grid", grid_to_json(cp.grid)},
              {"model", model_to_json(cp.model)},
              {"model_hash", model_hash(cp.model, cp.grid)},
              {"settings", settings_to_json(cp.settings)},
              {"functional", cp.functional},
              {"basis_key", cp.rdm.basis_key}};
  c.arrays.emplace_back("coeff", cp.rdm.coeff);
  c.arrays.emplace_back("occ", cp.rdm.occ);
  save_container(path, c);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Container c = load_container(path);
  Checkpoint cp;
  cp.grid = grid_from_json(c.header.at("grid"));
  cp.model = model_from_json(c.header.at("model"));
  cp.settings = settings_from_json(c.header.at("settings"));
  cp.functional = c.header.at("functional").get<std::string>();
  cp.rdm.coeff = c.array("coeff");
  cp.rdm.occ = c.array("occ");
  cp.rdm.basis_key = c.header.at("basis_key").get<std::uint64_t>();
  return cp;
}

} // namespace drdmft
