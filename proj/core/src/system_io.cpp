#include "qcoef/system_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "qcoef/errors.hpp"
#include "qcoef/thermodynamics.hpp"

namespace qcoef {

using nlohmann::json;

namespace {

json point_json(Point p, int dim) {
  if (dim == 1) return p.x;
  return json::array({p.x, p.y});
}

Point point_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ValidationError("point must be a number or a pair");
}

json domain_json(const Domain& d) {
  const Point c = d.center();
  switch (d.kind()) {
    case DomainKind::interval:
      return {{"kind", "interval"}, {"lo", c.x - d.half_width()}, {"hi", c.x + d.half_width()}};
    case DomainKind::box:
      return {{"kind", "box"},
              {"center", json::array({c.x, c.y})},
              {"halfwidths", json::array({d.half_width(), d.half_height()})}};
    case DomainKind::ball:
      return {{"kind", "ball"}, {"center", json::array({c.x, c.y})}, {"radius", d.radius()}};
  }
  return {};
}

Domain domain_from(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "interval") return Domain::interval(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (kind == "box") {
    const json& hw = j.at("halfwidths");
    return Domain::box(point_from(j.at("center")), hw.at(0).get<double>(), hw.at(1).get<double>());
  }
  if (kind == "ball") return Domain::ball(point_from(j.at("center")), j.at("radius").get<double>());
  throw ValidationError("unknown domain kind '" + kind + "'");
}

json map_json(const Similarity& s, int dim) {
  json j = {{"ratio", s.ratio}};
  if (dim == 1) j["orientation"] = s.orth.a < 0.0 ? -1 : 1;
  else j["orthogonal"] = json::array({s.orth.a, s.orth.b, s.orth.c, s.orth.d});
  j["translation"] = point_json(s.translation, dim);
  return j;
}

Similarity map_from(const json& j) {
  Similarity s;
  s.ratio = j.at("ratio").get<double>();
  if (j.contains("orientation")) {
    s.orth = Mat2::orientation(j.at("orientation").get<int>());
  } else if (j.contains("orthogonal")) {
    const json& m = j.at("orthogonal");
    s.orth = {m.at(0).get<double>(), m.at(1).get<double>(), m.at(2).get<double>(),
              m.at(3).get<double>()};
  } else if (j.contains("rotation")) {
    s.orth = Mat2::rotation(j.at("rotation").get<double>());
  }
  s.translation = point_from(j.at("translation"));
  return s;
}

TailKind tail_kind_from(const std::string& s) {
  if (s == "none") return TailKind::none;
  if (s == "geometric") return TailKind::geometric;
  if (s == "power_law") return TailKind::power_law;
  throw ValidationError("unknown tail kind '" + s + "'");
}

Placement::Rule rule_from(const std::string& s) {
  using Rule = Placement::Rule;
  for (Rule r : {Rule::explicit_only, Rule::offset_accumulate, Rule::packed, Rule::disk_shells})
    if (to_string(r) == s) return r;
  throw ValidationError("unknown placement rule '" + s + "'");
}

json ratio_tail_json(const RatioTail& t) {
  json j = {{"kind", to_string(t.kind)}};
  if (t.kind == TailKind::none) return j;
  j["scale"] = t.scale;
  if (t.kind == TailKind::geometric) j["gamma"] = t.gamma;
  else j["exponent"] = t.exponent;
  return j;
}

RatioTail ratio_tail_from(const json& j) {
  RatioTail t;
  t.kind = tail_kind_from(j.value("kind", "none"));
  t.scale = j.value("scale", t.scale);
  t.gamma = j.value("gamma", t.gamma);
  t.exponent = j.value("exponent", t.exponent);
  return t;
}

json prob_tail_json(const ProbabilityTail& t) {
  json j = {{"kind", to_string(t.kind)}};
  if (t.kind == TailKind::none) return j;
  j["normalizer"] = t.normalizer;
  if (t.kind == TailKind::geometric) j["rho"] = t.rho;
  else j["exponent"] = t.exponent;
  return j;
}

ProbabilityTail prob_tail_from(const json& j) {
  ProbabilityTail t;
  t.kind = tail_kind_from(j.value("kind", "none"));
  t.normalizer = j.value("normalizer", t.normalizer);
  t.rho = j.value("rho", t.rho);
  t.exponent = j.value("exponent", t.exponent);
  return t;
}

std::string strip_name(const std::string& s) {
  std::string name = std::filesystem::path(s).filename().string();
  const std::string suffix = ".spec";
  if (name.size() > suffix.size() && name.ends_with(suffix))
    name.erase(name.size() - suffix.size());
  return name;
}

}  // namespace

std::string write_system(const SystemDescription& d) {
  const int dim = d.domain.dimension();
  json maps = json::array();
  for (const Similarity& s : d.map_prefix) maps.push_back(map_json(s, dim));
  json j;
  j["id"] = d.id;
  j["dimension"] = dim;
  j["domain"] = domain_json(d.domain);
  j["maps"] = {{"prefix", maps}, {"tail", ratio_tail_json(d.map_tail)}};
  j["probs"] = {{"prefix", d.prob_prefix}, {"tail", prob_tail_json(d.prob_tail)}};
  json placement = {{"rule", to_string(d.placement.rule)}};
  if (d.placement.rule == Placement::Rule::offset_accumulate) placement["offset"] = d.placement.offset;
  if (d.placement.rule == Placement::Rule::disk_shells) {
    placement["shell_factor"] = d.placement.shell_factor;
    placement["angle_step"] = d.placement.angle_step;
  }
  j["placement"] = placement;
  j["j0"] = d.j0;
  j["thermodynamics_only"] = d.thermodynamics_only;
  return j.dump(2) + "\n";
}

SystemDescription read_system(const std::string& text) {
  try {
    const json j = json::parse(text);
    SystemDescription d;
    d.id = j.value("id", std::string{});
    d.domain = domain_from(j.at("domain"));
    if (j.contains("dimension") && j.at("dimension").get<int>() != d.domain.dimension())
      throw ValidationError("dimension does not match the domain");
    const json& maps = j.at("maps");
    for (const json& m : maps.value("prefix", json::array())) d.map_prefix.push_back(map_from(m));
    d.map_tail = ratio_tail_from(maps.value("tail", json::object()));
    const json& probs = j.at("probs");
    d.prob_prefix = probs.value("prefix", std::vector<double>{});
    d.prob_tail = prob_tail_from(probs.value("tail", json::object()));
    const json placement = j.value("placement", json::object());
    d.placement.rule = rule_from(placement.value("rule", "explicit_only"));
    d.placement.offset = placement.value("offset", d.placement.offset);
    d.placement.shell_factor = placement.value("shell_factor", d.placement.shell_factor);
    d.placement.angle_step = placement.value("angle_step", d.placement.angle_step);
    d.j0 = j.value("j0", std::uint64_t{1});
    d.thermodynamics_only = j.value("thermodynamics_only", false);
    return d;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed system spec: ") + e.what());
  }
}

SystemDescription read_system_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open system spec " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return read_system(os.str());
}

void write_system_file(const SystemDescription& desc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write system spec " + path.string());
  out << write_system(desc);
}

std::vector<std::string> builtin_system_names() {
  return {"dyadic", "gamma3", "disk-gamma", "paper-gamma3", "uniform4"};
}

SystemDescription builtin_system(const std::string& name) {
  SystemDescription d;
  d.id = name;
  if (name == "dyadic") {
    d.domain = Domain::interval(0.0, 1.0);
    d.map_tail = {TailKind::geometric, 1.0, 0.5, 2.0};
    d.prob_tail = {TailKind::geometric, 1.0, 0.5, 2.0};
    d.placement.rule = Placement::Rule::packed;
    d.thermodynamics_only = true;
    return d;
  }
  if (name == "gamma3") {
    d.domain = Domain::interval(0.0, 1.0);
    d.map_tail = {TailKind::geometric, 1.0, 1.0 / 3.0, 2.0};
    d.prob_tail = {TailKind::geometric, 1.0, 0.5, 2.0};
    d.placement.rule = Placement::Rule::offset_accumulate;
    d.placement.offset = 2.0;
    return d;
  }
  if (name == "disk-gamma" || name == "paper-gamma3") {
    d.domain = Domain::ball({0.0, 0.0}, 1.0);
    d.map_tail = {TailKind::geometric, 1.0, 1.0 / 3.0, 2.0};
    d.prob_tail = {TailKind::geometric, 1.0, 0.5, 2.0};
    d.placement.rule = Placement::Rule::disk_shells;
    d.placement.shell_factor = 3.0;
    d.placement.angle_step = std::numbers::pi * (3.0 - std::sqrt(5.0));
    return d;
  }
  if (name == "uniform4") {
    d.domain = Domain::interval(0.0, 1.0);
    for (int i = 0; i < 4; ++i) {
      d.map_prefix.push_back({0.2, Mat2::identity(), {i * (0.8 / 3.0), 0.0}});
      d.prob_prefix.push_back(0.25);
    }
    return d;
  }
  throw PreconditionError("unknown builtin system '" + name + "'");
}

InfiniteIFS load_system(const std::string& path_or_name, const std::filesystem::path& search_dir) {
  namespace fs = std::filesystem;
  SystemDescription desc;
  if (fs::is_regular_file(path_or_name)) {
    desc = read_system_file(path_or_name);
  } else if (!search_dir.empty() && fs::is_regular_file(search_dir / path_or_name)) {
    desc = read_system_file(search_dir / path_or_name);
  } else if (!search_dir.empty() && fs::is_regular_file(search_dir / (path_or_name + ".spec"))) {
    desc = read_system_file(search_dir / (path_or_name + ".spec"));
  } else {
    desc = builtin_system(strip_name(path_or_name));
  }
  InfiniteIFS system(std::move(desc));
  require_pressure_condition(system);
  return system;
}

}  // namespace qcoef
