#pragma once

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "factor.hpp"

namespace toricwf {

using json = nlohmann::json;

// Malformed or inconsistent input files.
class InputError : public Error {
 public:
  using Error::Error;
};

namespace io {

// Integers beyond 2^53 go out as strings so any JSON reader keeps them exact.
inline json to_json(const Integer& x) {
  static const Integer limit = Integer(1) << 53;
  if (abs(x) <= limit) return x.get_si();
  return x.get_str();
}

inline Integer integer_from_json(const json& j) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) {
    Integer x;
    if (x.set_str(j.get<std::string>(), 10) != 0) throw InputError("not an integer: " + j.dump());
    return x;
  }
  throw InputError("expected an integer, got " + j.dump());
}

inline json to_json(const LatticeVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline LatticeVector vector_from_json(const json& j, std::optional<std::size_t> rank = std::nullopt) {
  if (!j.is_array()) throw InputError("expected an integer vector, got " + j.dump());
  LatticeVector v;
  for (const auto& x : j) v.push_back(integer_from_json(x));
  if (rank && v.size() != *rank) throw InputError("vector " + j.dump() + " has the wrong length");
  return v;
}

inline json to_json(const std::vector<LatticeVector>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

inline std::vector<LatticeVector> vectors_from_json(const json& j, std::optional<std::size_t> rank = std::nullopt) {
  if (!j.is_array()) throw InputError("expected a list of vectors");
  std::vector<LatticeVector> out;
  for (const auto& v : j) out.push_back(vector_from_json(v, rank));
  return out;
}

inline json to_json(const Fan& f) {
  json cones = json::array();
  for (const auto& c : f.maximal_cones()) {
    if (c.empty()) continue;
    cones.push_back(c.rays());
  }
  return {{"rank", f.rank()}, {"rays", to_json(f.rays())}, {"cones", cones}};
}

inline json to_json(const CobordismFan& b) {
  json j = to_json(b.fan());
  j["v0"] = to_json(b.v0());
  return j;
}

struct FanFile {
  Fan fan;
  std::optional<LatticeVector> v0;
  std::vector<Cone> listed;  // the "cones" entries in file order

  CobordismFan cobordism() const {
    if (!v0) throw InputError("v0 required");
    return CobordismFan(fan, *v0);
  }
};

inline FanFile fan_from_json(const json& j) {
  if (!j.is_object()) throw InputError("fan file: expected an object");
  for (const char* key : {"rank", "rays", "cones"})
    if (!j.contains(key)) throw InputError(std::string("fan file: missing \"") + key + "\"");
  if (!j["rank"].is_number_unsigned()) throw InputError("fan file: rank must be a nonnegative integer");
  const auto rank = j["rank"].get<std::size_t>();
  FanFile out;
  auto rays = vectors_from_json(j["rays"], rank);
  if (!j["cones"].is_array()) throw InputError("fan file: cones must be a list");
  for (const auto& c : j["cones"]) {
    if (!c.is_array()) throw InputError("fan file: each cone is a list of ray indices");
    std::vector<RayId> ids;
    for (const auto& i : c) {
      if (!i.is_number_unsigned()) throw InputError("fan file: bad ray index " + i.dump());
      ids.push_back(i.get<RayId>());
    }
    std::set<RayId> distinct(ids.begin(), ids.end());
    if (distinct.size() != ids.size()) throw InputError("fan file: repeated ray in cone " + c.dump());
    out.listed.emplace_back(std::move(ids));
  }
  try {
    out.fan = Fan(rank, std::move(rays), out.listed);
    validate(out.fan);
    if (j.contains("v0")) {
      out.v0 = vector_from_json(j["v0"], rank);
      CobordismFan b(out.fan, *out.v0);
      validate(b);
    }
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(std::string("fan file: ") + e.what());
  }
  return out;
}

inline json to_json(const MonomialIdealData& ideal, const std::vector<Cone>& listed) {
  json cones = json::array(), fs = json::array();
  for (const auto& [c, f] : ideal.functionals) {
    auto it = std::find(listed.begin(), listed.end(), c);
    if (it == listed.end()) throw NotFoundError("ideal: cone " + to_string(c) + " is not listed in the fan");
    cones.push_back(static_cast<std::size_t>(it - listed.begin()));
    fs.push_back(to_json(f));
  }
  return {{"cones", cones}, {"functionals", fs}};
}

// Cone indices refer to the "cones" list of the base fan file.
inline MonomialIdealData ideal_from_json(const json& j, const FanFile& base) {
  if (!j.is_object() || !j.contains("cones") || !j.contains("functionals"))
    throw InputError("ideal file: expected \"cones\" and \"functionals\"");
  const auto& cones = j["cones"];
  const auto& fs = j["functionals"];
  if (!cones.is_array() || !fs.is_array() || cones.size() != fs.size())
    throw InputError("ideal file: cones and functionals must be lists of equal length");
  MonomialIdealData ideal;
  for (std::size_t i = 0; i < cones.size(); ++i) {
    if (!cones[i].is_number_unsigned() || cones[i].get<std::size_t>() >= base.listed.size())
      throw InputError("ideal file: bad cone index " + cones[i].dump());
    const Cone& c = base.listed[cones[i].get<std::size_t>()];
    if (ideal.functionals.count(c)) throw InputError("ideal file: cone listed twice");
    ideal.functionals[c] = vectors_from_json(fs[i], base.fan.rank());
  }
  try {
    validate_ideal(base.fan, ideal);
  } catch (const Error& e) {
    throw InputError(std::string("ideal file: ") + e.what());
  }
  return ideal;
}

inline json to_json(const FactorizationCertificate& cert) {
  json steps = json::array();
  for (const auto& s : cert.steps) {
    steps.push_back({{"kind", to_string(s.kind)},
                     {"center", to_json(s.center)},
                     {"ray", to_json(s.ray)},
                     {"fan_before", to_json(s.fan_before)},
                     {"fan_after", to_json(s.fan_after)},
                     {"piece", s.piece},
                     {"circuit", to_json(s.circuit)}});
  }
  return {{"source_fan", to_json(cert.source_fan)},
          {"target_fan", to_json(cert.target_fan)},
          {"source_refined", cert.source_refined},
          {"desingularization_steps", cert.desingularization_steps},
          {"steps", steps}};
}

inline FactorizationCertificate certificate_from_json(const json& j) {
  auto need = [](const json& o, const char* key) -> const json& {
    if (!o.is_object() || !o.contains(key)) throw InputError(std::string("certificate: missing \"") + key + "\"");
    return o[key];
  };
  FactorizationCertificate cert;
  cert.source_fan = fan_from_json(need(j, "source_fan")).fan;
  cert.target_fan = fan_from_json(need(j, "target_fan")).fan;
  if (j.contains("source_refined")) cert.source_refined = j["source_refined"].get<bool>();
  if (j.contains("desingularization_steps")) cert.desingularization_steps = j["desingularization_steps"].get<std::size_t>();
  const auto& steps = need(j, "steps");
  if (!steps.is_array()) throw InputError("certificate: steps must be a list");
  for (const auto& s : steps) {
    FactorizationStep step;
    const auto kind = need(s, "kind").get<std::string>();
    if (kind == "blow-up") {
      step.kind = StepKind::BlowUp;
    } else if (kind == "blow-down") {
      step.kind = StepKind::BlowDown;
    } else {
      throw InputError("certificate: unknown step kind " + kind);
    }
    step.center = vectors_from_json(need(s, "center"), cert.source_fan.rank());
    step.ray = vector_from_json(need(s, "ray"), cert.source_fan.rank());
    step.fan_before = fan_from_json(need(s, "fan_before")).fan;
    step.fan_after = fan_from_json(need(s, "fan_after")).fan;
    step.piece = s.value("piece", 0L);
    if (s.contains("circuit")) step.circuit = vectors_from_json(s["circuit"]);
    cert.steps.push_back(std::move(step));
  }
  return cert;
}

inline json to_json(const SubdivisionRecord& r) {
  json cone = json::array();
  for (const auto& g : r.cone) cone.push_back(to_json(g));
  return {{"step", r.step}, {"n", to_json(r.n)},     {"type", r.type},
          {"kind", to_string(r.kind)}, {"center", to_json(r.center)}, {"cone", cone}};
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace io
}  // namespace toricwf
