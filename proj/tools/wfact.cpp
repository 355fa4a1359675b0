#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>

#include "toricwf/generate.hpp"
#include "toricwf/io.hpp"
#include "toricwf/weights.hpp"

using namespace toricwf;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInputError = 2;

bool json_out = false;

std::string plural(std::size_t n, const std::string& word) { return std::to_string(n) + " " + word + (n == 1 ? "" : "s"); }

PiDesingOptions desing_options(std::size_t max_steps) {
  PiDesingOptions opt;
  opt.max_subdivisions = max_steps;
  return opt;
}

int run_classify(const std::string& path) {
  auto file = io::fan_from_json(io::read_file(path));
  auto b = file.cobordism();
  json cones = json::array();
  std::size_t dependent = 0, circuits = 0;
  for (const auto& c : b.fan().cones()) {
    if (c.empty()) continue;
    json entry{{"cone", c.rays()}, {"generators", io::to_json(b.fan().generators_of(c))}};
    if (!b.is_dependent(c)) {
      entry["class"] = "independent";
      entry["n"] = io::to_json(b.projected_multiplicity(c));
    } else {
      ++dependent;
      const auto& rel = b.relation(c);
      auto t = cone_type(c, b);
      bool is_circuit = rel.circuit() == c;
      circuits += is_circuit;
      entry["class"] = "dependent";
      entry["circuit"] = is_circuit;
      json r = json::array();
      for (const auto& x : rel.r) r.push_back(io::to_json(x));
      entry["relation"] = r;
      entry["n"] = io::to_json(t.n);
      entry["type"] = t.type_index;
      entry["inv"] = {io::to_json(t.inv.first), t.inv.second};
      entry["sgn"] = to_string(t.sgn);
    }
    cones.push_back(entry);
  }
  if (json_out) {
    std::cout << json{{"cones", cones}, {"dependent", dependent}, {"circuits", circuits}}.dump(2) << "\n";
    return kOk;
  }
  for (const auto& e : cones) {
    std::cout << "cone " << e["cone"].dump() << " " << e["class"].get<std::string>();
    if (e["class"] == "dependent") {
      std::cout << (e["circuit"].get<bool>() ? " circuit" : "") << " relation " << e["relation"].dump() << " type ("
                << e["type"].get<int>() << ") inv (" << e["inv"][0].dump() << "," << e["inv"][1].dump() << ") sgn "
                << e["sgn"].get<std::string>();
    } else {
      std::cout << " n " << e["n"].dump();
    }
    std::cout << "\n";
  }
  if (dependent == 0) {
    std::cout << "no dependent cones\n";
  } else {
    std::cout << plural(dependent, "dependent cone") << ", " << plural(circuits, "circuit") << "\n";
  }
  return kOk;
}

int run_pidesing(const std::string& path, const std::string& out, const std::string& log_path, std::size_t max_steps) {
  auto b = io::fan_from_json(io::read_file(path)).cobordism();
  auto res = pi_desingularize(b, desing_options(max_steps));
  if (!is_pi_nonsingular_fan(res.fan)) throw InvariantViolation("pidesing: output is not π-nonsingular");
  if (!out.empty()) io::write_file(out, io::to_json(res.fan));
  json log = json::array();
  for (const auto& r : res.log) log.push_back(io::to_json(r));
  if (!log_path.empty()) io::write_file(log_path, log);
  if (json_out) {
    std::cout << json{{"subdivisions", res.log.size()}, {"fan", io::to_json(res.fan)}, {"log", log}}.dump(2) << "\n";
  } else {
    std::cout << plural(res.log.size(), "subdivision") << "\n";
  }
  return kOk;
}

int run_decompose(const std::string& path, const std::string& out_dir) {
  auto b = io::fan_from_json(io::read_file(path)).cobordism();
  auto x = chi(b);
  auto pieces = elementary_decomposition(b, x);
  std::sort(pieces.begin(), pieces.end(), [](const auto& p, const auto& q) { return p.value < q.value; });
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  json summary = json::array();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    std::string file;
    if (!out_dir.empty()) {
      file = (std::filesystem::path(out_dir) / ("piece_" + std::to_string(i) + ".json")).string();
      io::write_file(file, io::to_json(p.fan));
    }
    summary.push_back({{"chi", p.value},
                       {"circuits", p.fan.circuits().size()},
                       {"cones", p.fan.fan().maximal_cones().size()},
                       {"file", file}});
  }
  if (json_out) {
    std::cout << json{{"pieces", summary}}.dump(2) << "\n";
    return kOk;
  }
  std::cout << plural(pieces.size(), "elementary piece") << "\n";
  for (const auto& s : summary) {
    std::cout << "  chi " << s["chi"].get<long>() << ": " << plural(s["circuits"].get<std::size_t>(), "circuit") << ", "
              << plural(s["cones"].get<std::size_t>(), "maximal cone");
    if (!s["file"].get<std::string>().empty()) std::cout << " -> " << s["file"].get<std::string>();
    std::cout << "\n";
  }
  return kOk;
}

int report_verification(const VerificationReport& rep) {
  if (rep.ok) {
    if (!json_out) std::cout << "verified\n";
    return kOk;
  }
  std::cerr << "verification failed";
  if (rep.failed_step) std::cerr << " at step " << *rep.failed_step;
  std::cerr << ": " << rep.message << "\n";
  return kFailure;
}

int run_factorize(const std::string& fan_path, const std::string& base_path, const std::string& ideal_path, bool rev,
                  const std::string& out, std::size_t max_steps) {
  CobordismFan b = [&] {
    if (!fan_path.empty()) return io::fan_from_json(io::read_file(fan_path)).cobordism();
    auto base = io::fan_from_json(io::read_file(base_path));
    auto ideal = io::ideal_from_json(io::read_file(ideal_path), base);
    return build_cobordism(base.fan, ideal);
  }();
  auto cert = factorize(b, desing_options(max_steps));
  if (rev) cert = reverse(cert);
  if (!out.empty()) io::write_file(out, io::to_json(cert));
  std::size_t ups = 0, downs = 0;
  std::map<long, std::pair<std::size_t, std::size_t>> per_piece;
  for (const auto& s : cert.steps) {
    bool up = s.kind == StepKind::BlowUp;
    (up ? ups : downs)++;
    auto& pp = per_piece[s.piece];
    (up ? pp.first : pp.second)++;
  }
  auto rep = verify_certificate(cert);
  if (json_out) {
    json pieces = json::array();
    for (const auto& [v, c] : per_piece) pieces.push_back({{"chi", v}, {"blow_ups", c.first}, {"blow_downs", c.second}});
    std::cout << json{{"steps", cert.steps.size()},
                      {"blow_ups", ups},
                      {"blow_downs", downs},
                      {"pieces", pieces},
                      {"desingularization_steps", cert.desingularization_steps},
                      {"source_refined", cert.source_refined},
                      {"verified", rep.ok}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << plural(cert.steps.size(), "step");
    if (!cert.steps.empty()) std::cout << ": " << plural(ups, "blow-up") << ", " << plural(downs, "blow-down");
    std::cout << "\n";
    if (cert.desingularization_steps > 0)
      std::cout << "π-desingularization used " << plural(cert.desingularization_steps, "subdivision") << "\n";
    for (const auto& [v, c] : per_piece)
      std::cout << "  piece chi " << v << ": " << plural(c.first, "blow-up") << ", " << plural(c.second, "blow-down") << "\n";
  }
  return report_verification(rep);
}

int run_verify(const std::string& path) {
  auto cert = io::certificate_from_json(io::read_file(path));
  auto rep = verify_certificate(cert);
  if (json_out) {
    json j{{"ok", rep.ok}, {"message", rep.message}};
    j["failed_step"] = rep.failed_step ? json(*rep.failed_step) : json(nullptr);
    std::cout << j.dump(2) << "\n";
  }
  return report_verification(rep);
}

Twist parse_twist(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      if (std::stol(s.substr(slash + 1)) != 2) throw InputError("twist: denominator must be 2");
      return {std::stol(s.substr(0, slash))};
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Twist::at(std::stol(s));
    double d = std::stod(s);
    double twice = 2 * d;
    if (twice != std::round(twice)) throw InputError("twist must be an integer or a half-integer");
    return {static_cast<long>(std::llround(twice))};
  } catch (const std::logic_error&) {
    throw InputError("cannot parse twist " + s);
  }
}

std::string twist_str(Twist r) {
  if (r.doubled % 2 == 0) return std::to_string(r.doubled / 2);
  return std::to_string(r.doubled) + "/2";
}

std::string pattern_str(const SupportPattern& p) {
  std::string s = "{";
  bool first = true;
  for (long a : p) {
    s += (first ? "" : ",") + std::to_string(a);
    first = false;
  }
  return s + "}";
}

int run_weights(const std::vector<std::string>& raw, const std::string& twist) {
  std::vector<long> ws;
  for (const auto& tok : raw) {
    std::istringstream in(tok);
    long a;
    while (in >> a) ws.push_back(a);
    if (!in.eof()) throw InputError("weights: cannot parse " + tok);
  }
  auto w = WeightDecomposition::from_weights(ws);
  std::optional<Twist> r, used;
  if (!twist.empty()) {
    r = parse_twist(twist);
    used = canonical_twist(w, *r);
  }
  json comps = json::array();
  for (const auto& c : fixed_components(w))
    comps.push_back({{"weight", c.weight}, {"dimension", c.multiplicity - 1}, {"chi", c.chi}});
  json rows = json::array();
  for (const auto& p : all_patterns(w)) {
    auto [lo, hi] = limits(p);
    json row{{"pattern", p}, {"limit_0", lo}, {"limit_inf", hi}};
    if (used) row["semistable"] = semistable(w, *used, p);
    rows.push_back(row);
  }
  if (json_out) {
    json j{{"dimension", w.dimension()}, {"components", comps}, {"patterns", rows}};
    if (r) {
      j["twist"] = twist_str(*r);
      j["equivalent_twist"] = twist_str(*used);
    }
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  std::cout << "P^" << w.dimension() << " with " << plural(comps.size(), "fixed component") << "\n";
  for (const auto& c : comps)
    std::cout << "  P(A_" << c["weight"].get<long>() << ") = P^" << c["dimension"].get<std::size_t>() << "  chi "
              << c["chi"].get<long>() << "\n";
  if (r) {
    std::cout << "twist " << twist_str(*r);
    if (used->doubled != r->doubled) std::cout << " (same locus as " << twist_str(*used) << ")";
    std::cout << "\n";
  }
  std::cout << std::left << std::setw(20) << "pattern" << std::setw(10) << "t->0" << std::setw(10) << "t->inf";
  if (r) std::cout << "semistable";
  std::cout << "\n";
  for (const auto& row : rows) {
    std::cout << std::setw(20) << pattern_str(row["pattern"].get<SupportPattern>()) << std::setw(10)
              << row["limit_0"].get<long>() << std::setw(10) << row["limit_inf"].get<long>();
    if (r) std::cout << (row["semistable"].get<bool>() ? "yes" : "no");
    std::cout << "\n";
  }
  return kOk;
}

std::string render_svg(const Fan& f) {
  if (f.rank() != 2) throw InputError("render: the fan must have rank 2, got rank " + std::to_string(f.rank()));
  const double size = 400, c = size / 2, len = 160;
  auto unit = [](const LatticeVector& v) {
    double x = v[0].get_d(), y = v[1].get_d();
    double n = std::hypot(x, y);
    return std::pair<double, double>{x / n, -y / n};
  };
  std::ostringstream s;
  s << std::fixed << std::setprecision(3);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
    << size << " " << size << "\">\n";
  s << "<!-- " << io::to_json(f).dump() << " -->\n";
  for (const auto& m : f.maximal_cones()) {
    if (m.dim() != 2) continue;
    auto [x1, y1] = unit(f.ray(m.rays()[0]));
    auto [x2, y2] = unit(f.ray(m.rays()[1]));
    s << "<polygon points=\"" << c << "," << c << " " << c + len * x1 << "," << c + len * y1 << " " << c + len * x2 << ","
      << c + len * y2 << "\" fill=\"#dde6f0\" stroke=\"none\"/>\n";
  }
  for (RayId id : f.used_rays()) {
    auto [x, y] = unit(f.ray(id));
    s << "<line x1=\"" << c << "\" y1=\"" << c << "\" x2=\"" << c + len * x << "\" y2=\"" << c + len * y
      << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << c + (len + 14) * x << "\" y=\"" << c + (len + 14) * y
      << "\" font-size=\"14\" text-anchor=\"middle\" dominant-baseline=\"middle\">" << id << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

int run_render(const std::string& path, const std::string& side, const std::string& out) {
  auto file = io::fan_from_json(io::read_file(path));
  Fan f = file.fan;
  if (file.v0) {
    if (side != "plus" && side != "minus") throw InputError("render: --side must be plus or minus");
    f = project_boundary(file.cobordism(), side == "plus" ? Sign::Plus : Sign::Minus);
  }
  auto svg = render_svg(f);
  if (out.empty()) {
    std::cout << svg;
  } else {
    std::ofstream o(out);
    if (!o) throw InputError("cannot write " + out);
    o << svg;
  }
  return kOk;
}

int run_gen(std::uint64_t seed, std::size_t rank, std::size_t max_cones, long bound, const std::string& out) {
  std::mt19937_64 rng(seed);
  GeneratorOptions opt;
  opt.rank = rank;
  opt.max_cones = max_cones;
  opt.lo = -bound;
  opt.hi = bound;
  auto j = io::to_json(random_cobordism_fan(rng, opt));
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    io::write_file(out, j);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toric weak factorization: cobordism fans, π-desingularization and blow-up/blow-down certificates"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", json_out, "Machine-readable output");
  std::size_t max_steps = 1000000;
  app.add_option("--max-steps", max_steps, "Bound on π-desingularization subdivisions");

  std::string fan, base, ideal, out, log, cert, twist, side = "plus", out_dir;
  std::vector<std::string> weights;
  bool rev = false;
  std::uint64_t seed = 0;
  std::size_t rank = 3, max_cones = 3;
  long bound = 3;

  auto* classify = app.add_subcommand("classify", "Classify the cones of a cobordism fan");
  classify->add_option("--fan", fan, "Fan file with v0")->required();

  auto* pides = app.add_subcommand("pidesing", "π-desingularize a cobordism fan");
  pides->add_option("--fan", fan, "Fan file with v0")->required();
  pides->add_option("--out", out, "Refined fan file");
  pides->add_option("--log", log, "Subdivision log file");

  auto* decompose = app.add_subcommand("decompose", "Split a cobordism fan into elementary pieces");
  decompose->add_option("--fan", fan, "Fan file with v0")->required();
  decompose->add_option("--out-dir", out_dir, "Directory for per-piece fan files");

  auto* fact = app.add_subcommand("factorize", "Factor the birational map into blow-ups and blow-downs");
  auto* fan_opt = fact->add_option("--fan", fan, "Cobordism fan file");
  auto* base_opt = fact->add_option("--base", base, "Nonsingular base fan file");
  auto* ideal_opt = fact->add_option("--ideal", ideal, "Monomial ideal file for --base");
  base_opt->needs(ideal_opt);
  ideal_opt->needs(base_opt);
  fan_opt->excludes(base_opt);
  fact->add_flag("--reverse", rev, "Emit the certificate of the inverse map");
  fact->add_option("--out", out, "Certificate file");

  auto* verify = app.add_subcommand("verify", "Check a factorization certificate");
  verify->add_option("--cert", cert, "Certificate file")->required();

  auto* wts = app.add_subcommand("weights", "Fixed components and semistable loci of a K*-action on P^k");
  wts->add_option("weights", weights, "Integer weights, e.g. \"1 1 -1 -1\"")->required();
  wts->add_option("--twist", twist, "Twist r, an integer or half-integer (e.g. -1/2)");

  auto* render = app.add_subcommand("render", "SVG drawing of a rank-2 fan or quotient fan");
  render->add_option("--fan", fan, "Fan file")->required();
  render->add_option("--side", side, "For cobordism fans: plus or minus boundary")->capture_default_str();
  render->add_option("--out", out, "SVG file (default stdout)");

  auto* gen = app.add_subcommand("gen", "Random π-strictly convex cobordism fan");
  gen->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen->add_option("--rank", rank, "Rank of N+")->capture_default_str();
  gen->add_option("--max-cones", max_cones, "Maximal number of maximal cones")->capture_default_str();
  gen->add_option("--bound", bound, "Ray entries lie in [-bound, bound]")->capture_default_str();
  gen->add_option("--out", out, "Fan file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*classify) return run_classify(fan);
    if (*pides) return run_pidesing(fan, out, log, max_steps);
    if (*decompose) return run_decompose(fan, out_dir);
    if (*fact) {
      if (fan.empty() && base.empty()) throw InputError("factorize: give --fan or --base with --ideal");
      return run_factorize(fan, base, ideal, rev, out, max_steps);
    }
    if (*verify) return run_verify(cert);
    if (*wts) return run_weights(weights, twist);
    if (*render) return run_render(fan, side, out);
    if (*gen) return run_gen(seed, rank, max_cones, bound, out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
