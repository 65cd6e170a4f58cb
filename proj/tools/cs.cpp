// cs: command-line front end for seeds, scattering diagrams, theta
// functions, surface curves, folding and the verification suites.
//
// Exit status: 0 on success (and all checks passing), 1 on a computation
// error or a failed check, 2 on malformed input.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cs/errors.hpp"
#include "cs/folding.hpp"
#include "cs/skein.hpp"
#include "cs/suites.hpp"
#include "cs/surface.hpp"
#include "cs/theta.hpp"

using namespace cs;
using ojson = nlohmann::ordered_json;

namespace {

struct Options {
  std::string command;
  std::string seed, surface, curve, partition, path, side = "A", format = "text";
  std::string p, q, ps, suite;
  unsigned order = 6, project_order = 0, depth = 3, rand_seed = 1;
  int64_t weight = 1;
  bool pstar = false, classical = false, prin_project = false;
};

struct Report {
  ojson data = ojson::object();
  std::string text;
  bool pass = true;
};

// ---------------------------------------------------------------------------
// Input

bool readable_file(const std::string& s) {
  std::error_code ec;
  return !s.empty() && std::filesystem::is_regular_file(s, ec);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '(' && c != ')' && c != '[' && c != ']') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

QVec parse_qvec(const std::string& s, const char* what) {
  QVec v;
  for (const auto& part : split(s, ',')) {
    if (part.empty()) throw ParseError(std::string("empty entry in ") + what + " '" + s + "'");
    v.push_back(parse_rational(part));
  }
  if (v.empty()) throw ParseError(std::string("empty vector for ") + what);
  return v;
}

Exp parse_exp(const std::string& s, const char* what) {
  Exp e;
  for (const auto& x : parse_qvec(s, what)) {
    if (x.get_den() != 1 || !x.get_num().fits_slong_p())
      throw ParseError(std::string(what) + " must be an integer vector: '" + s + "'");
    e.push_back(x.get_num().get_si());
  }
  return e;
}

CompatibleSeed load_seed(const std::string& s) {
  if (s.empty()) throw ParseError("--seed is required");
  if (readable_file(s)) return seed_from_json_text(slurp(s));
  if (s == "a2") return examples::a2(1);
  if (s == "a2-classical") return examples::a2_classical();
  if (s == "annulus") return examples::annulus();
  if (s == "kronecker-prin") return examples::kronecker_prin();
  if (s == "markov") return examples::markov();
  if (s == "cyclic-a3-prin") return examples::cyclic_a3_prin();
  if (s.rfind("surface:", 0) == 0) return seed_of(
      [&] {
        std::string name = s.substr(8);
        if (name == "annulus") return surfaces::annulus();
        if (name == "punctured-torus") return surfaces::punctured_torus();
        throw ParseError("unknown surface seed '" + name + "'");
      }());
  throw ParseError("seed '" + s + "' is neither a readable file nor a built-in name");
}

TriangulatedSurface load_surface(const std::string& s) {
  if (s.empty()) throw ParseError("--surface is required");
  if (readable_file(s)) return surface_from_json_text(slurp(s));
  if (s == "annulus") return surfaces::annulus();
  if (s == "punctured-torus") return surfaces::punctured_torus();
  if (s == "punctured-digon") return surfaces::punctured_digon();
  auto colon = s.find(':');
  if (colon != std::string::npos) {
    std::string head = s.substr(0, colon);
    Exp args = parse_exp(s.substr(colon + 1), "surface parameters");
    for (auto a : args)
      if (a < 1) throw ParseError("surface parameters must be positive");
    if (head == "polygon" && args.size() == 1 && args[0] >= 3) return surfaces::polygon(static_cast<size_t>(args[0]));
    if (head == "annulus" && args.size() == 2)
      return surfaces::annulus_pq(static_cast<size_t>(args[0]), static_cast<size_t>(args[1]));
  }
  throw ParseError("surface '" + s + "' is neither a readable file nor a built-in name");
}

CurveWord load_curve(const TriangulatedSurface& surf, const std::string& s) {
  if (s.empty()) throw ParseError("--curve is required");
  return curve_from_text(surf, readable_file(s) ? slurp(s) : s);
}

size_t label_or_index(const CompatibleSeed& seed, const std::string& tok) {
  for (size_t i = 0; i < seed.size(); ++i)
    if (seed.labels()[i] == tok) return i;
  if (!tok.empty() && tok.find_first_not_of("0123456789") == std::string::npos) {
    size_t i = std::stoul(tok);
    if (i < seed.size()) return i;
  }
  throw ParseError("'" + tok + "' is not a label or index of the seed");
}

// Partitions come as a JSON file holding an array of arrays, or inline as
// "a,b,c;d,e,f".  Entries are labels or indices.
std::vector<std::vector<size_t>> load_partition(const CompatibleSeed& seed, const std::string& s) {
  if (s.empty()) throw ParseError("--partition is required");
  std::vector<std::vector<size_t>> parts;
  if (readable_file(s)) {
    ojson j;
    try {
      j = ojson::parse(slurp(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid partition JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("parts")) j = j["parts"];
    if (!j.is_array()) throw ParseError("partition must be an array of parts");
    for (const auto& part : j) {
      if (!part.is_array()) throw ParseError("each part must be an array");
      std::vector<size_t> idx;
      for (const auto& x : part)
        idx.push_back(label_or_index(seed, x.is_string() ? x.get<std::string>() : std::to_string(x.get<long>())));
      parts.push_back(idx);
    }
    return parts;
  }
  for (const auto& part : split(s, ';')) {
    std::vector<size_t> idx;
    for (const auto& tok : split(part, ',')) idx.push_back(label_or_index(seed, tok));
    parts.push_back(idx);
  }
  return parts;
}

Side parse_side(const std::string& s) {
  if (s == "A" || s == "a") return Side::A;
  if (s == "X" || s == "x") return Side::X;
  throw ParseError("--side must be A or X");
}

unsigned capped(unsigned order) {
  if (const char* cap = std::getenv("CS_MAX_ORDER")) {
    char* end = nullptr;
    unsigned long c = std::strtoul(cap, &end, 10);
    if (end == cap || *end) throw ParseError("CS_MAX_ORDER must be a non-negative integer");
    if (order > c)
      throw ParseError("order " + std::to_string(order) + " exceeds CS_MAX_ORDER=" + std::to_string(c));
  }
  return order;
}

// ---------------------------------------------------------------------------
// Rendering helpers

std::string qvec_str(const QVec& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
  return s + ")";
}

ojson qvec_json(const QVec& v) {
  ojson a = ojson::array();
  for (const auto& x : v) a.push_back(x.get_str());
  return a;
}

ojson qmat_json(const QMat& m) {
  ojson a = ojson::array();
  for (const auto& r : m) a.push_back(qvec_json(r));
  return a;
}

ojson element_json(const TorusElement& x) {
  ojson terms = ojson::array();
  for (const auto& [e, c] : x.terms()) terms.push_back({{"exponent", e}, {"coeff", c.str()}});
  return {{"text", x.str()}, {"terms", terms}};
}

std::string coeff_map_str(const std::map<Exp, TCoeff>& m) {
  std::string s;
  for (const auto& [e, c] : m) s += (s.empty() ? "" : " + ") + ("(" + c.str() + ")*theta" + exp_str(e));
  return s.empty() ? "0" : s;
}

bool quantum_for(const CompatibleSeed& seed, Side side, bool classical) {
  if (classical) return false;
  return side == Side::X || seed.has_lambda();
}

ScatteringDiagram completed_diagram(const Options& o, const CompatibleSeed& seed, Side side) {
  bool quantum = quantum_for(seed, side, o.classical);
  return consistent_complete(initial_diagram(seed, side, o.order, quantum), o.order);
}

// ---------------------------------------------------------------------------
// Commands

Report cmd_mutate(const Options& o) {
  auto seed = load_seed(o.seed);
  MutationPath path;
  if (!o.path.empty())
    for (const auto& tok : split(o.path, ',')) path.push_back(label_or_index(seed, tok));
  for (size_t j : path)
    if (seed.is_frozen(j)) throw ParseError("cannot mutate at frozen index '" + seed.labels()[j] + "'");
  auto m = mutate_along(seed, path);
  Report r;
  r.data["path"] = path;
  r.data["seed"] = ojson::parse(seed_to_json_text(m));
  ojson vars = ojson::array();
  std::ostringstream os;
  os << "path:";
  for (size_t j : path) os << ' ' << seed.labels()[j];
  os << "\nomega: " << q_str(m.omega_matrix()) << '\n';
  for (size_t i : seed.unfrozen()) {
    auto a = cluster_variable(seed, path, i);
    Exp g = g_vector(a, seed);
    vars.push_back({{"label", seed.labels()[i]}, {"g_vector", g}, {"value", element_json(a)}});
    os << "A[" << seed.labels()[i] << "] = " << a.str() << "   g = " << exp_str(g) << '\n';
  }
  r.data["cluster_variables"] = vars;
  r.text = os.str();
  return r;
}

Report cmd_scatter(const Options& o) {
  auto seed = load_seed(o.seed);
  CompletionStats stats;
  Side side = parse_side(o.side);
  auto d = consistent_complete(initial_diagram(seed, side, o.order, quantum_for(seed, side, o.classical)), o.order,
                               true, &stats);
  Report r;
  r.text = d.dump();
  ojson walls = ojson::array();
  for (const auto& w : d.walls()) {
    ojson g = ojson::array();
    for (const auto& c : w.g) g.push_back(c.str());
    walls.push_back({{"normal", w.normal},
                     {"full", w.full},
                     {"initial", w.initial},
                     {"start", v3_str(w.start)},
                     {"end", v3_str(w.end)},
                     {"function", g}});
  }
  r.data = {{"side", o.side},
            {"order", o.order},
            {"rank", d.rank()},
            {"walls", walls},
            {"walls_added", stats.walls_added},
            {"parallel_skipped", stats.parallel_skipped},
            {"dump", d.dump()}};
  return r;
}

Report cmd_theta(const Options& o) {
  if (o.p.empty()) throw ParseError("--p is required");
  Exp p = parse_exp(o.p, "--p");
  Report r;
  bool zero = std::all_of(p.begin(), p.end(), [](int64_t x) { return x == 0; });
  if (zero && o.seed.empty()) {
    // theta_0 = 1 in every seed.
    r.text = "1\n";
    r.data = {{"p", p}, {"theta", {{"text", "1"}, {"terms", ojson::array({{{"exponent", p}, {"coeff", "1"}}})}}}};
    return r;
  }
  auto seed = load_seed(o.seed);
  if (p.size() != seed.size())
    throw ParseError("--p has " + std::to_string(p.size()) + " entries, the seed has " + std::to_string(seed.size()));
  auto d = completed_diagram(o, seed, parse_side(o.side));
  QVec q = o.q.empty() ? positive_point(d) : parse_qvec(o.q, "--q");
  if (q.size() != d.rank())
    throw ParseError("--q needs " + std::to_string(d.rank()) + " coordinates (unfrozen directions)");
  auto th = theta(d, p, q, o.order);
  if (o.prin_project) {
    // Forget principal coefficients: keep the first half of the exponents.
    size_t n = seed.size() / 2;
    IMat proj(n, IVec(seed.size(), 0));
    for (size_t i = 0; i < n; ++i) proj[i][i] = 1;
    th = th.map_exponents(proj);
  }
  r.text = th.str() + "\n";
  r.data = {{"p", p}, {"q", qvec_json(q)}, {"order", o.order}, {"theta", element_json(th)}};
  return r;
}

Report cmd_theta_mult(const Options& o) {
  if (o.ps.empty()) throw ParseError("--ps is required");
  auto seed = load_seed(o.seed);
  std::vector<Exp> ps;
  for (const auto& v : split(o.ps, ';')) {
    ps.push_back(parse_exp(v, "--ps"));
    if (ps.back().size() != seed.size()) throw ParseError("every vector in --ps needs one entry per seed index");
  }
  auto d = completed_diagram(o, seed, parse_side(o.side));
  auto prod = theta_product(d, ps, o.order);
  Report r;
  r.text = coeff_map_str(prod) + "\n";
  ojson terms = ojson::array();
  for (const auto& [e, c] : prod) terms.push_back({{"theta", e}, {"coeff", c.str()}});
  r.data = {{"factors", ps}, {"order", o.order}, {"expansion", terms}};
  return r;
}

Report cmd_bracelet(const Options& o) {
  auto surf = load_surface(o.surface);
  auto c = load_curve(surf, o.curve);
  if (c.kind != CurveKind::Loop) throw ParseError("bracelet needs a closed loop");
  if (o.weight < 1) throw ParseError("--weight must be positive");
  Report r;
  r.data["curve"] = curve_str(surf, c);
  r.data["weight"] = o.weight;
  if (!o.pstar) {
    auto tr = trace_monodromy(surf, c, static_cast<unsigned>(o.weight));
    r.text = tr.str() + "\n";
    r.data["x_side"] = {{"scale", tr.scale}, {"text", tr.str()}};
    return r;
  }
  auto seed = o.seed.empty() ? seed_of(surf) : load_seed(o.seed);
  BraceletComponent comp;
  comp.loop = c;
  comp.weight = o.weight;
  bool quantum = seed.has_lambda() && !o.classical;
  auto x = bracelet_expand(surf, Bracelet{{comp}}, seed, quantum);
  r.text = x.str() + "\n";
  r.data["a_side"] = element_json(x);
  r.data["g_vector"] = g_vector(x, seed);
  return r;
}

Report cmd_shear(const Options& o) {
  auto surf = load_surface(o.surface);
  auto c = load_curve(surf, o.curve);
  QVec b = shear_coords(surf, c);
  Report r;
  std::ostringstream os;
  os << "curve: " << curve_str(surf, c) << "\nshear: " << qvec_str(b) << '\n';
  r.data = {{"curve", curve_str(surf, c)}, {"labels", surf.labels()}, {"shear", qvec_json(b)}};
  if (c.start == EndKind::Boundary && c.finish == EndKind::Boundary) {
    QVec pi = intersection_coords(surf, c);
    os << "intersection: " << qvec_str(pi) << '\n';
    r.data["intersection"] = qvec_json(pi);
  }
  r.text = os.str();
  return r;
}

Report cmd_fold(const Options& o) {
  auto seed = load_seed(o.seed);
  auto cov = check_covering(seed, load_partition(seed, o.partition));
  bool symmetric = has_cyclic_symmetry(seed, cov.parts);
  auto verdict = check_unfolding(cov, o.depth);
  Report r;
  std::ostringstream os;
  os << "omega_bar: " << q_str(cov.omega_bar) << "\nomega_bar_circ: " << q_str(cov.omega_bar_circ) << "\nd_bar:";
  ojson dbar = ojson::array();
  for (const auto& d : cov.d_bar) {
    os << ' ' << d.get_str();
    dbar.push_back(d.get_str());
  }
  os << "\ncyclic symmetry: " << (symmetric ? "yes" : "no") << "\nunfolding (depth " << o.depth
     << "): " << (verdict.ok ? "ok" : "fails: " + verdict.failure) << " after " << verdict.seeds_checked
     << " exchange matrices\n";
  r.data = {{"omega_bar", qmat_json(cov.omega_bar)},
            {"omega_bar_circ", qmat_json(cov.omega_bar_circ)},
            {"d_bar", dbar},
            {"folded_seed", ojson::parse(seed_to_json_text(cov.folded))},
            {"cyclic_symmetry", symmetric},
            {"unfolding", {{"ok", verdict.ok}, {"seeds_checked", verdict.seeds_checked}, {"failure", verdict.failure}}}};
  if (o.project_order > 0) {
    unsigned l = capped(o.project_order);
    auto big = consistent_complete(initial_diagram(cov.big, Side::A, l, false), l);
    auto proj = project_diagram(big, cov, l, o.rand_seed);
    os << "projected diagram:\n" << proj.dump();
    r.data["projected"] = proj.dump();
    if (!o.p.empty()) {
      Exp m = parse_exp(o.p, "--p");
      if (m.size() != cov.parts.size()) throw ParseError("--p needs one entry per part");
      auto rep = folded_theta_compare(cov, m, l);
      os << "folded theta:    " << rep.folded.str() << "\nprojected theta: " << rep.projected.str() << '\n';
      if (rep.has_lift) os << "lifted theta:    " << rep.lifted.str() << '\n';
      r.data["theta"] = {{"folded", element_json(rep.folded)},
                         {"projected", element_json(rep.projected)},
                         {"has_lift", rep.has_lift},
                         {"folded_equals_projected", rep.folded_equals_projected}};
      if (rep.has_lift) r.data["theta"]["lifted"] = element_json(rep.lifted);
    }
  }
  r.text = os.str();
  return r;
}

Report cmd_verify(const Options& o) {
  auto rep = run_suite(o.suite);
  Report r;
  r.text = rep.text();
  r.pass = rep.pass();
  ojson checks = ojson::array();
  for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"lhs", c.lhs}, {"rhs", c.rhs}});
  r.data = {{"suite", rep.name}, {"pass", rep.pass()}, {"checks", checks}};
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum cluster scattering diagrams, theta functions and surface bracelets"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto with_order = [&](CLI::App* s) { s->add_option("--order", o.order, "Truncation order"); };
  auto with_seed = [&](CLI::App* s, bool required = true) {
    auto opt = s->add_option("--seed", o.seed, "Seed JSON file or built-in name");
    if (required) opt->required();
  };
  auto with_side = [&](CLI::App* s) {
    s->add_option("--side", o.side, "A or X");
    s->add_flag("--classical", o.classical, "Use the classical limit t = 1");
  };

  auto* mutate = app.add_subcommand("mutate", "Mutate a seed and list its cluster variables");
  with_seed(mutate);
  mutate->add_option("--path", o.path, "Comma-separated labels or indices");

  auto* scatter = app.add_subcommand("scatter", "Consistent completion of the initial diagram");
  with_seed(scatter);
  with_order(scatter);
  with_side(scatter);

  auto* th = app.add_subcommand("theta", "Theta function at a base point");
  with_seed(th, false);
  with_order(th);
  with_side(th);
  th->add_option("--p", o.p, "Exponent vector")->required();
  th->add_option("--q", o.q, "Base point in unfrozen coordinates (default: positive chamber)");
  th->add_flag("--prin-project", o.prin_project, "Drop principal coefficient exponents");

  auto* tm = app.add_subcommand("theta-mult", "Expand a product of theta functions");
  with_seed(tm);
  with_order(tm);
  with_side(tm);
  tm->add_option("--ps", o.ps, "Semicolon-separated exponent vectors")->required();

  auto* br = app.add_subcommand("bracelet", "Trace expansion of a loop bracelet");
  br->add_option("--surface", o.surface, "Surface JSON file or built-in name")->required();
  br->add_option("--curve", o.curve, "Curve text or file")->required();
  br->add_option("--weight", o.weight, "Number of parallel copies");
  br->add_flag("--pstar", o.pstar, "Pull back to the A-side of the surface seed");
  br->add_flag("--classical", o.classical, "Use the classical limit t = 1");
  with_seed(br, false);
  with_order(br);

  auto* sh = app.add_subcommand("shear", "Shear and intersection coordinates of a curve");
  sh->add_option("--surface", o.surface, "Surface JSON file or built-in name")->required();
  sh->add_option("--curve", o.curve, "Curve text or file")->required();

  auto* fold = app.add_subcommand("fold", "Fold a seed along a partition");
  with_seed(fold);
  fold->add_option("--partition", o.partition, "Partition file or inline 'a,b;c,d'")->required();
  fold->add_option("--project-order", o.project_order, "Project the completed diagram at this order");
  fold->add_option("--depth", o.depth, "Depth of the unfolding search");
  fold->add_option("--p", o.p, "Folded exponent for the theta comparison");
  fold->add_option("--rand-seed", o.rand_seed, "Seed for the slice perturbation");

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", o.suite, "a2 | annulus | torus | folding | dt | properties")
      ->required()
      ->check(CLI::IsMember(suite_names()));
  verify->add_option("--rand-seed", o.rand_seed, "Unused; accepted for uniformity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    o.order = capped(o.order);
    Report r;
    std::string name = app.get_subcommands().front()->get_name();
    if (name == "mutate") r = cmd_mutate(o);
    else if (name == "scatter") r = cmd_scatter(o);
    else if (name == "theta") r = cmd_theta(o);
    else if (name == "theta-mult") r = cmd_theta_mult(o);
    else if (name == "bracelet") r = cmd_bracelet(o);
    else if (name == "shear") r = cmd_shear(o);
    else if (name == "fold") r = cmd_fold(o);
    else r = cmd_verify(o);

    if (o.format == "json") {
      ojson out{{"command", name}, {"pass", r.pass}, {"result", r.data}};
      std::cout << out.dump(2) << '\n';
    } else {
      std::cout << r.text;
    }
    return r.pass ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << '\n';
    return 2;
  } catch (const ComputationError& e) {
    std::cerr << "computation error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
