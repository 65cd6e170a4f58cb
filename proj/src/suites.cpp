#include "cs/suites.hpp"

#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "cs/errors.hpp"
#include "cs/folding.hpp"
#include "cs/theta.hpp"

namespace cs {

namespace {

TorusElement mono(const Exp& e, const TCoeff& c = 1) { return TorusElement::monomial(e, c); }

IdentityCheck same(std::string name, const TorusElement& lhs, const TorusElement& rhs) {
  return {std::move(name), lhs == rhs, lhs.str(), rhs.str()};
}

IdentityCheck holds(std::string name, bool ok, std::string lhs, std::string rhs) {
  return {std::move(name), ok, std::move(lhs), std::move(rhs)};
}

std::string map_str(const std::map<Exp, TCoeff>& m) {
  std::string out = "{";
  bool first = true;
  for (const auto& [e, c] : m) {
    out += (first ? "" : ", ") + exp_str(e) + ": " + c.str();
    first = false;
  }
  return out + "}";
}

// Counts instances of a randomized property and keeps the first failure.
struct Tally {
  explicit Tally(std::string n) : name(std::move(n)) {}
  std::string name;
  size_t runs = 0, failures = 0;
  std::string first;
  void add(bool ok, const std::function<std::string()>& describe) {
    ++runs;
    if (!ok && failures++ == 0) first = describe();
  }
  IdentityCheck check(size_t want) const {
    std::string lhs = std::to_string(runs - failures) + "/" + std::to_string(runs) + " instances hold";
    if (failures) lhs += "; first failure: " + first;
    return holds(name, failures == 0 && runs >= want, lhs, "at least " + std::to_string(want) + " instances");
  }
};

TorusElement random_element(std::mt19937& rng, size_t dim, int terms) {
  std::uniform_int_distribution<int> ex(-2, 2), co(-3, 3), tp(-2, 2);
  TorusElement x(dim);
  for (int i = 0; i < terms; ++i) {
    Exp e(dim);
    for (auto& v : e) v = ex(rng);
    x.add_term(e, TCoeff::t_power(tp(rng), co(rng)));
  }
  return x;
}

Twist random_twist(std::mt19937& rng, size_t dim) {
  std::uniform_int_distribution<int> d(-3, 3);
  std::vector<std::vector<mpq_class>> m(dim, std::vector<mpq_class>(dim, 0));
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = i + 1; j < dim; ++j) {
      m[i][j] = mpq_class(d(rng), 2);
      m[j][i] = -m[i][j];
    }
  return Twist::from_rationals(m);
}

QVec omega1_q(const CompatibleSeed& s, const QVec& v) {
  const auto& om = s.omega_matrix();
  QVec out(s.size(), 0);
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = 0; j < s.size(); ++j) out[j] += v[i] * om[i][j];
  return out;
}

std::string qvec_str(const QVec& v) {
  std::string out = "(";
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i].get_str();
  return out + ")";
}

ScatteringDiagram completed(const CompatibleSeed& seed, unsigned order, bool quantum) {
  return consistent_complete(initial_diagram(seed, Side::A, order, quantum), order);
}

const char* kAnnulusLoop = "loop: [(g1,R),(g2,L)]";

}  // namespace

bool SuiteReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

std::string SuiteReport::text() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << (c.pass ? "PASS " : "FAIL ") << name << " / " << c.name << ": " << c.lhs << (c.pass ? " == " : " != ")
       << c.rhs << "\n";
  os << (pass() ? "PASS " : "FAIL ") << name << " (" << checks.size() << " checks)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// A2

Checks a2_completion_checks() {
  Checks out;
  auto seed = examples::a2(1);
  Exp v12{0, 0};
  for (size_t i = 0; i < 2; ++i) {
    IVec b = seed.omega1_basis(i);
    for (size_t k = 0; k < 2; ++k) v12[k] += b[k];
  }
  for (unsigned order : {2u, 4u}) {
    auto d = completed(seed, order, true);
    std::string tag = "order " + std::to_string(order) + ": ";
    std::vector<Wall> added;
    for (const auto& w : d.walls())
      if (!w.initial) added.push_back(w);
    out.push_back(holds(tag + "walls added by completion", added.size() == 1, std::to_string(added.size()), "1"));
    if (added.size() != 1) continue;
    const Wall& w = added[0];
    bool ray = w.normal == IVec{1, 1} && w.locate(V3{1, -1, 0}) == 1 && w.locate(V3{-1, 1, 0}) == -1;
    out.push_back(holds(tag + "support of the added wall", ray, "normal " + exp_str(w.normal),
                        "ray R>=0 (1,-1), normal (1,1)"));
    Exp x = d.exponent(Exp{0, 0}, IVec{1, 1});
    out.push_back(holds(tag + "exponent of the added wall", x == v12, exp_str(x), exp_str(v12) + " = v1+v2"));
    bool psi = w.g == quantum_dilog(seed.multiplier(0));
    std::string g;
    for (const auto& c : w.g) g += (g.empty() ? "" : ", ") + c.str();
    out.push_back(holds(tag + "function of the added wall", psi, "[" + g + "]", "Psi_{t^1}: [1, t]"));
  }
  return out;
}

Checks a2_theta_checks() {
  Checks out;
  auto d = completed(examples::a2(1), 4, true);
  QVec q{mpq_class(17, 20), mpq_class(3, 2)};
  // v1 = (0,1), v2 = (-1,0)
  auto th = theta(d, {0, -1}, q, 4);
  out.push_back(same("theta_{-v1} at Q", th, mono({-1, 0}) + mono({-1, -1}) + mono({0, -1})));
  size_t nl = broken_lines(d, {0, -1}, q, 4).size();
  out.push_back(holds("broken lines for theta_{-v1}", nl == 3, std::to_string(nl), "3"));
  out.push_back(same("theta_0", theta(d, {0, 0}, q, 4), mono({0, 0})));
  return out;
}

// ---------------------------------------------------------------------------
// Annulus

Checks annulus_mutation_checks() {
  auto ann = examples::annulus();
  Twist tw = ann.a_twist();
  auto a1p = cluster_variable(ann, {0}, 0);
  auto lhs = t_multiply(mono({1, 0, 0, 0}), a1p, tw);
  auto rhs = t_multiply(mono({0, 0, 1, 0}), mono({0, 0, 0, 1}), tw) +
             t_multiply(mono({0, 1, 0, 0}), mono({0, 1, 0, 0}), tw).scaled(TCoeff::t_power(4));
  return {same("A1 A1' = A3 A4 + t^4 A2^2", lhs, rhs),
          holds("g-vector of A1'", g_vector(a1p, ann) == Exp{-1, 0, 1, 1}, exp_str(g_vector(a1p, ann)),
                "(-1,0,1,1)")};
}

Checks annulus_product_checks(unsigned order) {
  auto d = completed(examples::annulus(), order, true);
  auto prod = theta_product(d, {{0, 1, 0, 0}, {1, -1, 0, 0}}, order);
  std::map<Exp, TCoeff> want{{{1, 0, 0, 0}, TCoeff::t_power(-2)}, {{-1, 0, 1, 1}, TCoeff::t_power(2)}};
  Checks out{holds("theta_(0,1,0,0) theta_(1,-1,0,0) = q theta_(1,0,0,0) + q^-1 theta_(-1,0,1,1), q = t^-2",
                   prod == want, map_str(prod), map_str(want))};
  // The same product expanded at the positive chamber.
  QVec q = positive_point(d);
  Twist form = product_form(d);
  auto lhs = t_multiply(theta(d, {0, 1, 0, 0}, q, order), theta(d, {1, -1, 0, 0}, q, order), form);
  auto rhs = theta(d, {1, 0, 0, 0}, q, order).scaled(TCoeff::t_power(-2)) +
             theta(d, {-1, 0, 1, 1}, q, order).scaled(TCoeff::t_power(2));
  out.push_back(same("product expanded at the positive chamber", lhs, rhs));
  return out;
}

Checks annulus_chebyshev_checks(unsigned order) {
  Checks out;
  auto d = completed(examples::annulus(), order, true);
  Exp p{1, -1, 0, 0};
  QVec q = point_near(d, {1, -1}, default_perturbation(2));
  auto th = theta(d, p, q, order);
  for (unsigned k = 2; k <= 4; ++k) {
    auto tk = eval_poly(chebyshev_T(k), th, product_form(d));
    auto dec = theta_decompose(d, tk, q, order);
    Exp kp = p;
    for (auto& v : kp) v *= static_cast<int64_t>(k);
    std::map<Exp, TCoeff> want{{kp, TCoeff(1)}};
    out.push_back(holds("T_" + std::to_string(k) + "(theta_p) = theta_{" + std::to_string(k) + "p} near the limiting ray",
                        dec == want, map_str(dec), map_str(want)));
  }
  return out;
}

Checks annulus_bracelet_checks(unsigned order) {
  Checks out;
  auto a = surfaces::annulus();
  auto seed = examples::annulus();
  auto l = curve_from_text(a, kAnnulusLoop);
  QVec w = omega1_q(seed, intersection_coords(a, l));
  QVec g(w.size());
  for (size_t i = 0; i < w.size(); ++i) g[i] = -w[i];
  out.push_back(holds("g(L) = -omega_1(pi(L))", g == QVec{1, -1, 0, 0}, qvec_str(g), "(1,-1,0,0)"));
  auto d = completed(seed, order, true);
  QVec q = positive_point(d);
  for (int64_t k = 1; k <= 3; ++k) {
    BraceletComponent c;
    c.loop = l;
    c.weight = k;
    auto br = bracelet_expand(a, Bracelet{{c}}, seed, true);
    out.push_back(same("<" + std::to_string(k) + "L> = theta_{" + std::to_string(k) + "g(L)}", br,
                       theta(d, {k, -k, 0, 0}, q, order)));
  }
  return out;
}

Checks annulus_skein_checks() {
  auto a = surfaces::annulus();
  auto seed = examples::annulus();
  BraceletComponent c;
  c.loop = curve_from_text(a, kAnnulusLoop);
  auto l = bracelet_expand(a, Bracelet{{c}}, seed, true);
  auto lhs = t_multiply(mono({0, 1, 0, 0}), l, seed.a_twist());
  auto rhs = mono({1, 0, 0, 0}, TCoeff::t_power(-2)) + cluster_variable(seed, {0}, 0).scaled(TCoeff::t_power(2));
  return {same("A2 [L] = q A1 + q^-1 A1', q = t^-2", lhs, rhs)};
}

// ---------------------------------------------------------------------------
// Once-punctured torus

Checks torus_checks(unsigned order) {
  Checks out;
  auto t = surfaces::punctured_torus();
  auto base = seed_of(t);
  auto prin = principal_extend(base);
  Twist zero = Twist::zero(3);
  IMat rho(3, IVec(6, 0));
  for (size_t i = 0; i < 3; ++i) rho[i][i] = 1;

  auto l = loop_from_arcs(t, {1, 2});
  auto s_over = mono({2, -1, -1}) + mono({0, 1, -1}) + mono({0, -1, 1});  // (A1^2+A2^2+A3^2)/(A2 A3)
  auto trace = pstar(trace_monodromy(t, l), base);
  out.push_back(same("[L] from the trace = (A1^2+A2^2+A3^2)/(A2 A3)", trace, s_over));

  QVec w = omega1_q(base, intersection_coords(t, l));
  Exp gl(6, 0);
  for (size_t i = 0; i < 3; ++i) {
    if (w[i].get_den() != 1) throw ComputationError("g(L) is not integral");
    gl[i] = -w[i].get_num().get_si();
  }
  auto d = completed(prin, order, false);
  QVec q = positive_point(d);
  auto th_l = theta(d, gl, q, order).map_exponents(rho);
  out.push_back(same("theta_{g(L)} = [L]", th_l, trace));

  auto th_g = theta(d, {1, 0, 0, 0, 0, 0}, q, order).map_exponents(rho);
  auto th_neg = theta(d, {-1, 0, 0, 0, 0, 0}, q, order).map_exponents(rho);
  auto a1_inv = mono({-1, 0, 0});
  auto expected_neg = t_multiply(t_multiply(s_over, s_over, zero), a1_inv, zero);
  out.push_back(same("theta_{g(gamma)} = A1", th_g, mono({1, 0, 0})));
  out.push_back(same("theta_{-g(gamma)} = (A1^2+A2^2+A3^2)^2/(A1 A2^2 A3^2)", th_neg, expected_neg));
  out.push_back(same("theta_{g(L)}^2 = theta_{g(gamma)} theta_{-g(gamma)}", t_multiply(th_l, th_l, zero),
                     t_multiply(th_g, th_neg, zero)));

  // Skein side: gamma-notched from the loop, gamma gamma-notched = (2[L])^2.
  auto two_l = trace.scaled(2);
  auto notched = t_multiply(t_multiply(two_l, two_l, zero), a1_inv, zero);
  out.push_back(same("gamma-notched = 4 theta_{-g(gamma)}", notched, th_neg.scaled(4)));
  auto brac2 = pstar(trace_monodromy(t, l, 2), base);
  out.push_back(same("gamma gamma-notched = 8 + 4<2L>", t_multiply(mono({1, 0, 0}), notched, zero),
                     TorusElement::constant(3, 8) + brac2.scaled(4)));
  out.push_back(same("<2L> = [L]^2 - 2", brac2, t_multiply(trace, trace, zero) - TorusElement::constant(3, 2)));
  return out;
}

// ---------------------------------------------------------------------------
// Folding

Checks folding_checks(unsigned order) {
  Checks out;
  auto big = examples::cyclic_a3_prin();
  auto cov = check_covering(big, {{0, 1, 2}, {3, 4, 5}}, true);
  out.push_back(holds("folded omega-circ", cov.omega_bar_circ == QMat{{0, 3}, {-3, 0}}, q_str(cov.omega_bar_circ),
                      "[[0,3],[-3,0]]"));
  bool dbar = cov.d_bar == std::vector<mpq_class>{mpq_class(1, 3), mpq_class(1, 3)};
  out.push_back(holds("folded symmetrizers", dbar, cov.d_bar[0].get_str() + "," + cov.d_bar[1].get_str(), "1/3,1/3"));

  auto d = completed(big, order, false);
  Exp m{-1, -1, -1, 0, 0, 0};
  TorusElement prod = mono(m);
  for (size_t i = 0; i < 3; ++i) {
    IVec vi = big.omega1_basis(i), vp = big.omega1_basis((i + 2) % 3);
    Exp a(6), b(6);
    for (size_t k = 0; k < 6; ++k) a[k] = vi[k], b[k] = vi[k] + vp[k];
    prod = t_multiply(prod, mono(Exp(6, 0)) + mono(a) + mono(b), Twist::zero(6));
  }
  out.push_back(same("unfolded theta_m = z^m prod(1 + z^{v_i} + z^{v_i + v_{i-1}})", theta(d, m, positive_point(d), order),
                     prod));

  Exp mb{-3, 0}, v{0, 1};
  auto series = [&](std::vector<long> c) {
    TorusElement x(2);
    for (size_t j = 0; j < c.size(); ++j) x.add_term({mb[0], mb[1] + static_cast<int64_t>(j)}, c[j]);
    return x;
  };
  auto r = folded_theta_compare(cov, mb, order);
  out.push_back(same("folded seed: theta = z^m (1+x)^3", r.folded, series({1, 3, 3, 1})));
  out.push_back(same("projected slice: theta = z^m (1+x+x^2)^3", r.projected, series({1, 3, 6, 7, 6, 3, 1})));
  out.push_back(same("iota^* of the unfolded theta = projected theta", r.lifted, r.projected));
  out.push_back(holds("folded and projected theta differ", !r.folded_equals_projected, r.folded.str(),
                      r.projected.str()));
  return out;
}

// ---------------------------------------------------------------------------
// DT

Checks dt_checks(unsigned order) {
  Checks out;
  auto root = examples::a2(1);
  // One seed per cluster chamber, each taken as the root of its own diagram.
  std::set<QMat> seen;
  size_t chambers = 0;
  for (MutationPath path : {MutationPath{}, MutationPath{0}, MutationPath{1}, MutationPath{0, 1}, MutationPath{1, 0},
                            MutationPath{0, 1, 0}}) {
    auto s = mutate_along(root, path);
    CompatibleSeed sd(s.labels(), s.frozen(), s.omega_matrix(), s.lambda_matrix(), s.symmetrizers());
    std::string where = "seed mu";
    for (size_t j : path) where += std::to_string(j + 1);
    if (path.empty()) where = "initial seed";
    std::vector<Exp> gens{{1, 0}, {0, 1}, {1, 1}};
    auto d = completed(sd, order, true);
    QVec q = positive_point(d);
    for (const auto& m : gens) {
      Exp neg{-m[0], -m[1]};
      out.push_back(same(where + ": DT(theta_" + exp_str(m) + ") = theta_" + exp_str(neg),
                         dt_transform(d, theta(d, m, q, order), order), theta(d, neg, q, order)));
    }
    // Track distinct clusters by the cluster variables' g-vectors in the root.
    QMat key;
    for (size_t i = 0; i < 2; ++i) {
      auto g = g_vector(cluster_variable(root, path, i), root);
      key.push_back({mpq_class(g[0]), mpq_class(g[1])});
    }
    std::sort(key.begin(), key.end());
    chambers += seen.insert(key).second;
  }
  out.push_back(holds("distinct cluster chambers tested", chambers == 5, std::to_string(chambers), "5"));

  // In the initial seed: DT permutes the cluster variables and the
  // cluster monomials of the pairs forming a cluster.
  auto d = completed(root, order, true);
  QVec q = positive_point(d);
  std::set<Exp> tested;
  for (MutationPath path : {MutationPath{}, MutationPath{0}, MutationPath{0, 1}, MutationPath{1}, MutationPath{1, 0}}) {
    auto g1 = g_vector(cluster_variable(root, path, 0), root), g2 = g_vector(cluster_variable(root, path, 1), root);
    tested.insert(g1);
    tested.insert(g2);
    tested.insert({g1[0] + g2[0], g1[1] + g2[1]});
  }
  std::map<Exp, TorusElement> thetas;
  for (const auto& m : tested) thetas[m] = theta(d, m, q, order);
  std::map<Exp, Exp> image;
  std::set<Exp> hit;
  for (const auto& [m, th] : thetas) {
    auto x = dt_transform(d, th, order);
    for (const auto& [m2, th2] : thetas)
      if (th2 == x) image[m] = m2;
    if (image.count(m)) hit.insert(image[m]);
  }
  std::string mapping;
  for (const auto& [m, m2] : image) mapping += (mapping.empty() ? "" : ", ") + exp_str(m) + "->" + exp_str(m2);
  out.push_back(holds("DT is a bijection on the tested cluster monomials",
                      image.size() == tested.size() && hit.size() == tested.size(), mapping,
                      std::to_string(tested.size()) + " monomials mapped onto themselves"));
  return out;
}

// ---------------------------------------------------------------------------
// Randomized properties

Checks property_checks(unsigned seed_value, size_t instances) {
  std::mt19937 rng(seed_value);
  Checks out;

  {
    Tally assoc{"twist associativity"}, bar{"bar is an involutive anti-automorphism"};
    for (size_t k = 0; k < instances; ++k) {
      size_t dim = 2 + k % 3;
      Twist tw = random_twist(rng, dim);
      auto a = random_element(rng, dim, 3), b = random_element(rng, dim, 3), c = random_element(rng, dim, 3);
      auto l = t_multiply(t_multiply(a, b, tw), c, tw), r = t_multiply(a, t_multiply(b, c, tw), tw);
      assoc.add(l == r, [&] { return l.str() + " vs " + r.str(); });
      bool ok = a.bar().bar() == a && t_multiply(a, b, tw).bar() == t_multiply(b.bar(), a.bar(), tw);
      bar.add(ok, [&] { return a.str() + " * " + b.str(); });
    }
    out.push_back(assoc.check(instances));
    out.push_back(bar.check(instances));
  }

  {
    struct Case {
      ScatteringDiagram d;
      unsigned order;
    };
    std::vector<Case> cases;
    cases.push_back({completed(examples::a2(1), 5, true), 5});
    cases.push_back({completed(examples::annulus(), 5, true), 5});
    cases.push_back({completed(examples::kronecker_prin(), 4, true), 4});
    Tally barinv{"theta functions are bar-invariant"}, pointed{"theta functions are pointed"},
        positive{"broken-line coefficients are positive"};
    std::uniform_int_distribution<int> uf(-2, 2), fr(-1, 1);
    for (size_t k = 0; k < instances; ++k) {
      const auto& c = cases[k % cases.size()];
      const auto& s = c.d.seed();
      Exp p(s.size());
      for (size_t i = 0; i < p.size(); ++i) p[i] = s.is_frozen(i) ? fr(rng) : uf(rng);
      QVec q = positive_point(c.d);
      auto th = theta(c.d, p, q, c.order);
      barinv.add(th.bar() == th, [&] { return "p = " + exp_str(p) + ": " + th.str(); });
      bool pt = th.coeff(p).is_one();
      for (const auto& [e, co] : th.terms())
        if (e != p) {
          auto key = solve_key(c.d, p, e);
          pt = pt && key && ScatteringDiagram::degree(*key) > 0;
        }
      pointed.add(pt, [&] { return "p = " + exp_str(p) + ": " + th.str(); });
      bool pos = true;
      for (const auto& bl : broken_lines(c.d, p, q, c.order))
        for (const auto& seg : bl.segments) pos = pos && seg.coeff.nonnegative();
      positive.add(pos, [&] { return "p = " + exp_str(p); });
    }
    out.push_back(barinv.check(instances));
    out.push_back(pointed.check(instances));
    out.push_back(positive.check(instances));
  }

  {
    Tally cert{"consistency certificates on completed diagrams"};
    std::vector<ScatteringDiagram> ds{completed(examples::a2(1), 4, true), completed(examples::annulus(), 5, true),
                                      completed(examples::kronecker_prin(), 4, false),
                                      completed(examples::markov(), 4, false),
                                      completed(examples::cyclic_a3_prin(), 4, false)};
    size_t per = (instances + ds.size() - 1) / ds.size();
    for (size_t i = 0; i < ds.size(); ++i) {
      auto rep = consistency_certificate(ds[i], per, seed_value + static_cast<unsigned>(i));
      for (size_t k = 0; k < rep.loops; ++k)
        cert.add(k >= rep.failures, [&] { return rep.first_failure; });
    }
    out.push_back(cert.check(instances));
  }

  std::vector<TriangulatedSurface> bases{surfaces::annulus(), surfaces::punctured_torus(), surfaces::polygon(7),
                                         surfaces::annulus_pq(2, 2), surfaces::annulus_pq(1, 3),
                                         surfaces::punctured_digon()};
  {
    Tally flips{"flip commutes with mutation"};
    for (size_t trial = 0; flips.runs < instances && trial < 20 * instances; ++trial) {
      auto s = random_flips(bases[trial % bases.size()], rng, 6);
      auto f = flippable_arcs(s);
      if (f.empty()) continue;
      size_t i = f[rng() % f.size()];
      auto lhs = seed_of(flip(s, i)).b_matrix(), rhs = mutate_seed(seed_of(s), i).b_matrix();
      flips.add(lhs == rhs, [&] { return s.to_json_text() + " at " + s.labels()[i]; });
    }
    out.push_back(flips.check(instances));
  }

  {
    Tally gsh{"g-vectors of bracelets are minus the shear coordinates"};
    std::vector<TriangulatedSurface> ann{surfaces::annulus(), surfaces::annulus_pq(1, 2), surfaces::annulus_pq(2, 2),
                                         surfaces::annulus_pq(2, 3)};
    for (size_t trial = 0; gsh.runs < instances && trial < 50 * instances; ++trial) {
      auto s = random_flips(ann[trial % ann.size()], rng, static_cast<int>(trial % 4));
      auto seed = seed_of(s);
      auto loops = random_loops(s, rng, 1);
      if (loops.empty() || is_peripheral(loops[0])) continue;
      int64_t k = 1 + static_cast<int64_t>(trial % 3);
      BraceletComponent c;
      c.loop = loops[0];
      c.weight = k;
      TorusElement x;
      try {
        x = bracelet_expand(s, Bracelet{{c}}, seed, false);
      } catch (const ComputationError&) {
        continue;  // exponents that do not pull back integrally
      }
      Exp g = g_vector(x, seed);
      QVec b = shear_coords(s, loops[0]);
      bool ok = true;
      for (size_t i = 0; i < s.arc_count(); ++i)
        if (!s.is_boundary(i)) ok = ok && mpq_class(g[i]) == -b[i] * k;
      gsh.add(ok, [&] { return curve_str(s, loops[0]) + " weight " + std::to_string(k) + ": g = " + exp_str(g); });
    }
    out.push_back(gsh.check(instances));
  }

  {
    Tally lemma{"omega_1(pi(l)) = extended shear coordinates"};
    std::vector<TriangulatedSurface> bs{surfaces::annulus(), surfaces::polygon(6), surfaces::annulus_pq(2, 1),
                                        surfaces::annulus_pq(2, 3)};
    for (size_t trial = 0; lemma.runs < instances && trial < 4 * instances; ++trial) {
      auto s = random_flips(bs[trial % bs.size()], rng, static_cast<int>(trial % 5));
      auto seed = seed_of(s);
      auto curves = boundary_curves(s, 5);
      auto loops = random_loops(s, rng, 4);
      curves.insert(curves.end(), loops.begin(), loops.end());
      for (size_t k = 0; k < curves.size() && k < 12; ++k) {
        const auto& c = curves[(k * 7 + trial) % curves.size()];
        bool ok = omega1_q(seed, intersection_coords(s, c)) == shear_coords(s, c);
        lemma.add(ok, [&] { return curve_str(s, c); });
      }
    }
    out.push_back(lemma.check(instances));
  }

  {
    // The affine regime starts at a curve-dependent m'.  Each laminate must
    // reach it by m' = 4, and every step after m' counts as an instance.
    Tally dehn{"interior shear coordinates of Dehn twists are affine in m from some m' <= 4"};
    auto a = surfaces::annulus();
    auto l = curve_from_text(a, kAnnulusLoop);
    QVec bl = shear_coords(a, l);
    auto base = boundary_curves(a, 8);
    for (size_t i = 0; i < a.arc_count(); ++i)
      if (!a.is_boundary(i)) base.push_back(elementary_laminate(a, TaggedArc{i}));
    std::set<std::string> seen;
    for (const auto& c0 : base)
      for (int k = 0; k <= 3; ++k) {
        auto c = dehn_twist(a, c0, l, k);
        if (!seen.insert(curve_str(a, c)).second) continue;
        auto cross = static_cast<long>(intersection_number(a, c, l));
        std::vector<QVec> b;
        for (int m = 0; m <= 6; ++m) b.push_back(shear_coords(a, dehn_twist(a, c, l, m)));
        auto step_ok = [&](int m) {
          for (size_t j = 0; j < bl.size(); ++j)
            if (!a.is_boundary(j) && b[m][j] - b[m - 1][j] != cross * bl[j]) return false;
          return true;
        };
        int start = 6;
        while (start > 0 && step_ok(start)) --start;
        if (start > 4) {
          dehn.add(false, [&] { return curve_str(a, c) + " is not affine from any m' <= 4"; });
          continue;
        }
        for (int m = start + 1; m <= 6; ++m) dehn.add(true, [] { return std::string(); });
      }
    out.push_back(dehn.check(instances));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> suite_names() { return {"a2", "annulus", "torus", "folding", "dt", "properties"}; }

SuiteReport run_suite(const std::string& name) {
  SuiteReport r;
  r.name = name;
  auto append = [&](Checks c) { r.checks.insert(r.checks.end(), c.begin(), c.end()); };
  if (name == "a2") {
    append(a2_completion_checks());
    append(a2_theta_checks());
  } else if (name == "annulus") {
    append(annulus_mutation_checks());
    append(annulus_product_checks());
    append(annulus_chebyshev_checks());
    append(annulus_bracelet_checks());
    append(annulus_skein_checks());
  } else if (name == "torus") {
    append(torus_checks());
  } else if (name == "folding") {
    append(folding_checks());
  } else if (name == "dt") {
    append(dt_checks());
  } else if (name == "properties") {
    append(property_checks());
  } else {
    throw ParseError("unknown suite '" + name + "'");
  }
  return r;
}

}  // namespace cs
