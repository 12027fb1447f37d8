#pragma once

// JSON forms of the exact objects and of problem instances.  Output is
// canonical: object keys sorted (nlohmann::json default), scalars as strings
// ("p/q" or "[m; c0, ..., c_{phi(m)-1}]"), polynomials as ascending
// coefficient arrays, Laurent polynomials as sorted term lists
// [[e_z, "c"], ...] or [[e_t, e_z, "c"], ...].  On input, any polynomial
// may also be written as an expression string (see expr.hpp).

#include <algorithm>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "eqlevi/bundle/bundle.hpp"
#include "eqlevi/endalgebra/endalgebra.hpp"
#include "eqlevi/equivariant/gamma.hpp"
#include "eqlevi/io/expr.hpp"
#include "eqlevi/levi/levi.hpp"

namespace eqlevi::io {

using json = nlohmann::json;

inline json scalar_json(const Scalar& s) { return s.to_string(); }

inline Scalar scalar_from(const json& j) {
  if (j.is_string()) return Scalar::parse(j.get<std::string>());
  if (j.is_number_integer()) return Scalar(j.get<long>());
  throw InvalidInput("scalar must be a string or an integer: " + j.dump());
}

inline json poly_json(const Poly& p) {
  json a = json::array();
  for (const auto& c : p.coeffs()) a.push_back(scalar_json(c));
  return a;
}

inline Poly poly_from(const json& j) {
  if (j.is_array()) {
    std::vector<Scalar> c;
    for (const auto& x : j) c.push_back(scalar_from(x));
    return Poly(std::move(c));
  }
  if (j.is_number_integer()) return Poly(Scalar(j.get<long>()));
  if (!j.is_string()) throw InvalidInput("polynomial must be an array or a string: " + j.dump());
  const Laurent1 l = parse_laurent_z(j.get<std::string>());
  if (!l.is_zero() && l.min_exp(0) < 0) throw InvalidInput("negative power in a polynomial: " + j.dump());
  return to_poly(l);
}

template <std::size_t N>
json laurent_json(const Laurent<N>& l) {
  json a = json::array();
  for (const auto& [e, c] : l.terms()) {
    json t = json::array();
    for (int x : e) t.push_back(x);
    t.push_back(scalar_json(c));
    a.push_back(std::move(t));
  }
  return a;
}

template <std::size_t N>
Laurent<N> laurent_from(const json& j) {
  if (j.is_number_integer()) return Laurent<N>(Scalar(j.get<long>()));
  if (j.is_string()) {
    if constexpr (N == 1) return parse_laurent_z(j.get<std::string>());
    else return parse_laurent_tz(j.get<std::string>());
  }
  if (!j.is_array()) throw InvalidInput("Laurent polynomial must be a term list or a string: " + j.dump());
  Laurent<N> l;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != N + 1) throw InvalidInput("bad Laurent term: " + t.dump());
    typename Laurent<N>::Exponent e{};
    for (std::size_t k = 0; k < N; ++k) {
      if (!t[k].is_number_integer()) throw InvalidInput("bad exponent: " + t.dump());
      e[k] = t[k].get<int>();
    }
    l.add_term(e, scalar_from(t[N]));
  }
  return l;
}

template <class T, class F>
json matrix_json(const Matrix<T>& m, F&& f) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(f(m(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

template <class T, class F>
Matrix<T> matrix_from(const json& j, F&& f) {
  if (!j.is_array() || j.empty()) throw InvalidInput("matrix must be a nonempty array of rows");
  const std::size_t n = j.size();
  if (!j[0].is_array()) throw InvalidInput("matrix rows must be arrays");
  const std::size_t m = j[0].size();
  Matrix<T> out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != m) throw InvalidInput("ragged matrix");
    for (std::size_t k = 0; k < m; ++k) out(i, k) = f(j[i][k]);
  }
  return out;
}

inline json poly_matrix_json(const PolyMatrix& m) { return matrix_json(m, poly_json); }
inline PolyMatrix poly_matrix_from(const json& j) { return matrix_from<Poly>(j, poly_from); }
inline json scalar_matrix_json(const ScalarMatrix& m) { return matrix_json(m, scalar_json); }
inline ScalarMatrix scalar_matrix_from(const json& j) { return matrix_from<Scalar>(j, scalar_from); }
inline json laurent_matrix_json(const LaurentMatrix& m) { return matrix_json(m, laurent_json<1>); }
inline LaurentMatrix laurent_matrix_from(const json& j) { return matrix_from<Laurent1>(j, laurent_from<1>); }
inline json laurent2_matrix_json(const Laurent2Matrix& m) { return matrix_json(m, laurent_json<2>); }
inline Laurent2Matrix laurent2_matrix_from(const json& j) { return matrix_from<Laurent2>(j, laurent_from<2>); }

inline json point_json(const Point& p) { return {{"at_infinity", p.at_infinity}, {"coord", scalar_json(p.coord)}}; }

inline Point point_from(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return Point::infinity_chart();
  if (j.is_string() || j.is_number_integer()) return Point::chart0(scalar_from(j));
  if (!j.is_object()) throw InvalidInput("bad sample point: " + j.dump());
  return {j.value("at_infinity", false), scalar_from(j.at("coord"))};
}

inline json type_json(const SplitType& t) { return t.exponents; }

inline json mobius_json(const Mobius& m) {
  return json::array({scalar_json(m.a), scalar_json(m.b), scalar_json(m.c), scalar_json(m.d)});
}

inline Mobius mobius_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw InvalidInput("base map must be [a, b, c, d]");
  return {scalar_from(j[0]), scalar_from(j[1]), scalar_from(j[2]), scalar_from(j[3])};
}

inline json gamma_json(const GammaStructure& g) {
  json j;
  j["kind"] = to_string(g.kind);
  if (!g.note.empty()) j["note"] = g.note;
  if (g.kind == GammaKind::Finite) {
    json els = json::array();
    for (const auto& e : g.elements)
      els.push_back({{"label", e.label}, {"phi", mobius_json(e.phi)}, {"lift", laurent_matrix_json(e.lift)}});
    j["elements"] = std::move(els);
    j["table"] = g.table;
  } else {
    j["lift"] = laurent2_matrix_json(g.lift);
    j["variables"] = json::array({"t", "z"});
    if (g.kind == GammaKind::Mult) j["q"] = g.q;
    else j["shift"] = scalar_json(g.shift);
  }
  return j;
}

inline GammaStructure gamma_from(const json& j, std::size_t n) {
  if (!j.is_object()) throw InvalidInput("gamma must be an object");
  const std::string kind = j.value("kind", "");
  GammaStructure g;
  g.note = j.value("note", "");
  const auto check_rank = [n](std::size_t r, std::size_t c) {
    if (r != n || c != n) throw InvalidInput("lift size does not match the bundle rank");
  };
  if (kind == "finite") {
    g.kind = GammaKind::Finite;
    if (j.contains("generators")) {
      std::vector<Generator> gens;
      for (const auto& x : j.at("generators")) {
        Generator gen{x.value("label", "g" + std::to_string(gens.size())),
                      x.contains("phi") ? mobius_from(x.at("phi")) : Mobius::identity(),
                      laurent_matrix_from(x.at("lift"))};
        check_rank(gen.lift.rows(), gen.lift.cols());
        gens.push_back(std::move(gen));
      }
      const std::string note = g.note;
      g = generate_finite_group(gens, n, j.value("max_order", std::size_t{48}));
      g.note = note;
      return g;
    }
    for (const auto& x : j.at("elements")) {
      FiniteElement e{x.value("label", "g" + std::to_string(g.elements.size())),
                      x.contains("phi") ? mobius_from(x.at("phi")) : Mobius::identity(), laurent_matrix_from(x.at("lift"))};
      check_rank(e.lift.rows(), e.lift.cols());
      g.elements.push_back(std::move(e));
    }
    g.table = j.at("table").get<std::vector<std::vector<std::size_t>>>();
    return g;
  }
  if (kind == "mult" || kind == "add") {
    g.kind = kind == "mult" ? GammaKind::Mult : GammaKind::Add;
    if (j.contains("variables") && j.at("variables") != json::array({"t", "z"}))
      throw InvalidInput("one-parameter lifts use the variables [\"t\", \"z\"]");
    g.lift = laurent2_matrix_from(j.at("lift"));
    check_rank(g.lift.rows(), g.lift.cols());
    if (g.kind == GammaKind::Mult) g.q = j.value("q", 0);
    else g.shift = j.contains("shift") ? scalar_from(j.at("shift")) : Scalar(0);
    return g;
  }
  throw InvalidInput("gamma kind must be finite, mult or add");
}

struct InstanceOptions {
  std::uint64_t seed = 0;
  int conductor_max = 24;
  int coeff_bound = 5;
  std::vector<Point> sample_points = default_sample_points();

  LeviOptions levi() const {
    LeviOptions o;
    o.coeff_bound = coeff_bound;
    o.budget.conductor_max = conductor_max;
    return o;
  }
};

struct Instance {
  std::string name;
  BundleDesc bundle;
  std::optional<GammaStructure> gamma;
  InstanceOptions options;
  std::vector<std::string> tags;
  json expect = json::object();  // corpus expectations, carried verbatim

  GammaStructure gamma_or_trivial() const { return gamma ? *gamma : GammaStructure::trivial(bundle.rank()); }
  bool exploratory() const { return std::find(tags.begin(), tags.end(), "exploratory") != tags.end(); }
};

inline json options_json(const InstanceOptions& o) {
  json pts = json::array();
  for (const auto& p : o.sample_points) pts.push_back(point_json(p));
  return {{"seed", o.seed}, {"conductor_max", o.conductor_max}, {"coeff_bound", o.coeff_bound}, {"sample_points", pts}};
}

inline json instance_json(const Instance& x) {
  json j;
  j["name"] = x.name;
  j["transition"] = laurent_matrix_json(x.bundle.transition());
  if (x.gamma) j["gamma"] = gamma_json(*x.gamma);
  j["options"] = options_json(x.options);
  if (!x.tags.empty()) j["tags"] = x.tags;
  if (!x.expect.empty()) j["expect"] = x.expect;
  return j;
}

inline Instance instance_from(const json& j) {
  if (!j.is_object()) throw InvalidInput("instance must be a JSON object");
  Instance x;
  x.name = j.value("name", "");
  if (!j.contains("transition")) throw InvalidInput("instance has no transition matrix");
  x.bundle = BundleDesc(laurent_matrix_from(j.at("transition")));
  if (j.contains("gamma") && !j.at("gamma").is_null()) x.gamma = gamma_from(j.at("gamma"), x.bundle.rank());
  if (j.contains("options")) {
    const json& o = j.at("options");
    x.options.seed = o.value("seed", std::uint64_t{0});
    x.options.conductor_max = o.value("conductor_max", 24);
    x.options.coeff_bound = o.value("coeff_bound", 5);
    if (o.contains("sample_points")) {
      x.options.sample_points.clear();
      for (const auto& p : o.at("sample_points")) x.options.sample_points.push_back(point_from(p));
    }
  }
  if (x.options.conductor_max < 1 || x.options.coeff_bound < 1) throw InvalidInput("bounds must be positive");
  if (j.contains("tags")) x.tags = j.at("tags").get<std::vector<std::string>>();
  if (j.contains("expect")) x.expect = j.at("expect");
  return x;
}

/// Parses with JSON type errors mapped to InvalidInput.
inline Instance parse_instance(const std::string& text) {
  try {
    return instance_from(json::parse(text));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed instance: ") + e.what());
  }
}

inline bool same_gamma(const GammaStructure& a, const GammaStructure& b) {
  if (a.kind != b.kind) return false;
  if (a.kind != GammaKind::Finite) return a.lift == b.lift && a.q == b.q && a.shift == b.shift;
  if (a.table != b.table || a.elements.size() != b.elements.size()) return false;
  for (std::size_t k = 0; k < a.elements.size(); ++k)
    if (!(a.elements[k].phi == b.elements[k].phi) || a.elements[k].lift != b.elements[k].lift) return false;
  return true;
}

inline bool semantically_equal(const Instance& a, const Instance& b) {
  if (a.bundle.transition() != b.bundle.transition()) return false;
  if (a.gamma.has_value() != b.gamma.has_value()) return false;
  if (a.gamma && !same_gamma(*a.gamma, *b.gamma)) return false;
  if (a.options.seed != b.options.seed || a.options.conductor_max != b.options.conductor_max ||
      a.options.coeff_bound != b.options.coeff_bound || a.options.sample_points.size() != b.options.sample_points.size())
    return false;
  for (std::size_t k = 0; k < a.options.sample_points.size(); ++k) {
    const auto &p = a.options.sample_points[k], &q = b.options.sample_points[k];
    if (p.at_infinity != q.at_infinity || p.coord != q.coord) return false;
  }
  return a.tags == b.tags && a.expect == b.expect;
}

}  // namespace eqlevi::io
