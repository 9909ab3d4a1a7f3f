#include "mconv/runner.hpp"

#include "mconv/approximation.hpp"
#include "mconv/catalog.hpp"
#include "mconv/ellis_finite.hpp"
#include "mconv/generators.hpp"
#include "mconv/product_convolution.hpp"
#include "mconv/serialization.hpp"
#include "mconv/weak_topology.hpp"

#include <cstdlib>
#include <filesystem>
#include <future>
#include <variant>

namespace mconv {

using nlohmann::json;

namespace {

// ------------------------------------------------------------------ config

struct Scenario {
  std::string name;
  std::string command;
  json body;
  std::string path;
  std::string mode;
  std::uint64_t seed = 1;
  std::string base_dir;
};

struct Outcome {
  int exit_code = kExitOk;
  std::vector<Record> records;
};

[[noreturn]] void config_fail(const std::string& path, const std::string& message) {
  throw ConfigError((path.empty() ? std::string("/") : path) + ": " + message);
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::int64_t get_count(const json& obj, const char* key, std::int64_t fallback, const std::string& path) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || v->get<std::int64_t>() < 0)
    config_fail(path + "/" + key, "expected a non-negative integer");
  return v->get<std::int64_t>();
}

double get_real(const json& obj, const char* key, double fallback, const std::string& path) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) config_fail(path + "/" + key, "expected a number");
  return v->get<double>();
}

/// Numbers are read through their shortest decimal form, so 0.1 means 1/10
/// in exact mode; strings may hold "p/q".
template <class S>
S get_scalar(const json& v, const std::string& path) {
  try {
    if (v.is_string()) return scalar_from_rational<S>(parse_rational(v.get<std::string>()));
    if (v.is_number_integer()) return scalar_from_rational<S>(Rational(v.get<std::int64_t>()));
    if (v.is_number()) {
      if constexpr (is_exact_v<S>) {
        return parse_rational(format_double(v.get<double>()));
      } else {
        return v.get<double>();
      }
    }
  } catch (const std::invalid_argument& err) {
    config_fail(path, err.what());
  }
  config_fail(path, "expected a number or a \"p/q\" string");
}

using AnySystem = std::variant<FiniteActionSystem, CircleRotation>;

AnySystem resolve_system(const Scenario& sc) {
  const json* entry = find(sc.body, "system");
  if (!entry) config_fail(sc.path, "missing \"system\"");
  try {
    if (entry->is_string()) {
      const auto name = entry->get<std::string>();
      if (name == kCircleScenario) return CircleRotation{};
      return builtin_finite_system(name);
    }
    if (entry->is_object()) {
      const json* table = find(*entry, "table");
      if (!table || !table->is_string()) config_fail(sc.path + "/system", "expected {\"table\": \"path\"}");
      return load_system_table(resolve_path(table->get<std::string>(), sc.base_dir));
    }
  } catch (const ParseError& err) {
    config_fail(sc.path + "/system", std::string("table file ") + err.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& err) {
    config_fail(sc.path + "/system", err.what());
  }
  config_fail(sc.path + "/system", "expected a built-in name or {\"table\": \"path\"}");
}

std::string system_name(const AnySystem& sys) {
  if (const auto* f = std::get_if<FiniteActionSystem>(&sys)) return f->name();
  return std::string(kCircleScenario);
}

// ------------------------------------------------------------------ tallies

struct Tally {
  explicit Tally(std::string name) : suite(std::move(name)) {}

  std::string suite;
  std::int64_t instances = 0;
  std::int64_t violations = 0;
  double max_deviation = 0.0;
  /// Fraction of instances that must pass.
  double required_rate = 1.0;
  std::string detail;

  template <class S>
  void compare(const S& a, const S& b, double tol) {
    ++instances;
    const double d = to_double(abs_value(S(a - b)));
    max_deviation = std::max(max_deviation, d);
    if constexpr (is_exact_v<S>) {
      if (a != b) ++violations;
    } else {
      if (!(d <= tol)) ++violations;
    }
  }

  template <class P, class S>
  void same_measure(const FiniteMeasure<P, S>& a, const FiniteMeasure<P, S>& b, double tol) {
    ++instances;
    const S d = tv_distance(a, b);
    max_deviation = std::max(max_deviation, to_double(d));
    if constexpr (is_exact_v<S>) {
      if (!(a == b) || d != 0) ++violations;
    } else {
      if (!(to_double(d) <= tol)) ++violations;
    }
  }

  void check(bool ok) {
    ++instances;
    if (!ok) ++violations;
  }

  bool passed() const {
    if (instances == 0) return true;
    const double rate = 1.0 - static_cast<double>(violations) / static_cast<double>(instances);
    return required_rate >= 1.0 ? violations == 0 : rate >= required_rate;
  }
};

Record tally_record(const Scenario& sc, const std::string& system, const Tally& t) {
  Record r;
  r.add("scenario", sc.name)
      .add("system", system)
      .add("mode", sc.mode)
      .add("suite", t.suite)
      .add("instances", t.instances)
      .add("violations", t.violations)
      .add("max_deviation", t.max_deviation)
      .add("required_rate", t.required_rate)
      .add("detail", t.detail)
      .add("passed", t.passed());
  return r;
}

template <class I>
std::vector<IndexSubset<I>> subsets_for(std::size_t universe, InstanceGenerator& gen) {
  std::vector<IndexSubset<I>> out;
  if (universe <= 8) {
    for (std::uint64_t mask = 0; mask < (1ull << universe); ++mask) out.push_back(IndexSubset<I>::from_mask(universe, mask));
  } else {
    for (int i = 0; i < 32; ++i) out.push_back(gen.template subset<I>(universe));
  }
  return out;
}

// ------------------------------------------------------------ finite verify

template <class S>
std::vector<Tally> verify_finite(const FiniteActionSystem& sys, const json& suites, const std::string& path,
                                 std::uint64_t seed, double tol) {
  const auto elements = sys.elements();
  const auto points = sys.points();
  const std::size_t m = points.size();
  const GroupIndex e = sys.identity();
  const StreamKey base{seed, 0};
  auto count = [&](const char* key, std::int64_t fallback) { return get_count(suites, key, fallback, path + "/suites"); };
  std::vector<Tally> out;

  {
    Tally t{"action-axioms"};
    for (PointIndex x : points) t.check(sys.act(e, x) == x);
    for (GroupIndex g : elements)
      for (GroupIndex h : elements)
        for (PointIndex x : points) t.check(sys.act(sys.multiply(g, h), x) == sys.act(g, sys.act(h, x)));
    out.push_back(t);
  }

  if (const auto n = count("identity", 20); n > 0) {
    Tally t{"identity-dirac"};
    InstanceGenerator gen(base.child(1));
    for (PointIndex x : points) t.same_measure(convolve(sys, dirac<S>(e), dirac<S>(x)), dirac<S>(x), tol);
    for (GroupIndex g : elements)
      for (PointIndex x : points) t.same_measure(convolve(sys, dirac<S>(g), dirac<S>(x)), dirac<S>(sys.act(g, x)), tol);
    for (GroupIndex g : elements)
      for (std::int64_t i = 0; i < n; ++i) {
        const auto nu = gen.measure<S>(points);
        t.same_measure(convolve(sys, dirac<S>(g), nu), pushforward(sys, g, nu), tol);
        t.same_measure(convolve(sys, dirac<S>(e), nu), nu, tol);
      }
    out.push_back(t);
  }

  if (const auto n = count("pushforward", 200); n > 0) {
    Tally t{"pushforward"};
    InstanceGenerator gen(base.child(2));
    const auto sets = subsets_for<PointIndex>(m, gen);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto nu = gen.measure<S>(points);
      const GroupIndex g = elements[gen.below(elements.size())];
      const auto moved = pushforward(sys, g, nu);
      t.same_measure(pushforward(sys, sys.inverse(g), moved), nu, tol);
      for (const auto& set : sets) t.compare(measure_of(moved, set), measure_of(nu, sys.preimage(g, set)), tol);
    }
    out.push_back(t);
  }

  if (const auto n = count("associativity", 1000); n > 0) {
    Tally t{"associativity"};
    InstanceGenerator gen(base.child(3));
    for (std::int64_t i = 0; i < n; ++i) {
      const auto mu1 = gen.measure<S>(elements);
      const auto mu2 = gen.measure<S>(elements);
      const auto nu = gen.measure<S>(points);
      const auto lhs = convolve(sys, convolve_group(sys.group(), mu1, mu2), nu);
      const auto rhs = convolve(sys, mu1, convolve(sys, mu2, nu));
      t.same_measure(lhs, rhs, tol);
    }
    out.push_back(t);
  }

  if (const auto n = count("three_formula", 200); n > 0) {
    Tally t{"three-formula"};
    InstanceGenerator gen(base.child(4));
    const auto sets = subsets_for<PointIndex>(m, gen);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto mu = gen.measure<S>(elements);
      const auto nu = gen.measure<S>(points);
      const auto conv = convolve(sys, mu, nu);
      const auto lambda = product(mu, nu);
      for (const auto& set : sets) {
        const S direct = measure_of(conv, set);
        t.compare(direct, convolve_via_group_integral(sys, mu, nu, set), tol);
        t.compare(direct, convolve_via_section_integral(sys, mu, nu, set), tol);
        t.compare(direct, lambda.mass(action_preimage(sys, set)), tol);
      }
    }
    out.push_back(t);
  }

  if (const auto n = count("fubini", 200); n > 0) {
    Tally t{"fubini"};
    InstanceGenerator gen(base.child(5));
    for (std::int64_t i = 0; i < n; ++i) {
      const auto f = gen.table_function<S>(m);
      const auto triple = fubini_triple(sys, f, gen.measure<S>(elements), gen.measure<S>(points));
      t.compare(triple.direct, triple.group_inner, tol);
      t.compare(triple.direct, triple.space_inner, tol);
    }
    out.push_back(t);
  }

  if (const auto n = count("slice", 500); n > 0) {
    Tally t{"slice"};
    InstanceGenerator gen(base.child(6));
    for (std::int64_t i = 0; i < n; ++i) {
      const auto lambda = product(gen.measure<S>(elements), gen.measure<S>(points));
      const auto w = gen.pair_set(elements, points);
      const S direct = lambda.mass(w);
      t.compare(direct, slice_integral(lambda, w, Axis::left), tol);
      t.compare(direct, slice_integral(lambda, w, Axis::right), tol);
      t.compare(lambda.total_mass(), S(1), tol);
    }
    out.push_back(t);
  }

  if (const auto n = count("continuity", 1000); n > 0) {
    Tally t{"continuity"};
    InstanceGenerator gen(base.child(7));
    std::int64_t inside_cases = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto mu = gen.measure<S>(elements);
      const auto nu_prime = gen.measure<S>(points);
      const auto reference = convolve(sys, mu, gen.measure<S>(points));
      std::vector<WeakConstraint<PointIndex, S>> cs;
      const std::size_t k = 1 + gen.below(3);
      for (std::size_t c = 0; c < k; ++c) {
        auto f = gen.table_function<S>(m);
        const S centre = integrate(f, reference);
        const S radius = scalar_from_rational<S>(Rational(static_cast<std::int64_t>(1 + gen.below(8)), 8));
        cs.push_back({f, S(centre - radius), S(centre + radius)});
      }
      const WeakNeighborhood<PointIndex, S> nbhd(cs);
      const auto pulled = pull_back_neighborhood(sys, mu, nbhd);
      const auto image = convolve(sys, mu, nu_prime);
      for (std::size_t c = 0; c < k; ++c)
        t.compare(integrate(nbhd.constraints()[c].function, image), integrate(pulled.constraints()[c].function, nu_prime), tol);
      const auto before = member(nu_prime, pulled);
      if (before.verdict == Membership::inside) {
        ++inside_cases;
        // Float noise can only matter within tol of a bound.
        if (is_exact_v<S> || before.margin > tol) t.check(member(image, nbhd).verdict == Membership::inside);
      }
    }
    t.detail = "inside_cases=" + std::to_string(inside_cases);
    out.push_back(t);
  }

  if (const auto n = count("homomorphism", 500); n > 0) {
    Tally t{"homomorphism"};
    InstanceGenerator gen(base.child(8));
    for (std::int64_t i = 0; i < n; ++i) {
      const auto mu1 = gen.measure<Rational>(elements);
      const auto mu2 = gen.measure<Rational>(elements);
      const auto nu = gen.measure<Rational>(points);
      const auto p1 = measure_action_matrix(sys, mu1);
      const auto p2 = measure_action_matrix(sys, mu2);
      t.check(measure_action_matrix(sys, convolve_group(sys.group(), mu1, mu2)) == p1 * p2);
      t.check(p1.apply(weight_vector(nu, m)) == weight_vector(convolve(sys, mu1, nu), m));
    }
    t.detail = "exact";
    out.push_back(t);
  }
  return out;
}

// ------------------------------------------------------------ circle verify

double circular_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

std::vector<Tally> verify_circle(const json& suites, const std::string& path, std::uint64_t seed, double tol) {
  const CircleRotation circle;
  const StreamKey base{seed, 0};
  const std::string sp = path + "/suites";
  const auto runs = get_count(suites, "runs", 100, sp);
  const auto budget = static_cast<std::uint64_t>(get_count(suites, "budget", 2048, sp));
  const auto inner = static_cast<std::uint64_t>(get_count(suites, "inner_budget", 16, sp));
  const double delta = get_real(suites, "delta", kDefaultDelta, sp);
  const double rate = get_real(suites, "required_rate", 0.95, sp);
  if (budget == 0 || inner == 0) config_fail(sp, "budgets must be positive");
  if (!(delta > 0.0 && delta < 1.0)) config_fail(sp + "/delta", "must lie in (0, 1)");
  const auto uniform = uniform_circle_measure();
  std::vector<Tally> out;

  if (const auto n = get_count(suites, "action_axioms", 1000, sp); n > 0) {
    Tally t{"action-axioms"};
    InstanceGenerator gen(base.child(1));
    for (std::int64_t i = 0; i < n; ++i) {
      const double g = gen.unit(), h = gen.unit(), x = gen.unit();
      t.check(circle.act(circle.identity(), x) == x);
      const double d = circular_distance(circle.act(circle.multiply(g, h), x), circle.act(g, circle.act(h, x)));
      t.max_deviation = std::max(t.max_deviation, d);
      t.check(d <= tol);
    }
    out.push_back(t);
  }

  if (const auto n = get_count(suites, "pushforward", 200, sp); n > 0) {
    Tally t{"pushforward-invariance"};
    InstanceGenerator gen(base.child(2));
    for (std::int64_t i = 0; i < n; ++i) {
      const auto moved = pushforward(circle, gen.unit(), uniform);
      const auto set = gen.arcs();
      t.compare(measure_of(moved, set).value, measure_of(uniform, set).value, tol);
    }
    out.push_back(t);
  }

  if (runs > 0) {
    for (const char* label : {"cos(1)", "sin(1)", "cos2(1)"}) {
      Tally t{std::string("sampled-fubini:") + label};
      t.required_rate = rate;
      const auto f = circle_test_function(label);
      for (std::int64_t r = 0; r < runs; ++r) {
        const auto triple =
            fubini_triple(circle, f, uniform, uniform, budget, base.child(3).child(static_cast<std::uint64_t>(r)), delta, inner);
        const double spread = std::max({std::abs(triple.direct.value - triple.group_inner.value),
                                        std::abs(triple.direct.value - triple.space_inner.value),
                                        std::abs(triple.group_inner.value - triple.space_inner.value)});
        t.max_deviation = std::max(t.max_deviation, spread);
        t.check(agree_within_half_widths(triple));
      }
      t.detail = "budget=" + std::to_string(budget) + " inner=" + std::to_string(inner);
      out.push_back(t);
    }

    Tally formulas{"sampled-three-formula"};
    formulas.required_rate = rate;
    Tally slices{"sampled-slice"};
    slices.required_rate = rate;
    InstanceGenerator gen(base.child(4));
    const auto conv = convolve(circle, uniform, uniform);
    const auto lambda = product(uniform, uniform);
    for (std::int64_t r = 0; r < runs; ++r) {
      const StreamKey key = base.child(5).child(static_cast<std::uint64_t>(r));
      const auto set = gen.arcs();
      const auto direct = measure_of(SampledMeasure<double>(conv.label(), [conv](StreamKey k, std::uint64_t i) {
                                       return conv.sample(k, i);
                                     }),
                                     set, budget, key.child(0), delta);
      const auto via_group = convolve_via_group_integral(circle, uniform, uniform, set, budget, key.child(1), delta);
      const auto via_section = convolve_via_section_integral(circle, uniform, uniform, set, budget, key.child(2), delta);
      const auto close = [](const Estimate& a, const Estimate& b) {
        return std::abs(a.value - b.value) <= a.half_width + b.half_width;
      };
      formulas.max_deviation = std::max(formulas.max_deviation, std::abs(direct.value - via_section.value));
      formulas.check(close(direct, via_group) && close(direct, via_section) && close(via_group, via_section));

      std::vector<std::pair<ArcUnion, ArcUnion>> rects;
      const std::size_t count = 1 + gen.below(3);
      for (std::size_t c = 0; c < count; ++c) rects.emplace_back(gen.arcs(), gen.arcs());
      const RectangleUnion w(rects);
      const auto mass = product_mass(lambda, w, budget, key.child(3), delta);
      const auto left = slice_integral(lambda, w, Axis::left, budget, key.child(4), delta);
      const auto right = slice_integral(lambda, w, Axis::right, budget, key.child(5), delta);
      slices.max_deviation = std::max({slices.max_deviation, std::abs(mass.value - left.value), std::abs(mass.value - right.value)});
      slices.check(close(mass, left) && close(mass, right) && std::abs(mass.value - w.area()) <= tol);
    }
    out.push_back(formulas);
    out.push_back(slices);
  }
  return out;
}

// --------------------------------------------------------------- commands

Outcome run_verify(const Scenario& sc) {
  const AnySystem sys = resolve_system(sc);
  const json suites = sc.body.contains("suites") ? sc.body["suites"] : json::object();
  if (!suites.is_object()) config_fail(sc.path + "/suites", "expected an object");
  double tol = get_real(sc.body, "tolerance", sc.mode == "float" ? 1e-12 : 0.0, sc.path);
  if (sc.mode == "float" && !(tol > 0.0))
    config_fail(sc.path + "/tolerance", "float mode needs a positive tolerance (misconfiguration: tolerance " +
                                            format_double(tol) + ")");
  std::vector<Tally> tallies;
  if (const auto* finite = std::get_if<FiniteActionSystem>(&sys)) {
    tallies = sc.mode == "exact" ? verify_finite<Rational>(*finite, suites, sc.path, sc.seed, tol)
                                 : verify_finite<double>(*finite, suites, sc.path, sc.seed, tol);
  } else {
    if (sc.mode == "exact") config_fail(sc.path + "/mode", "the circle scenario is sampled; use float mode");
    tallies = verify_circle(suites, sc.path, sc.seed, tol);
  }
  Outcome out;
  for (const auto& t : tallies) {
    out.records.push_back(tally_record(sc, system_name(sys), t));
    if (!t.passed()) out.exit_code = kExitCheckFailed;
  }
  return out;
}

template <class P, class S>
FiniteMeasure<P, S> parse_atoms(const json& v, const std::string& path, const std::function<P(const json&, const std::string&)>& point) {
  if (!v.is_array() || v.empty()) config_fail(path, "expected a nonempty array of [point, weight] pairs");
  std::vector<std::pair<P, S>> atoms;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string ip = path + "/" + std::to_string(i);
    if (!v[i].is_array() || v[i].size() != 2) config_fail(ip, "expected [point, weight]");
    atoms.emplace_back(point(v[i][0], ip + "/0"), get_scalar<S>(v[i][1], ip + "/1"));
  }
  try {
    return FiniteMeasure<P, S>(std::move(atoms));
  } catch (const std::invalid_argument& err) {
    config_fail(path, err.what());
  }
}

template <class I>
std::function<I(const json&, const std::string&)> index_reader(std::size_t limit) {
  return [limit](const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || static_cast<std::size_t>(v.get<std::int64_t>()) >= limit)
      config_fail(path, "expected an index below " + std::to_string(limit));
    return I{static_cast<std::uint32_t>(v.get<std::int64_t>())};
  };
}

double read_turns(const json& v, const std::string& path) {
  if (!v.is_number()) config_fail(path, "expected a circle coordinate in [0, 1)");
  const double t = v.get<double>();
  if (!(t >= 0.0 && t < 1.0)) config_fail(path, "circle coordinate must lie in [0, 1)");
  return t;
}

json default_circle_approximation() {
  return json{{"system", std::string(kCircleScenario)},
              {"target", "uniform"},
              {"constraints",
               json::array({json{{"pinned", json::array({json::array({0.0, 1})})}, {"function", "cos(1)"}, {"lower", -0.1}, {"upper", 0.1}},
                            json{{"pinned", json::array({json::array({0.0, 1})})}, {"function", "sin(1)"}, {"lower", -0.1}, {"upper", 0.1}}})},
              {"slack", 0.05},
              {"failure_probability", 0.05}};
}

template <class Sys, class S>
Outcome approximate_with(const Scenario& sc, const ApproximationRequest<Sys, S>& req, const std::string& system) {
  const auto runs = get_count(sc.body, "runs", 1, sc.path);
  if (runs == 0) config_fail(sc.path + "/runs", "must be positive");
  Outcome out;
  std::int64_t inside = 0;
  bool unsolvable = false;
  for (std::int64_t r = 0; r < runs; ++r) {
    const std::uint64_t seed = sc.seed + static_cast<std::uint64_t>(r);
    const auto result = approximate_action(req, seed);
    const auto& rep = result.report;
    if (rep.status == ApproximationStatus::inside) ++inside;
    if (rep.status == ApproximationStatus::unsolvable) unsolvable = true;
    for (const auto& c : rep.records) {
      Record rec;
      rec.add("scenario", sc.name)
          .add("system", system)
          .add("mode", sc.mode)
          .add("run", r)
          .add("seed", static_cast<std::int64_t>(seed))
          .add("attempts", static_cast<std::int64_t>(rep.attempts))
          .add("n", static_cast<std::int64_t>(rep.samples))
          .add("constraint", static_cast<std::int64_t>(c.id))
          .add("lower", c.lower)
          .add("upper", c.upper)
          .add("target", c.target)
          .add("target_exact", rep.target_exact)
          .add("achieved", c.achieved)
          .add("half_width", c.half_width)
          .add("transfer_gap", c.transfer_gap)
          .add("verdict", rep.status == ApproximationStatus::unsolvable ? std::string("unsolvable")
                                                                         : std::string(c.inside ? "inside" : "outside"))
          .add("status", to_string(rep.status));
      out.records.push_back(std::move(rec));
    }
    if (rep.status == ApproximationStatus::unsolvable) break;
  }
  const double required = 1.0 - req.failure_probability;
  const double rate = static_cast<double>(inside) / static_cast<double>(runs);
  const bool passed = !unsolvable && (runs == 1 ? inside == 1 : rate >= required);
  Record summary;
  summary.add("scenario", sc.name)
      .add("system", system)
      .add("runs", runs)
      .add("inside", inside)
      .add("success_rate", rate)
      .add("required_rate", runs == 1 ? 1.0 : required)
      .add("passed", passed);
  out.records.push_back(std::move(summary));
  out.exit_code = unsolvable ? kExitUnsolvable : (passed ? kExitOk : kExitCheckFailed);
  return out;
}

Outcome run_approximate(const Scenario& sc) {
  const AnySystem sys = resolve_system(sc);
  const json& body = sc.body;
  const json* cons = find(body, "constraints");
  if (!cons || !cons->is_array() || cons->empty()) config_fail(sc.path + "/constraints", "expected a nonempty array");
  const json* target = find(body, "target");
  if (!target) config_fail(sc.path, "missing \"target\"");
  const double slack = get_real(body, "slack", 0.05, sc.path);
  const double delta = get_real(body, "failure_probability", kDefaultDelta, sc.path);
  if (!(slack > 0.0)) config_fail(sc.path + "/slack", "must be positive");
  if (!(delta > 0.0 && delta < 1.0)) config_fail(sc.path + "/failure_probability", "must lie in (0, 1)");
  const auto retries = get_count(body, "max_retries", 3, sc.path);

  auto common = [&](auto& req) {
    req.slack = slack;
    req.failure_probability = delta;
    req.max_retries = static_cast<int>(retries);
  };
  auto constraint_fields = [&](std::size_t i) -> std::tuple<const json&, std::string, std::string> {
    const std::string cp = sc.path + "/constraints/" + std::to_string(i);
    const json& c = (*cons)[i];
    if (!c.is_object()) config_fail(cp, "expected an object");
    for (const char* key : {"pinned", "function", "lower", "upper"})
      if (!c.contains(key)) config_fail(cp, std::string("missing \"") + key + "\"");
    if (!c["function"].is_string()) config_fail(cp + "/function", "expected a test-function label");
    return {c, cp, c["function"].get<std::string>()};
  };

  if (const auto* finite = std::get_if<FiniteActionSystem>(&sys)) {
    auto build = [&](auto tag) -> Outcome {
      using S = decltype(tag);
      ApproximationRequest<FiniteActionSystem, S> req{*finite, FiniteMeasure<GroupIndex, S>(dirac<S>(finite->identity())), {}};
      common(req);
      if (target->is_string() && target->get<std::string>() == "uniform") {
        req.target = average_of_points<S>(finite->elements());
      } else {
        req.target = parse_atoms<GroupIndex, S>(*target, sc.path + "/target", index_reader<GroupIndex>(finite->group_order()));
      }
      for (std::size_t i = 0; i < cons->size(); ++i) {
        const auto [c, cp, label] = constraint_fields(i);
        TestFunction<PointIndex, S> f = [&] {
          try {
            return finite_test_function<S>(label, finite->point_count());
          } catch (const std::invalid_argument& err) {
            config_fail(cp + "/function", err.what());
          }
        }();
        req.constraints.push_back({parse_atoms<PointIndex, S>(c["pinned"], cp + "/pinned", index_reader<PointIndex>(finite->point_count())),
                                   f, get_scalar<S>(c["lower"], cp + "/lower"), get_scalar<S>(c["upper"], cp + "/upper")});
        if (!(req.constraints.back().lower < req.constraints.back().upper)) config_fail(cp, "lower must be below upper");
      }
      return approximate_with(sc, req, finite->name());
    };
    return sc.mode == "exact" ? build(Rational{}) : build(double{});
  }

  if (sc.mode == "exact") config_fail(sc.path + "/mode", "the circle scenario is sampled; use float mode");
  ApproximationRequest<CircleRotation, double> req{CircleRotation{}, uniform_circle_measure(), {}};
  common(req);
  if (!(target->is_string() && target->get<std::string>() == "uniform"))
    req.target = parse_atoms<double, double>(*target, sc.path + "/target", read_turns);
  for (std::size_t i = 0; i < cons->size(); ++i) {
    const auto [c, cp, label] = constraint_fields(i);
    TestFunction<double, double> f = [&] {
      try {
        return circle_test_function(label);
      } catch (const std::invalid_argument& err) {
        config_fail(cp + "/function", err.what());
      }
    }();
    req.constraints.push_back({parse_atoms<double, double>(c["pinned"], cp + "/pinned", read_turns), f,
                               get_scalar<double>(c["lower"], cp + "/lower"), get_scalar<double>(c["upper"], cp + "/upper")});
    if (!(req.constraints.back().lower < req.constraints.back().upper)) config_fail(cp, "lower must be below upper");
  }
  return approximate_with(sc, req, std::string(kCircleScenario));
}

Outcome run_ellis(const Scenario& sc) {
  const AnySystem sys = resolve_system(sc);
  const auto* finite = std::get_if<FiniteActionSystem>(&sys);
  if (!finite) config_fail(sc.path + "/system", "the Ellis check needs a finite system");
  const auto q = get_count(sc.body, "grid_denominator", 4, sc.path);
  if (q == 0 || q > 64) config_fail(sc.path + "/grid_denominator", "must lie in [1, 64]");
  const auto bound = get_count(sc.body, "max_group_order", 16, sc.path);
  const auto pairs = get_count(sc.body, "homomorphism_pairs", 500, sc.path);
  EllisReport rep;
  try {
    rep = ellis_equality_check(*finite, static_cast<std::uint32_t>(q), static_cast<std::size_t>(bound));
  } catch (const std::invalid_argument& err) {
    config_fail(sc.path + "/max_group_order", err.what());
  }
  Outcome out;
  Record rec;
  rec.add("scenario", sc.name)
      .add("system", finite->name())
      .add("check", std::string("ellis-equality"))
      .add("grid_step", "1/" + std::to_string(q))
      .add("group_order", static_cast<std::int64_t>(rep.group_order))
      .add("semigroup_size", static_cast<std::int64_t>(rep.semigroup_size))
      .add("matrices_checked", static_cast<std::int64_t>(rep.matrices_checked))
      .add("injective", rep.injective)
      .add("reconstructed", static_cast<std::int64_t>(rep.reconstructed))
      .add("residual", format_rational(rep.max_residual))
      .add("stochastic", rep.stochastic)
      .add("agrees_with_convolution", rep.agrees_with_convolution)
      .add("passed", rep.passed);
  out.records.push_back(std::move(rec));

  std::int64_t failures = 0;
  InstanceGenerator gen(StreamKey{sc.seed, 0}.child(9));
  const auto elements = finite->elements();
  for (std::int64_t i = 0; i < pairs; ++i) {
    const auto mu1 = gen.measure<Rational>(elements);
    const auto mu2 = gen.measure<Rational>(elements);
    const auto lhs = measure_action_matrix(*finite, convolve_group(finite->group(), mu1, mu2));
    const auto rhs = measure_action_matrix(*finite, mu1) * measure_action_matrix(*finite, mu2);
    if (!(lhs == rhs) || !lhs.is_column_stochastic()) ++failures;
  }
  Record hom;
  hom.add("scenario", sc.name)
      .add("system", finite->name())
      .add("check", std::string("homomorphism"))
      .add("pairs", pairs)
      .add("failures", failures)
      .add("passed", failures == 0);
  out.records.push_back(std::move(hom));
  out.exit_code = (rep.passed && failures == 0) ? kExitOk : kExitCheckFailed;
  return out;
}

Outcome run_one(const Scenario& sc) {
  try {
    if (sc.command == "verify") return run_verify(sc);
    if (sc.command == "approximate") return run_approximate(sc);
    if (sc.command == "ellis") return run_ellis(sc);
    config_fail("", "unknown command '" + sc.command + "'");
  } catch (const std::exception& err) {
    Outcome out{kExitUsage, {}};
    Record rec;
    rec.add("scenario", sc.name).add("error", std::string(err.what()));
    out.records.push_back(std::move(rec));
    return out;
  }
}

std::vector<Scenario> expand(const RunRequest& request) {
  const json& cfg = request.config;
  if (!cfg.is_object()) config_fail("", "configuration must be a JSON object");
  std::vector<std::pair<json, std::string>> bodies;
  if (const json* list = find(cfg, "scenarios")) {
    if (!list->is_array() || list->empty()) config_fail("/scenarios", "expected a nonempty array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (!(*list)[i].is_object()) config_fail("/scenarios/" + std::to_string(i), "expected an object");
      bodies.emplace_back((*list)[i], "/scenarios/" + std::to_string(i));
    }
  } else {
    bodies.emplace_back(cfg, "");
  }
  std::vector<Scenario> out;
  for (auto& [body, path] : bodies) {
    Scenario sc;
    sc.command = request.command;
    sc.path = path;
    sc.base_dir = request.base_dir;
    const json* name = find(body, "name");
    if (name && !name->is_string()) config_fail(path + "/name", "expected a string");
    sc.name = name ? name->get<std::string>() : (body.contains("system") && body["system"].is_string()
                                                      ? body["system"].get<std::string>()
                                                      : "scenario-" + std::to_string(out.size()));
    sc.mode = request.mode.value_or(body.value("mode", std::string("exact")));
    if (body.contains("mode") && !body["mode"].is_string()) config_fail(path + "/mode", "expected \"exact\" or \"float\"");
    if (sc.mode != "exact" && sc.mode != "float") config_fail(path + "/mode", "expected \"exact\" or \"float\"");
    if (!request.mode && body.contains("system") && body["system"] == kCircleScenario && !body.contains("mode"))
      sc.mode = "float";
    const auto seed = get_count(body, "seed", 1, path);
    sc.seed = request.seed.value_or(static_cast<std::uint64_t>(seed));
    sc.body = std::move(body);
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace

json parse_config(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& err) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < err.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + err.what());
  }
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.is_absolute()) return path;
  const fs::path local = fs::path(base_dir) / p;
  if (fs::exists(local)) return local.string();
  if (const char* dir = std::getenv(kScenarioDirEnv); dir && *dir) {
    const fs::path env = fs::path(dir) / p;
    if (fs::exists(env)) return env.string();
  }
  return local.string();
}

json default_scenario(std::string_view command, std::string_view system) {
  if (command == "approximate") {
    if (system != kCircleScenario)
      throw ConfigError("approximate without --config only supports --system " + std::string(kCircleScenario));
    json cfg = default_circle_approximation();
    cfg["name"] = std::string(system);
    return cfg;
  }
  return json{{"name", std::string(system)}, {"system", std::string(system)}};
}

RunResult run_scenarios(const RunRequest& request) {
  RunResult result;
  result.report.meta = {{"tool", std::string(kToolName)},
                        {"version", std::string(kToolVersion)},
                        {"command", request.command},
                        {"config_hash", fnv1a_hex(request.config.dump())},
                        {"seed_override", request.seed ? std::to_string(*request.seed) : std::string("none")},
                        {"mode_override", request.mode.value_or("none")}};
  std::vector<Scenario> scenarios;
  try {
    scenarios = expand(request);
  } catch (const ConfigError& err) {
    result.exit_code = kExitUsage;
    Record rec;
    rec.add("scenario", std::string("-")).add("error", std::string(err.what()));
    result.report.records.push_back(std::move(rec));
    return result;
  }

  std::vector<Outcome> outcomes(scenarios.size());
  if (request.jobs > 1 && scenarios.size() > 1) {
    std::vector<std::future<Outcome>> pending;
    std::size_t next = 0;
    while (next < scenarios.size() || !pending.empty()) {
      while (next < scenarios.size() && pending.size() < request.jobs) {
        pending.push_back(std::async(std::launch::async, run_one, std::cref(scenarios[next])));
        ++next;
      }
      // Collect in submission order so the report never depends on timing.
      const std::size_t done = next - pending.size();
      outcomes[done] = pending.front().get();
      pending.erase(pending.begin());
    }
  } else {
    for (std::size_t i = 0; i < scenarios.size(); ++i) outcomes[i] = run_one(scenarios[i]);
  }

  bool usage = false, unsolvable = false, failed = false;
  for (auto& o : outcomes) {
    usage = usage || o.exit_code == kExitUsage;
    unsolvable = unsolvable || o.exit_code == kExitUnsolvable;
    failed = failed || o.exit_code == kExitCheckFailed;
    for (auto& r : o.records) result.report.records.push_back(std::move(r));
  }
  result.exit_code = usage ? kExitUsage : unsolvable ? kExitUnsolvable : failed ? kExitCheckFailed : kExitOk;
  return result;
}

std::string run_convolve(std::string_view system, std::string_view mu_text, std::string_view nu_text,
                         std::string_view mode, const std::string& base_dir) {
  if (mode != "exact" && mode != "float") throw ConfigError("mode must be exact or float");
  if (system == kCircleScenario) {
    if (mode == "exact") throw ConfigError("circle measures are float-mode only");
    const CircleRotation circle;
    return write_measure(convolve(circle, read_measure<double, double>(mu_text), read_measure<double, double>(nu_text)));
  }
  const FiniteActionSystem sys = [&] {
    for (const auto& n : builtin_finite_names())
      if (n == system) return builtin_finite_system(system);
    return load_system_table(resolve_path(std::string(system), base_dir));
  }();
  if (mode == "exact")
    return write_measure(convolve(sys, read_measure<GroupIndex, Rational>(mu_text), read_measure<PointIndex, Rational>(nu_text)));
  return write_measure(convolve(sys, read_measure<GroupIndex, double>(mu_text), read_measure<PointIndex, double>(nu_text)));
}

}  // namespace mconv
