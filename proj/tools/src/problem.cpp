#include "finpart/cli/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"

namespace finpart::cli {

using nlohmann::json;

namespace {

constexpr int kMaxDimension = 10;
constexpr int kMaxComponents = 4;
constexpr int kMaxExponent = 40;
constexpr int kMaxPower = 20;
constexpr int kMaxWindowOrder = 8;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Field access that records which keys were consumed, so leftovers can be
// reported as unknown.
class Object {
 public:
  Object(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw SpecError(path_.empty() ? "$" : path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return join(path_, key); }

  const json& get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw SpecError(path(key), "missing required field");
    return *it;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) throw SpecError(path(it.key()), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

int to_int(const json& j, const std::string& path, int lo, int hi) {
  if (!j.is_number_integer()) throw SpecError(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > hi)
    throw SpecError(path, "value " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double to_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw SpecError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SpecError(path, "expected a finite number");
  return v;
}

Complex to_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {to_double(j, path), 0.0};
  if (j.is_array() && j.size() == 2) return {to_double(j[0], index(path, 0)), to_double(j[1], index(path, 1))};
  throw SpecError(path, "expected a number or a [re, im] pair");
}

const json& to_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SpecError(path, "expected an array");
  return j;
}

std::vector<int> to_monomial(const json* j, const std::string& path, int n) {
  if (j == nullptr) return std::vector<int>(static_cast<std::size_t>(n), 0);
  const auto& a = to_array(*j, path);
  if (static_cast<int>(a.size()) != n) throw SpecError(path, "expected " + std::to_string(n) + " exponents");
  std::vector<int> e;
  for (std::size_t i = 0; i < a.size(); ++i) e.push_back(to_int(a[i], index(path, i), 0, kMaxExponent));
  return e;
}

struct Context {
  int n = 0;
  ProblemKind kind = ProblemKind::Single;
  int block_count = 1;
  std::vector<bool> base;  // per coordinate
};

WindowTag parse_window(const json& j, const std::string& path, const Context& ctx) {
  WindowTag w;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "radial") {
      w.kind = WindowTag::Kind::Radial;
      w.index = 1;
    } else if (s.size() > 1 && s[0] == 'x' && std::all_of(s.begin() + 1, s.end(), ::isdigit)) {
      w.kind = WindowTag::Kind::Coordinate;
      w.index = std::stoi(s.substr(1));
    } else {
      throw SpecError(path, "unknown window tag '" + s + "'");
    }
  } else {
    Object o(j, path);
    const json* radial = o.find("radial");
    const json* coordinate = o.find("coordinate");
    if ((radial == nullptr) == (coordinate == nullptr))
      throw SpecError(path, "exactly one of 'radial' or 'coordinate' is required");
    if (radial != nullptr) {
      w.kind = WindowTag::Kind::Radial;
      w.index = to_int(*radial, o.path("radial"), 1, kMaxComponents);
    } else {
      w.kind = WindowTag::Kind::Coordinate;
      w.index = to_int(*coordinate, o.path("coordinate"), 1, kMaxDimension);
    }
    if (const json* k = o.find("order")) w.order = to_int(*k, o.path("order"), 0, kMaxWindowOrder);
    if (const json* a = o.find("inner")) w.inner = to_double(*a, o.path("inner"));
    if (const json* b = o.find("outer")) w.outer = to_double(*b, o.path("outer"));
    o.finish();
    if (w.inner && *w.inner <= 0.0) throw SpecError(o.path("inner"), "inner radius must be positive");
    if (w.inner && w.outer && *w.inner >= *w.outer)
      throw SpecError(o.path("inner"), "inner radius must be below the outer radius");
  }
  if (w.kind == WindowTag::Kind::Radial && w.index > ctx.block_count)
    throw SpecError(path, "radial window on block " + std::to_string(w.index) + " of " +
                              std::to_string(ctx.block_count));
  if (w.kind == WindowTag::Kind::Coordinate) {
    if (w.index < 1 || w.index > ctx.n) throw SpecError(path, "coordinate index outside 1..n");
    if (!ctx.base[static_cast<std::size_t>(w.index - 1)])
      throw SpecError(path, "coordinate windows act on base coordinates only");
  }
  return w;
}

std::vector<WindowTag> support_tags(const Context& ctx) {
  std::vector<WindowTag> tags;
  for (int b = 1; b <= ctx.block_count; ++b) tags.push_back({WindowTag::Kind::Radial, b, 0, {}, {}});
  for (int i = 0; i < ctx.n; ++i)
    if (ctx.base[static_cast<std::size_t>(i)]) tags.push_back({WindowTag::Kind::Coordinate, i + 1, 0, {}, {}});
  return tags;
}

TermSpec parse_term(const json& j, const std::string& path, const Context& ctx) {
  Object o(j, path);
  TermSpec t;
  if (const json* c = o.find("coefficient")) t.coefficient = to_complex(*c, o.path("coefficient"));
  t.monomial = to_monomial(o.find("monomial"), o.path("monomial"), ctx.n);
  const auto& frame = to_array(o.get("frame"), o.path("frame"));
  for (std::size_t i = 0; i < frame.size(); ++i)
    t.frame.push_back(to_int(frame[i], index(o.path("frame"), i), 1, ctx.n));
  std::vector<int> sorted = t.frame;
  const int parity = normalize_frame(sorted);
  if (parity == 0) throw SpecError(o.path("frame"), "repeated index in frame");
  t.frame = sorted;
  int explicit_sign = 1;
  if (const json* s = o.find("sign")) {
    explicit_sign = to_int(*s, o.path("sign"), -1, 1);
    if (explicit_sign == 0) throw SpecError(o.path("sign"), "sign must be +1 or -1");
  }
  t.sign = parity * explicit_sign;
  if (const json* w = o.find("windows")) {
    const auto& a = to_array(*w, o.path("windows"));
    for (std::size_t i = 0; i < a.size(); ++i) t.windows.push_back(parse_window(a[i], index(o.path("windows"), i), ctx));
  } else {
    t.windows = support_tags(ctx);
  }
  o.finish();
  return t;
}

std::vector<TermSpec> parse_terms(const json& j, const std::string& path, const Context& ctx) {
  const auto& a = to_array(j, path);
  std::vector<TermSpec> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(parse_term(a[i], index(path, i), ctx));
  return out;
}

std::vector<PolyTerm> parse_poly(const json& j, const std::string& path, int n) {
  const auto& a = to_array(j, path);
  std::vector<PolyTerm> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto p = index(path, i);
    Object o(a[i], p);
    PolyTerm t;
    t.coefficient = to_complex(o.get("coefficient"), o.path("coefficient"));
    t.monomial = to_monomial(o.find("monomial"), o.path("monomial"), n);
    o.finish();
    out.push_back(std::move(t));
  }
  return out;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json window_json(const WindowTag& w) {
  json j;
  j[w.kind == WindowTag::Kind::Radial ? "radial" : "coordinate"] = w.index;
  if (w.order != 0) j["order"] = w.order;
  if (w.inner) j["inner"] = *w.inner;
  if (w.outer) j["outer"] = *w.outer;
  return j;
}

json term_json(const TermSpec& t) {
  json j;
  j["coefficient"] = complex_json(t.coefficient);
  j["monomial"] = t.monomial;
  j["frame"] = t.frame;
  if (t.sign != 1) j["sign"] = t.sign;
  j["windows"] = json::array();
  for (const auto& w : t.windows) j["windows"].push_back(window_json(w));
  return j;
}

json terms_json(const std::vector<TermSpec>& terms) {
  json a = json::array();
  for (const auto& t : terms) a.push_back(term_json(t));
  return a;
}

json poly_json(const std::vector<PolyTerm>& p) {
  json a = json::array();
  for (const auto& t : p) a.push_back({{"coefficient", complex_json(t.coefficient)}, {"monomial", t.monomial}});
  return a;
}

Polynomial build_poly(const std::vector<PolyTerm>& terms, int n) {
  Polynomial p(n);
  for (const auto& t : terms) p.add_term(MultiIndex(t.monomial), t.coefficient);
  return p;
}

}  // namespace

ProblemSpec parse_problem(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError("$", std::string("malformed JSON: ") + e.what());
  }
  Object o(root, "");
  ProblemSpec spec;
  spec.n = to_int(o.get("n"), "n", 1, kMaxDimension);

  const json* boundary = o.find("boundary");
  const json* blocks = o.find("blocks");
  const json* codim = o.find("codim");
  if (boundary != nullptr && !boundary->is_boolean()) throw SpecError("boundary", "expected a boolean");
  const bool is_boundary = boundary != nullptr && boundary->get<bool>();
  if (is_boundary + (blocks != nullptr) + (codim != nullptr) != 1)
    throw SpecError("codim", "exactly one of 'codim', 'blocks' or 'boundary: true' is required");

  Context ctx;
  ctx.n = spec.n;
  int normal = 0;
  if (is_boundary) {
    spec.kind = ProblemKind::Boundary;
    normal = 1;
  } else if (blocks != nullptr) {
    spec.kind = ProblemKind::Crossing;
    const auto& a = to_array(*blocks, "blocks");
    if (a.empty() || static_cast<int>(a.size()) > kMaxComponents)
      throw SpecError("blocks", "expected 1 to " + std::to_string(kMaxComponents) + " blocks");
    for (std::size_t i = 0; i < a.size(); ++i) spec.blocks.push_back(to_int(a[i], index("blocks", i), 1, spec.n));
    for (int b : spec.blocks) normal += b;
    if (normal > spec.n) throw SpecError("blocks", "block sizes exceed n");
    ctx.block_count = static_cast<int>(spec.blocks.size());
  } else {
    spec.codim = to_int(*codim, "codim", 1, spec.n);
    normal = spec.codim;
  }
  ctx.kind = spec.kind;
  ctx.base.assign(static_cast<std::size_t>(spec.n), false);
  for (int i = normal; i < spec.n; ++i) ctx.base[static_cast<std::size_t>(i)] = true;

  if (spec.kind == ProblemKind::Crossing) {
    const auto& a = to_array(o.get("powers"), "powers");
    if (a.size() != spec.blocks.size()) throw SpecError("powers", "expected one power per block");
    for (std::size_t i = 0; i < a.size(); ++i) spec.powers.push_back(to_int(a[i], index("powers", i), 0, kMaxPower));
  } else {
    spec.powers = {to_int(o.get("power"), "power", 0, kMaxPower)};
  }

  if (const json* w = o.find("window")) {
    Object wo(*w, "window");
    if (const json* a = wo.find("inner")) spec.inner = to_double(*a, "window.inner");
    if (const json* b = wo.find("outer")) spec.outer = to_double(*b, "window.outer");
    wo.finish();
  }
  if (spec.inner <= 0.0) throw SpecError("window.inner", "inner radius must be positive");
  if (spec.inner >= spec.outer) throw SpecError("window.inner", "inner radius must be below the outer radius");
  if (spec.outer >= 1.0) throw SpecError("window.outer", "outer radius must be below 1");

  spec.numerator = parse_terms(o.get("numerator"), "numerator", ctx);
  if (spec.numerator.empty()) throw SpecError("numerator", "at least one term is required");

  if (spec.kind == ProblemKind::Crossing) {
    if (o.has("phi")) throw SpecError("phi", "crossing problems take 'phis', one list per block");
    if (const json* p = o.find("phis")) {
      const auto& a = to_array(*p, "phis");
      if (a.size() != spec.blocks.size()) throw SpecError("phis", "expected one list per block");
      for (std::size_t i = 0; i < a.size(); ++i) spec.phis.push_back(parse_poly(a[i], index("phis", i), spec.n));
    }
  } else {
    if (o.has("phis")) throw SpecError("phis", "only crossing problems take 'phis'");
    if (const json* p = o.find("phi")) spec.phi = parse_poly(*p, "phi", spec.n);
  }

  if (const json* t = o.find("test_form")) spec.test_form = parse_terms(*t, "test_form", ctx);

  if (const json* e = o.find("engine")) {
    if (!e->is_string()) throw SpecError("engine", "expected a string");
    spec.engine = e->get<std::string>();
    if (spec.engine != "mellin" && spec.engine != "cutoff" && spec.engine != "both")
      throw SpecError("engine", "expected 'mellin', 'cutoff' or 'both'");
  }
  if (const json* t = o.find("tolerance")) {
    spec.tolerance = to_double(*t, "tolerance");
    if (spec.tolerance <= 0.0) throw SpecError("tolerance", "tolerance must be positive");
  }
  if (const json* s = o.find("seed")) {
    if (!s->is_number_unsigned()) throw SpecError("seed", "expected a non-negative integer");
    spec.seed = s->get<std::uint64_t>();
  }
  o.finish();
  return spec;
}

std::string serialize_problem(const ProblemSpec& spec) {
  json j;
  j["n"] = spec.n;
  switch (spec.kind) {
    case ProblemKind::Single:
      j["codim"] = spec.codim;
      j["power"] = spec.powers.at(0);
      break;
    case ProblemKind::Crossing:
      j["blocks"] = spec.blocks;
      j["powers"] = spec.powers;
      break;
    case ProblemKind::Boundary:
      j["boundary"] = true;
      j["power"] = spec.powers.at(0);
      break;
  }
  j["window"] = {{"inner", spec.inner}, {"outer", spec.outer}};
  j["numerator"] = terms_json(spec.numerator);
  if (spec.kind == ProblemKind::Crossing) {
    if (!spec.phis.empty()) {
      j["phis"] = json::array();
      for (const auto& p : spec.phis) j["phis"].push_back(poly_json(p));
    }
  } else if (!spec.phi.empty()) {
    j["phi"] = poly_json(spec.phi);
  }
  if (!spec.test_form.empty()) j["test_form"] = terms_json(spec.test_form);
  j["engine"] = spec.engine;
  j["tolerance"] = spec.tolerance;
  j["seed"] = spec.seed;
  return j.dump(2);
}

Layout ProblemSpec::layout() const {
  switch (kind) {
    case ProblemKind::Single:
      return Layout::single(n, codim);
    case ProblemKind::Boundary:
      return Layout::single(n, 1);
    case ProblemKind::Crossing: {
      std::vector<Block> bs;
      int first = 0;
      for (int size : blocks) {
        bs.push_back({first, size});
        first += size;
      }
      return Layout(n, std::move(bs));
    }
  }
  return {};
}

namespace {

Form build_form(const std::vector<TermSpec>& terms, const Layout& layout, double inner, double outer) {
  Form f(layout);
  const int n = layout.dimension();
  for (const auto& t : terms) {
    std::vector<int> idx;
    for (int i : t.frame) idx.push_back(i - 1);
    WindowProduct windows;
    for (const auto& w : t.windows) {
      WindowFactor factor;
      factor.arg = w.kind == WindowTag::Kind::Radial ? WindowFactor::Arg::Radial : WindowFactor::Arg::Coordinate;
      factor.index = w.index - 1;
      factor.window = Window(w.inner.value_or(inner), w.outer.value_or(outer), w.order);
      windows.push_back(factor);
    }
    std::sort(windows.begin(), windows.end());
    f.add_term(frame_of(idx), windows,
               Polynomial::monomial(n, MultiIndex(t.monomial), t.coefficient * static_cast<double>(t.sign)));
  }
  return f;
}

}  // namespace

Form ProblemSpec::numerator_form() const { return build_form(numerator, layout(), inner, outer); }

Polynomial ProblemSpec::phi_polynomial() const { return build_poly(phi, n); }

std::vector<Polynomial> ProblemSpec::phi_polynomials() const {
  std::vector<Polynomial> out;
  for (const auto& p : phis) out.push_back(build_poly(p, n));
  return out;
}

std::optional<Form> ProblemSpec::test_form_value() const {
  if (test_form.empty()) return std::nullopt;
  return build_form(test_form, layout(), inner, outer);
}

SingularForm ProblemSpec::singular_form() const {
  if (kind == ProblemKind::Boundary) throw InvalidArgument("boundary problems have no mu_0 denominator");
  return SingularForm(powers, numerator_form());
}

MorseBott ProblemSpec::morse_bott() const {
  if (kind != ProblemKind::Single) throw InvalidArgument("a single normal block is required");
  return MorseBott(codim, phi_polynomial());
}

CrossingProblem ProblemSpec::crossing_problem() const {
  if (kind != ProblemKind::Crossing) throw InvalidArgument("a crossing problem is required");
  return CrossingProblem(singular_form(), phi_polynomials());
}

BoundaryProblem ProblemSpec::boundary_problem() const {
  if (kind != ProblemKind::Boundary) throw InvalidArgument("a boundary problem is required");
  return BoundaryProblem{numerator_form(), powers.at(0), phi_polynomial()};
}

}  // namespace finpart::cli
