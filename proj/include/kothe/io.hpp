#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kothe/certificates.hpp"
#include "kothe/constants.hpp"
#include "kothe/pietsch.hpp"
#include "kothe/representation.hpp"
#include "kothe/space.hpp"
#include "kothe/vectorvalued.hpp"

namespace kothe::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Schema or parse error in a config document, with the 1-based line of the
// offending value (0 when unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& file, std::size_t line, const std::string& msg)
      : Error(file + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------- numbers

// JSON has no infinities; they are written as the strings "inf" / "-inf".
inline json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json numbers(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline json matrix(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    a.push_back(std::move(row));
  }
  return a;
}

inline json tuple(const std::vector<Vec>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(numbers(v));
  return a;
}

// ------------------------------------------------------------ line index

// Line of every value in a JSON text, keyed by a slash path ("/a/0/b").
class LineIndex {
 public:
  LineIndex() = default;
  explicit LineIndex(const std::string& text) { scan(text); }

  std::size_t line(const std::string& path) const {
    auto it = lines_.find(path);
    return it == lines_.end() ? 0 : it->second;
  }
  std::size_t key_line(const std::string& path) const {
    auto it = keys_.find(path);
    return it == keys_.end() ? line(path) : it->second;
  }

 private:
  struct Frame {
    bool object;
    std::string key;
    std::size_t index = 0;
  };

  static std::string path_of(const std::vector<Frame>& st) {
    std::string p;
    for (const auto& f : st) p += "/" + (f.object ? f.key : std::to_string(f.index));
    return p;
  }

  void scan(const std::string& s) {
    std::vector<Frame> st;
    std::size_t line = 1;
    bool want_key = false;
    auto value_here = [&] { lines_.emplace(path_of(st), line); };
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if (c == '\n') {
        ++line;
      } else if (c == '"') {
        std::string str;
        const std::size_t start = line;
        for (++i; i < s.size() && s[i] != '"'; ++i) {
          if (s[i] == '\\' && i + 1 < s.size()) ++i;
          if (s[i] == '\n') ++line;
          str += s[i];
        }
        if (want_key && !st.empty() && st.back().object) {
          st.back().key = str;
          keys_.emplace(path_of(st), start);
          want_key = false;
        } else {
          lines_.emplace(path_of(st), start);
        }
      } else if (c == '{' || c == '[') {
        value_here();
        st.push_back({c == '{', "", 0});
        want_key = c == '{';
      } else if (c == '}' || c == ']') {
        if (!st.empty()) st.pop_back();
        want_key = false;
      } else if (c == ',') {
        if (!st.empty()) {
          if (st.back().object)
            want_key = true;
          else
            ++st.back().index;
        }
      } else if (c == ':' || std::isspace(static_cast<unsigned char>(c))) {
      } else {
        value_here();
        while (i + 1 < s.size() && std::string_view(",]}\n \t\r").find(s[i + 1]) == std::string_view::npos) ++i;
      }
    }
  }

  std::map<std::string, std::size_t> lines_;
  std::map<std::string, std::size_t> keys_;
};

// Parsed document plus its line index, for line-precise schema errors.
struct Document {
  std::string file;
  json root;
  LineIndex lines;
};

inline Document parse_document(const std::string& text, const std::string& file) {
  Document d{file, {}, LineIndex(text)};
  try {
    d.root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size() + 1) - (e.byte > 0 ? 1 : 0); ++i)
      if (text[i] == '\n') ++line;
    std::string msg = e.what();
    const auto pos = msg.find("parse error");
    throw ConfigError(file, line, "invalid JSON: " + (pos == std::string::npos ? msg : msg.substr(pos)));
  }
  return d;
}

// Cursor into a Document; every accessor reports failures at the line of the
// value it inspects.
class Node {
 public:
  Node(const Document& doc, const json& j, std::string path) : doc_(&doc), j_(&j), path_(std::move(path)) {}
  explicit Node(const Document& doc) : Node(doc, doc.root, "") {}

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }
  std::size_t line() const { return doc_->lines.line(path_); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(doc_->file, line(), (path_.empty() ? std::string("/") : path_) + ": " + msg);
  }

  // Requires an object whose keys all belong to `allowed`.
  const Node& object(std::initializer_list<const char*> allowed) const {
    if (!j_->is_object()) fail("expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_->begin(); it != j_->end(); ++it)
      if (!ok.count(it.key())) {
        const std::string p = path_ + "/" + it.key();
        throw ConfigError(doc_->file, doc_->lines.key_line(p), p + ": unknown field '" + it.key() + "'");
      }
    return *this;
  }

  bool has(const char* key) const { return j_->is_object() && j_->contains(key); }

  Node at(const char* key) const {
    if (!has(key)) fail(std::string("missing required field '") + key + "'");
    return Node(*doc_, (*j_)[key], path_ + "/" + key);
  }
  std::optional<Node> get(const char* key) const {
    if (!has(key)) return std::nullopt;
    return Node(*doc_, (*j_)[key], path_ + "/" + key);
  }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }
  Node operator[](std::size_t i) const {
    if (!j_->is_array()) fail("expected an array");
    return Node(*doc_, (*j_)[i], path_ + "/" + std::to_string(i));
  }

  // Number, or one of the strings "inf", "-inf".
  double num() const {
    if (j_->is_number()) return j_->get<double>();
    if (j_->is_string()) {
      const auto s = j_->get<std::string>();
      if (s == "inf") return kInf;
      if (s == "-inf") return -kInf;
    }
    fail("expected a number");
  }
  double positive() const {
    const double v = num();
    if (!(v > 0.0)) fail("expected a positive number");
    return v;
  }
  std::uint64_t u64() const {
    if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<std::int64_t>() >= 0))
      fail("expected a nonnegative integer");
    return j_->get<std::uint64_t>();
  }
  std::size_t count() const { return static_cast<std::size_t>(u64()); }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }
  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  std::string choice(std::initializer_list<const char*> options) const {
    const std::string s = str();
    std::string all;
    for (const char* o : options) {
      if (s == o) return s;
      all += std::string(all.empty() ? "" : ", ") + o;
    }
    fail("'" + s + "' is not one of: " + all);
  }
  Vec vec() const {
    Vec v(size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (*this)[i].num();
    return v;
  }
  Eigen::MatrixXd mat() const {
    const std::size_t rows = size();
    if (rows == 0) fail("matrix must have at least one row");
    const std::size_t cols = (*this)[0].size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      const Node row = (*this)[i];
      if (row.size() != cols) row.fail("ragged matrix: expected " + std::to_string(cols) + " entries");
      for (std::size_t j = 0; j < cols; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].num();
    }
    return m;
  }

  // Runs a library constructor, turning its argument errors into schema
  // errors at this node.
  template <class F>
  auto build(F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }

 private:
  const Document* doc_;
  const json* j_;
  std::string path_;
};

// ------------------------------------------------------ spaces, measures

inline json to_json(const DiscreteMeasure& mu) { return numbers(mu.weights()); }

inline json to_json(const SpaceDescriptor& s) {
  return std::visit(
      [](const auto& n) -> json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, space::Lp>) {
          return {{"type", "lp"}, {"p", number(n.p)}};
        } else if constexpr (std::is_same_v<T, space::MixedNorm>) {
          return {{"type", "mixed"}, {"p1", number(n.p1)}, {"p2", number(n.p2)}, {"mu1", to_json(n.mu1)},
                  {"mu2", to_json(n.mu2)}};
        } else if constexpr (std::is_same_v<T, space::Lorentz>) {
          return {{"type", "lorentz"}, {"p", number(n.p)}, {"q", number(n.q)}};
        } else if constexpr (std::is_same_v<T, space::Orlicz>) {
          const char* kind = n.phi.kind() == YoungFunction::Kind::power       ? "power"
                             : n.phi.kind() == YoungFunction::Kind::power_log ? "power_log"
                                                                              : "custom";
          json phi = {{"kind", kind}};
          if (n.phi.kind() == YoungFunction::Kind::custom)
            phi["name"] = n.phi.name();
          else
            phi["p"] = number(n.phi.p());
          return {{"type", "orlicz"}, {"phi", phi}, {"root", number(n.root)}};
        } else if constexpr (std::is_same_v<T, space::Power>) {
          return {{"type", "power"}, {"base", to_json(*n.base)}, {"r", number(n.r)}};
        } else {
          return {{"type", "dual"}, {"base", to_json(*n.base)}};
        }
      },
      s.node());
}

inline DiscreteMeasure read_measure(const Node& n) {
  const Vec w = n.vec();
  return n.build([&] { return DiscreteMeasure(w); });
}

inline SpaceDescriptor read_space(const Node& n) {
  const std::string type = n.at("type").choice({"lp", "mixed", "lorentz", "orlicz", "power", "dual"});
  if (type == "lp") {
    n.object({"type", "p"});
    const double p = n.at("p").num();
    return n.build([&] { return SpaceDescriptor::lp(p); });
  }
  if (type == "mixed") {
    n.object({"type", "p1", "p2", "mu1", "mu2"});
    const double p1 = n.at("p1").num(), p2 = n.at("p2").num();
    DiscreteMeasure mu1 = read_measure(n.at("mu1")), mu2 = read_measure(n.at("mu2"));
    return n.build([&] { return SpaceDescriptor::mixed(p1, p2, mu1, mu2); });
  }
  if (type == "lorentz") {
    n.object({"type", "p", "q"});
    const double p = n.at("p").num(), q = n.at("q").num();
    return n.build([&] { return SpaceDescriptor::lorentz(p, q); });
  }
  if (type == "orlicz") {
    n.object({"type", "phi", "root"});
    const Node phi = n.at("phi");
    phi.object({"kind", "p"});
    const std::string kind = phi.at("kind").choice({"power", "power_log"});
    const double p = phi.at("p").num();
    const double root = n.has("root") ? n.at("root").num() : 1.0;
    return n.build([&] {
      return SpaceDescriptor::orlicz(kind == "power" ? YoungFunction::power(p) : YoungFunction::power_log(p), root);
    });
  }
  if (type == "power") {
    n.object({"type", "base", "r"});
    SpaceDescriptor base = read_space(n.at("base"));
    const double r = n.at("r").num();
    return n.build([&] { return SpaceDescriptor::power(base, r); });
  }
  n.object({"type", "base"});
  SpaceDescriptor base = read_space(n.at("base"));
  return n.build([&] { return dual_space(base); });
}

// Round trip through text for a standalone space (used by tests and tools).
inline SpaceDescriptor space_from_json(const json& j) {
  Document d{"<json>", j, LineIndex()};
  return read_space(Node(d));
}

// ------------------------------------------------------ representations

inline BlockNorm read_block_norm(const Node& n) {
  n.object({"p"});
  const double p = n.at("p").num();
  return n.build([&] { return BlockNorm::lp(p); });
}

inline json block_norm_json(const BlockNorm& e) {
  if (!e.p) return {{"name", e.name}};
  return {{"p", number(*e.p)}};
}

inline Representation read_representation(const Node& n) {
  const std::string kind = n.at("kind").choice({"A", "B", "C", "D", "E"});
  RepresentationParams p;
  if (kind == "A") {
    n.object({"kind", "dim", "grid", "defect", "circle"});
    if (n.has("circle")) {
      const std::size_t m = n.at("circle").count();
      return n.build([&] { return euclidean_circle_grid(m); });
    }
    p.kind = RepresentationKind::A;
    p.dim = n.at("dim").count();
    const Node g = n.at("grid");
    for (std::size_t i = 0; i < g.size(); ++i) p.grid.push_back(g[i].vec());
    p.defect = n.has("defect") ? n.at("defect").num() : 0.0;
  } else if (kind == "B") {
    n.object({"kind", "dim", "inner"});
    p.kind = RepresentationKind::B;
    p.dim = n.at("dim").count();
    p.inner = read_block_norm(n.at("inner"));
  } else if (kind == "C") {
    n.object({"kind", "space", "measure"});
    p.kind = RepresentationKind::C;
    p.space = read_space(n.at("space"));
    p.measure = read_measure(n.at("measure"));
  } else if (kind == "D") {
    n.object({"kind", "r", "measure", "block_dim", "inner"});
    p.kind = RepresentationKind::D;
    p.r = n.at("r").positive();
    p.measure = read_measure(n.at("measure"));
    p.block_dim = n.at("block_dim").count();
    p.inner = read_block_norm(n.at("inner"));
  } else {
    n.object({"kind", "space", "measure", "block_dim", "inner"});
    p.kind = RepresentationKind::E;
    p.space = read_space(n.at("space"));
    p.measure = read_measure(n.at("measure"));
    p.block_dim = n.at("block_dim").count();
    p.inner = read_block_norm(n.at("inner"));
  }
  return n.build([&] { return make_representation(p); });
}

inline json to_json(const Representation& r) {
  json j = {{"kind", to_string(r.kind())}};
  switch (r.kind()) {
    case RepresentationKind::A:
      j["dim"] = r.input_dim();
      j["grid"] = tuple(r.grid());
      j["defect"] = number(r.defect());
      break;
    case RepresentationKind::B:
      j["dim"] = r.input_dim();
      j["inner"] = block_norm_json(*r.inner());
      break;
    case RepresentationKind::C:
      j["space"] = to_json(r.space());
      j["measure"] = to_json(r.measure());
      break;
    case RepresentationKind::D:
    case RepresentationKind::E:
      j["space"] = to_json(r.space());
      j["measure"] = to_json(r.measure());
      j["block_dim"] = r.block_dim();
      j["inner"] = block_norm_json(*r.inner());
      break;
  }
  return j;
}

// {"matrix": [[...]], "domain": rep, "codomain": rep}
inline OperatorSpec read_operator(const Node& n) {
  n.object({"matrix", "domain", "codomain"});
  Eigen::MatrixXd t = n.at("matrix").mat();
  Representation dom = read_representation(n.at("domain"));
  Representation cod = read_representation(n.at("codomain"));
  return n.build([&] { return OperatorSpec::from_matrix(t, dom, cod); });
}

inline json operator_json(const OperatorSpec& op) {
  json j;
  if (op.matrix()) j["matrix"] = matrix(*op.matrix());
  j["domain"] = to_json(op.domain());
  j["codomain"] = to_json(op.codomain());
  return j;
}

// ------------------------------------------------------- block operators

inline VectorValuedSpace read_vv_space(const Node& n) {
  n.object({"space", "measure", "block_dim", "inner"});
  SpaceDescriptor outer = read_space(n.at("space"));
  DiscreteMeasure mu = read_measure(n.at("measure"));
  const std::size_t dim = n.at("block_dim").count();
  if (dim == 0) n.at("block_dim").fail("block dimension must be >= 1");
  return VectorValuedSpace{outer, mu, dim, read_block_norm(n.at("inner"))};
}

// Blocks as nested arrays: blocks[i][j] is the (dim F) x (dim E) block taking
// atom j of mu to atom i of nu. The shape header states
// [atoms of nu, dim F] x [atoms of mu, dim E] and is checked against both the
// spaces and the nesting.
inline BlockOperator read_block_operator(const Node& n) {
  n.object({"shape", "blocks", "domain", "codomain"});
  VectorValuedSpace dom = read_vv_space(n.at("domain"));
  VectorValuedSpace cod = read_vv_space(n.at("codomain"));
  const Node shape = n.at("shape");
  shape.object({"rows", "cols"});
  const Vec rows = shape.at("rows").vec(), cols = shape.at("cols").vec();
  if (rows.size() != 2 || cols.size() != 2) shape.fail("rows and cols must be [outer atoms, inner dimension]");
  const auto nr = static_cast<std::size_t>(rows[0]), fr = static_cast<std::size_t>(rows[1]);
  const auto nc = static_cast<std::size_t>(cols[0]), ec = static_cast<std::size_t>(cols[1]);
  if (nr != cod.measure.size() || fr != cod.block_dim)
    shape.at("rows").fail("does not match the codomain (" + std::to_string(cod.measure.size()) + " atoms, dim " +
                          std::to_string(cod.block_dim) + ")");
  if (nc != dom.measure.size() || ec != dom.block_dim)
    shape.at("cols").fail("does not match the domain (" + std::to_string(dom.measure.size()) + " atoms, dim " +
                          std::to_string(dom.block_dim) + ")");
  const Node blocks = n.at("blocks");
  if (blocks.size() != nr) blocks.fail("expected " + std::to_string(nr) + " block rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(nr * fr), static_cast<Eigen::Index>(nc * ec));
  for (std::size_t i = 0; i < nr; ++i) {
    const Node row = blocks[i];
    if (row.size() != nc) row.fail("expected " + std::to_string(nc) + " blocks");
    for (std::size_t j = 0; j < nc; ++j) {
      const Eigen::MatrixXd b = row[j].mat();
      if (static_cast<std::size_t>(b.rows()) != fr || static_cast<std::size_t>(b.cols()) != ec)
        row[j].fail("block must be " + std::to_string(fr) + "x" + std::to_string(ec));
      m.block(static_cast<Eigen::Index>(i * fr), static_cast<Eigen::Index>(j * ec), b.rows(), b.cols()) = b;
    }
  }
  BlockOperator t{m, dom, cod};
  n.build([&] {
    t.check();
    return 0;
  });
  return t;
}

// ------------------------------------------------------------ certificates

inline json to_json(const ConstantUse& c) { return {{"value", number(c.value)}, {"registered", c.registered}}; }

inline json to_json(const WeightCertificate& c) {
  json j;
  j["r"] = number(c.r);
  j["constant"] = number(c.constant);
  j["omega2"] = numbers(c.omega2);
  j["omega1"] = c.omega1 ? numbers(*c.omega1) : json(nullptr);
  j["codomain_bound"] = number(c.codomain_bound);
  j["codomain_bound_exact"] = c.codomain_bound_exact;
  j["codomain_limit"] = number(c.codomain_limit);
  j["domain_bound"] = c.domain_bound ? number(*c.domain_bound) : json(nullptr);
  j["domain_bound_exact"] = c.domain_bound_exact;
  j["domain_limit"] = number(c.domain_limit);
  j["codomain_concavity"] = to_json(c.codomain_concavity);
  j["domain_convexity"] = to_json(c.domain_convexity);
  j["residual"] = number(c.residual);
  j["residual_exact"] = c.residual_exact;
  j["feasible"] = c.feasible;
  j["status"] = c.status;
  j["note"] = c.note;
  j["route"] = c.route;
  j["uses_orlicz_bisection"] = c.uses_orlicz_bisection;
  j["violating_tuple"] = tuple(c.violating_tuple);
  j["violating_ratio"] = number(c.violating_ratio);
  j["iterations"] = c.iterations;
  j["witnesses"] = c.witnesses;
  j["gap"] = number(c.gap);
  j["seed"] = c.seed;
  return j;
}

// Reads a certificate as written by to_json; only the weights, r and the
// constants are needed for verification, the rest is carried along.
inline WeightCertificate read_weight_certificate(const Node& n) {
  n.object({"r", "constant", "omega2", "omega1", "codomain_bound", "codomain_bound_exact", "codomain_limit",
            "domain_bound", "domain_bound_exact", "domain_limit", "codomain_concavity", "domain_convexity",
            "residual", "residual_exact", "feasible", "status", "note", "route", "uses_orlicz_bisection",
            "violating_tuple", "violating_ratio", "iterations", "witnesses", "gap", "seed"});
  WeightCertificate c;
  c.r = n.at("r").positive();
  c.constant = n.at("constant").positive();
  c.omega2 = n.at("omega2").vec();
  if (auto w1 = n.get("omega1"); w1 && !w1->raw().is_null()) c.omega1 = w1->vec();
  auto constant_use = [](const Node& u) {
    u.object({"value", "registered"});
    return ConstantUse{u.at("value").positive(), u.at("registered").boolean()};
  };
  if (auto m = n.get("codomain_concavity")) c.codomain_concavity = constant_use(*m);
  if (auto m = n.get("domain_convexity")) c.domain_convexity = constant_use(*m);
  if (auto v = n.get("codomain_limit")) c.codomain_limit = v->num();
  if (auto v = n.get("domain_limit")) c.domain_limit = v->num();
  if (auto v = n.get("codomain_bound")) c.codomain_bound = v->num();
  if (auto v = n.get("domain_bound"); v && !v->raw().is_null()) c.domain_bound = v->num();
  if (auto v = n.get("residual")) c.residual = v->num();
  if (auto v = n.get("feasible")) c.feasible = v->boolean();
  if (auto v = n.get("status")) c.status = v->str();
  if (auto v = n.get("route")) c.route = v->str();
  if (auto v = n.get("seed")) c.seed = v->u64();
  for (const char* w : {"omega2", "omega1"})
    if (auto v = n.get(w); v && !v->raw().is_null())
      for (double x : v->vec())
        if (!(x >= 0.0)) v->fail("weights must be nonnegative");
  return c;
}

inline json to_json(const PietschCertificate& c) {
  return {{"r", number(c.r)},
          {"constant", number(c.constant)},
          {"lambda", numbers(c.lambda)},
          {"residual", number(c.residual)},
          {"simplex_error", number(c.simplex_error)},
          {"feasible", c.feasible},
          {"status", c.status},
          {"violating_x", numbers(c.violating_x)},
          {"witnesses", c.witnesses.size()},
          {"iterations", c.iterations},
          {"seed", c.seed}};
}

inline json to_json(const SummingNormEstimate& e) {
  return {{"lower", number(e.lower)}, {"upper", number(e.upper)}, {"lambda", numbers(e.lambda)}};
}

inline json to_json(const FactorizationResult& f) {
  return {{"side", f.side == FactorizationResult::Side::range ? "range" : "domain"},
          {"multiplier", numbers(f.multiplier)},
          {"r_matrix", matrix(f.r_matrix)},
          {"multiplier_norm", number(f.multiplier_norm)},
          {"r_norm", number(f.r_norm)},
          {"r_norm_exact", f.r_norm_exact},
          {"norm_product", number(f.norm_product)},
          {"bound", number(f.bound)},
          {"composition_residual", number(f.composition_residual)}};
}

inline json to_json(const MinimaxCertificate& c) {
  return {{"phi1", numbers(c.phi1)},
          {"phi2", numbers(c.phi2)},
          {"margin_k1", number(c.margin_k1)},
          {"margin_k2", number(c.margin_k2)},
          {"worst_violation", number(c.worst_violation)},
          {"converged", c.converged},
          {"status", c.status},
          {"iterations", c.iterations},
          {"cuts", c.cuts},
          {"seed", c.seed}};
}

inline json to_json(const VerificationReport& v) {
  return {{"passed", v.passed()},
          {"domination_passed", v.domination_passed},
          {"domination_residual", number(v.domination_residual)},
          {"domination_exact", v.domination_exact},
          {"bounds_passed", v.bounds_passed},
          {"codomain_bound", number(v.codomain_bound)},
          {"codomain_limit", number(v.codomain_limit)},
          {"domain_bound", v.domain_bound ? number(*v.domain_bound) : json(nullptr)},
          {"domain_limit", number(v.domain_limit)},
          {"reverse_passed", v.reverse_passed},
          {"reverse_worst_ratio", number(v.reverse_worst_ratio)},
          {"reverse_limit", number(v.reverse_limit)},
          {"samples", v.samples}};
}

inline json to_json(const ConstantEstimate& e) {
  json w = {{"vectors", tuple(e.witness.vectors)}, {"r", number(e.witness.r)}};
  if (e.witness.measure) w["measure"] = to_json(*e.witness.measure);
  return {{"kind", to_string(e.kind)},
          {"value", number(e.value)},
          {"status", to_string(e.status)},
          {"registered", e.registered ? number(*e.registered) : json(nullptr)},
          {"evaluations", e.evaluations},
          {"witness", w}};
}

inline json to_json(const SolverConfig& c) {
  json j = {{"tolerance", number(c.tolerance)},
            {"seed", c.seed},
            {"max_rounds", c.max_rounds},
            {"master_iterations", c.master_iterations},
            {"route", c.route == SolverConfig::Route::direct ? "direct" : "scaled"},
            {"search", {{"starts", c.search.starts}, {"iterations", c.search.iterations}}},
            {"constants",
             {{"tuple_sizes", c.constants.tuple_sizes},
              {"starts", c.constants.search.starts},
              {"iterations", c.constants.search.iterations}}}};
  j["codomain_concavity"] = c.codomain_concavity ? number(*c.codomain_concavity) : json(nullptr);
  j["domain_convexity"] = c.domain_convexity ? number(*c.domain_convexity) : json(nullptr);
  return j;
}

inline SearchBudget read_search(const Node& n, SearchBudget b) {
  n.object({"starts", "iterations"});
  if (auto v = n.get("starts")) b.starts = v->count();
  if (auto v = n.get("iterations")) b.iterations = v->count();
  return b;
}

inline SolverConfig read_solver_config(const Node& n) {
  n.object({"tolerance", "max_rounds", "master_iterations", "route", "search", "constants", "codomain_concavity",
            "domain_convexity"});
  SolverConfig c;
  if (auto v = n.get("tolerance")) c.tolerance = v->positive();
  if (auto v = n.get("max_rounds")) c.max_rounds = v->count();
  if (auto v = n.get("master_iterations")) c.master_iterations = v->count();
  if (auto v = n.get("route"))
    c.route = v->choice({"direct", "scaled"}) == "direct" ? SolverConfig::Route::direct : SolverConfig::Route::scaled;
  if (auto v = n.get("search")) c.search = read_search(*v, c.search);
  if (auto v = n.get("constants")) {
    v->object({"tuple_sizes", "starts", "iterations"});
    if (auto ts = v->get("tuple_sizes")) {
      c.constants.tuple_sizes.clear();
      for (std::size_t i = 0; i < ts->size(); ++i) c.constants.tuple_sizes.push_back((*ts)[i].count());
    }
    if (auto s = v->get("starts")) c.constants.search.starts = s->count();
    if (auto s = v->get("iterations")) c.constants.search.iterations = s->count();
  }
  if (auto v = n.get("codomain_concavity")) c.codomain_concavity = v->positive();
  if (auto v = n.get("domain_convexity")) c.domain_convexity = v->positive();
  return c;
}

}  // namespace kothe::io
