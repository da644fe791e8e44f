#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kothe/factorization.hpp"
#include "kothe/io.hpp"
#include "kothe/minimax.hpp"
#include "kothe/pietsch.hpp"
#include "kothe/verify.hpp"
#include "kothe/vectorvalued.hpp"
#include "kothe/weights.hpp"

namespace kothe {

// One CSV row; every field except wall_ms is also stored in the report.
struct SummaryRow {
  std::string task;
  std::string space;
  double r = 0.0;
  double value = 0.0;
  double residual = 0.0;
  std::string status;
  bool passed = true;
  long long wall_ms = 0;
};

struct RunOptions {
  std::optional<std::string> task;  // subcommand; must agree with the config's task if both are given
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

struct RunOutcome {
  int exit_code = 0;  // 0 all checks passed, 1 some check failed, 2 config error
  std::string message;
  io::json report;
  std::vector<SummaryRow> rows;
  std::filesystem::path report_path, summary_path;
};

inline const std::vector<std::string>& experiment_tasks() {
  static const std::vector<std::string> tasks{"norm", "constants", "weight", "pietsch", "minimax", "vv-weight",
                                              "verify"};
  return tasks;
}

namespace detail {

inline std::string csv_number(double v) { return io::number(v).dump(); }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string csv_text(const std::vector<SummaryRow>& rows, std::uint64_t seed) {
  std::ostringstream os;
  os << "task,space,r,value,residual,status,seed,wall_ms\n";
  for (const auto& r : rows)
    os << csv_field(r.task) << ',' << csv_field(r.space) << ',' << csv_number(r.r) << ',' << csv_number(r.value)
       << ',' << csv_number(r.residual) << ',' << csv_field(r.status) << ',' << seed << ',' << r.wall_ms << '\n';
  return os.str();
}

inline io::json summary_json(const SummaryRow& r) {
  return {{"task", r.task},         {"space", r.space},   {"r", io::number(r.r)},
          {"value", io::number(r.value)}, {"residual", io::number(r.residual)}, {"status", r.status},
          {"passed", r.passed}};
}

class Experiment {
 public:
  Experiment(const io::Document& doc, const RunOptions& opt) : doc_(doc), opt_(opt) {}

  void run(RunOutcome& out) {
    const io::Node root(doc_);
    root.object({"schema_version", "task", "description", "seed", "solver", "output", "operator", "block_operator",
                 "norm", "constants", "weight", "pietsch", "minimax", "verify", "certificate", "certificate_file"});
    const io::Node ver = root.at("schema_version");
    if (ver.u64() != static_cast<std::uint64_t>(io::kSchemaVersion))
      ver.fail("unsupported schema_version " + ver.raw().dump() + " (expected " +
               std::to_string(io::kSchemaVersion) + ")");

    std::string task;
    if (auto t = root.get("task")) {
      task = t->str();
      bool known = false;
      for (const auto& n : experiment_tasks()) known = known || n == task;
      if (!known) t->fail("unknown task '" + task + "'");
      if (opt_.task && *opt_.task != task) t->fail("config task '" + task + "' does not match subcommand '" + *opt_.task + "'");
    } else if (opt_.task) {
      task = *opt_.task;
    } else {
      root.fail("missing required field 'task'");
    }
    task_ = task;

    if (auto s = root.get("solver")) cfg_ = io::read_solver_config(*s);
    if (auto s = root.get("seed")) cfg_.seed = s->u64();
    if (opt_.seed) cfg_.seed = *opt_.seed;

    // Sections the task does not read are rejected rather than ignored.
    const std::vector<std::pair<const char*, std::vector<std::string>>> owners{
        {"operator", {"constants", "weight", "pietsch", "verify"}},
        {"block_operator", {"vv-weight"}},
        {"norm", {"norm"}},
        {"constants", {"constants"}},
        {"weight", {"weight", "vv-weight"}},
        {"pietsch", {"pietsch"}},
        {"minimax", {"minimax"}},
        {"verify", {"weight", "vv-weight", "verify"}},
        {"certificate", {"verify"}},
        {"certificate_file", {"verify"}}};
    for (const auto& [key, tasks] : owners)
      if (root.has(key) && std::find(tasks.begin(), tasks.end(), task) == tasks.end())
        root.at(key).fail(std::string("field '") + key + "' is not used by task '" + task + "'");

    if (auto v = root.get("verify")) read_verify_options(*v);
    if (auto o = root.get("output")) {
      o->object({"report", "summary"});
      if (auto r = o->get("report")) report_name_ = r->str();
      if (auto s = o->get("summary")) summary_name_ = s->str();
    }

    // Parse everything before computing anything.
    if (task == "norm") prepare_norm(root.at("norm"));
    if (task == "constants") prepare_constants(root);
    if (task == "weight") prepare_weight(root, false);
    if (task == "vv-weight") prepare_weight(root, true);
    if (task == "pietsch") prepare_pietsch(root);
    if (task == "minimax") prepare_minimax(root.at("minimax"));
    if (task == "verify") prepare_verify(root);

    report_ = {{"schema_version", io::kSchemaVersion}, {"task", task}, {"seed", cfg_.seed}};
    if (auto d = root.get("description")) report_["description"] = d->str();
    report_["solver"] = io::to_json(cfg_);
    if (op_) report_["operator"] = io::operator_json(*op_);
    report_["results"] = io::json::array();
    for (auto& job : jobs_) job();
    bool passed = true;
    for (const auto& r : rows_) passed = passed && r.passed;
    report_["passed"] = passed;

    out.rows = rows_;
    out.report = report_;
    out.exit_code = passed ? 0 : 1;
  }

  const std::string& report_name() const { return report_name_; }
  const std::string& summary_name() const { return summary_name_; }
  std::uint64_t seed() const { return cfg_.seed; }

 private:
  using Clock = std::chrono::steady_clock;

  // Appends a result with its summary row; `fill` returns the payload.
  template <class F>
  void record(const std::string& name, F&& fill) {
    const auto t0 = Clock::now();
    std::vector<SummaryRow> rows;
    io::json payload;
    try {
      payload = fill(rows);
    } catch (const Error& e) {
      // A solver failure is a failed check, not a config error.
      rows.assign(1, {task_, "", 0.0, kInf, kInf, "error", false});
      payload = {{"error", e.what()}};
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
    io::json entry = {{"name", name}};
    io::json summaries = io::json::array();
    for (auto& r : rows) {
      r.wall_ms = ms;
      summaries.push_back(summary_json(r));
      rows_.push_back(r);
    }
    entry["summary"] = summaries;
    for (auto it = payload.begin(); it != payload.end(); ++it) entry[it.key()] = it.value();
    report_["results"].push_back(std::move(entry));
  }

  void read_verify_options(const io::Node& n) {
    n.object({"samples", "max_tuple", "tolerance"});
    if (auto v = n.get("samples")) vopt_.samples = v->count();
    if (auto v = n.get("max_tuple")) vopt_.max_tuple = std::max<std::size_t>(1, v->count());
    if (auto v = n.get("tolerance")) vopt_.tolerance = v->positive();
  }

  VerifyOptions verify_options() const {
    VerifyOptions v = vopt_;
    v.seed = cfg_.seed;
    v.search = cfg_.search;
    return v;
  }

  // -- norm table ---------------------------------------------------------

  void prepare_norm(const io::Node& n) {
    n.object({"spaces", "powers", "vectors"});
    const io::Node spaces = n.at("spaces");
    const Vec powers = n.at("powers").vec();
    for (std::size_t k = 0; k < powers.size(); ++k)
      if (!(powers[k] > 0.0) || !std::isfinite(powers[k])) n.at("powers")[k].fail("powers must be in (0, inf)");
    const std::size_t count = n.has("vectors") ? n.at("vectors").count() : 20;
    for (std::size_t s = 0; s < spaces.size(); ++s) {
      const io::Node item = spaces[s];
      item.object({"space", "measure"});
      SpaceDescriptor x = io::read_space(item.at("space"));
      std::optional<DiscreteMeasure> mu;
      if (item.has("measure")) {
        mu = io::read_measure(item.at("measure"));
      } else if (auto m = x.as<space::MixedNorm>()) {
        mu = product_measure(m->mu1, m->mu2);
      } else {
        item.fail("missing required field 'measure'");
      }
      item.build([&] { return norm(x, Vec(mu->size(), 0.0), *mu); });
      for (double r : powers)
        jobs_.push_back([this, x, mu = *mu, r, count, s] { norm_row(x, mu, r, count, s); });
    }
  }

  void norm_row(const SpaceDescriptor& x, const DiscreteMeasure& mu, double r, std::size_t count, std::size_t idx) {
    record("power identity", [&](std::vector<SummaryRow>& rows) {
      const SpaceDescriptor simplified = power_space(x, r);
      const SpaceDescriptor definitional = SpaceDescriptor::power(x, r);
      Rng rng(split_seed(cfg_.seed, 0xA0 + idx * 131 + static_cast<std::uint64_t>(r * 1000)));
      double worst = 0.0, value = 0.0, worst_rel = 0.0;
      io::json cases = io::json::array();
      for (std::size_t k = 0; k < count; ++k) {
        const Vec v = random_signed(rng, mu.size());
        const double lhs = norm(simplified, v, mu), rhs = norm(definitional, v, mu);
        const double diff = std::fabs(lhs - rhs);
        worst = std::max(worst, diff);
        value = std::max(value, rhs);
        worst_rel = std::max(worst_rel, diff / std::max(1.0, std::fabs(rhs)));
        cases.push_back({{"x", io::numbers(v)}, {"lhs", io::number(lhs)}, {"rhs", io::number(rhs)}});
      }
      const bool ok = worst_rel <= 1e-9;
      rows.push_back({"norm", x.name(), r, value, worst, ok ? "pass" : "fail", ok});
      return io::json{{"space", io::to_json(x)},
                      {"measure", io::to_json(mu)},
                      {"r", io::number(r)},
                      {"simplified", simplified.name()},
                      {"max_abs_difference", io::number(worst)},
                      {"cases", cases}};
    });
  }

  // -- constants ----------------------------------------------------------

  void prepare_constants(const io::Node& root) {
    const io::Node n = root.at("constants");
    n.object({"items"});
    const io::Node items = n.at("items");
    if (root.has("operator")) op_ = io::read_operator(root.at("operator"));
    for (std::size_t i = 0; i < items.size(); ++i) {
      const io::Node it = items[i];
      it.object({"space", "measure", "operator", "r", "kind"});
      const double r = it.at("r").positive();
      const ConstantKind kind =
          it.at("kind").choice({"convexity", "concavity"}) == "convexity" ? ConstantKind::convexity : ConstantKind::concavity;
      if (it.has("operator")) {
        if (!it.at("operator").boolean()) it.at("operator").fail("set to true to estimate the operator constant");
        if (!op_) it.fail("operator item needs a top-level 'operator'");
        jobs_.push_back([this, r, kind] { operator_constant_row(r, kind); });
      } else {
        SpaceDescriptor x = io::read_space(it.at("space"));
        DiscreteMeasure mu = io::read_measure(it.at("measure"));
        it.build([&] { return norm(x, Vec(mu.size(), 0.0), mu); });
        jobs_.push_back([this, x, mu, r, kind, i] { space_constant_row(x, mu, r, kind, i); });
      }
    }
  }

  void space_constant_row(const SpaceDescriptor& x, const DiscreteMeasure& mu, double r, ConstantKind kind,
                          std::size_t idx) {
    record("space constant", [&](std::vector<SummaryRow>& rows) {
      ConstantBudget b = cfg_.constants;
      b.search.seed = split_seed(cfg_.seed, 0xC0 + idx);
      const ConstantEstimate e = estimate_space_constant(x, mu, r, kind, b);
      double excess = 0.0;
      if (e.registered) excess = std::max(0.0, e.value - *e.registered) / *e.registered;
      const bool ok = excess <= 1e-6;
      rows.push_back({std::string("constants-") + to_string(kind), x.name(), r, e.value, excess,
                      ok ? to_string(e.status) : "exceeds-registered", ok});
      return io::json{{"space", io::to_json(x)}, {"measure", io::to_json(mu)}, {"estimate", io::to_json(e)}};
    });
  }

  void operator_constant_row(double r, ConstantKind kind) {
    record("operator constant", [&](std::vector<SummaryRow>& rows) {
      ConstantBudget b = cfg_.constants;
      b.search.seed = split_seed(cfg_.seed, 0xC7);
      const ConstantEstimate e = estimate_operator_constant(*op_, r, kind, b);
      rows.push_back({std::string("operator-") + to_string(kind), op_->codomain().space().name(), r, e.value, 0.0,
                      to_string(e.status), true});
      return io::json{{"estimate", io::to_json(e)}};
    });
  }

  // -- weights ------------------------------------------------------------

  void prepare_weight(const io::Node& root, bool vector_valued) {
    const io::Node w = root.at("weight");
    w.object({"r", "constant", "mode", "factorize"});
    r_ = w.at("r").positive();
    if (!std::isfinite(r_)) w.at("r").fail("r must be finite");
    constant_ = w.at("constant").positive();
    if (w.has("mode")) domain_mode_ = w.at("mode").choice({"pair", "domain"}) == "domain";
    if (w.has("factorize")) factorize_ = w.at("factorize").boolean();
    if (vector_valued) {
      if (domain_mode_) w.at("mode").fail("vv-weight solves for a weight pair");
      const io::Node b = root.at("block_operator");
      block_ = io::read_block_operator(b);
      op_ = b.build([&] { return lift_vector_valued(*block_); });
    } else {
      op_ = io::read_operator(root.at("operator"));
    }
    jobs_.push_back([this, vector_valued] { weight_rows(vector_valued ? "vv-weight" : "weight"); });
  }

  void weight_rows(const std::string& task) {
    const OperatorSpec& op = *op_;
    WeightCertificate cert;
    record(domain_mode_ ? "domain weight" : "weight pair", [&](std::vector<SummaryRow>& rows) {
      cert = domain_mode_ ? solve_weight_domain(op, r_, constant_, cfg_) : solve_weight_pair(op, r_, constant_, cfg_);
      const double value = domain_mode_ ? cert.domain_bound.value_or(0.0) : cert.codomain_bound;
      const std::string space = domain_mode_ ? op.domain().space().name() : op.codomain().space().name();
      rows.push_back({task, space, r_, value, cert.residual, cert.status, cert.feasible});
      io::json j = {{"certificate", io::to_json(cert)}};
      if (block_) j["block_shape"] = {{"rows", {block_->codomain.measure.size(), block_->codomain.block_dim}},
                                      {"cols", {block_->domain.measure.size(), block_->domain.block_dim}}};
      return j;
    });
    if (!cert.feasible) return;
    verify_rows(cert);
    if (!factorize_) return;
    const bool range = !domain_mode_ && op.codomain().kind() == RepresentationKind::C;
    const bool domain = domain_mode_ && op.domain().kind() == RepresentationKind::C;
    if (!range && !domain) return;
    record(range ? "range factorization" : "domain factorization", [&](std::vector<SummaryRow>& rows) {
      const FactorizationResult f = range ? build_factorization_range(cert, op, cfg_) : build_factorization_domain(cert, op, cfg_);
      const bool ok = f.composition_residual <= 1e-9 && f.norm_product <= f.bound * (1.0 + 1e-6);
      rows.push_back({range ? "factorization-range" : "factorization-domain", op.codomain().space().name(), r_,
                      f.norm_product, f.composition_residual, ok ? "pass" : "fail", ok});
      return io::json{{"factorization", io::to_json(f)}};
    });
  }

  void verify_rows(const WeightCertificate& cert) {
    record("verification", [&](std::vector<SummaryRow>& rows) {
      const VerificationReport v = verify_weight_certificate(cert, *op_, verify_options());
      rows.push_back({"verify", op_->codomain().space().name(), cert.r, v.reverse_worst_ratio, v.domination_residual,
                      v.passed() ? "pass" : "fail", v.passed()});
      return io::json{{"verification", io::to_json(v)}};
    });
  }

  // -- pietsch ------------------------------------------------------------

  void prepare_pietsch(const io::Node& root) {
    const io::Node p = root.at("pietsch");
    p.object({"r", "pi"});
    r_ = p.at("r").positive();
    if (!(r_ >= 1.0) || !std::isfinite(r_)) p.at("r").fail("r must be in [1, inf)");
    const io::Node pi = p.at("pi");
    if (pi.raw().is_string() && pi.raw().get<std::string>() == "estimate")
      estimate_pi_ = true;
    else
      constant_ = pi.positive();
    op_ = io::read_operator(root.at("operator"));
    root.at("operator").build([&] {
      detail::check_linf_domain(*op_);
      return 0;
    });
    jobs_.push_back([this] { pietsch_rows(); });
  }

  void pietsch_rows() {
    const OperatorSpec& op = *op_;
    const std::string space = op.codomain().space().name();
    if (estimate_pi_) {
      record("summing norm", [&](std::vector<SummaryRow>& rows) {
        const SummingNormEstimate e = estimate_summing_norm(op, r_, cfg_);
        constant_ = e.upper;
        rows.push_back({"summing-norm", space, r_, e.upper, e.upper - e.lower, "estimate", true});
        return io::json{{"summing_norm", io::to_json(e)}};
      });
    }
    record("pietsch measure", [&](std::vector<SummaryRow>& rows) {
      const PietschCertificate c = solve_pietsch(op, r_, constant_, cfg_);
      const bool ok = c.feasible && c.simplex_error <= 1e-12;
      rows.push_back({"pietsch", space, r_, c.constant, c.residual, c.status, ok});
      return io::json{{"certificate", io::to_json(c)}};
    });
  }

  // -- minimax ------------------------------------------------------------

  FormSide read_side(const io::Node& n) {
    n.object({"space", "measure", "r", "convexity"});
    FormSide s;
    s.space = io::read_space(n.at("space"));
    s.measure = io::read_measure(n.at("measure"));
    s.dim = s.measure.size();
    s.r = n.at("r").positive();
    s.convexity = n.has("convexity") ? n.at("convexity").positive() : 1.0;
    s.rep = [](std::span<const double> x) { return Vec(x.begin(), x.end()); };
    return s;
  }

  void prepare_minimax(const io::Node& n) {
    n.object({"matrix", "first", "second", "max_iterations", "tolerance"});
    FormSide a = read_side(n.at("first")), b = read_side(n.at("second"));
    const Eigen::MatrixXd m = n.at("matrix").mat();
    if (static_cast<std::size_t>(m.rows()) != a.dim || static_cast<std::size_t>(m.cols()) != b.dim)
      n.at("matrix").fail("form matrix must be " + std::to_string(a.dim) + "x" + std::to_string(b.dim));
    if (auto v = n.get("max_iterations")) mcfg_.max_iterations = v->count();
    mcfg_.tolerance = n.has("tolerance") ? n.at("tolerance").positive() : cfg_.tolerance;
    mcfg_.seed = cfg_.seed;
    form_matrix_ = m;
    form_ = FormSpec{[m](std::span<const double> x, std::span<const double> y) {
                       double s = 0.0;
                       for (Eigen::Index i = 0; i < m.rows(); ++i)
                         for (Eigen::Index j = 0; j < m.cols(); ++j)
                           s += x[static_cast<std::size_t>(i)] * m(i, j) * y[static_cast<std::size_t>(j)];
                       return s;
                     },
                     a, b};
    n.build([&] {
      form_->check();
      return 0;
    });
    jobs_.push_back([this] { minimax_row(); });
  }

  void minimax_row() {
    record("minimax", [&](std::vector<SummaryRow>& rows) {
      const MinimaxCertificate c = solve_minimax(*form_, mcfg_);
      const double margin = std::max(0.0, -std::min(c.margin_k1, c.margin_k2));
      rows.push_back({"minimax", form_->first.space.name(), form_->t(), c.worst_violation, margin, c.status,
                      c.converged && margin <= 1e-6});
      return io::json{{"form",
                       {{"matrix", io::matrix(form_matrix_)},
                        {"first", {{"space", io::to_json(form_->first.space)},
                                   {"measure", io::to_json(form_->first.measure)},
                                   {"r", io::number(form_->first.r)},
                                   {"convexity", io::number(form_->first.convexity)}}},
                        {"second", {{"space", io::to_json(form_->second.space)},
                                    {"measure", io::to_json(form_->second.measure)},
                                    {"r", io::number(form_->second.r)},
                                    {"convexity", io::number(form_->second.convexity)}}}}},
                      {"certificate", io::to_json(c)}};
    });
  }

  // -- verify -------------------------------------------------------------

  void prepare_verify(const io::Node& root) {
    op_ = io::read_operator(root.at("operator"));
    if (root.has("certificate") == root.has("certificate_file"))
      root.fail("give exactly one of 'certificate' and 'certificate_file'");
    if (root.has("certificate")) {
      cert_ = io::read_weight_certificate(root.at("certificate"));
    } else {
      const io::Node f = root.at("certificate_file");
      std::filesystem::path p = f.str();
      if (p.is_relative()) p = std::filesystem::path(doc_.file).parent_path() / p;
      std::ifstream in(p);
      if (!in) f.fail("cannot read " + p.string());
      std::stringstream ss;
      ss << in.rdbuf();
      cert_doc_ = io::parse_document(ss.str(), p.string());
      io::Node c(*cert_doc_);
      // A report written by a weight run: take its first certificate.
      if (c.has("results")) {
        const io::Node results = c.at("results");
        std::optional<io::Node> found;
        for (std::size_t i = 0; i < results.size() && !found; ++i)
          if (results[i].has("certificate")) found = results[i].at("certificate");
        if (!found) results.fail("no weight certificate in report");
        c = *found;
      }
      cert_ = io::read_weight_certificate(c);
    }
    const std::size_t nu = op_->codomain().measure().size(), mu = op_->domain().measure().size();
    if (!cert_->omega2.empty() && cert_->omega2.size() != nu)
      root.fail("certificate omega2 has " + std::to_string(cert_->omega2.size()) + " entries, codomain has " +
                std::to_string(nu) + " atoms");
    if (cert_->omega1 && cert_->omega1->size() != mu)
      root.fail("certificate omega1 has " + std::to_string(cert_->omega1->size()) + " entries, domain has " +
                std::to_string(mu) + " atoms");
    jobs_.push_back([this] { verify_rows(*cert_); });
  }

  const io::Document& doc_;
  RunOptions opt_;
  std::string task_;
  SolverConfig cfg_;
  VerifyOptions vopt_;
  MinimaxConfig mcfg_;
  std::string report_name_ = "report.json";
  std::string summary_name_ = "summary.csv";

  std::optional<OperatorSpec> op_;
  std::optional<BlockOperator> block_;
  std::optional<FormSpec> form_;
  Eigen::MatrixXd form_matrix_;
  std::optional<WeightCertificate> cert_;
  std::optional<io::Document> cert_doc_;
  double r_ = 2.0;
  double constant_ = 1.0;
  bool domain_mode_ = false;
  bool factorize_ = true;
  bool estimate_pi_ = false;

  std::vector<std::function<void()>> jobs_;
  std::vector<SummaryRow> rows_;
  io::json report_;
};

}  // namespace detail

// Runs the experiment described by a config text, without touching the file
// system. `file` names the config in error messages.
inline RunOutcome run_experiment_text(const std::string& text, const std::string& file, const RunOptions& opt = {}) {
  RunOutcome out;
  try {
    const io::Document doc = io::parse_document(text, file);
    detail::Experiment e(doc, opt);
    e.run(out);
    out.report_path = std::filesystem::path(opt.out_dir) / e.report_name();
    out.summary_path = std::filesystem::path(opt.out_dir) / e.summary_name();
  } catch (const io::ConfigError& err) {
    out.exit_code = 2;
    out.message = err.what();
  }
  return out;
}

inline std::string report_text(const RunOutcome& out) { return out.report.dump(2) + "\n"; }

inline std::string summary_text(const RunOutcome& out) {
  const std::uint64_t seed = out.report.contains("seed") ? out.report["seed"].get<std::uint64_t>() : 0;
  return detail::csv_text(out.rows, seed);
}

// Reads the config, runs it and writes the JSON report and CSV summary.
// Exit code 0 when every check passed, 1 on a failed check (files are still
// written), 2 on a config error (nothing is written).
inline RunOutcome run_experiment(const std::string& config_path, const RunOptions& opt = {}) {
  std::ifstream in(config_path);
  if (!in) {
    RunOutcome out;
    out.exit_code = 2;
    out.message = config_path + ":0: cannot open config file";
    return out;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  RunOutcome out = run_experiment_text(ss.str(), config_path, opt);
  if (out.exit_code == 2) return out;
  std::filesystem::create_directories(opt.out_dir);
  std::ofstream(out.report_path, std::ios::binary) << report_text(out);
  std::ofstream(out.summary_path, std::ios::binary) << summary_text(out);
  return out;
}

}  // namespace kothe
