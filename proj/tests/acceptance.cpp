// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "kothe/constants.hpp"
#include "kothe/duality.hpp"
#include "kothe/factorization.hpp"
#include "kothe/minimax.hpp"
#include "kothe/oracles.hpp"
#include "kothe/pietsch.hpp"
#include "kothe/verify.hpp"
#include "kothe/weights.hpp"

using namespace kothe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  char budget[32] = "";
  if (limit_s > 0.0) std::snprintf(budget, sizeof budget, " (limit %.0f s)", limit_s);
  std::printf("criterion %2d  %-4s  %-34s %s; %.2f s%s\n", id, pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs,
              budget);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// A random space from the four families together with a measure that fits it.
std::pair<SpaceDescriptor, DiscreteMeasure> random_space(Rng& rng) {
  auto weights = [&](std::size_t n) { return DiscreteMeasure(kothe::testing::random_weights(rng, n)); };
  auto exponent = [&] { return uniform01(rng) < 0.15 ? kInf : uniform(rng, 0.3, 5.0); };
  const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 15.0);  // 2..16
  switch (static_cast<int>(uniform01(rng) * 4.0)) {
    case 0:
      return {SpaceDescriptor::lp(exponent()), weights(n)};
    case 1: {
      const std::size_t a = 2 + static_cast<std::size_t>(uniform01(rng) * 3.0), b = 2 + static_cast<std::size_t>(uniform01(rng) * 3.0);
      const auto m1 = weights(a), m2 = weights(b);
      return {SpaceDescriptor::mixed(exponent(), exponent(), m1, m2), product_measure(m1, m2)};
    }
    case 2:
      return {SpaceDescriptor::lorentz(uniform(rng, 0.5, 5.0), uniform01(rng) < 0.15 ? kInf : uniform(rng, 0.5, 5.0)),
              weights(n)};
    default: {
      const double p = uniform(rng, 1.0, 4.0);
      return {SpaceDescriptor::orlicz(uniform01(rng) < 0.5 ? YoungFunction::power(p) : YoungFunction::power_log(p)),
              weights(std::min<std::size_t>(n, 8))};
    }
  }
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

// Certificates produced in criterion 5, reused by 6 and 8.
struct Instance {
  OperatorSpec op;
  WeightCertificate cert;
};
std::vector<Instance> accepted;

Outcome power_identities() {
  Rng rng(1001);
  double worst = 0.0;
  int cases = 0;
  while (cases < 500) {
    const auto [s, m] = random_space(rng);
    const double r = uniform01(rng) < 0.5 ? uniform(rng, 0.3, 1.0) : uniform(rng, 1.0, 4.0);
    const Vec x = random_signed(rng, m.size());
    const double a = norm(power_space(s, r), x, m), b = norm(SpaceDescriptor::power(s, r), x, m);
    worst = std::max(worst, rel(a, b));
    ++cases;
  }
  return {worst <= 1e-9, fmt("max rel diff %.2e over %.0f vectors", worst, cases)};
}

Outcome transport() {
  Rng rng(1002);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto [s, m] = random_space(rng);
    const std::size_t size = 1 + static_cast<std::size_t>(uniform01(rng) * 4.0);
    std::vector<Vec> vs;
    for (std::size_t j = 0; j < size; ++j) vs.push_back(random_signed(rng, m.size()));
    const TupleWitness tw{vs, uniform(rng, 0.5, 4.0), m};
    const double t = uniform(rng, 0.3, 3.0);
    const auto moved = lemma2_transport(tw, t);
    const auto st = power_space(s, t);
    worst = std::max(worst, rel(convexity_ratio(st, moved), std::pow(convexity_ratio(s, tw), t)));
    worst = std::max(worst, rel(concavity_ratio(st, moved), std::pow(concavity_ratio(s, tw), t)));
  }
  return {worst <= 1e-9, fmt("max rel diff %.2e over 200 cases", worst)};
}

Outcome hoelder() {
  Rng rng(1003);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const auto [s, m] = random_space(rng);
    const double u = uniform(rng, 0.1, 0.9);
    const Vec x = random_signed(rng, m.size()), y = random_signed(rng, m.size());
    Vec xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xy[i] = x[i] * y[i];
    const double lhs = norm(s, xy, m);
    const double rhs = norm(power_space(s, u), x, m) * norm(power_space(s, 1.0 - u), y, m);
    worst = std::max(worst, rhs > 0.0 ? lhs / rhs - 1.0 : 0.0);
  }
  return {worst <= 1e-9, fmt("max excess %.2e over 500 cases", worst)};
}

Outcome sandwich() {
  Rng rng(1004);
  const auto s = power_space(SpaceDescriptor::lp(1), 2.0);  // L_(1/2)
  bool ok = true;
  double worst_gap = 0.0;
  int cases = 0;
  for (std::size_t n : {2u, 3u}) {
    for (int k = 0; k < 6; ++k, ++cases) {
      const auto m = DiscreteMeasure(Vec(n, uniform(rng, 0.5, 2.0)));
      const double mr = registered_convexity(SpaceDescriptor::lp(1), 2.0, m).value();
      const Vec x = random_signed(rng, n);
      const auto c = convexification_norm(s, x, m);
      const double brute = oracle::brute_convexification(s, x, m, n, n == 2 ? 101 : 11);
      const double q = norm(s, x, m);
      ok = ok && c.lower <= brute * (1.0 + 1e-9) && brute <= c.value * (1.0 + 1e-9) + 1e-12;
      ok = ok && c.lower >= q / (mr * mr) * (1.0 - 1e-9) && c.value <= q * (1.0 + 1e-9);
      worst_gap = std::max(worst_gap, c.gap);
    }
  }
  return {ok, fmt("%.0f vectors, enclosure gap <= %.2e", cases, worst_gap)};
}

Outcome weights_vs_oracle() {
  Rng rng(1005);
  bool ok = true;
  double worst = 0.0, worst_res = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto rows = 1 + static_cast<Eigen::Index>(uniform01(rng) * 4.0);
    const auto cols = 1 + static_cast<Eigen::Index>(uniform01(rng) * 4.0);
    const Eigen::MatrixXd t = kothe::testing::random_matrix(rng, rows, cols);
    const DiscreteMeasure nu(kothe::testing::random_weights(rng, static_cast<std::size_t>(rows)));
    const auto hb = oracle::hilbert_weight_oracle(t, 1.0, nu, 1e6);
    const auto op = kothe::testing::euclidean_into(t, 1.0, nu);
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(k);
    const auto cert = solve_weight_pair(op, 2.0, hb.upper * 1.01, cfg);
    VerifyOptions vo;
    vo.seed = static_cast<std::uint64_t>(k);
    const auto rep = verify_weight_certificate(cert, op, vo);
    const double dev = std::max(hb.lower * 0.98 - cert.codomain_bound, cert.codomain_bound - hb.upper * 1.02);
    worst = std::max(worst, cert.codomain_bound / hb.upper - 1.0);
    worst_res = std::max({worst_res, cert.residual, rep.domination_residual});
    ok = ok && cert.feasible && dev <= 0.0 && rep.passed() && cert.residual <= 1e-6 && rep.domination_residual <= 1e-6;
    if (cert.feasible) accepted.push_back({op, cert});
  }
  // the hand example, solver and grid oracle
  const auto op = kothe::testing::r_to_l1();
  const auto cert = solve_weight_pair(op, 2.0, 2.0);
  Eigen::MatrixXd t(2, 1);
  t << 1, 1;
  const oracle::WeightProblem prob{[](std::span<const double> x) { return Vec{x[0], x[0]}; },
                                   [](std::span<const double> x) { return std::fabs(x[0]); }, 1,
                                   SpaceDescriptor::lp(1), DiscreteMeasure::counting(2)};
  const auto brute = oracle::brute_weight_search(prob, 2.0, 2.0, oracle::uniform_grid(2, 0.0, 4.0, 201));
  const double res = 4.0 / 200.0;
  const bool hand = cert.feasible && brute.feasible && std::fabs(cert.omega2[0] - 2.0) <= res &&
                    std::fabs(cert.omega2[1] - 2.0) <= res && std::fabs(brute.omega[0] - 2.0) <= res &&
                    std::fabs(brute.omega[1] - 2.0) <= res;
  if (cert.feasible) accepted.push_back({op, cert});
  return {ok && hand, fmt("20 instances, norm / bracket top - 1 <= %.2e, residual <= %.2e; hand example ", worst,
                          worst_res) + (hand ? "ok" : "WRONG")};
}

Outcome reverse() {
  if (accepted.empty()) return {false, "no certificates from criterion 5"};
  Rng rng(1006);
  double worst = 0.0;
  bool ok = true;
  for (const auto& [op, cert] : accepted) {
    const double limit = cert.constant * cert.codomain_concavity.value * cert.domain_convexity.value;
    for (int k = 0; k < 100; ++k) {
      std::vector<Vec> xs;
      for (int j = 0; j <= k % 5; ++j) xs.push_back(random_signed(rng, op.in_dim()));
      const double v = vv_ratio(op, xs, cert.r);
      worst = std::max(worst, v / limit);
      ok = ok && v <= limit * (1.0 + 1e-6);
    }
  }
  return {ok, fmt("%.0f certificates x 100 tuples, worst ratio / limit %.4f", static_cast<double>(accepted.size()),
                  worst)};
}

Outcome pietsch() {
  const auto linf = [](const Eigen::MatrixXd& t) {
    return kothe::testing::lattice(t, SpaceDescriptor::lp(kInf), DiscreteMeasure::counting(static_cast<std::size_t>(t.cols())),
                                   SpaceDescriptor::lp(2), DiscreteMeasure::counting(static_cast<std::size_t>(t.rows())));
  };
  const auto id = solve_pietsch(linf(Eigen::MatrixXd::Identity(2, 2)), 2.0, std::sqrt(2.0));
  const bool id_ok = id.feasible && std::fabs(id.lambda[0] - 0.5) <= 1e-9 && std::fabs(id.lambda[1] - 0.5) <= 1e-9 &&
                     id.residual <= 1e-9;
  Rng rng(1007);
  bool ok = true;
  double worst = 0.0, simplex = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto op = linf(kothe::testing::random_matrix(rng, 3, 5));
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(k);
    const double pi = estimate_summing_norm(op, 2.0, cfg).upper;
    const auto c = solve_pietsch(op, 2.0, pi * (1.0 + 1e-4), cfg);
    double sum = 0.0, low = 0.0;
    for (double l : c.lambda) {
      sum += l;
      low = std::min(low, l);
    }
    simplex = std::max({simplex, std::fabs(sum - 1.0), -low});
    worst = std::max(worst, c.residual);
    ok = ok && c.feasible && c.residual <= 1e-6;
  }
  ok = ok && simplex <= 1e-12;
  return {ok && id_ok, fmt("identity residual %.1e; 10 random: residual <= %.2e, simplex error %.1e", id.residual, worst,
                           simplex)};
}

Outcome factorizations() {
  if (accepted.empty()) return {false, "no certificates from criterion 5"};
  bool ok = true;
  double comp = 0.0, excess = 0.0;
  for (const auto& [op, cert] : accepted) {
    const auto f = build_factorization_range(cert, op);
    comp = std::max(comp, f.composition_residual);
    excess = std::max(excess, f.norm_product / f.bound - 1.0);
    ok = ok && f.composition_residual <= 1e-9 && f.norm_product <= f.bound * (1.0 + 1e-6);
  }
  // domain factorizations: T on L_2(mu) into L_2(nu), r = 2, C = ||T||
  Rng rng(1008);
  int domain = 0;
  for (int k = 0; k < 10; ++k, ++domain) {
    const Eigen::MatrixXd t = kothe::testing::random_matrix(rng, 3, 3);
    const DiscreteMeasure m(kothe::testing::random_weights(rng, 3)), n(kothe::testing::random_weights(rng, 3));
    Eigen::MatrixXd w = t;
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j)
        w(i, j) *= std::sqrt(n[static_cast<std::size_t>(i)] / m[static_cast<std::size_t>(j)]);
    const double opnorm = Eigen::JacobiSVD<Eigen::MatrixXd>(w).singularValues()(0);
    const auto op = kothe::testing::lattice(t, SpaceDescriptor::lp(2), m, SpaceDescriptor::lp(2), n);
    const auto cert = solve_weight_domain(op, 2.0, opnorm * 1.01);
    if (!cert.feasible) {
      ok = false;
      continue;
    }
    const auto f = build_factorization_domain(cert, op);
    comp = std::max(comp, f.composition_residual);
    excess = std::max(excess, f.norm_product / f.bound - 1.0);
    ok = ok && f.composition_residual <= 1e-9 && f.norm_product <= f.bound * (1.0 + 1e-6);
  }
  return {ok, fmt("%.0f range + %.0f domain, composition <= %.1e", static_cast<double>(accepted.size()), domain, comp) +
                  fmt(", product / bound - 1 <= %.2e", excess)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "kothe_acceptance";
  fs::remove_all(base);
  int configs = 0;
  bool ok = true;
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(KOTHE_CONFIG_DIR))
    if (e.path().extension() == ".json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    std::string reports[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = base / p.stem() / std::to_string(run);
      const std::string cmd = std::string("\"") + KOTHE_CLI + "\" run --quiet --config \"" + p.string() +
                              "\" --out \"" + out.string() + "\" > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      (void)status;  // some configs are meant to fail their checks
      reports[run] = slurp(out / "report.json");
    }
    ok = ok && !reports[0].empty() && reports[0] == reports[1];
    ++configs;
  }
  fs::remove_all(base);
  return {ok && configs > 0, fmt("%.0f configs run twice through the CLI, reports byte-identical", configs)};
}

Outcome minimax() {
  const DiscreteMeasure m = DiscreteMeasure::counting(2);
  FormSide side;
  side.dim = 2;
  side.space = SpaceDescriptor::power(SpaceDescriptor::lp(1), 0.5);
  side.measure = m;
  side.r = 2.0;
  side.rep = [](std::span<const double> x) { return Vec(x.begin(), x.end()); };
  const FormSpec form{[](std::span<const double> x, std::span<const double> y) { return x[0] * y[0] + x[1] * y[1]; },
                      side, side};
  MinimaxConfig cfg;
  cfg.max_iterations = 500;
  const auto c = solve_minimax(form, cfg);
  const bool grid = oracle::grid_minimax_feasible(c.phi1, c.phi2, m, 1e-6, 41);
  const bool ok = c.converged && c.iterations <= 500 && c.margin_k1 >= -1e-6 && c.margin_k2 >= -1e-6 && grid;
  return {ok, fmt("%.0f iterations, margins %.2e / %.2e", static_cast<double>(c.iterations), c.margin_k1, c.margin_k2) +
                  (grid ? ", grid oracle agrees" : ", grid oracle DISAGREES")};
}

}  // namespace

int main() {
  criterion(1, "power identities", 5, power_identities);
  criterion(2, "transport of ratios", 5, transport);
  criterion(3, "Hoelder product", 5, hoelder);
  criterion(4, "convexification sandwich", 30, sandwich);
  criterion(5, "weight solver vs oracle", 120, weights_vs_oracle);
  criterion(6, "reverse implication", 30, reverse);
  criterion(7, "Pietsch measures", 60, pietsch);
  criterion(8, "factorizations", 30, factorizations);
  criterion(9, "CLI determinism", 0, determinism);
  criterion(10, "minimax engine", 60, minimax);
  std::printf("%s: %d of 10 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
