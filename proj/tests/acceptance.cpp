// Release gate: one self-contained check per shipped guarantee, one verdict
// line each. Exit code = number of failed checks. The full-scale replication
// (criterion 9) takes ~25 minutes single-threaded and only runs with
// --full-scale; everything else is sized for a few minutes total.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "plume/analytic_field.hpp"
#include "plume/control.hpp"
#include "plume/gamma_poisson.hpp"
#include "plume/harness.hpp"
#include "plume/markov_field.hpp"
#include "plume/rbpf.hpp"

using namespace plume;

namespace {

int g_failures = 0;

void verdict(const char* id, bool pass, const std::string& detail) {
  std::printf("%s  %-4s %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct EnvSpec {
  int radius;
  double p;
  std::uint64_t seed;
};
const EnvSpec kSmallMaps[] = {
    {2, 0.10, 11}, {3, 0.15, 12}, {4, 0.20, 13}, {4, 0.25, 14}, {3, 0.12, 15},
};

// ---------------------------------------------------------------- criterion 1
// Exact mean-visit field vs a brute-force random walk oracle.
void criterion1() {
  constexpr double kRelTol = 0.02;     // on nodes carrying > 1% of the source rate
  constexpr double kFloor = 0.01;
  constexpr long kWalks = 1000000;
  constexpr double kBudgetSeconds = 120.0;

  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int checked = 0;
  for (size_t i = 0; i < std::size(kSmallMaps); ++i) {
    const EnvSpec& spec = kSmallMaps[i];
    auto env = generate_environment(make_lattice(spec.radius), spec.p, spec.seed);
    auto chain = build_canonical_chain(env);
    auto field = mean_concentration_field(chain, env, {0, 1}, 1.0);
    auto oracle = random_walk_oracle(env, {0, 1}, kWalks, 1000 + i);
    for (int node = 0; node < env.grid->node_count(); ++node) {
      if (field.values[node] <= kFloor) continue;
      worst = std::max(worst, std::abs(oracle[node] - field.values[node]) / field.values[node]);
      ++checked;
    }
  }
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "exact field vs %ld-walk oracle on 5 maps (max rel err %.4f over %d nodes, %.1f s)",
                kWalks, worst, checked, elapsed);
  verdict("C1", worst < kRelTol && elapsed < kBudgetSeconds, buf);
}

// ---------------------------------------------------------------- criterion 2
// The field vanishes identically on absorbing states; the analytic model
// vanishes on the boundary circle.
void criterion2() {
  constexpr double kCircleTol = 1e-12;

  bool exact_zero = true;
  for (const EnvSpec& spec : kSmallMaps) {
    auto env = generate_environment(make_lattice(spec.radius), spec.p, spec.seed);
    auto chain = build_canonical_chain(env);
    auto field = mean_concentration_field(chain, env, {0, 1}, 12.0);
    for (int node = 0; node < env.grid->node_count(); ++node) {
      if (chain.state_of_node[node] < chain.absorbing_count && field.values[node] != 0.0)
        exact_zero = false;
    }
  }
  {
    auto env = generate_environment(make_lattice(9), 0.35, 1);
    auto chain = build_canonical_chain(env);
    auto field = mean_concentration_field(chain, env, {0, 7}, 12.0);
    for (int node = 0; node < env.grid->node_count(); ++node) {
      if (env.grid->boundary(node) && field.values[node] != 0.0) exact_zero = false;
    }
  }

  const SourceParams src{0.0, 7.0, 12.0};
  const DomainGeom dom{9.0};
  double worst = 0.0;
  for (auto [x, y] : {std::pair{9.0, 0.0}, {0.0, 9.0}, {-9.0, 0.0}, {0.0, -9.0}}) {
    worst = std::max(worst, std::abs(mean_concentration_model(x, y, src, dom)));
  }
  for (int k = 0; k < 64; ++k) {
    const double phi = 2.0 * M_PI * (k + 0.5) / 64.0;
    worst = std::max(
        worst, std::abs(mean_concentration_model(9.0 * std::cos(phi), 9.0 * std::sin(phi), src, dom)));
  }

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "boundary is exactly dark (chain zeros %s, analytic worst |lambda| %.2e)",
                exact_zero ? "exact" : "VIOLATED", worst);
  verdict("C2", exact_zero && worst < kCircleTol, buf);
}

// ---------------------------------------------------------------- criterion 3
// Conjugate rate updates against quadrature Bayes, and the marginal count
// likelihood against its density-ratio and quadrature routes.
struct RateTuple {
  double eta, theta, c;
  long n;
};

// Ten states the filter actually passes through: conjugate recursion from the
// prior, sensing constants from representative positions, counts near c*mean.
std::vector<RateTuple> recursion_tuples() {
  std::vector<RateTuple> tuples;
  double eta = 15.0, theta = 1.0;
  const double cs[] = {0.25131442828090605, 0.8, 1.5, 0.1, 2.2,
                       0.45, 1.1, 0.06, 0.9, 1.8};
  for (int i = 0; i < 10; ++i) {
    const double c = cs[i];
    long n = std::llround(c * eta * theta) + (i % 3) - 1;
    if (n < 0) n = 0;
    tuples.push_back({eta, theta, c, n});
    const auto post = update_gamma({eta, theta}, n, c);
    eta = post.eta;
    theta = post.theta;
  }
  return tuples;
}

void criterion3() {
  constexpr double kBayesTol = 1e-6;   // pointwise posterior density error
  constexpr double kEvalTol = 1e-10;   // ratio route across evaluation points
  constexpr double kQuadTol = 1e-8;    // closed form vs trapezoid marginal
  constexpr int kGridPts = 8001;

  double worst_bayes = 0.0, worst_eval = 0.0, worst_quad = 0.0;
  for (const RateTuple& t : recursion_tuples()) {
    const auto post = update_gamma({t.eta, t.theta}, t.n, t.c);

    const double mu = t.eta * t.theta, sigma = std::sqrt(t.eta) * t.theta;
    const double lo = std::max(0.0, mu - 10.0 * sigma), hi = mu + 10.0 * sigma;
    const double h = (hi - lo) / (kGridPts - 1);
    std::vector<double> unnorm(kGridPts);
    double z = 0.0;
    for (int i = 0; i < kGridPts; ++i) {
      const double a = lo + i * h;
      unnorm[i] = std::exp(log_gamma_pdf(a, t.eta, t.theta) + log_poisson_pmf(t.n, t.c * a));
      z += unnorm[i] * ((i == 0 || i == kGridPts - 1) ? 0.5 : 1.0) * h;
    }
    for (int i = 0; i < kGridPts; ++i) {
      const double a = lo + i * h;
      const double ref = std::exp(log_gamma_pdf(a, post.eta, post.theta));
      worst_bayes = std::max(worst_bayes, std::abs(unnorm[i] / z - ref));
    }

    const double closed = log_count_likelihood_I(t.eta, t.theta, t.c, t.n);
    for (double a : {0.5 * mu, mu, 2.0 * mu}) {
      worst_eval = std::max(
          worst_eval, std::abs(log_count_likelihood_ratio(t.eta, t.theta, t.c, t.n, a) - closed));
    }
    worst_quad = std::max(
        worst_quad, std::abs(log_count_likelihood_quad(t.eta, t.theta, t.c, t.n, 2001) - closed));
  }

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "rate posterior vs grid bayes on 10 tuples (density %.2e, eval-point %.2e, "
                "quadrature %.2e)",
                worst_bayes, worst_eval, worst_quad);
  verdict("C3", worst_bayes < kBayesTol && worst_eval < kEvalTol && worst_quad < kQuadTol, buf);
}

// ---------------------------------------------------------------- criterion 4
// Link occupancy updates: the worked half-prior cases and randomized
// agreement with an extended-precision two-state Bayes rule.
void criterion4() {
  constexpr double kWorkedTol = 1e-15;
  constexpr double kBayesTol = 1e-12;

  const DetectionMatrix m{0.8, 0.1};
  const double e1 = std::abs(update_link_prob(0.5, 1, m) - 8.0 / 9.0);
  const double e0 = std::abs(update_link_prob(0.5, 0, m) - 2.0 / 11.0);

  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double q = 0.02 + 0.96 * unit(rng);
    const DetectionMatrix mm{0.55 + 0.44 * unit(rng), 0.5 * unit(rng)};
    for (int z : {0, 1}) {
      const long double lq = q;
      const long double on = z ? (long double)mm.p_d : 1.0L - (long double)mm.p_d;
      const long double off = z ? (long double)mm.p_fa : 1.0L - (long double)mm.p_fa;
      const long double ref = on * lq / (on * lq + off * (1.0L - lq));
      worst = std::max(worst,
                       std::abs(update_link_prob(q, z, mm) - static_cast<double>(ref)));
    }
  }

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "link bayes worked cases (%.1e, %.1e), 1000 random tuples within %.2e", e1, e0,
                worst);
  verdict("C4", e1 <= kWorkedTol && e0 <= kWorkedTol && worst < kBayesTol, buf);
}

// ---------------------------------------------------------------- criterion 5
// Reward sanity: nonnegative on random mixtures, zero in the no-information
// limit, bounded by Cauchy-Schwarz, and quadrature-stable.
double raw_divergence(const std::vector<double>& w, const std::vector<RateTuple>& comps, long n) {
  double wsum = 0.0;
  for (double v : w) wsum += v;
  double pi = -1e308, pj = -1e308;
  std::vector<double> li(w.size()), lj(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    const double lw = std::log(w[i] / wsum);
    li[i] = lw + log_count_likelihood_I(comps[i].eta, comps[i].theta, comps[i].c, n);
    lj[i] = lw + log_bhatt_J(comps[i].eta, comps[i].theta, comps[i].c, n);
    pi = std::max(pi, li[i]);
    pj = std::max(pj, lj[i]);
  }
  double si = 0.0, sj = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    si += std::exp(li[i] - pi);
    sj += std::exp(lj[i] - pj);
  }
  return -2.0 * ((pj + std::log(sj)) - 0.5 * (pi + std::log(si)));
}

void criterion5() {
  constexpr double kNonnegSlack = -1e-9;
  constexpr double kDegenerateTol = 1e-9;
  constexpr double kBoundSlack = 1e-12;
  constexpr double kQuadTol = 1e-6;

  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double min_d = 1e308, worst_bound = -1e308;
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 2 + static_cast<int>(unit(rng) * 5);
    std::vector<double> w(m);
    std::vector<RateTuple> comps(m);
    const long n = static_cast<long>(unit(rng) * 13);
    for (int i = 0; i < m; ++i) {
      w[i] = 0.05 + unit(rng);
      comps[i] = {5.0 + 30.0 * unit(rng), 0.3 + 1.5 * unit(rng), 0.05 + 2.2 * unit(rng), n};
      worst_bound = std::max(
          worst_bound,
          log_bhatt_J(comps[i].eta, comps[i].theta, comps[i].c, n) -
              0.5 * log_count_likelihood_I(comps[i].eta, comps[i].theta, comps[i].c, n));
    }
    min_d = std::min(min_d, raw_divergence(w, comps, n));
  }

  const std::vector<double> wdeg(5, 0.2);
  const std::vector<RateTuple> degen(5, RateTuple{15.0, 1.0, kCFloor, 0});
  const double d0 = raw_divergence(wdeg, degen, 0);

  double worst_quad = 0.0;
  for (const RateTuple& t : recursion_tuples()) {
    worst_quad = std::max(worst_quad, std::abs(log_bhatt_J_quad(t.eta, t.theta, t.c, t.n, 256) -
                                               log_bhatt_J_quad(t.eta, t.theta, t.c, t.n, 2560)));
    worst_quad = std::max(worst_quad, std::abs(log_bhatt_J_quad(t.eta, t.theta, t.c, t.n, 256) -
                                               log_bhatt_J(t.eta, t.theta, t.c, t.n)));
  }

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "reward floor %.2e on 100 mixtures, no-information case %.2e, bound slack %.2e, "
                "quad drift %.2e",
                min_d, d0, worst_bound, worst_quad);
  verdict("C5", min_d > kNonnegSlack && std::abs(d0) < kDegenerateTol &&
                    worst_bound <= kBoundSlack && worst_quad < kQuadTol,
          buf);
}

// ---------------------------------------------------------------- criterion 6
// End-to-end search performance at desk scale on fresh obstructed maps.
SearchConfig desk_scale(Coord source, double rate0) {
  SearchConfig cfg;
  cfg.source = source;
  cfg.rate0 = rate0;
  cfg.n_particles = 2000;
  cfg.m_samples = 200;
  return cfg;
}

void criterion6() {
  constexpr double kMinSuccess = 85.0;
  constexpr double kMeanLo = 18.0, kMeanHi = 45.0;

  const auto t0 = std::chrono::steady_clock::now();
  SearchConfig cfg = desk_scale({2, -5}, 12.0);
  cfg.env_seed = 101;
  cfg.run_seed = 202;
  auto s = monte_carlo(cfg, 50, 1);
  const double mean = s.mean_steps.value_or(-1.0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "search at source (2,-5): %d/%d successes (%.0f%%), mean steps %.1f (%.0f s)",
                s.successes, s.runs, s.success_rate, mean, seconds_since(t0));
  verdict("C6", s.success_rate >= kMinSuccess && mean >= kMeanLo && mean <= kMeanHi, buf);
}

// ---------------------------------------------------------------- criterion 7
// A stronger source is easier to find: success does not drop and the mean
// search shortens by at least 3 steps from rate 8 to rate 16.
ExperimentSummary g_info_cell_a12;  // source (0,7), rate 12; reused by criterion 8

void criterion7() {
  constexpr double kMinMeanGap = 3.0;

  const auto t0 = std::chrono::steady_clock::now();
  ExperimentSummary cells[3];
  const double rates[3] = {8.0, 12.0, 16.0};
  for (int i = 0; i < 3; ++i) {
    SearchConfig cfg = desk_scale({0, 7}, rates[i]);
    cfg.env_seed = 301;  // shared across cells: paired comparison
    cfg.run_seed = 401;
    cells[i] = monte_carlo(cfg, 50, 1);
  }
  g_info_cell_a12 = cells[1];
  const double m8 = cells[0].mean_steps.value_or(-1.0);
  const double m16 = cells[2].mean_steps.value_or(1e9);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "rate sweep at (0,7): success %.0f/%.0f/%.0f%%, mean %.1f/%.1f/%.1f (%.0f s)",
                cells[0].success_rate, cells[1].success_rate, cells[2].success_rate, m8,
                cells[1].mean_steps.value_or(-1.0), m16, seconds_since(t0));
  verdict("C7",
          cells[2].success_rate >= cells[0].success_rate && m8 >= 0 && m8 - m16 >= kMinMeanGap,
          buf);
}

// ---------------------------------------------------------------- criterion 8
// The information-driven searcher beats a blind random walk by a wide margin.
void criterion8() {
  constexpr double kWalkCeiling = 5.0;
  constexpr double kSearchFloor = 60.0;

  SearchConfig cfg = desk_scale({0, 7}, 12.0);
  cfg.env_seed = 301;
  cfg.run_seed = 401;
  auto walk = random_walk_baseline(cfg, 100, 1);
  const double info = g_info_cell_a12.runs > 0 ? g_info_cell_a12.success_rate : -1.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "random walk %.1f%% vs informed search %.1f%% at (0,7)",
                walk.success_rate, info);
  verdict("C8", walk.success_rate <= kWalkCeiling && info >= kSearchFloor, buf);
}

// ---------------------------------------------------------------- criterion 9
// Full-scale replication of the published operating points (optional).
void criterion9() {
  constexpr double kMeanBand = 0.20;  // relative
  constexpr double kRateBand = 10.0;  // percentage points

  struct Cell {
    Coord source;
    double rate0;
    double mean_ref;
    double succ_ref;
  };
  const Cell cells[] = {
      {{0, 7}, 12.0, 42.1, 94.0}, {{0, 1}, 12.0, 34.0, 95.0}, {{2, -5}, 12.0, 28.8, 99.0},
      {{0, 7}, 8.0, 49.5, 78.0},  {{0, 7}, 16.0, 38.2, 93.0},
  };
  bool all = true;
  for (const Cell& cell : cells) {
    const auto t0 = std::chrono::steady_clock::now();
    SearchConfig cfg;  // full published operating point
    cfg.source = cell.source;
    cfg.rate0 = cell.rate0;
    cfg.env_seed = 501;
    cfg.run_seed = 601;
    auto s = monte_carlo(cfg, 100, 1);
    const double mean = s.mean_steps.value_or(-1.0);
    const bool ok = std::abs(mean - cell.mean_ref) <= kMeanBand * cell.mean_ref &&
                    std::abs(s.success_rate - cell.succ_ref) <= kRateBand;
    all = all && ok;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "  source (%d,%d) rate %.0f: mean %.1f vs %.1f, success %.0f%% vs %.0f%% (%.0f s)",
                  cell.source.x, cell.source.y, cell.rate0, mean, cell.mean_ref, s.success_rate,
                  cell.succ_ref, seconds_since(t0));
    std::printf("      %s\n", buf);
    std::fflush(stdout);
  }
  verdict("C9", all, "reference operating points within 20% mean / 10pp success");
}

// --------------------------------------------------------------- criterion 10
// Batch results are identical regardless of the worker pool size.
void criterion10() {
  SearchConfig cfg = desk_scale({2, -5}, 12.0);
  cfg.n_particles = 400;
  cfg.m_samples = 60;
  cfg.max_steps = 40;
  cfg.env_seed = 901;
  cfg.run_seed = 902;
  const auto one = summary_to_json(monte_carlo(cfg, 4, 1));
  const auto three = summary_to_json(monte_carlo(cfg, 4, 3));
  verdict("C10", one == three,
          one == three ? "4-run batch byte-identical for 1 and 3 workers"
                       : "worker count changed the batch output");
}

}  // namespace

int main(int argc, char** argv) {
  bool full_scale = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full-scale") == 0) full_scale = true;
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }

  using Fn = void (*)();
  const Fn checks[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                       criterion6, criterion7, criterion8, criterion9, criterion10};
  for (int k = 1; k <= 10; ++k) {
    if (only != 0 && k != only) continue;
    if (k == 9 && !full_scale && only != 9) {
      std::printf("SKIP  C9   full-scale operating points (long; pass --full-scale to run)\n");
      continue;
    }
    if (k == 8 && only == 8) {
      // criterion 8 compares against the criterion 7 cell; run both
      criterion7();
    }
    checks[k - 1]();
  }
  return g_failures;
}
