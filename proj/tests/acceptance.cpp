// Acceptance checks AC1-AC8. One line per criterion: "AC<k> PASS|FAIL <detail>".
// Exit status is nonzero when any criterion fails.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "npiv/config.hpp"
#include "npiv/estimator.hpp"
#include "npiv/rate_study.hpp"
#include "npiv/selection.hpp"
#include "npiv/simulate.hpp"
#include "support.hpp"

using namespace npiv;
using namespace npiv::testing;

namespace {

const std::string kCli = NPIV_CLI;
const std::string kData = NPIV_TEST_DATA;

int failures = 0;

void report(const char* id, bool ok, const std::string& detail)
{
  std::printf("%s %s %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string fmt(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// AC1 + AC4 share the [fs] study.
void rate_fs()
{
  const Config cfg = load_config(kData + "/fs_rate.json");
  const auto rep = run_rate_study(cfg, default_jobs());
  const double target = -4.0 / 7.0;
  std::ostringstream d1;
  d1 << "[fs] p=2 a=1 s=0: fitted slope " << fmt(rep.fitted_slope) << ", target " << fmt(target) << " +/- 0.15"
     << "; median risk by n:";
  for (const auto& row : rep.per_n) {
    d1 << " " << row.n << ":" << fmt(row.median_risk);
  }
  report("AC1", std::abs(rep.fitted_slope - target) <= 0.15, d1.str());

  bool ok = true;
  std::ostringstream d4;
  d4 << "adaptive / fixed-k* median risk:";
  for (const auto& row : rep.per_n) {
    const double ratio = row.median_risk / row.median_oracle_risk;
    ok = ok && row.median_risk <= 3.0 * row.median_oracle_risk;
    d4 << " n=" << row.n << " (k*=" << row.oracle.k_star << ") " << fmt(ratio);
  }
  d4 << " (bound 3)";
  report("AC4", ok, d4.str());
}

void rate_is()
{
  const Config cfg = load_config(kData + "/is_rate.json");
  const auto rep = run_rate_study(cfg, default_jobs());
  const double p = cfg.structural.p;
  const double a = cfg.op.a;
  bool mono = true;
  double lo = 1e300, hi = 0.0;
  std::ostringstream d;
  d << "[is] p=2 a=1/2: median risk by n:";
  for (std::size_t i = 0; i < rep.per_n.size(); ++i) {
    const auto& row = rep.per_n[i];
    if (i > 0) {
      mono = mono && row.median_risk < rep.per_n[i - 1].median_risk;
    }
    const double ratio = row.median_risk / std::pow(std::log(static_cast<double>(row.n)), -p / a);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    d << " " << row.n << ":" << fmt(row.median_risk);
  }
  d << "; strictly decreasing " << (mono ? "yes" : "no") << "; max/min of risk*(log n)^(p/a) = " << fmt(hi / lo)
    << " (bound 5)";
  report("AC2", mono && hi / lo <= 5.0, d.str());
}

void rate_derivative()
{
  const Config cfg = load_config(kData + "/fs_derivative.json");
  const auto rep = run_rate_study(cfg, default_jobs());
  const double target = -2.0 / 7.0;
  report("AC3", std::abs(rep.fitted_slope - target) <= 0.2,
         "[fs] p=2 a=1 s=1: fitted slope " + fmt(rep.fitted_slope) + ", target " + fmt(target) + " +/- 0.2");
}

void sequence_oracles()
{
  std::mt19937_64 gen(20261019);
  const int N = 120;
  int bad_known = 0, bad_bound = 0, bad_emp = 0, bad_oracle = 0, bad_nl = 0;
  for (int rep = 0; rep < N; ++rep) {
    const auto w = random_omega(gen);
    const auto l = random_lambda(gen);
    const auto g = random_gamma(gen);
    const double d = std::uniform_real_distribution<double>(1.0, 4.0)(gen);
    const Index n = 1 + static_cast<Index>(gen() % 400);

    const Index k_max = 1 + static_cast<Index>(gen() % 60);
    const auto seq = known_sequences(w, l, k_max);
    for (Index k = 1; k <= k_max; ++k) {
      if (seq.Delta(k - 1) != ref_Delta(w, l, k) || seq.tau(k - 1) != ref_tau(w, l, k) ||
          seq.delta(k - 1) != ref_delta(w, l, k)) {
        ++bad_known;
        break;
      }
    }
    const Index bound = ref_dimension_bound(w, l, d, n);
    bad_bound += dimension_bound_known(w, l, d, n) != bound;
    bad_nl += diagnostic_Nl(w, l, d, n) != ref_lower_scan(w, l, d, n, bound);

    const Sample s = random_sample(gen, n);
    bad_emp += empirical_dimension_bound(s, w).bound != ref_empirical_bound(s, w);

    const Index big_n = 1 + static_cast<Index>(gen() % 100000);
    const Index kk = 1 + static_cast<Index>(gen() % 200);
    const auto o = oracle_kstar(w, g, l, big_n, kk);
    const auto r = ref_oracle(w, g, l, big_n, kk);
    bad_oracle += (o.k_star != r.k || o.rate != r.r);
  }
  std::ostringstream d;
  d << N << " random instances each; mismatches: known_sequences " << bad_known << ", dimension_bound_known "
    << bad_bound << ", empirical_dimension_bound " << bad_emp << ", oracle_kstar " << bad_oracle
    << ", diagnostic_Nl " << bad_nl;
  report("AC5", bad_known + bad_bound + bad_emp + bad_oracle + bad_nl == 0, d.str());
}

void simulator_fidelity()
{
  const auto op = make_operator(OperatorDecay::polynomial, 1.0, 10);
  const Index n = 100000;
  // Upper 0.1% point of chi-square with 19 degrees of freedom.
  const double crit = 43.820;
  const auto zw = sample_joint(op, n, 20261019);
  auto chi2 = [&](int col) {
    std::vector<double> c(20, 0.0);
    for (Index i = 0; i < n; ++i) {
      c[static_cast<std::size_t>(std::min(19, static_cast<int>(zw(i, col) * 20)))] += 1.0;
    }
    double st = 0.0;
    for (double v : c) {
      st += (v - n / 20.0) * (v - n / 20.0) / (n / 20.0);
    }
    return st;
  };
  const double cz = chi2(0), cw = chi2(1);

  const auto phi = make_structural(2.0, 1.0, 20);
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Sample s = generate_sample(phi, op, 0.1, n, derive_key({20261019, seed}));
    const Matrix<double> t = empirical_operator_matrix(s, 10);
    bool ok = true;
    for (Index l = 1; l <= 10; ++l) {
      for (Index j = 1; j <= 10; ++j) {
        ok = ok && std::abs(t(l - 1, j - 1) - (l == j ? op.coefficient(j) : 0.0)) <= 4.0 / std::sqrt(double(n));
      }
    }
    passed += ok;
  }

  const int M = 512;
  double mass = 0.0;
  for (int i = 0; i < M; ++i) {
    for (int k = 0; k < M; ++k) {
      mass += joint_density(op, (i + 0.5) / M, (k + 0.5) / M);
    }
  }
  mass /= double(M) * M;

  const bool ok = cz < crit && cw < crit && passed >= 19 && std::abs(mass - 1.0) <= 1e-6;
  report("AC6", ok,
         "chi-square(19) z=" + fmt(cz) + " w=" + fmt(cw) + " (< " + fmt(crit) + "); diagonal T within 4/sqrt(n) on " +
             std::to_string(passed) + "/20 seeds; |mass-1|=" + fmt(std::abs(mass - 1.0)));
}

void invariant_suite()
{
  std::mt19937_64 gen(77);
  int nesting = 0, scale = 0, minimum = 0, parseval = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const auto w = random_omega(gen);
    const Sample s = random_sample(gen, 50 + static_cast<Index>(gen() % 500));
    const auto big = diagonal_estimate(s, 10);
    if (!big.thresholded) {
      for (Index k = 1; k <= 10; ++k) {
        const auto small = diagonal_estimate(s, k);
        nesting += (small.coeffs.array() != big.coeffs.head(k).array()).any();
      }
    }
    const double pen = std::uniform_real_distribution<double>(0.05, 50.0)(gen);
    const auto trace = penalized_select(s, w, pen);
    minimum += trace.criterion(trace.k_hat - 1) != trace.criterion.minCoeff();
    for (Index k = 1; k < trace.k_hat; ++k) {
      minimum += !(trace.criterion(k - 1) > trace.criterion(trace.k_hat - 1));
    }
    for (double c : {-2.0, 0.01, 7.0}) {
      scale += penalized_select(s.scaled(c), w, pen).k_hat != trace.k_hat;
    }
  }
  std::normal_distribution<double> nrm;
  for (int rep = 0; rep < 20; ++rep) {
    Vector<double> truth(16), est(6);
    for (Index j = 0; j < 16; ++j) {
      truth(j) = nrm(gen) / (j + 1);
    }
    for (Index j = 0; j < 6; ++j) {
      est(j) = truth(j) + 0.1 * nrm(gen);
    }
    double l2 = 0.0;
    for (int i = 0; i < 256; ++i) {
      const double x = (i + 0.5) / 256;
      const double diff = evaluate_series(est, x) - evaluate_series(truth, x);
      l2 += diff * diff / 256;
    }
    parseval += std::abs(risk_weighted(est, truth, WeightSequence::constant(), 16) - l2) > 1e-6 * l2;
  }
  double ortho = 0.0;
  for (Index l = 1; l <= 25; ++l) {
    for (Index j = 1; j <= 25; ++j) {
      double acc = 0.0;
      for (int i = 0; i < 256; ++i) {
        acc += trig_basis(l, (i + 0.5) / 256) * trig_basis(j, (i + 0.5) / 256) / 256;
      }
      ortho = std::max(ortho, std::abs(acc - (l == j ? 1.0 : 0.0)));
    }
  }
  const bool ok = nesting == 0 && scale == 0 && minimum == 0 && parseval == 0 && ortho <= 1e-8;
  report("AC7", ok,
         "violations: nesting " + std::to_string(nesting) + ", scale invariance " + std::to_string(scale) +
             ", trace minimum " + std::to_string(minimum) + ", Parseval " + std::to_string(parseval) +
             "; orthonormality error " + fmt(ortho));
}

void determinism()
{
  const auto dir = std::filesystem::temp_directory_path() / "npiv_acceptance_ac8";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string cfg = kData + "/fs_rate.json";
  auto run = [&](const std::string& jobs) {
    const std::string cmd = kCli + " rate-study " + cfg + " --jobs " + jobs + " --out " + (dir / ("j" + jobs)).string() +
                            " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  const bool ran = run("1") && run("8");
  const bool same_json = read_file((dir / "j1.json").string()) == read_file((dir / "j8.json").string());
  const bool same_csv = read_file((dir / "j1.csv").string()) == read_file((dir / "j8.csv").string());
  const bool nonempty = !read_file((dir / "j1.csv").string()).empty();
  std::filesystem::remove_all(dir);
  report("AC8", ran && same_json && same_csv && nonempty,
         std::string("rate-study --jobs 1 vs --jobs 8: JSON ") + (same_json ? "identical" : "differs") + ", CSV " +
             (same_csv ? "identical" : "differs"));
}

void guarded(const char* id, const std::function<void()>& f)
{
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

} // namespace

int main()
{
  guarded("AC1/AC4", rate_fs);
  guarded("AC2", rate_is);
  guarded("AC3", rate_derivative);
  guarded("AC5", sequence_oracles);
  guarded("AC6", simulator_fidelity);
  guarded("AC7", invariant_suite);
  guarded("AC8", determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
