// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "dispersim/dispersim.hpp"

using namespace dispersim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const double kHomSigmaC[] = {0.05, 0.1, 0.5};
const double kHomEps[] = {0.0, 1.0, 10.0};
const double kCpiChirp[] = {10.0, 100.0};
const double kCpiEps[] = {0.0, 1.0, 3.0};

struct HomRun {
  double sigma_c, eps, tau_hom;
  Interferogram num, closed;
};

struct CpiRun {
  double chirp, eps;
  CpiWidthReport width;
  CpiNumericScan num;
  Interferogram closed;
};

std::vector<HomRun> hom_runs;
double hom_seconds = 0.0;
std::vector<CpiRun> cpi_runs;
CrossTermWeight kappa;

// ---------------------------------------------------------------------------

Outcome hom_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double sc : kHomSigmaC)
    for (double e : kHomEps) {
      const auto spec = BiphotonSpec::correlated(1.0, 1.0, sc);
      const SampleSpec sample{e};
      const double w = hom_width(spec, sample).tau_hom;
      const auto grid = DelayGrid::symmetric(5.0 * w, 101);
      HomRun r{sc, e, w, hom_numeric(spec, sample, grid, QuadratureConfig{}),
               hom_closed_form_scan(spec, sample, grid)};
      for (std::size_t i = 0; i < r.num.size(); ++i)
        worst = std::max(worst, std::abs(r.num.values[i] - r.closed.values[i]));
      hom_runs.push_back(std::move(r));
    }
  hom_seconds = seconds_since(t0);
  return {worst < 1e-6 && hom_seconds < 60.0,
          "9 configurations, max |closed - oracle| = " + fmt("%.2e", worst) +
              " (limit 1e-6), runtime " + fmt("%.1f", hom_seconds) + " s (limit 60 s)"};
}

Outcome hom_width_law() {
  double worst = 0.0;
  for (const auto& r : hom_runs) {
    const double w = fit_gaussian_dip(r.num).width;
    worst = std::max(worst, std::abs(w / r.tau_hom - 1.0));
  }
  const auto perfect = BiphotonSpec::correlated(1.0, 1.0, 0.0);
  const auto ig = hom_numeric(perfect, SampleSpec{10.0}, DelayGrid::symmetric(5.0, 101),
                              QuadratureConfig{});
  const double wp = fit_gaussian_dip(ig).width;
  const bool ok = worst < 1e-3 && std::abs(wp - 1.0) < 1e-6;
  return {ok, "max relative fit error " + fmt("%.2e", worst) +
                  " (limit 1e-3); perfect correlation at eps=10: width " +
                  fmt("%.12f", wp) + " (limit 1 +- 1e-6)"};
}

Outcome visibility_width_identity() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ds(0.0, 10.0), de(0.0, 100.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    double s = ds(rng);
    if (s == 0.0) s = 10.0;  // (0, 10]
    const auto w = hom_width(BiphotonSpec::correlated(1.0, 1.0, s), SampleSpec{de(rng)});
    worst = std::max(worst, std::abs(w.visibility * w.tau_hom - 1.0));
  }
  return {worst < 1e-12, "100 draws, max |V tau sigma - 1| = " + fmt("%.2e", worst) +
                             " (limit 1e-12)"};
}

Outcome cpi_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  kappa = determine_cross_term_weight(QuadratureConfig{});
  double worst = 0.0;
  for (double a : kCpiChirp)
    for (double e : kCpiEps) {
      const ChirpedPulseSpec pulse{1.0, 1.0, a, 1.0};
      const SampleSpec sample{e};
      CpiRun r{a, e, cpi_width(pulse, sample), {}, {}};
      const auto grid = DelayGrid::symmetric(5.0 * r.width.tau_cpi, 101);
      r.num = cpi_numeric_scan(pulse, sample, grid, QuadratureConfig{});
      r.closed = cpi_closed_form_scan(pulse, sample, grid, kappa.adopted);
      const auto& o = r.num.signal.values;
      double co = 0.0, oo = 0.0, peak = 0.0;
      for (std::size_t i = 0; i < o.size(); ++i) {
        co += r.closed.values[i] * o[i];
        oo += o[i] * o[i];
        peak = std::max(peak, cpi_closed_form_envelope(pulse, sample, grid.points()[i]));
      }
      for (std::size_t i = 0; i < o.size(); ++i)
        worst = std::max(worst, std::abs(r.closed.values[i] - co / oo * o[i]) / peak);
      cpi_runs.push_back(std::move(r));
    }
  const bool ok = worst < 1e-4 && kappa.dip_minimum < 1e-6;
  return {ok, "cross-term weight measured " + fmt("%.12f", kappa.measured) +
                  " (adopted " + fmt("%.0f", kappa.adopted) + "), dip minimum " +
                  fmt("%.2e", kappa.dip_minimum) + " (limit 1e-6); 6 configurations, " +
                  "max scaled residual " + fmt("%.2e", worst) +
                  " of envelope peak (limit 1e-4), runtime " +
                  fmt("%.1f", seconds_since(t0)) + " s"};
}

Outcome cpi_width_law() {
  double worst = 0.0;
  for (const auto& r : cpi_runs) {
    const auto fit = fit_modulated_dip(r.num.signal.delays, r.num.cross);
    worst = std::max(worst, std::abs(fit.width / r.width.tau_cpi - 1.0));
  }
  ChirpedPulseSpec inf{1.0, 1.0, 0.0, 1.0, true};
  const double w_inf = cpi_width(inf, SampleSpec{3.0}).tau_cpi;
  return {worst < 5e-3 && w_inf == 1.0,
          "max relative fit error " + fmt("%.2e", worst) +
              " (limit 5e-3); infinite-chirp width " + fmt("%.17g", w_inf) +
              " (must equal 1)"};
}

Outcome reduction_magnitudes() {
  const auto cpi = effective_dispersion(ChirpedPulseSpec{1.0, 1.0, 500.0, 1.0},
                                        SampleSpec{1.0});
  const auto hom = effective_dispersion(BiphotonSpec::correlated(1.0, 1.0, 1e-6),
                                        SampleSpec{1.0});
  const bool ok = cpi.ratio > 1e-3 && cpi.ratio < 1e-2 &&
                  std::abs(cpi.ratio - 2.45e-3) < 0.01e-3 && hom.ratio < 1e-6;
  return {ok, "chirped ratio at A sigma^2 = 500: " + fmt("%.4e", cpi.ratio) +
                  " (within (1e-3, 1e-2), ~2.45e-3); entangled ratio at sigma_c = "
                  "1e-6 sigma: " +
                  fmt("%.3e", hom.ratio) + " (limit 1e-6)"};
}

Outcome odd_order_non_cancellation() {
  FitOptions loose;
  // Fitting with a Gaussian is a width measurement here, not a shape test.
  loose.max_rel_residual = std::numeric_limits<double>::infinity();
  std::ostringstream os;
  bool ok = true;
  const auto hom_spec = BiphotonSpec::correlated(1.0, 1.0, 0.01);
  const ChirpedPulseSpec pulse{1.0, 1.0, 100.0, 1.0};
  auto hom_fit = [&](const SampleSpec& s, const FitOptions& o) {
    const double half = 5.0 * hom_width(hom_spec, SampleSpec{s.epsilon}).tau_hom +
                        16.0 * std::abs(s.cubic);
    return fit_gaussian_dip(
               hom_numeric(hom_spec, s, DelayGrid::symmetric(half, 161), QuadratureConfig{}),
               o)
        .width;
  };
  auto cpi_fit = [&](const SampleSpec& s, const FitOptions& o) {
    const double half = 5.0 * cpi_width(pulse, SampleSpec{s.epsilon}).tau_cpi +
                        16.0 * std::abs(s.cubic);
    const auto scan =
        cpi_numeric_scan(pulse, s, DelayGrid::symmetric(half, 101), QuadratureConfig{});
    return fit_modulated_dip(scan.signal.delays, scan.cross, true, o).width;
  };
  for (double e : {0.0, 1.0}) {
    const double wh = hom_fit(SampleSpec{e, 0.5}, loose);
    const double wc = cpi_fit(SampleSpec{e, 0.5}, loose);
    ok = ok && wh > 1.05 && wc > 1.05;
    os << "cubic 0.5, eps " << e << ": widths " << fmt("%.6f", wh) << " (HOM), "
       << fmt("%.6f", wc) << " (CPI); ";
  }
  const double qh = hom_fit(SampleSpec{1.0, 0.0}, FitOptions{});
  const double qc = cpi_fit(SampleSpec{1.0, 0.0}, FitOptions{});
  ok = ok && qh < 1.01 && qc < 1.01;
  os << "cubic 0, eps 1: " << fmt("%.6f", qh) << " (HOM), " << fmt("%.6f", qc)
     << " (CPI); limits > 1.05 and < 1.01";
  return {ok, os.str()};
}

Outcome symmetry_and_scaling() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double parity = 0.0, chirp = 0.0, hom_scale = 0.0, cpi_scale = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double s = 0.01 + 10.0 * u(rng), e = 100.0 * u(rng) - 50.0;
    const double a = 400.0 * u(rng) - 200.0, ec = 10.0 * u(rng) - 5.0;
    const double t = 20.0 * (u(rng) - 0.5), lam = std::exp(4.0 * (u(rng) - 0.5));
    const auto spec = BiphotonSpec::correlated(1.0, 1.0, s);
    const ChirpedPulseSpec p{1.0, 1.0, a, 1.0}, m{1.0, 1.0, -a, 1.0};
    const double ch = hom_closed_form(spec, SampleSpec{e}, t);
    const double cc = cpi_closed_form(p, SampleSpec{ec}, t);
    parity = std::max({parity, std::abs(ch - hom_closed_form(spec, SampleSpec{e}, -t)),
                       std::abs(cc - cpi_closed_form(p, SampleSpec{ec}, -t))});
    chirp = std::max(chirp, std::abs(cc - cpi_closed_form(m, SampleSpec{ec}, t)));
    const auto spec_l = BiphotonSpec::correlated(1.0, lam, lam * s);
    hom_scale = std::max(hom_scale, std::abs(ch - hom_closed_form(
                                                      spec_l, SampleSpec{e / (lam * lam)},
                                                      t / lam)));
    const ChirpedPulseSpec p_l{1.0, lam, a / (lam * lam), 1.0};
    cpi_scale = std::max(cpi_scale, std::abs(cc - cpi_closed_form(
                                                      p_l, SampleSpec{ec / (lam * lam)},
                                                      t / lam)));
  }
  // The oracles: parity on symmetric grids and the chirp sign.
  double oracle = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double s = 0.05 + u(rng), e = 20.0 * u(rng);
    const auto ig = hom_numeric(BiphotonSpec::correlated(1.0, 1.0, s), SampleSpec{e},
                                DelayGrid::symmetric(4.0, 9), QuadratureConfig{});
    for (std::size_t k = 0; k < ig.size(); ++k)
      oracle = std::max(oracle, std::abs(ig.values[k] - ig.values[ig.size() - 1 - k]));
  }
  {
    const double a = 5.0 + 20.0 * u(rng), e = 2.0 * u(rng);
    const auto grid = DelayGrid::symmetric(3.0, 5);
    const auto p = cpi_numeric(ChirpedPulseSpec{1.0, 1.0, a, 1.0}, SampleSpec{e}, grid,
                               QuadratureConfig{});
    const auto m = cpi_numeric(ChirpedPulseSpec{1.0, 1.0, -a, 1.0}, SampleSpec{e}, grid,
                               QuadratureConfig{});
    for (std::size_t k = 0; k < p.size(); ++k)
      oracle = std::max({oracle, std::abs(p.values[k] - p.values[p.size() - 1 - k]),
                         std::abs(p.values[k] - m.values[k])});
  }
  const double worst = std::max({parity, chirp, hom_scale, cpi_scale, oracle});
  return {worst < 1e-12, "200 draws: parity " + fmt("%.1e", parity) + ", chirp sign " +
                             fmt("%.1e", chirp) + ", scaling " + fmt("%.1e", hom_scale) +
                             " (HOM) / " + fmt("%.1e", cpi_scale) +
                             " (CPI); oracle parity and chirp sign " +
                             fmt("%.1e", oracle) + " (limit 1e-12)"};
}

Outcome design_round_trips() {
  double worst = 0.0;
  int n = 0;
  for (double sigma : {0.25, 1.0, 3.0})
    for (double en : {2.0, 10.0, -40.0, 300.0})
      for (double r : {1.000001, 1.0001, 1.01, 1.2}) {
        const double eps = en / (sigma * sigma);
        const auto pump = required_pump_bandwidth(sigma, eps, r);
        if (!pump.no_constraint_needed) {
          const auto w = hom_width(BiphotonSpec::correlated(1.0, sigma, pump.sigma_c),
                                   SampleSpec{eps});
          worst = std::max(worst, std::abs(w.tau_hom * sigma / r - 1.0));
          ++n;
        }
        const auto ch = required_chirp(sigma, eps, r);
        if (!ch.met_unchirped) {
          const auto w = cpi_width(ChirpedPulseSpec{1.0, sigma, ch.chirp_a, 1.0},
                                   SampleSpec{eps});
          worst = std::max(worst, std::abs(w.tau_cpi_large_chirp * sigma / r - 1.0));
          ++n;
        }
      }
  return {worst < 1e-9 && n > 0, std::to_string(n) + " round trips, max relative error " +
                                     fmt("%.2e", worst) + " (limit 1e-9)"};
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome cli_end_to_end() {
  const std::string bin = std::string("\"") + DISPERSIM_CLI_BINARY + "\"";
  const auto t0 = std::chrono::steady_clock::now();
  int failures = 0, runs = 0;
  for (double sc : kHomSigmaC)
    for (double e : kHomEps) {
      ++runs;
      failures += shell(bin + " verify --mode hom --sigma 1 --sigma-c " + fmt("%g", sc) +
                        " --epsilon " + fmt("%g", e) + " >/dev/null") != 0;
    }
  for (double a : kCpiChirp)
    for (double e : kCpiEps) {
      ++runs;
      failures += shell(bin + " verify --mode cpi --sigma 1 --chirp " + fmt("%g", a) +
                        " --epsilon " + fmt("%g", e) + " >/dev/null") != 0;
    }

  const fs::path dir = fs::temp_directory_path() /
                       ("dispersim_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::vector<std::string> scans = {
      "scan --mode hom --sigma-c 0.1 --epsilon 10 --numeric --points 101",
      "scan --mode cpi --chirp 10 --epsilon 1 --points 101",
      "scan --mode hom --sigma-c 0.05 --epsilon 1 --cubic 0.2 --numeric --points 51"};
  int identical = 0;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const fs::path a = dir / ("a" + std::to_string(i) + ".csv");
    const fs::path b = dir / ("b" + std::to_string(i) + ".csv");
    const bool ran = shell(bin + " " + scans[i] + " --out \"" + a.string() + "\"") == 0 &&
                     shell(bin + " " + scans[i] + " --out \"" + b.string() + "\"") == 0;
    const std::string sa = slurp(a);
    identical += ran && !sa.empty() && sa == slurp(b);
  }
  fs::remove_all(dir);
  const bool ok = failures == 0 && identical == static_cast<int>(scans.size());
  return {ok, std::to_string(runs - failures) + "/" + std::to_string(runs) +
                  " verify runs exit 0; " + std::to_string(identical) + "/" +
                  std::to_string(scans.size()) + " CSV scans byte-identical across runs (" +
                  fmt("%.1f", seconds_since(t0)) + " s)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"HOM oracle equivalence", hom_oracle_equivalence},
      {"HOM width law", hom_width_law},
      {"visibility-width identity", visibility_width_identity},
      {"CPI oracle equivalence", cpi_oracle_equivalence},
      {"CPI width law", cpi_width_law},
      {"reduction magnitudes", reduction_magnitudes},
      {"odd-order non-cancellation", odd_order_non_cancellation},
      {"symmetry and scaling", symmetry_and_scaling},
      {"design round trips", design_round_trips},
      {"CLI end-to-end", cli_end_to_end},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
