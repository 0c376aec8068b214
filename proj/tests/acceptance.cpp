// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "demkov/core.hpp"
#include "demkov/oracle.hpp"
#include "demkov/resonant.hpp"
#include "demkov/specialfn.hpp"
#include "test_support.hpp"

using namespace demkov;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] %d %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

template <class Fn>
void criterion(int id, const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = fn();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, name, pass, detail, s);
}

const std::vector<double> gammas{0.0, 0.05, 0.1, 0.5};
const std::vector<double> deltas{0.5, 1.5, 3.0};
const std::vector<double> omegas{0.1, 1.0, 5.0, 25.0};

std::vector<ModelParams> main_grid() {
  std::vector<ModelParams> g;
  for (double ga : gammas)
    for (double d : deltas)
      for (double o : omegas) g.push_back(ModelParams::from_reduced(ga, d, o));
  return g;
}

oracle::IntegratorConfig oracle_config() {
  oracle::IntegratorConfig c;
  c.rel_tol = 1e-10;
  return c;
}

std::vector<std::vector<double>> read_csv_numbers(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    std::vector<double> r;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) r.push_back(std::strtod(c.c_str(), nullptr));
    rows.push_back(r);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string describe(const ModelParams& p) {
  const ReducedParams r = reduce(p);
  return fmt("(gamma %g, delta %g, omega %g)", r.gamma, r.delta, r.omega);
}

// z-derivatives through the shift rule.
support::cplx dnf(const specialfn::GhfParams& p, support::cplx z, int n) {
  return n == 0 ? specialfn::ghf_1f2(p, z).value : specialfn::ghf_1f2_derivative(p, z, n).value;
}

}  // namespace

int main() {
  const std::vector<double> times = uniform_grid(-10.0, 10.0, 201);
  const fs::path scratch = fs::temp_directory_path() / "demkov_acceptance";
  fs::create_directories(scratch);

  criterion(1, "oracle equivalence on the 48-point grid", [&] {
    double worst = 0.0;
    std::string at;
    for (const ModelParams& p : main_grid()) {
      const Solution s(p);
      const auto tr = oracle::integrate_bloch(p, oracle_config(), times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double d = std::abs(s.w(times[i]) - tr.states[i].w);
        if (d > worst) worst = d, at = describe(p);
      }
    }
    return std::pair{worst <= 1e-6, fmt("worst sup|w - w_oracle| = %.3g, bound 1e-6", worst) + " at " + at};
  });

  criterion(2, "final inversion on the 48-point grid", [&] {
    double worst = 0.0;
    std::string at;
    for (const ModelParams& p : main_grid()) {
      const double d = std::abs(w_infinity(p) - oracle::oracle_w_infinity(p, oracle_config()));
      if (d > worst) worst = d, at = describe(p);
    }
    return std::pair{worst <= 1e-6, fmt("worst |w(+inf) - oracle| = %.3g, bound 1e-6", worst) + " at " + at};
  });

  criterion(3, "resonant suite and continuity in delta", [&] {
    double worst = 0.0, worst_cont = 0.0;
    for (double g : {0.0, 0.1, 0.5}) {
      for (double o : omegas) {
        const ModelParams p = ModelParams::from_reduced(g, 0.0, o);
        const resonant::ResonantSolution s(p);
        const auto tr = oracle::integrate_bloch(p, oracle_config(), times);
        const Solution near(ModelParams::from_reduced(g, 1e-4, o));
        for (std::size_t i = 0; i < times.size(); ++i) {
          worst = std::max(worst, std::abs(s.w(times[i]) - tr.states[i].w));
          worst_cont = std::max(worst_cont, std::abs(near.w(times[i]) - s.w(times[i])));
        }
      }
    }
    return std::pair{worst <= 1e-6 && worst_cont <= 1e-3,
                     fmt("worst sup|w_res - w_oracle| = %.3g (bound 1e-6); worst |w(delta=1e-4) - w_res| = %.3g "
                         "(bound 1e-3)",
                         worst, worst_cont)};
  });

  criterion(4, "figure reproduction through the CLI", [&] {
    const fs::path out = scratch / "fig1.csv";
    const std::string cmd = std::string(DEMKOV_CLI_PATH) +
                            " evolve --gamma 0.1 --delta 1.5 --omega 25 --t-min -5 --t-max 5 --n 1001 -o " +
                            out.string();
    if (std::system(cmd.c_str()) != 0) return std::pair{false, std::string("evolve exited nonzero")};
    const auto rows = read_csv_numbers(out);
    std::vector<double> t;
    for (const auto& r : rows) t.push_back(r[0]);
    const auto tr = oracle::integrate_bloch(ModelParams::from_reduced(0.1, 1.5, 25.0), oracle_config(), t);
    double du = 0.0, dv = 0.0, dw = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      du = std::max(du, std::abs(rows[i][1] - tr.states[i].u));
      dv = std::max(dv, std::abs(rows[i][2] - tr.states[i].v));
      dw = std::max(dw, std::abs(rows[i][3] - tr.states[i].w));
      peak = std::max({peak, std::abs(rows[i][1]), std::abs(rows[i][2]), std::abs(rows[i][3])});
    }
    const bool pass = rows.size() == 1001 && std::max({du, dv, dw}) <= 1e-5 && peak <= 1.0 + 1e-8;
    return std::pair{pass, fmt("sup|du|, sup|dv|, sup|dw| = %.3g, %.3g, %.3g (bound 1e-5)", du, dv, dw) +
                               fmt("; max |component| = %.12f (bound 1 + 1e-8)", peak)};
  });

  criterion(5, "special-function identities", [&] {
    using namespace specialfn;
    using support::cplx;
    support::Draw d(2024);
    auto params = [&] {
      return GhfParams{d.complex(-1.5, 2.5, -2.0, 2.0), d.complex(0.2, 3.0, -2.0, 2.0),
                       d.complex(0.2, 3.0, -2.0, 2.0)};
    };
    bool f0_exact = true;
    for (int i = 0; i < 100; ++i) f0_exact = f0_exact && ghf_1f2(params(), 0.0).value == cplx(1.0);

    double deriv = 0.0;
    for (int i = 0; i < 100; ++i) {
      const GhfParams p = params();
      const cplx z = d.off_cut(0.0, 10.0, 0.0);
      const double h = 1e-3;
      const cplx fd = (ghf_1f2(p, z - 2.0 * h).value - 8.0 * ghf_1f2(p, z - h).value +
                       8.0 * ghf_1f2(p, z + h).value - ghf_1f2(p, z + 2.0 * h).value) / (12.0 * h);
      const cplx an = ghf_1f2_derivative(p, z, 1).value;
      deriv = std::max(deriv, std::abs(an - fd) / std::max(std::abs(an), 1e-3 * std::abs(dnf(p, z, 0))));
    }

    double bessel = 0.0;
    for (int i = 0; i < 200; ++i) {
      double b = d.uniform(0.0, 3.0);
      if (near_integer(b, 1e-6)) b += 1e-3;
      const double z = -d.uniform(0.01, 100.0);
      const double s = std::sqrt(-z), pre = std::tgamma(b) * std::pow(s, 1.0 - b);
      const double j = bessel_j(b - 1.0, 2.0 * s), y = bessel_y(b - 1.0, 2.0 * s);
      const double a = d.uniform(-2.0, 2.0);
      bessel = std::max(bessel, std::abs(ghf_1f2({a, a, b}, z).value - pre * j) / (std::abs(pre) * std::hypot(j, y)));
    }

    double ode = 0.0;
    for (int i = 0; i < 100; ++i) {
      const GhfParams p = params();
      const cplx z = d.complex(-60.0, 20.0, -20.0, 20.0);
      const cplx t3 = z * z * z * dnf(p, z, 3), t2 = (p.b1 + p.b2 + 1.0) * z * z * dnf(p, z, 2),
                 t1 = (p.b1 * p.b2 - z) * z * dnf(p, z, 1), t0 = -p.a1 * z * dnf(p, z, 0);
      ode = std::max(ode, std::abs(t3 + t2 + t1 + t0) / (std::abs(t3) + std::abs(t2) + std::abs(t1) + std::abs(t0)));
    }

    // Time-domain fundamental sets of the physical branch on the grid.
    double wr = 0.0;
    for (const ModelParams& p : main_grid()) {
      const FundamentalSet fs(reduce(p), {});
      for (double t : {0.0, 1.0, 4.0}) {
        const auto f = fs.evaluate_all(t);
        const cplx det = f[0].v * (f[1].d1 * f[2].d2 - f[1].d2 * f[2].d1) -
                         f[1].v * (f[0].d1 * f[2].d2 - f[0].d2 * f[2].d1) +
                         f[2].v * (f[0].d1 * f[1].d2 - f[0].d2 * f[1].d1);
        wr = std::max(wr, support::rel_err(det, fs.closed_form_wronskian(t)));
      }
    }
    const bool pass = f0_exact && deriv <= 1e-6 && bessel <= 1e-9 && ode <= 1e-8 && wr <= 1e-8;
    return std::pair{pass, std::string(f0_exact ? "F(0) = 1 exact" : "F(0) != 1") +
                               fmt("; derivative %.2g (1e-6); Bessel %.2g (1e-9)", deriv, bessel) +
                               fmt("; ODE residual %.2g (1e-8); Wronskian %.2g (1e-8)", ode, wr)};
  });

  criterion(6, "asymptotic expansion within its error estimate", [&] {
    using namespace specialfn;
    PrecisionPolicy pol;
    pol.z_switch = 100.0;
    double worst_ratio = 0.0, worst_est = 0.0;
    for (double z : {-625.0, -2500.0}) {
      for (double g : gammas) {
        for (double dl : deltas) {
          const ReducedParams rp = reduce(ModelParams::from_reduced(g, dl, 1.0));
          for (const GhfParams& p : {rp.ghf_branch1, rp.ghf_branch2}) {
            const auto s = ghf_1f2_series(p, z, {});
            const auto a = ghf_1f2_asymptotic(p, z, pol);
            worst_ratio = std::max(worst_ratio, std::abs(a.value - s.value) / (a.est_rel_error * std::abs(a.value)));
            worst_est = std::max(worst_est, a.est_rel_error * std::sqrt(-z));
          }
        }
      }
    }
    return std::pair{worst_ratio <= 1.0,
                     fmt("max actual/estimated error = %.3f (bound 1); max est_rel_error * sqrt(-z) = %.3g",
                         worst_ratio, worst_est)};
  });

  criterion(7, "norm conservation and decay", [&] {
    // Analytic trajectories on the grid; the integrator runs one decade
    // tighter than in criterion 1 so its own drift stays well inside the bound.
    oracle::IntegratorConfig cfg = oracle_config();
    cfg.rel_tol = 1e-11;
    double conserve = 0.0, rise = 0.0, o_conserve = 0.0, o_rise = 0.0;
    for (const ModelParams& p : main_grid()) {
      const Solution s(p);
      const bool lossless = p.gamma_deph == 0.0;
      double prev = 1.0;
      for (double t : times) {
        const double n2 = s.bloch(t).state.norm2();
        if (lossless) conserve = std::max(conserve, std::abs(n2 - 1.0));
        else rise = std::max(rise, n2 - prev);
        prev = n2;
      }
      double oprev = 1.0;
      oracle::integrate_bloch(p, cfg, {}, [&](double, const BlochVector& b) {
        const double n2 = b.norm2();
        if (lossless) o_conserve = std::max(o_conserve, std::abs(n2 - 1.0));
        else o_rise = std::max(o_rise, n2 - oprev);
        oprev = n2;
      });
    }
    const bool pass = std::max(conserve, o_conserve) <= 1e-9 && std::max(rise, o_rise) <= 1e-7;
    return std::pair{pass, fmt("Gamma = 0: max |norm^2 - 1| analytic %.3g, integrator %.3g (1e-9)", conserve,
                               o_conserve) +
                               fmt("; Gamma > 0: max increase analytic %.3g, integrator %.3g (1e-7)", rise, o_rise)};
  });

  criterion(8, "cusp laws", [&] {
    double cont = 0.0, jump = 0.0;
    for (const ModelParams& p : main_grid()) {
      const Solution s(p);
      const WJet left = s.jet(0.0);
      const auto f = s.fundamental()->evaluate_all(0.0);
      const auto& c = s.constants();
      const std::array<support::cplx, 3> k{c.a_plus, c.b_plus, c.c_plus};
      support::cplx v = 0, d1 = 0, d2 = 0;
      for (int i = 0; i < 3; ++i) v += k[i] * f[i].v, d1 += k[i] * f[i].d1, d2 += k[i] * f[i].d2;
      cont = std::max({cont, std::abs(v.real() - left.w), std::abs(d1.real() - left.d1)});
      const double want = -2.0 / p.t_width * left.d1;
      jump = std::max(jump, std::abs((d2.real() - left.d2) - want) / std::abs(want));
    }
    return std::pair{cont <= 1e-8 && jump <= 1e-7,
                     fmt("max |w(0+) - w(0-)|, |w'(0+) - w'(0-)| = %.3g (1e-8); max relative jump error %.3g (1e-7)",
                         cont, jump)};
  });

  criterion(9, "determinism and CSV round trip", [&] {
    const std::string cmd = std::string(DEMKOV_CLI_PATH) +
                            " evolve --gamma 0.1 --delta 1.5 --omega 25 --t-min -5 --t-max 5 --n 1001 -o ";
    const fs::path a = scratch / "det_a.csv", b = scratch / "det_b.csv";
    if (std::system((cmd + a.string()).c_str()) != 0 || std::system((cmd + b.string()).c_str()) != 0)
      return std::pair{false, std::string("evolve exited nonzero")};
    const bool identical = slurp(a) == slurp(b);
    const auto rows = read_csv_numbers(a);
    const TimeSeries ts = time_series(ModelParams::from_reduced(0.1, 1.5, 25.0), -5.0, 5.0, 1001);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < ts.times.size(); ++i) {
      const auto& s = ts.states[i];
      if (rows[i] != std::vector<double>{ts.times[i], s.u, s.v, s.w}) ++mismatches;
    }
    return std::pair{identical && mismatches == 0 && rows.size() == 1001,
                     std::string(identical ? "two runs byte-identical" : "runs differ") +
                         fmt("; %g of %g rows differ from the in-process series after re-reading", double(mismatches),
                             double(ts.times.size()))};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
