#include "commands.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "immunokinetics/equilibria.hpp"
#include "immunokinetics/errors.hpp"
#include "immunokinetics/operator_check.hpp"
#include "immunokinetics/pipelines.hpp"
#include "immunokinetics/scenario.hpp"

namespace immunokinetics::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

unsigned thread_cap() {
  const char* env = std::getenv("IMMUNOKINETICS_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigError("IMMUNOKINETICS_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

const char* kHeader = "t,S,I,R,N,Lambda,B\n";

void write_pde(const Trajectory& traj, const fs::path& dir) {
  std::string ts = kHeader;
  std::string dens = "t,z,r\n";
  for (const auto& s : traj.samples) {
    const double R = s.state.R(traj.grid);
    ts += num(s.t) + "," + num(s.state.S) + "," + num(s.state.I) + "," + num(R) + "," +
          num(s.state.S + s.state.I + R) + "," + num(s.Lambda) + "," + num(s.B) + "\n";
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
      dens += num(s.t) + "," + num(traj.grid.center(i)) + "," + num(s.state.r[i]) + "\n";
    }
  }
  write_atomic(dir / "timeseries.csv", ts);
  write_atomic(dir / "density.csv", dens);
}

// rows of (t, S, I, R, N)
void write_compartments(const std::vector<std::array<double, 5>>& rows, const fs::path& dir) {
  std::string ts = kHeader;
  for (const auto& r : rows) {
    ts += num(r[0]) + "," + num(r[1]) + "," + num(r[2]) + "," + num(r[3]) + "," + num(r[4]) +
          ",,\n";
  }
  write_atomic(dir / "timeseries.csv", ts);
}

template <class Row>
std::vector<std::array<double, 5>> strided(const TimeSeries& ts, std::size_t stride, Row row) {
  std::vector<std::array<double, 5>> out;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (k % stride == 0 || k + 1 == ts.size()) out.push_back(row(ts.t[k], ts.y[k]));
  }
  return out;
}

}  // namespace

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const SimulationError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kRuntime;
  }
}

int cmd_simulate(const SimulateOptions& opt) {
  Scenario s = load_scenario(opt.config);
  if (opt.t_end) {
    if (!(*opt.t_end > 0.0)) throw ConfigError("--t-end must be > 0");
    s.t_end = *opt.t_end;
  }
  if (opt.dt) {
    if (!(*opt.dt > 0.0)) throw ConfigError("--dt must be > 0");
    s.dt = *opt.dt;
  }
  const bool pde = opt.model == "m1" || opt.model == "m2";
  if (opt.grid_cells) {
    if (*opt.grid_cells == 0) throw ConfigError("--grid-cells must be >= 1");
    if (pde) {
      s.grid_cells = *opt.grid_cells;
    } else {
      std::cerr << "warning: model " << opt.model << " ignores --grid-cells\n";
    }
  }

  if (pde) {
    const ModelTag tag = opt.model == "m1" ? ModelTag::M1 : ModelTag::M2;
    const Trajectory traj = simulate(make_pde_config(s, tag));
    write_pde(traj, prepare_dir(opt.out));
    return kOk;
  }
  TimeSeries ts;
  std::vector<std::array<double, 5>> rows;
  if (opt.model == "mol") {
    ts = run_mol(s, s.dt);
    rows = strided(ts, s.output_stride, [](double t, const std::vector<double>& y) {
      const double R = y[2] + y[3] + y[4];
      return std::array<double, 5>{t, y[0], y[1], R, y[0] + y[1] + R};
    });
  } else if (opt.model == "sirs-dde") {
    ts = run_sirs_dde(s, s.dt);
    rows = strided(ts, s.output_stride, [](double t, const std::vector<double>& y) {
      return std::array<double, 5>{t, y[0], y[1], y[2], y[0] + y[1] + y[2]};
    });
  } else if (opt.model == "sis-dde") {
    ts = run_sis_dde(s, s.dt);
    rows = strided(ts, s.output_stride, [](double t, const std::vector<double>& y) {
      return std::array<double, 5>{t, y[0], y[1], 1.0 - y[0] - y[1], 1.0};
    });
  } else {
    throw ConfigError("--model must be one of m1, m2, mol, sirs-dde, sis-dde");
  }
  write_compartments(rows, prepare_dir(opt.out));
  return kOk;
}

int cmd_compare(const std::string& config, const std::string& pair, const std::string& out) {
  const Scenario s = load_scenario(config);
  const unsigned threads = thread_cap();
  ComparisonResult res;
  if (pair == "m1-vs-sirs-dde") {
    res = compare_m1_vs_sirs_dde(s, threads);
  } else if (pair == "m2-vs-oracle") {
    res = compare_m2_vs_oracle(s, threads);
  } else if (pair == "m2-vs-sis-dde") {
    res = compare_m2_vs_sis_dde(s, threads);
  } else if (pair == "mol-theta0-vs-m2") {
    res = compare_mol_theta0_vs_m2(s);
  } else {
    throw ConfigError(
        "--pair must be one of m1-vs-sirs-dde, m2-vs-oracle, m2-vs-sis-dde, mol-theta0-vs-m2");
  }
  const fs::path dir = prepare_dir(out);
  std::string csv;
  for (std::size_t j = 0; j < res.columns.size(); ++j) {
    csv += (j ? "," : "") + res.columns[j];
  }
  csv += "\n";
  for (const auto& row : res.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) csv += (j ? "," : "") + num(row[j]);
    csv += "\n";
  }
  write_atomic(dir / "comparison.csv", csv);

  std::ostringstream rep;
  rep << "pair=" << pair << "\n"
      << "metric=" << res.metric << "\n"
      << "value=" << num(res.discrepancy) << "\n"
      << "tolerance=" << num(res.tolerance) << "\n"
      << "status=" << (res.passed ? "pass" : "fail") << "\n"
      << "witness_t=" << num(res.witness_t) << "\n"
      << "witness_value=" << num(res.witness_value) << "\n";
  for (const auto& n : res.notes) rep << "note=" << n << "\n";
  write_atomic(dir / "report.txt", rep.str());
  std::cout << rep.str();
  if (!res.passed) {
    std::cerr << "identity violated: worst at t=" << num(res.witness_t)
              << " value=" << num(res.witness_value) << "\n";
    return kIdentity;
  }
  return kOk;
}

int cmd_equilibria(const std::string& config) {
  const Scenario s = load_scenario(config);
  const EquilibriumReport r = equilibrium_report(s.params, s.birth);
  std::printf("%-16s %.10g\n", "N*", r.N_star);
  std::printf("%-16s %.10g\n", "S*", r.S_star);
  std::printf("%-16s %.10g\n", "R0", r.R0);
  std::printf("%-16s %.10g\n", "R0~", r.R0_tilde);
  std::printf("%-16s %s\n", "classification", to_string(r.classification).c_str());
  std::printf("%-16s %.10g\n\n", "growth rate", r.growth_rate);
  std::printf("N_star=%.17g\nS_star=%.17g\nR0=%.17g\nR0_tilde=%.17g\n", r.N_star, r.S_star, r.R0,
              r.R0_tilde);
  std::printf("classification=%s\ngrowth_rate=%.10g\n", to_string(r.classification).c_str(),
              r.growth_rate);
  return kOk;
}

int cmd_check_operator(const std::string& config, std::optional<unsigned long long> seed) {
  const Scenario s = load_scenario(config);
  const auto grid = ImmunityGrid::uniform(s.params.z_min, s.params.z_max, s.grid_cells);
  const AbstractOperator op(s.params, s.birth, s.kernel, grid);
  std::mt19937_64 rng(seed.value_or(s.seed));
  const std::vector<double> hs = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  bool ok = true;
  for (int k = 0; k < 5; ++k) {
    const AbstractPoint x = random_point(grid, rng, true);
    const AbstractPoint w = random_point(grid, rng, false);
    const double slope = op.fd_slope(x, w, hs);
    const bool pass = slope >= 0.9 && slope <= 1.1;
    ok = ok && pass;
    std::printf("pair=%d slope=%.6f %s\n", k, slope, pass ? "ok" : "FAIL");
  }
  std::printf("status=%s\n", ok ? "pass" : "fail");
  return ok ? kOk : kIdentity;
}

}  // namespace immunokinetics::cli
