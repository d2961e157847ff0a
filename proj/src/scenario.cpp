#include "immunokinetics/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "immunokinetics/config.hpp"
#include "immunokinetics/errors.hpp"
#include "immunokinetics/numerics.hpp"

namespace immunokinetics {

namespace {

class SectionReader {
 public:
  SectionReader(const TomlDocument& doc, const std::string& name) : name_(name) {
    const auto it = doc.find(name);
    if (it != doc.end()) table_ = &it->second;
  }
  ~SectionReader() = default;

  bool present() const { return table_ != nullptr; }
  bool has(const std::string& key) const { return table_ && table_->count(key); }

  double number(const std::string& key) const {
    const auto* v = get(key);
    if (!v) throw ConfigError("missing required key " + path(key));
    return as_number(*v, key);
  }
  double number_or(const std::string& key, double fallback) const {
    const auto* v = get(key);
    return v ? as_number(*v, key) : fallback;
  }
  std::string string(const std::string& key) const {
    const auto* v = get(key);
    if (!v) throw ConfigError("missing required key " + path(key));
    if (const auto* s = std::get_if<std::string>(v)) return *s;
    throw ConfigError(path(key) + " must be a string");
  }
  std::string string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }
  std::vector<double> array(const std::string& key) const {
    const auto* v = get(key);
    if (!v) throw ConfigError("missing required key " + path(key));
    if (const auto* a = std::get_if<std::vector<double>>(v)) return *a;
    throw ConfigError(path(key) + " must be a numeric array");
  }
  /// A number, or a two-element [at z_min, at z_max] array.
  Profile profile_or(const std::string& key, double fallback) const {
    const auto* v = get(key);
    if (!v) return Profile::constant(fallback);
    if (const auto* a = std::get_if<std::vector<double>>(v)) {
      if (a->size() != 2) throw ConfigError(path(key) + " array must have two entries");
      return {(*a)[0], (*a)[1]};
    }
    return Profile::constant(as_number(*v, key));
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (!table_) return;
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : *table_) {
      if (!ok.count(k)) throw ConfigError("unknown key " + path(k));
    }
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  const TomlValue* get(const std::string& key) const {
    if (!table_) return nullptr;
    const auto it = table_->find(key);
    return it == table_->end() ? nullptr : &it->second;
  }
  double as_number(const TomlValue& v, const std::string& key) const {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw ConfigError(path(key) + " must be a number");
  }

  std::string name_;
  const TomlSection* table_ = nullptr;
};

std::size_t count_value(const SectionReader& r, const std::string& key, double fallback) {
  const double v = r.number_or(key, fallback);
  if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(r.path(key) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  const TomlDocument doc = parse_toml(text);
  static const std::set<std::string> sections = {"parameters", "birth", "decay", "kernel",
                                                 "grid",       "initial", "run"};
  for (const auto& [name, table] : doc) {
    if (!sections.count(name)) throw ConfigError("unknown section [" + name + "]");
  }
  Scenario s;

  const SectionReader par(doc, "parameters");
  par.allow({"beta", "gamma", "d", "d_I", "z_min", "z_max", "boost_contact_multiplier"});
  s.params.beta = par.number("beta");
  s.params.gamma = par.number("gamma");
  s.params.d = par.number("d");
  s.params.d_I = par.number_or("d_I", 0.0);
  s.params.z_min = par.number("z_min");
  s.params.z_max = par.number("z_max");
  s.params.boost_contact_multiplier = par.number_or("boost_contact_multiplier", 1.0);
  s.params.validate();

  const SectionReader birth(doc, "birth");
  const std::string family = birth.string("family");
  if (family == "beverton_holt") {
    birth.allow({"family", "rho", "K"});
    s.birth = BirthFunction::beverton_holt(birth.number("rho"), birth.number("K"));
  } else if (family == "tabulated") {
    birth.allow({"family", "N", "b"});
    s.birth = BirthFunction::tabulated(birth.array("N"), birth.array("b"));
  } else {
    throw ConfigError("birth.family: unknown family '" + family + "'");
  }

  const SectionReader decay(doc, "decay");
  const std::string dfam = decay.string("family");
  if (dfam == "constant") {
    decay.allow({"family", "g0"});
    s.decay = DecayFunction::constant(decay.number("g0"));
  } else if (dfam == "affine") {
    decay.allow({"family", "a", "c"});
    s.decay = DecayFunction::affine(decay.number("a"), decay.number("c"));
  } else if (dfam == "power") {
    decay.allow({"family", "a", "q"});
    s.decay = DecayFunction::power(decay.number("a"), decay.number("q"));
  } else {
    throw ConfigError("decay.family: unknown family '" + dfam + "'");
  }

  const SectionReader kern(doc, "kernel");
  kern.allow({"c_max", "c0", "p0", "rate", "theta"});
  const std::string p0 = kern.string_or("p0", "uniform");
  BoostingKernel::JumpLaw law = UniformJump{};
  if (p0 == "exponential") {
    law = TruncatedExponentialJump{kern.number("rate")};
  } else if (p0 == "uniform") {
    if (kern.has("rate")) throw ConfigError("kernel.rate only applies to p0 = \"exponential\"");
  } else {
    throw ConfigError("kernel.p0: unknown jump law '" + p0 + "'");
  }
  s.kernel = BoostingKernel(kern.profile_or("c_max", 0.0), kern.profile_or("c0", 0.0), law,
                            s.params.z_min, s.params.z_max);
  s.theta = kern.number_or("theta", 0.0);
  if (!(s.theta >= 0.0 && s.theta <= 1.0)) throw ConfigError("kernel.theta must lie in [0, 1]");

  const SectionReader grid(doc, "grid");
  grid.allow({"cells"});
  s.grid_cells = count_value(grid, "cells", 200);

  const SectionReader init(doc, "initial");
  init.allow({"S", "N", "I", "psi", "R", "bump_center", "bump_width"});
  if (init.has("S") == init.has("N")) {
    throw ConfigError("initial: give exactly one of initial.S and initial.N");
  }
  s.I0 = init.number("I");
  if (init.has("N")) {
    s.N0 = init.number("N");
    if (!(*s.N0 > 0.0)) throw ConfigError("initial.N must be > 0");
  } else {
    s.S0 = init.number("S");
  }
  if (s.S0 < 0.0) throw ConfigError("initial.S must be >= 0");
  if (s.I0 < 0.0) throw ConfigError("initial.I must be >= 0");
  const std::string psi = init.string_or("psi", "zero");
  if (psi == "zero") {
    s.density = InitialDensity::zero;
  } else if (psi == "uniform") {
    s.density = InitialDensity::uniform;
  } else if (psi == "bump") {
    s.density = InitialDensity::bump;
  } else if (psi == "history") {
    s.density = InitialDensity::history;
  } else {
    throw ConfigError("initial.psi: unknown profile '" + psi + "'");
  }
  s.R0_mass = init.number_or("R", 0.0);
  if (s.R0_mass < 0.0) throw ConfigError("initial.R must be >= 0");
  s.bump_center = init.number_or("bump_center", 0.5);
  s.bump_width = init.number_or("bump_width", 0.15);
  if (!(s.bump_width > 0.0)) throw ConfigError("initial.bump_width must be > 0");

  const SectionReader run(doc, "run");
  run.allow({"t_end", "dt", "output_stride", "seed"});
  s.t_end = run.number("t_end");
  if (!(s.t_end > 0.0)) throw ConfigError("run.t_end must be > 0");
  if (run.has("dt")) {
    s.dt = run.number("dt");
    if (!(*s.dt > 0.0)) throw ConfigError("run.dt must be > 0");
  }
  s.output_stride = count_value(run, "output_stride", 1);
  const double seed = run.number_or("seed", 0.0);
  if (seed < 0.0 || seed != std::floor(seed)) throw ConfigError("run.seed must be a nonnegative integer");
  s.seed = static_cast<std::uint64_t>(seed);

  const ValidationReport report = validate_model(s.params, s.birth, s.decay, s.kernel);
  if (const auto* bad = report.first_failure()) {
    throw ConfigError(bad->name + ": " + bad->message);
  }
  if (s.N0) {
    const double R = adaptive_simpson(initial_density(s, ModelTag::M1), s.params.z_min,
                                      s.params.z_max, 1e-12, 1e-300);
    s.S0 = *s.N0 - s.I0 - R;
    if (s.S0 < 0.0) throw ConfigError("initial.N is smaller than I plus the immune mass");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::function<double(double)> no_boost_history_density(const ModelParameters& p,
                                                       const DecayFunction& g, double I0) {
  return [p, g, I0](double z) {
    const double age = g.travel_time(p.z_max, z);
    return p.gamma * I0 * std::exp(-p.d * age) / g(z);
  };
}

std::function<double(double)> m2_history_density(const ModelParameters& p,
                                                  const DecayFunction& g, double I0, double N) {
  const double lambda = p.boost_contact_multiplier * p.beta * I0 / N;
  const double kappa = p.d + lambda;
  const double tau = g.travel_time(p.z_max, p.z_min);
  // E = integral of exp(-kappa a) over one transit
  const double E = kappa > 0.0 ? -std::expm1(-kappa * tau) / kappa : tau;
  if (!(lambda * E < 1.0)) throw DomainError("m2 history density: no stationary profile");
  const double R = p.gamma * I0 * E / (1.0 - lambda * E);
  const double B = p.gamma * I0 + lambda * R;
  return [p, g, B, kappa](double z) {
    const double age = g.travel_time(p.z_max, z);
    return B * std::exp(-kappa * age) / g(z);
  };
}

std::function<double(double)> initial_density(const Scenario& s, ModelTag model) {
  const double lo = s.params.z_min;
  const double width = s.params.z_max - s.params.z_min;
  switch (s.density) {
    case InitialDensity::zero:
      return [](double) { return 0.0; };
    case InitialDensity::uniform: {
      const double level = s.R0_mass / width;
      return [level](double) { return level; };
    }
    case InitialDensity::bump: {
      // smooth cos^2 bump normalized to the requested mass
      const double c = lo + s.bump_center * width;
      const double h = s.bump_width * width;
      const double amp = s.R0_mass / h;
      return [c, h, amp](double z) {
        const double u = (z - c) / h;
        if (std::abs(u) >= 1.0) return 0.0;
        const double v = std::cos(0.5 * M_PI * u);
        return amp * v * v;
      };
    }
    case InitialDensity::history: {
      if (model == ModelTag::M1 && s.kernel.is_no_boost()) {
        return no_boost_history_density(s.params, s.decay, s.I0);
      }
      if (s.N0) return m2_history_density(s.params, s.decay, s.I0, *s.N0);
      // N is solved self-consistently: S0 and I0 fixed, R from the profile.
      double N = s.S0 + s.I0;
      for (int it = 0; it < 200; ++it) {
        const auto f = m2_history_density(s.params, s.decay, s.I0, N);
        const double R = adaptive_simpson(f, lo, s.params.z_max, 1e-12);
        const double next = s.S0 + s.I0 + R;
        if (std::abs(next - N) <= 1e-14 * next) break;
        N = next;
      }
      return m2_history_density(s.params, s.decay, s.I0, N);
    }
  }
  return [](double) { return 0.0; };
}

SimulationConfig make_pde_config(const Scenario& s, ModelTag model,
                                 std::optional<std::size_t> cells) {
  const std::size_t n = cells.value_or(s.grid_cells);
  if (n == 0) throw ConfigError("grid.cells must be >= 1");
  auto grid = ImmunityGrid::uniform(s.params.z_min, s.params.z_max, n);
  State init{s.S0, s.I0, cell_averages(initial_density(s, model), grid)};
  return SimulationConfig{s.params,  s.birth, s.decay,  s.kernel,          grid, s.dt,
                          s.t_end,   init,    model,    s.output_stride};
}

MolState make_mol_initial(const Scenario& s) {
  const auto psi = initial_density(s, ModelTag::M1);
  const double lo = s.params.z_min;
  const double h = (s.params.z_max - lo) / 3.0;
  auto mass = [&](double a, double b) { return adaptive_simpson(psi, a, b, 1e-10, 1e-300); };
  return {s.S0, s.I0, mass(lo + 2 * h, s.params.z_max), mass(lo + h, lo + 2 * h),
          mass(lo, lo + h)};
}

MolRates make_mol_rates(const Scenario& s) {
  return mol_rates_from_decay(s.decay, s.params.z_min, s.params.z_max, s.theta);
}

}  // namespace immunokinetics
