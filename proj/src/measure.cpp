#include "skl/measure.hpp"

#include <algorithm>
#include <cmath>

namespace skl {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

double parse_endpoint(const nlohmann::json& v, const char* side) {
  if (v.is_null()) return std::string(side) == "a" ? -kInf : kInf;
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(), ::tolower);
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw schema_error("measure: support endpoint must be a number, null, or \"inf\"/\"-inf\"");
}

nlohmann::json endpoint_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

quad_map default_map(const ac_part& p) {
  quad_map m;
  if (p.finite_support()) {
    m.kind = map_kind::affine;
    m.center = 0.5 * (p.a + p.b);
    m.scale = 0.5 * (p.b - p.a);
    return m;
  }
  const bool lower_inf = !std::isfinite(p.a);
  const bool upper_inf = !std::isfinite(p.b);
  if (p.kind == density_kind::lognormal && lower_inf == false && p.a <= 0.0 && upper_inf) {
    m.kind = map_kind::log_logistic;
    m.center = p.mean;
    m.scale = 3.0 * p.sigma;
    return m;
  }
  if (lower_inf && upper_inf) {
    m.kind = map_kind::logistic;
    if (p.kind == density_kind::gaussian) {
      m.center = p.mean;
      m.scale = 2.0 * p.sigma;
    } else {
      m.center = 0.0;
      m.scale = 2.0;
    }
    return m;
  }
  m.kind = map_kind::exp_halfline;
  if (upper_inf) {
    m.center = p.a;
    m.sign = 1.0;
  } else {
    m.center = p.b;
    m.sign = -1.0;
  }
  m.scale = (p.kind == density_kind::gaussian) ? 2.0 * p.sigma : 2.0;
  return m;
}

}  // namespace

double part_mass(const ac_part& p) {
  const quad_map m = p.map ? *p.map : default_map(p);
  std::vector<double> lam, w;
  mapped_rule(m, p.nodes, lam, w);
  neumaier acc;
  for (int i = 0; i < p.nodes; ++i) {
    const double d = p.density(lam[i]);
    if (d < -1e-12) throw measure_error("ac part: density negative at lambda=" + std::to_string(lam[i]));
    acc.add(w[i] * d);
  }
  return acc.value();
}

std::string to_string(density_kind k) {
  switch (k) {
    case density_kind::uniform: return "uniform";
    case density_kind::gaussian: return "gaussian";
    case density_kind::lognormal: return "lognormal";
    case density_kind::custom_poly: return "custom_poly_density";
  }
  return "uniform";
}

density_kind density_kind_from_string(const std::string& s) {
  if (s == "uniform") return density_kind::uniform;
  if (s == "gaussian") return density_kind::gaussian;
  if (s == "lognormal") return density_kind::lognormal;
  if (s == "custom_poly_density") return density_kind::custom_poly;
  throw schema_error("unknown ac density kind: " + s);
}

double ac_part::density(double l) const {
  switch (kind) {
    case density_kind::uniform:
      return mass / (b - a);
    case density_kind::gaussian: {
      const double z = (l - mean) / sigma;
      return mass * std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
    }
    case density_kind::lognormal: {
      if (l <= 0.0) return 0.0;
      const double z = (std::log(l) - mean) / sigma;
      return mass * std::exp(-0.5 * z * z) / (l * sigma * std::sqrt(kTwoPi));
    }
    case density_kind::custom_poly: {
      // Horner
      double v = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * l + *it;
      return v;
    }
  }
  return 0.0;
}

spectral_measure spectral_measure::build(std::vector<atom> atoms,
                                         std::vector<ac_part> parts) {
  spectral_measure mu;
  std::sort(atoms.begin(), atoms.end(), [](const atom& p, const atom& q) { return p.x < q.x; });
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i].w > 0.0)) throw measure_error("atom weight must be positive");
    if (!std::isfinite(atoms[i].x)) throw measure_error("atom location must be finite");
    if (i > 0 && atoms[i].x == atoms[i - 1].x)
      throw measure_error("duplicate atom at x=" + std::to_string(atoms[i].x));
  }
  mu.atoms = std::move(atoms);

  for (auto& p : parts) {
    if (!(p.a < p.b)) throw measure_error("ac part: support must satisfy a < b");
    if (p.nodes < 1) throw measure_error("ac part: nodes must be >= 1");
    if (p.sigma <= 0.0) throw measure_error("ac part: sigma must be positive");
    if ((p.kind == density_kind::uniform || p.kind == density_kind::custom_poly) &&
        !p.finite_support())
      throw measure_error("ac part: " + to_string(p.kind) + " requires a finite support");
    if (p.kind == density_kind::custom_poly && p.coeffs.empty())
      throw measure_error("ac part: custom_poly_density requires coefficients");
    if (p.kind == density_kind::lognormal && p.a < 0.0)
      throw measure_error("ac part: lognormal support must lie in [0, inf)");
    if (!p.map) p.map = default_map(p);
  }
  mu.parts = std::move(parts);

  neumaier total;
  for (const auto& a : mu.atoms) total.add(a.w);
  for (const auto& p : mu.parts) {
    const double pm = part_mass(p);
    if (!(pm > 0.0)) throw measure_error("ac part has zero mass on its support");
    total.add(pm);
  }
  mu.total_mass = total.value();
  if (!(mu.total_mass > 0.0)) throw measure_error("measure has zero total mass");
  return mu;
}

void spectral_measure::validate() const {
  neumaier total;
  for (const auto& a : atoms) total.add(a.w);
  for (const auto& p : parts) total.add(part_mass(p));
  const double t = total.value();
  if (std::abs(t - total_mass) > 1e-12 * std::max(1.0, std::abs(t)))
    throw measure_error("cached total mass deviates from recomputation");
}

spectral_measure spectral_measure::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw schema_error("measure: expected an object");
  std::vector<atom> atoms;
  std::vector<ac_part> parts;
  if (j.contains("atoms")) {
    if (!j["atoms"].is_array()) throw schema_error("measure.atoms: expected an array");
    for (const auto& ja : j["atoms"]) {
      if (!ja.contains("x") || !ja.contains("w"))
        throw schema_error("measure.atoms[]: need fields x and w");
      atoms.push_back({ja["x"].get<double>(), ja["w"].get<double>()});
    }
  }
  if (j.contains("ac")) {
    if (!j["ac"].is_array()) throw schema_error("measure.ac: expected an array");
    for (const auto& jp : j["ac"]) {
      ac_part p;
      if (!jp.contains("kind")) throw schema_error("measure.ac[]: missing kind");
      p.kind = density_kind_from_string(jp["kind"].get<std::string>());
      if (!jp.contains("support") || !jp["support"].is_array() || jp["support"].size() != 2)
        throw schema_error("measure.ac[]: support must be [a, b]");
      p.a = parse_endpoint(jp["support"][0], "a");
      p.b = parse_endpoint(jp["support"][1], "b");
      const auto params = jp.value("params", nlohmann::json::object());
      p.mass = params.value("mass", 1.0);
      switch (p.kind) {
        case density_kind::gaussian:
          p.mean = params.value("mean", 0.0);
          p.sigma = params.value("sigma", 1.0);
          break;
        case density_kind::lognormal:
          p.mean = params.value("mu", 0.0);
          p.sigma = params.value("sigma", 1.0);
          break;
        case density_kind::custom_poly:
          if (!params.contains("coeffs")) throw schema_error("custom_poly_density: missing params.coeffs");
          p.coeffs = params["coeffs"].get<std::vector<double>>();
          break;
        case density_kind::uniform:
          break;
      }
      p.nodes = jp.value("nodes", 64);
      if (jp.contains("map")) {
        const auto& jm = jp["map"];
        quad_map m;
        m.kind = map_kind_from_string(jm.value("kind", std::string("affine")));
        m.center = jm.value("center", 0.0);
        m.scale = jm.value("scale", 1.0);
        m.sign = jm.value("sign", 1.0);
        p.map = m;
      }
      parts.push_back(std::move(p));
    }
  }
  return build(std::move(atoms), std::move(parts));
}

nlohmann::json spectral_measure::to_json() const {
  nlohmann::json j;
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : atoms) j["atoms"].push_back({{"x", a.x}, {"w", a.w}});
  j["ac"] = nlohmann::json::array();
  for (const auto& p : parts) {
    nlohmann::json jp;
    jp["kind"] = to_string(p.kind);
    jp["support"] = {endpoint_json(p.a), endpoint_json(p.b)};
    nlohmann::json params;
    params["mass"] = p.mass;
    switch (p.kind) {
      case density_kind::gaussian:
        params["mean"] = p.mean;
        params["sigma"] = p.sigma;
        break;
      case density_kind::lognormal:
        params["mu"] = p.mean;
        params["sigma"] = p.sigma;
        break;
      case density_kind::custom_poly:
        params["coeffs"] = p.coeffs;
        break;
      case density_kind::uniform:
        break;
    }
    jp["params"] = params;
    jp["nodes"] = p.nodes;
    if (p.map) {
      jp["map"] = {{"kind", to_string(p.map->kind)},
                   {"center", p.map->center},
                   {"scale", p.map->scale},
                   {"sign", p.map->sign}};
    }
    j["ac"].push_back(jp);
  }
  return j;
}

integration_result integrate(const spectral_measure& mu,
                             const std::function<std::complex<double>(double)>& f) {
  integration_result out;
  std::complex<double> total{0.0, 0.0};
  neumaier re, im;
  auto eval = [&](double x) {
    const std::complex<double> v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw degeneration_error("integrate: non-finite integrand at lambda=" + std::to_string(x));
    return v;
  };
  for (const auto& a : mu.atoms) {
    const auto v = eval(a.x) * a.w;
    re.add(v.real());
    im.add(v.imag());
  }
  for (std::size_t pi = 0; pi < mu.parts.size(); ++pi) {
    const auto& p = mu.parts[pi];
    std::vector<double> lam, w;
    mapped_rule(*p.map, p.nodes, lam, w);
    neumaier pre, pim, pre_outer, pim_outer;
    const int dec = std::max(1, p.nodes / 10);
    for (int i = 0; i < p.nodes; ++i) {
      const auto v = eval(lam[i]) * (w[i] * p.density(lam[i]));
      pre.add(v.real());
      pim.add(v.imag());
      const bool outer_lo = !std::isfinite(p.a) && i < dec;
      const bool outer_hi = !std::isfinite(p.b) && i >= p.nodes - dec;
      if (outer_lo || outer_hi) {
        pre_outer.add(v.real());
        pim_outer.add(v.imag());
      }
    }
    re.add(pre.value());
    im.add(pim.value());
    if (!p.finite_support()) {
      const double part_abs = std::abs(std::complex<double>(pre.value(), pim.value()));
      const double outer_abs = std::abs(std::complex<double>(pre_outer.value(), pim_outer.value()));
      if (outer_abs > 0.1 * (part_abs + 1e-300)) {
        out.divergence_warning = true;
        out.note += "part " + std::to_string(pi) + ": outer-decile contribution not decaying; ";
      }
    }
  }
  out.value = {re.value(), im.value()};
  return out;
}

integration_result integrate(const spectral_measure& mu,
                             const std::function<double(double)>& f) {
  return integrate(mu, std::function<std::complex<double>(double)>(
                           [&f](double x) { return std::complex<double>(f(x), 0.0); }));
}

spectral_measure truncate(const spectral_measure& mu, double radius) {
  if (!(radius > 0.0)) throw measure_error("truncate: radius must be positive");
  std::vector<atom> atoms;
  for (const auto& a : mu.atoms)
    if (std::abs(a.x) <= radius) atoms.push_back(a);
  std::vector<ac_part> parts;
  for (auto p : mu.parts) {
    const double a = std::max(p.a, -radius);
    const double b = std::min(p.b, radius);
    if (!(a < b)) continue;  // support leaves the window entirely
    // uniform carries mass/(b-a); rescale so the density level survives the clip
    if (p.kind == density_kind::uniform) p.mass *= (b - a) / (p.b - p.a);
    p.a = a;
    p.b = b;
    p.map.reset();  // clipped support is finite; re-resolve to affine
    parts.push_back(std::move(p));
  }
  if (atoms.empty() && parts.empty())
    throw measure_error("truncate: nothing of the measure survives the window");
  return spectral_measure::build(std::move(atoms), std::move(parts));
}

gap_report spectral_gap_at_zero(const spectral_measure& mu) {
  double gap = kInf;
  for (const auto& a : mu.atoms) gap = std::min(gap, std::abs(a.x));
  for (const auto& p : mu.parts) {
    if (p.a <= 0.0 && 0.0 <= p.b)
      gap = 0.0;
    else
      gap = std::min(gap, std::min(std::abs(p.a), std::abs(p.b)));
  }
  gap_report r;
  r.gap_lower_bound = std::isfinite(gap) ? gap : 0.0;
  r.zero_in_resolvent = r.gap_lower_bound > 1e-12;
  return r;
}

}  // namespace skl
