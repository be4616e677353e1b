#include "swimlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swimlab/errors.hpp"
#include "swimlab/so3.hpp"

namespace swimlab {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": malformed JSON: " + e.what());
  }
}

void expect_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
}

template <class T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return get<T>(j, key, where, T{});
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string part_name(HarmonicPart p) { return p == HarmonicPart::Real ? "re" : "im"; }

HarmonicPart parse_part(const std::string& s, const std::string& where) {
  if (s == "re") return HarmonicPart::Real;
  if (s == "im") return HarmonicPart::Imag;
  throw ConfigError(where + ".part must be \"re\" or \"im\"");
}

Eigen::Vector3d to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
  return name == o.name && modes == o.modes && quadrature_degree == o.quadrature_degree && box_lower == o.box_lower &&
         box_upper == o.box_upper && step == o.step && viscosity == o.viscosity && seed == o.seed &&
         simulate == o.simulate && track == o.track && optimize == o.optimize && project == o.project;
}

std::vector<DeformationMode> RunConfig::deformation_modes() const {
  std::vector<DeformationMode> out;
  for (const auto& m : modes) out.push_back(DeformationMode::decaying({m.degree, m.order, m.part}, m.amplitude));
  return out;
}

ShapeBox RunConfig::shape_box() const {
  ShapeBox box;
  box.lower = Eigen::Map<const Eigen::VectorXd>(box_lower.data(), static_cast<Eigen::Index>(box_lower.size()));
  box.upper = Eigen::Map<const Eigen::VectorXd>(box_upper.data(), static_cast<Eigen::Index>(box_upper.size()));
  return box;
}

std::filesystem::path RunConfig::resolve(const std::string& file) const {
  const std::filesystem::path p(file);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const json j = parse_json(text, "config");
  expect_keys(j, "config",
              {"name", "modes", "quadrature_degree", "box", "step", "viscosity", "seed", "simulate", "track", "optimize",
               "project"});
  RunConfig c;
  c.base_dir = base_dir;
  c.name = get<std::string>(j, "name", "config", "");
  const json modes = j.contains("modes") ? j.at("modes") : json::array();
  check(modes.is_array() && !modes.empty(), "config.modes must be a non-empty array");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string where = "modes[" + std::to_string(i) + "]";
    expect_keys(modes[i], where, {"degree", "order", "part", "amplitude"});
    ModeSpec m;
    m.degree = require<int>(modes[i], "degree", where);
    m.order = require<int>(modes[i], "order", where);
    m.part = parse_part(get<std::string>(modes[i], "part", where, "re"), where);
    m.amplitude = get<double>(modes[i], "amplitude", where, 1.0);
    check(m.degree >= 2, where + ".degree must be at least 2 (degrees 0 and 1 violate the self-propelled constraints)");
    check(std::abs(m.order) <= m.degree, where + ".order must satisfy |order| <= degree");
    check(m.part == HarmonicPart::Real || m.order >= 1, where + ": imaginary part needs order >= 1");
    check(std::isfinite(m.amplitude) && m.amplitude != 0.0, where + ".amplitude must be finite and nonzero");
    c.modes.push_back(m);
  }
  const std::size_t n = c.modes.size();

  c.quadrature_degree = get<int>(j, "quadrature_degree", "config", 24);
  check(c.quadrature_degree >= 4 && c.quadrature_degree <= 80, "config.quadrature_degree must lie in [4, 80]");

  c.box_lower.assign(n, -0.2);
  c.box_upper.assign(n, 0.2);
  if (j.contains("box")) {
    const json& b = j.at("box");
    if (b.is_number()) {
      const double w = b.get<double>();
      check(w > 0.0, "config.box half-width must be positive");
      c.box_lower.assign(n, -w);
      c.box_upper.assign(n, w);
    } else {
      expect_keys(b, "box", {"lower", "upper"});
      c.box_lower = require<std::vector<double>>(b, "lower", "box");
      c.box_upper = require<std::vector<double>>(b, "upper", "box");
      check(c.box_lower.size() == n && c.box_upper.size() == n, "config.box bounds need one entry per mode");
      for (std::size_t i = 0; i < n; ++i)
        check(c.box_lower[i] < 0.0 && c.box_upper[i] > 0.0, "config.box must contain s = 0 in its interior");
    }
  }

  c.step = get<double>(j, "step", "config", 1e-3);
  check(c.step > 0.0 && std::isfinite(c.step), "config.step must be positive");
  c.viscosity = get<double>(j, "viscosity", "config", 1.0);
  check(c.viscosity > 0.0 && std::isfinite(c.viscosity), "config.viscosity must be positive");
  c.seed = get<std::uint64_t>(j, "seed", "config", 1);

  if (j.contains("simulate")) {
    const json& b = j.at("simulate");
    expect_keys(b, "simulate", {"control_file", "horizon"});
    SimulateBlock s;
    s.control_file = get<std::string>(b, "control_file", "simulate", "");
    s.horizon = get<double>(b, "horizon", "simulate", 1.0);
    check(s.horizon > 0.0, "simulate.horizon must be positive");
    c.simulate = s;
  }
  if (j.contains("track")) {
    const json& b = j.at("track");
    expect_keys(b, "track",
                {"reference", "direction", "distance", "axis", "angle", "samples_file", "epsilon", "horizon",
                 "budget_per_interval", "initial_intervals", "max_refinements"});
    TrackBlock t;
    t.reference = get<std::string>(b, "reference", "track", t.reference);
    check(t.reference == "line" || t.reference == "rotation" || t.reference == "samples",
          "track.reference must be line, rotation or samples");
    t.direction = get<std::array<double, 3>>(b, "direction", "track", t.direction);
    t.distance = get<double>(b, "distance", "track", t.distance);
    t.axis = get<std::array<double, 3>>(b, "axis", "track", t.axis);
    t.angle = get<double>(b, "angle", "track", t.angle);
    t.samples_file = get<std::string>(b, "samples_file", "track", "");
    t.epsilon = get<double>(b, "epsilon", "track", t.epsilon);
    t.horizon = get<double>(b, "horizon", "track", t.horizon);
    t.budget_per_interval = get<int>(b, "budget_per_interval", "track", t.budget_per_interval);
    t.initial_intervals = get<int>(b, "initial_intervals", "track", t.initial_intervals);
    t.max_refinements = get<int>(b, "max_refinements", "track", t.max_refinements);
    check(t.epsilon > 0.0 && t.horizon > 0.0, "track.epsilon and track.horizon must be positive");
    check(t.budget_per_interval >= 1 && t.initial_intervals >= 1 && t.max_refinements >= 0,
          "track budgets and interval counts must be positive");
    check(t.reference != "line" || to_vec(t.direction).norm() > 0.0, "track.direction must be nonzero");
    check(t.reference != "rotation" || to_vec(t.axis).norm() > 0.0, "track.axis must be nonzero");
    check(t.reference != "samples" || !t.samples_file.empty(), "track.samples_file is required for samples");
    c.track = t;
  }
  if (j.contains("optimize")) {
    const json& b = j.at("optimize");
    expect_keys(b, "optimize", {"cost", "target", "amplitude_box", "period", "starts"});
    OptimizeBlock o;
    o.cost = get<std::string>(b, "cost", "optimize", o.cost);
    check(o.cost == "effort" || o.cost == "dissipation", "optimize.cost must be effort or dissipation");
    o.target = get<std::array<double, 6>>(b, "target", "optimize", o.target);
    o.amplitude_box = get<std::vector<double>>(b, "amplitude_box", "optimize", c.box_upper);
    check(o.amplitude_box.size() == n, "optimize.amplitude_box needs one entry per mode");
    for (std::size_t i = 0; i < n; ++i)
      check(o.amplitude_box[i] > 0.0 && o.amplitude_box[i] <= std::min(-c.box_lower[i], c.box_upper[i]),
            "optimize.amplitude_box must be positive and inside the shape box");
    o.period = get<double>(b, "period", "optimize", 1.0);
    o.starts = get<int>(b, "starts", "optimize", 8);
    check(o.period > 0.0 && o.starts >= 1, "optimize.period and optimize.starts must be positive");
    c.optimize = o;
  }
  if (j.contains("project")) {
    const json& b = j.at("project");
    expect_keys(b, "project", {"path_file"});
    c.project = ProjectBlock{get<std::string>(b, "path_file", "project", "")};
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["modes"] = json::array();
  for (const auto& m : c.modes)
    j["modes"].push_back({{"degree", m.degree}, {"order", m.order}, {"part", part_name(m.part)}, {"amplitude", m.amplitude}});
  j["quadrature_degree"] = c.quadrature_degree;
  j["box"] = {{"lower", c.box_lower}, {"upper", c.box_upper}};
  j["step"] = c.step;
  j["viscosity"] = c.viscosity;
  j["seed"] = c.seed;
  if (c.simulate) j["simulate"] = {{"control_file", c.simulate->control_file}, {"horizon", c.simulate->horizon}};
  if (c.track) {
    const TrackBlock& t = *c.track;
    j["track"] = {{"reference", t.reference},
                  {"direction", t.direction},
                  {"distance", t.distance},
                  {"axis", t.axis},
                  {"angle", t.angle},
                  {"samples_file", t.samples_file},
                  {"epsilon", t.epsilon},
                  {"horizon", t.horizon},
                  {"budget_per_interval", t.budget_per_interval},
                  {"initial_intervals", t.initial_intervals},
                  {"max_refinements", t.max_refinements}};
  }
  if (c.optimize) {
    const OptimizeBlock& o = *c.optimize;
    j["optimize"] = {{"cost", o.cost},
                     {"target", o.target},
                     {"amplitude_box", o.amplitude_box},
                     {"period", o.period},
                     {"starts", o.starts}};
  }
  if (c.project) j["project"] = {{"path_file", c.project->path_file}};
  return j.dump(2) + "\n";
}

ControlLaw load_control_law(const std::filesystem::path& path, Eigen::Index modes) {
  const json j = parse_json(read_file(path), path.string());
  expect_keys(j, "control", {"pieces"});
  ControlLaw law(modes);
  const json pieces = j.contains("pieces") ? j.at("pieces") : json::array();
  check(pieces.is_array(), "control.pieces must be an array");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string where = "pieces[" + std::to_string(i) + "]";
    const json& p = pieces[i];
    expect_keys(p, where, {"t0", "t1", "rates", "stroke"});
    const double t0 = require<double>(p, "t0", where);
    try {
      if (p.contains("stroke")) {
        const json& s = p.at("stroke");
        expect_keys(s, where + ".stroke", {"period", "coeffs"});
        const auto rows = require<std::vector<std::vector<double>>>(s, "coeffs", where + ".stroke");
        check(static_cast<Eigen::Index>(rows.size()) == modes, where + ".stroke.coeffs needs one row per mode");
        Stroke st = Stroke::zero(modes, require<double>(s, "period", where + ".stroke"));
        for (std::size_t r = 0; r < rows.size(); ++r) {
          check(rows[r].size() == 4, where + ".stroke.coeffs rows need four entries");
          for (int c = 0; c < 4; ++c) st.coeffs(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
        }
        append_stroke(law, st, t0);
      } else {
        const double t1 = require<double>(p, "t1", where);
        const auto rates = require<std::vector<double>>(p, "rates", where);
        check(static_cast<Eigen::Index>(rates.size()) == modes, where + ".rates needs one entry per mode");
        law.add_constant(t0, t1, Eigen::Map<const Eigen::VectorXd>(rates.data(), modes));
      }
    } catch (const DomainError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return law;
}

std::function<RigidState(double)> load_reference_samples(const std::filesystem::path& path) {
  const json j = parse_json(read_file(path), path.string());
  expect_keys(j, "reference", {"samples"});
  const json samples = require<json>(j, "samples", "reference");
  check(samples.is_array() && samples.size() >= 2, "reference.samples needs at least two poses");
  std::vector<double> times;
  std::vector<RigidState> poses;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string where = "samples[" + std::to_string(i) + "]";
    expect_keys(samples[i], where, {"t", "rotation_vector", "position"});
    times.push_back(require<double>(samples[i], "t", where));
    check(i == 0 || times[i] > times[i - 1], "reference sample times must increase");
    RigidState g;
    g.R = so3::exp(to_vec(get<std::array<double, 3>>(samples[i], "rotation_vector", where, {})));
    g.r = to_vec(get<std::array<double, 3>>(samples[i], "position", where, {}));
    poses.push_back(g);
  }
  return [times, poses](double t) {
    if (t <= times.front()) return poses.front();
    if (t >= times.back()) return poses.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double u = (t - times[i]) / (times[i + 1] - times[i]);
    RigidState g;
    g.R = poses[i].R * so3::exp(u * so3::log(Eigen::Matrix3d(poses[i].R.transpose() * poses[i + 1].R)));
    g.r = (1.0 - u) * poses[i].r + u * poses[i + 1].r;
    return g;
  };
}

BoundaryPath load_boundary_path(const std::filesystem::path& path, std::shared_ptr<const SphereQuadrature> quadrature) {
  BoundaryPath out;
  out.quadrature = quadrature;
  const Eigen::Index nodes = quadrature->size();
  const std::string text = read_file(path);
  if (path.extension() == ".csv") {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    check(line == "t,node,x,y,z", path.string() + ": expected header t,node,x,y,z");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      double t, x, y, z;
      long node;
      if (std::sscanf(line.c_str(), "%lf,%ld,%lf,%lf,%lf", &t, &node, &x, &y, &z) != 5)
        throw ConfigError(path.string() + ": malformed row '" + line + "'");
      if (out.times.empty() || t != out.times.back()) {
        check(out.maps.empty() || out.maps.back().cols() == nodes, path.string() + ": incomplete time slice");
        out.times.push_back(t);
        out.maps.emplace_back(3, 0);
      }
      Eigen::Matrix3Xd& m = out.maps.back();
      check(node == m.cols(), path.string() + ": nodes must be listed in grid order");
      m.conservativeResize(3, m.cols() + 1);
      m.col(m.cols() - 1) << x, y, z;
    }
    check(!out.maps.empty() && out.maps.back().cols() == nodes,
          path.string() + ": node count does not match the quadrature grid");
    return out;
  }

  const json j = parse_json(text, path.string());
  expect_keys(j, "path", {"kind", "direction", "axis", "rate", "degree", "order", "part", "amplitude", "t_end", "samples"});
  const std::string kind = require<std::string>(j, "kind", "path");
  const double t_end = get<double>(j, "t_end", "path", 1.0);
  const int samples = get<int>(j, "samples", "path", 21);
  check(t_end > 0.0 && samples >= 5, "path needs t_end > 0 and at least five samples");
  const Eigen::Matrix3Xd& x = quadrature->points;
  std::function<Eigen::Matrix3Xd(double)> map;
  if (kind == "translation") {
    const Eigen::Vector3d d = to_vec(require<std::array<double, 3>>(j, "direction", "path"));
    map = [&x, d](double t) { return Eigen::Matrix3Xd(x.colwise() + t * d); };
  } else if (kind == "rotation") {
    const Eigen::Vector3d axis = to_vec(require<std::array<double, 3>>(j, "axis", "path"));
    check(axis.norm() > 0.0, "path.axis must be nonzero");
    const double rate = get<double>(j, "rate", "path", 1.0);
    map = [&x, axis, rate](double t) {
      return Eigen::Matrix3Xd(so3::exp(Eigen::Vector3d(rate * t * axis.normalized())) * x);
    };
  } else if (kind == "mode") {
    const HarmonicIndex idx{require<int>(j, "degree", "path"), require<int>(j, "order", "path"),
                            parse_part(get<std::string>(j, "part", "path", "re"), "path")};
    try {
      idx.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("path: ") + e.what());
    }
    const double amp = get<double>(j, "amplitude", "path", 1.0);
    const Eigen::Matrix3Xd V = mode_boundary_field(DeformationMode::decaying(idx, amp), quadrature).values();
    map = [&x, V](double t) { return Eigen::Matrix3Xd(x + std::sin(t) * V); };
  } else {
    throw ConfigError("path.kind must be translation, rotation or mode");
  }
  for (int i = 0; i < samples; ++i) {
    const double t = t_end * i / (samples - 1);
    out.times.push_back(t);
    out.maps.push_back(map(t));
  }
  return out;
}

void write_boundary_path_csv(std::ostream& out, const BoundaryPath& path) {
  out << "t,node,x,y,z\n";
  char buf[128];
  for (std::size_t i = 0; i < path.times.size(); ++i)
    for (Eigen::Index q = 0; q < path.maps[i].cols(); ++q) {
      std::snprintf(buf, sizeof buf, "%.17g,%ld,%.17g,%.17g,%.17g\n", path.times[i], static_cast<long>(q),
                    path.maps[i](0, q), path.maps[i](1, q), path.maps[i](2, q));
      out << buf;
    }
}

}  // namespace swimlab
