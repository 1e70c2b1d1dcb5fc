// Copyright 2026 The outnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON records for grid maps, cost maps, point clouds, sensor windows,
// worlds and scenario documents. Doubles are written in shortest
// round-trip form, so map -> JSON -> map is bit-exact.

#ifndef OUTNAV_SERIALIZATION_HPP
#define OUTNAV_SERIALIZATION_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "outnav/gridmap.hpp"
#include "outnav/perception.hpp"
#include "outnav/scenarios.hpp"
#include "outnav/sensors.hpp"
#include "outnav/world.hpp"

namespace outnav {

using json = nlohmann::json;

inline constexpr int kRecordVersion = 1;

/// Malformed document. `path` names the offending field.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(path, std::string("missing '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const json& j, const char* key, const std::string& path) {
  const json& v = field(j, key, path);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw FormatError(path + "." + key, "wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key, path);
}

inline Vec2 vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError(path, "expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(Vec2 v) { return json::array({v.x, v.y}); }

}  // namespace detail

// ─── Grid maps ──────────────────────────────────────────────────────────────

inline json to_json(const GridMap& m) {
  json values = json::array();
  json valid = json::array();
  for (int r = 0; r < m.size(); ++r) {
    for (int c = 0; c < m.size(); ++c) {
      values.push_back(m.value(r, c));
      valid.push_back(m.valid(r, c) ? 1 : 0);
    }
  }
  return {{"type", "gridmap"},
          {"version", kRecordVersion},
          {"size_n", m.size()},
          {"resolution", m.resolution()},
          {"center", detail::to_json(m.center())},
          {"layout", "row-major, row along +y, col along +x"},
          {"values", std::move(values)},
          {"valid", std::move(valid)}};
}

inline GridMap gridmap_from_json(const json& j, const std::string& path = "gridmap") {
  const int n = detail::get<int>(j, "size_n", path);
  const double res = detail::get<double>(j, "resolution", path);
  GridMap m;
  try {
    m = GridMap(n, res, detail::vec2(detail::field(j, "center", path), path + ".center"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path, e.what());
  }
  const json& values = detail::field(j, "values", path);
  const json& valid = detail::field(j, "valid", path);
  const std::size_t cells = m.cell_count();
  if (!values.is_array() || values.size() != cells) throw FormatError(path + ".values", "wrong length");
  if (!valid.is_array() || valid.size() != cells) throw FormatError(path + ".valid", "wrong length");
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * n + c;
      if (!values[i].is_number() || !valid[i].is_number_integer()) {
        throw FormatError(path, "non-numeric cell " + std::to_string(i));
      }
      if (valid[i].get<int>() != 0) m.set(r, c, values[i].get<double>());
    }
  }
  return m;
}

inline json to_json(const CostMap& c) {
  json j = to_json(c.grid);
  j["type"] = "costmap";
  j["module"] = std::string(to_string(c.module));
  j["tick"] = c.tick;
  return j;
}

inline CostMap costmap_from_json(const json& j, const std::string& path = "costmap") {
  CostMap c;
  c.grid = gridmap_from_json(j, path);
  const auto m = module_from_string(detail::get<std::string>(j, "module", path));
  if (!m) throw FormatError(path + ".module", "unknown module");
  c.module = *m;
  c.tick = detail::get<int>(j, "tick", path);
  return c;
}

// ─── Clouds and windows ─────────────────────────────────────────────────────

inline json to_json(const PointCloud& cloud) {
  json pts = json::array();
  for (const CloudPoint& p : cloud.points) pts.push_back({p.x, p.y, p.z, p.intensity});
  return {{"type", "cloud"}, {"version", kRecordVersion}, {"stamp", cloud.stamp},
          {"points", std::move(pts)}};
}

inline PointCloud cloud_from_json(const json& j, const std::string& path = "cloud") {
  PointCloud c;
  c.stamp = detail::get<double>(j, "stamp", path);
  for (const json& p : detail::field(j, "points", path)) {
    if (!p.is_array() || p.size() != 4) throw FormatError(path + ".points", "expected [x,y,z,i]");
    c.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>(),
                        p[3].get<double>()});
  }
  return c;
}

inline json to_json(const SensorWindow& w) {
  json rows = json::array();
  for (int i = 0; i < w.rows(); ++i) rows.push_back(w.row(i));
  return {{"type", "window"}, {"version", kRecordVersion}, {"columns", w.columns()},
          {"capacity", w.capacity()}, {"rate", w.rate()}, {"stamp", w.stamp()},
          {"rows", std::move(rows)}};
}

inline SensorWindow window_from_json(const json& j, const std::string& path = "window") {
  SensorWindow w(detail::get<int>(j, "columns", path), detail::get<int>(j, "capacity", path),
                 detail::get<double>(j, "rate", path));
  const double stamp = detail::get<double>(j, "stamp", path);
  for (const json& r : detail::field(j, "rows", path)) {
    w.push(r.get<std::vector<double>>(), stamp);
  }
  return w;
}

// ─── Worlds ─────────────────────────────────────────────────────────────────

inline json to_json(const TerrainWorld& w) {
  json bumps = json::array();
  for (const auto& b : w.terrain.bumps) {
    bumps.push_back({{"center", detail::to_json(b.center)}, {"amplitude", b.amplitude},
                     {"sigma", b.sigma}});
  }
  json steps = json::array();
  for (const auto& s : w.terrain.steps) {
    steps.push_back({{"point", detail::to_json(s.point)}, {"normal_angle", s.normal_angle},
                     {"height", s.height}, {"width", s.width}});
  }
  json regions = json::array();
  for (const auto& r : w.regions) {
    json jr;
    if (const auto* d = std::get_if<Disk>(&r.shape)) {
      jr = {{"disk", {{"center", detail::to_json(d->center)}, {"radius", d->radius}}}};
    } else {
      json verts = json::array();
      for (Vec2 v : std::get<Polygon>(r.shape).vertices) verts.push_back(detail::to_json(v));
      jr = {{"polygon", std::move(verts)}};
    }
    jr["surface"] = std::string(to_string(r.surface));
    regions.push_back(std::move(jr));
  }
  json surfaces = json::array();
  for (const auto& s : w.surfaces) {
    surfaces.push_back({{"name", std::string(to_string(s.id))},
                        {"vibration_gain", s.vibration_gain},
                        {"slip_ratio", s.slip_ratio},
                        {"traction_cost", s.traction_cost},
                        {"lidar_intensity", s.lidar_intensity}});
  }
  json veg = json::array();
  for (const auto& v : w.vegetation) {
    veg.push_back({{"kind", std::string(to_string(v.kind))},
                   {"position", detail::to_json(v.position)},
                   {"radius", v.radius},
                   {"height", v.height},
                   {"pliable", v.pliable},
                   {"intensity", v.lidar_intensity}});
  }
  json obs = json::array();
  for (const auto& o : w.obstacles) {
    obs.push_back({{"position", detail::to_json(o.position)}, {"radius", o.radius},
                   {"height", o.height}, {"intensity", o.lidar_intensity}});
  }
  return {{"bounds", {w.bounds.x_min, w.bounds.x_max, w.bounds.y_min, w.bounds.y_max}},
          {"terrain",
           {{"base", w.terrain.base},
            {"slope", {w.terrain.slope_x, w.terrain.slope_y}},
            {"bumps", std::move(bumps)},
            {"steps", std::move(steps)}}},
          {"default_surface", std::string(to_string(w.default_surface))},
          {"surfaces", std::move(surfaces)},
          {"regions", std::move(regions)},
          {"vegetation", std::move(veg)},
          {"obstacles", std::move(obs)},
          {"seed", w.seed}};
}

namespace detail {

inline Surface surface_field(const json& j, const char* key, const std::string& path) {
  const auto s = surface_from_string(get<std::string>(j, key, path));
  if (!s) throw FormatError(path + "." + key, "unknown surface class");
  return *s;
}

}  // namespace detail

inline TerrainWorld world_from_json(const json& j, const std::string& path = "world") {
  TerrainWorld w;
  if (j.contains("bounds")) {
    const auto b = detail::get<std::vector<double>>(j, "bounds", path);
    if (b.size() != 4 || !(b[0] < b[1]) || !(b[2] < b[3])) {
      throw FormatError(path + ".bounds", "expected [x_min, x_max, y_min, y_max]");
    }
    w.bounds = {b[0], b[1], b[2], b[3]};
  }
  if (j.contains("terrain")) {
    const json& t = j.at("terrain");
    const std::string tp = path + ".terrain";
    w.terrain.base = detail::get_or<double>(t, "base", 0.0, tp);
    if (t.contains("slope")) {
      const Vec2 s = detail::vec2(t.at("slope"), tp + ".slope");
      w.terrain.slope_x = s.x;
      w.terrain.slope_y = s.y;
    }
    for (const json& b : t.value("bumps", json::array())) {
      const std::string bp = tp + ".bumps";
      GaussianBump g{detail::vec2(detail::field(b, "center", bp), bp + ".center"),
                     detail::get<double>(b, "amplitude", bp), detail::get<double>(b, "sigma", bp)};
      if (!(g.sigma > 0.0)) throw FormatError(bp + ".sigma", "must be > 0");
      w.terrain.bumps.push_back(g);
    }
    for (const json& s : t.value("steps", json::array())) {
      const std::string sp = tp + ".steps";
      w.terrain.steps.push_back({detail::vec2(detail::field(s, "point", sp), sp + ".point"),
                                 detail::get_or<double>(s, "normal_angle", 0.0, sp),
                                 detail::get<double>(s, "height", sp),
                                 detail::get_or<double>(s, "width", 0.0, sp)});
    }
  }
  if (j.contains("default_surface")) {
    w.default_surface = detail::surface_field(j, "default_surface", path);
  }
  for (const json& s : j.value("surfaces", json::array())) {
    const std::string sp = path + ".surfaces";
    const Surface id = detail::surface_field(s, "name", sp);
    SurfaceClass& c = w.surfaces[static_cast<std::size_t>(id)];
    c.vibration_gain = detail::get_or<double>(s, "vibration_gain", c.vibration_gain, sp);
    c.slip_ratio = detail::get_or<double>(s, "slip_ratio", c.slip_ratio, sp);
    c.traction_cost = detail::get_or<double>(s, "traction_cost", c.traction_cost, sp);
    c.lidar_intensity = detail::get_or<double>(s, "lidar_intensity", c.lidar_intensity, sp);
  }
  try {
    validate_surface_table(w.surfaces);
  } catch (const std::invalid_argument& e) {
    throw FormatError(path + ".surfaces", e.what());
  }
  for (const json& r : j.value("regions", json::array())) {
    const std::string rp = path + ".regions";
    SurfaceRegion region;
    region.surface = detail::surface_field(r, "surface", rp);
    if (r.contains("disk")) {
      const json& d = r.at("disk");
      region.shape = Disk{detail::vec2(detail::field(d, "center", rp), rp + ".disk.center"),
                          detail::get<double>(d, "radius", rp + ".disk")};
    } else if (r.contains("polygon")) {
      Polygon p;
      for (const json& v : r.at("polygon")) p.vertices.push_back(detail::vec2(v, rp + ".polygon"));
      if (p.vertices.size() < 3) throw FormatError(rp + ".polygon", "needs >= 3 vertices");
      region.shape = std::move(p);
    } else {
      throw FormatError(rp, "region needs 'disk' or 'polygon'");
    }
    w.regions.push_back(std::move(region));
  }
  for (const json& v : j.value("vegetation", json::array())) {
    const std::string vp = path + ".vegetation";
    VegetationInstance inst;
    const auto kind = vegetation_kind_from_string(detail::get<std::string>(v, "kind", vp));
    if (!kind) throw FormatError(vp + ".kind", "unknown vegetation kind");
    inst.kind = *kind;
    inst.position = detail::vec2(detail::field(v, "position", vp), vp + ".position");
    inst.radius = detail::get<double>(v, "radius", vp);
    inst.height = detail::get<double>(v, "height", vp);
    inst.pliable = detail::get_or<bool>(v, "pliable", inst.kind == VegetationKind::kTallGrass, vp);
    inst.lidar_intensity = detail::get_or<double>(
        v, "intensity", inst.kind == VegetationKind::kTree ? 90.0 : 55.0, vp);
    try {
      validate(inst);
    } catch (const std::invalid_argument& e) {
      throw FormatError(vp, e.what());
    }
    w.vegetation.push_back(inst);
  }
  for (const json& o : j.value("obstacles", json::array())) {
    const std::string op = path + ".obstacles";
    w.obstacles.push_back({detail::vec2(detail::field(o, "position", op), op + ".position"),
                           detail::get<double>(o, "radius", op),
                           detail::get_or<double>(o, "height", 1.0, op),
                           detail::get_or<double>(o, "intensity", 85.0, op)});
  }
  w.seed = detail::get_or<std::uint64_t>(j, "seed", 0, path);
  return w;
}

inline json to_json(const Scenario& s) {
  return {{"type", "scenario"},
          {"version", kRecordVersion},
          {"id", s.id},
          {"description", s.description},
          {"robot", s.robot},
          {"start", {{"x", s.start.x}, {"y", s.start.y}, {"yaw", s.start.yaw}}},
          {"goal", detail::to_json(s.goal)},
          {"world", to_json(s.world)}};
}

inline Scenario scenario_from_json(const json& j, const std::string& path = "scenario") {
  Scenario s;
  s.id = detail::get_or<std::string>(j, "id", "custom", path);
  s.description = detail::get_or<std::string>(j, "description", "", path);
  s.robot = detail::get_or<std::string>(j, "robot", "husky", path);
  const json& st = detail::field(j, "start", path);
  s.start = {detail::get<double>(st, "x", path + ".start"),
             detail::get<double>(st, "y", path + ".start"),
             detail::get_or<double>(st, "yaw", 0.0, path + ".start")};
  s.goal = detail::vec2(detail::field(j, "goal", path), path + ".goal");
  s.world = world_from_json(detail::field(j, "world", path), path + ".world");
  return s;
}

}  // namespace outnav

#endif  // OUTNAV_SERIALIZATION_HPP
