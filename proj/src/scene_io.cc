#include "semclique/scene_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "json.hpp"

namespace semclique {
namespace {

using Json = nlohmann::ordered_json;

Json StateToJson(const TimedState& ts) {
  return Json{{"t", ts.index},         {"x", ts.state.x},
              {"y", ts.state.y},       {"heading", ts.state.heading},
              {"vx", ts.state.vx},     {"vy", ts.state.vy}};
}

Json TrajectoryToJson(const TrajectoryHistory& traj) {
  Json states = Json::array();
  for (const TimedState& ts : traj.states) states.push_back(StateToJson(ts));
  return states;
}

// Field accessors that report the path of whatever is missing or mistyped.
class Reader {
 public:
  absl::Status error() const { return error_; }
  bool ok() const { return error_.ok(); }

  const Json* Field(const Json& obj, const std::string& key,
                    const std::string& path, bool required) {
    if (!ok()) return nullptr;
    if (!obj.is_object()) {
      Fail(path, "expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) Fail(Join(path, key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  double Number(const Json& obj, const std::string& key,
                const std::string& path, std::optional<double> fallback) {
    const Json* v = Field(obj, key, path, !fallback.has_value());
    if (v == nullptr) return fallback.value_or(0.0);
    if (!v->is_number()) {
      Fail(Join(path, key), "expected a number");
      return 0.0;
    }
    return v->get<double>();
  }

  int Integer(const Json& obj, const std::string& key, const std::string& path,
              std::optional<int> fallback) {
    const Json* v = Field(obj, key, path, !fallback.has_value());
    if (v == nullptr) return fallback.value_or(0);
    if (!v->is_number_integer()) {
      Fail(Join(path, key), "expected an integer");
      return 0;
    }
    return v->get<int>();
  }

  std::string String(const Json& obj, const std::string& key,
                     const std::string& path,
                     std::optional<std::string> fallback) {
    const Json* v = Field(obj, key, path, !fallback.has_value());
    if (v == nullptr) return fallback.value_or("");
    if (!v->is_string()) {
      Fail(Join(path, key), "expected a string");
      return "";
    }
    return v->get<std::string>();
  }

  const Json* Array(const Json& obj, const std::string& key,
                    const std::string& path, bool required) {
    const Json* v = Field(obj, key, path, required);
    if (v != nullptr && !v->is_array()) {
      Fail(Join(path, key), "expected an array");
      return nullptr;
    }
    return v;
  }

  void Fail(const std::string& path, std::string_view message) {
    if (ok()) {
      error_ = absl::InvalidArgumentError(
          absl::StrCat("field '", path, "': ", std::string(message)));
    }
  }

  static std::string Join(const std::string& path, const std::string& key) {
    return path.empty() ? key : absl::StrCat(path, ".", key);
  }

 private:
  absl::Status error_ = absl::OkStatus();
};

std::string Index(const std::string& path, size_t i) {
  return absl::StrCat(path, "[", i, "]");
}

TrajectoryHistory ReadTrajectory(Reader& r, const Json& states,
                                 const std::string& path,
                                 const std::string& agent_id, double dt,
                                 int first_default) {
  TrajectoryHistory traj;
  traj.agent_id = agent_id;
  traj.dt = dt;
  for (size_t i = 0; i < states.size() && r.ok(); ++i) {
    const Json& s = states[i];
    const std::string p = Index(path, i);
    TimedState ts;
    ts.index = r.Integer(s, "t", p, first_default + static_cast<int>(i));
    ts.state.x = r.Number(s, "x", p, std::nullopt);
    ts.state.y = r.Number(s, "y", p, std::nullopt);
    ts.state.vx = r.Number(s, "vx", p, 0.0);
    ts.state.vy = r.Number(s, "vy", p, 0.0);
    const double derived = (ts.state.vx != 0.0 || ts.state.vy != 0.0)
                               ? std::atan2(ts.state.vy, ts.state.vx)
                               : 0.0;
    ts.state.heading = NormalizeAngle(r.Number(s, "heading", p, derived));
    traj.states.push_back(ts);
  }
  return traj;
}

}  // namespace

std::string SerializeScene(const Scene& scene) {
  Json root;
  root["schema_version"] = scene.schema_version;
  root["dt"] = scene.dt;
  root["horizon"] = scene.horizon;

  Json agents = Json::array();
  for (const SceneAgent& a : scene.agents) {
    agents.push_back(Json{
        {"id", a.id},
        {"type",
         Json{{"kind", std::string(AgentKindName(a.type.kind))},
              {"footprint_radius", a.type.footprint_radius},
              {"d0", a.type.d0}}},
        {"history", TrajectoryToJson(a.history)}});
  }
  root["agents"] = std::move(agents);

  Json polylines = Json::array();
  for (const TokenPolyline& p : scene.map.polylines) {
    Json points = Json::array();
    for (const Vec2& v : p.points) points.push_back(Json::array({v.x, v.y}));
    polylines.push_back(Json{{"id", p.id},
                             {"kind", std::string(PolylineKindName(p.kind))},
                             {"points", std::move(points)}});
  }
  Json successors = Json::object();
  for (const auto& [id, next] : scene.map.divider_successors) {
    successors[id] = next;
  }
  const Bounds& b = scene.map.bounds;
  root["map"] = Json{{"bounds", Json{{"min_x", b.min_x},
                                     {"min_y", b.min_y},
                                     {"max_x", b.max_x},
                                     {"max_y", b.max_y}}},
                     {"polylines", std::move(polylines)},
                     {"successors", std::move(successors)}};

  Json gt = Json::array();
  for (const auto& [id, traj] : scene.ground_truth) {
    gt.push_back(Json{{"agent_id", id}, {"states", TrajectoryToJson(traj)}});
  }
  root["ground_truth"] = std::move(gt);
  return root.dump(2) + "\n";
}

absl::StatusOr<Scene> ParseScene(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("scene is not valid JSON: ", e.what()));
  }

  Reader r;
  Scene scene;
  scene.schema_version =
      r.Integer(root, "schema_version", "", kSceneSchemaVersion);
  if (r.ok() && scene.schema_version != kSceneSchemaVersion) {
    r.Fail("schema_version",
           absl::StrCat("unsupported version ", scene.schema_version));
  }
  scene.dt = r.Number(root, "dt", "", std::nullopt);
  scene.horizon = r.Number(root, "horizon", "", 4.0);

  if (const Json* agents = r.Array(root, "agents", "", true)) {
    for (size_t i = 0; i < agents->size() && r.ok(); ++i) {
      const Json& a = (*agents)[i];
      const std::string path = Index("agents", i);
      SceneAgent agent;
      agent.id = r.String(a, "id", path, std::nullopt);
      if (const Json* type = r.Field(a, "type", path, false)) {
        const std::string tpath = Reader::Join(path, "type");
        const std::string kind_name = r.String(*type, "kind", tpath, "vehicle");
        const std::optional<AgentKind> kind = ParseAgentKind(kind_name);
        if (!kind.has_value()) {
          r.Fail(Reader::Join(tpath, "kind"),
                 absl::StrCat("unknown agent kind '", kind_name, "'"));
          break;
        }
        const AgentType defaults = AgentType::Default(*kind);
        agent.type.kind = *kind;
        agent.type.footprint_radius = r.Number(*type, "footprint_radius", tpath,
                                               defaults.footprint_radius);
        agent.type.d0 = r.Number(*type, "d0", tpath, defaults.d0);
      } else {
        agent.type = AgentType::Default(AgentKind::kVehicle);
      }
      if (const Json* history = r.Array(a, "history", path, true)) {
        agent.history = ReadTrajectory(r, *history,
                                       Reader::Join(path, "history"),
                                       agent.id, scene.dt, 0);
      }
      scene.agents.push_back(std::move(agent));
    }
  }

  if (const Json* map = r.Field(root, "map", "", false)) {
    if (const Json* polylines = r.Array(*map, "polylines", "map", false)) {
      for (size_t i = 0; i < polylines->size() && r.ok(); ++i) {
        const Json& p = (*polylines)[i];
        const std::string path = Index("map.polylines", i);
        TokenPolyline poly;
        poly.id = r.String(p, "id", path, std::nullopt);
        const std::string kind_name = r.String(p, "kind", path, std::nullopt);
        const std::optional<PolylineKind> kind = ParsePolylineKind(kind_name);
        if (r.ok() && !kind.has_value()) {
          r.Fail(Reader::Join(path, "kind"),
                 absl::StrCat("unknown polyline kind '", kind_name, "'"));
          break;
        }
        poly.kind = kind.value_or(PolylineKind::kBarrier);
        if (const Json* points = r.Array(p, "points", path, true)) {
          for (size_t k = 0; k < points->size(); ++k) {
            const Json& pt = (*points)[k];
            if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() ||
                !pt[1].is_number()) {
              r.Fail(Index(Reader::Join(path, "points"), k),
                     "expected [x, y]");
              break;
            }
            poly.points.push_back({pt[0].get<double>(), pt[1].get<double>()});
          }
        }
        scene.map.polylines.push_back(std::move(poly));
      }
    }
    if (const Json* successors = r.Field(*map, "successors", "map", false)) {
      if (!successors->is_object()) {
        r.Fail("map.successors", "expected an object");
      } else {
        for (const auto& [id, next] : successors->items()) {
          if (!next.is_array()) {
            r.Fail(absl::StrCat("map.successors.", id), "expected an array");
            break;
          }
          std::vector<std::string> ids;
          for (const Json& n : next) {
            if (!n.is_string()) {
              r.Fail(absl::StrCat("map.successors.", id), "expected strings");
              break;
            }
            ids.push_back(n.get<std::string>());
          }
          scene.map.divider_successors[id] = std::move(ids);
        }
      }
    } else {
      scene.map.divider_successors =
          SuccessorsFromSharedTokens(scene.map.polylines);
    }
    if (const Json* bounds = r.Field(*map, "bounds", "map", false)) {
      scene.map.bounds.min_x = r.Number(*bounds, "min_x", "map.bounds", std::nullopt);
      scene.map.bounds.min_y = r.Number(*bounds, "min_y", "map.bounds", std::nullopt);
      scene.map.bounds.max_x = r.Number(*bounds, "max_x", "map.bounds", std::nullopt);
      scene.map.bounds.max_y = r.Number(*bounds, "max_y", "map.bounds", std::nullopt);
    } else {
      scene.map.bounds = ComputeBounds(scene.map.polylines, 10.0);
    }
  }

  if (const Json* gt = r.Array(root, "ground_truth", "", false)) {
    for (size_t i = 0; i < gt->size() && r.ok(); ++i) {
      const Json& g = (*gt)[i];
      const std::string path = Index("ground_truth", i);
      const std::string id = r.String(g, "agent_id", path, std::nullopt);
      const Json* states = r.Array(g, "states", path, true);
      if (!r.ok()) break;
      if (scene.ground_truth.contains(id)) {
        r.Fail(path, absl::StrCat("duplicate ground truth for '", id, "'"));
        break;
      }
      const SceneAgent* agent = scene.FindAgent(id);
      const int next_index =
          agent != nullptr && !agent->history.states.empty()
              ? agent->history.last_index() + 1
              : 0;
      scene.ground_truth[id] = ReadTrajectory(
          r, *states, Reader::Join(path, "states"), id, scene.dt, next_index);
    }
  }

  if (!r.ok()) return r.error();

  const std::vector<Violation> violations = ValidateScene(scene);
  if (!violations.empty()) {
    std::vector<std::string> lines;
    for (const Violation& v : violations) {
      lines.push_back(absl::StrCat(v.entity, ": ", v.rule));
    }
    return absl::InvalidArgumentError(
        absl::StrCat("invalid scene: ", absl::StrJoin(lines, "; ")));
  }
  return scene;
}

absl::Status SaveScene(const Scene& scene, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(absl::StrCat("cannot write ", path));
  }
  out << SerializeScene(scene);
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<Scene> LoadScene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<Scene> scene = ParseScene(buffer.str());
  if (!scene.ok()) {
    return absl::Status(scene.status().code(),
                        absl::StrCat(path, ": ", scene.status().message()));
  }
  return scene;
}

}  // namespace semclique
