#ifndef SEMCLIQUE_SCENE_IO_H_
#define SEMCLIQUE_SCENE_IO_H_

// JSON scene files. The layout is documented in docs/scene_format.md.

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "semclique/scene.h"

namespace semclique {

inline constexpr int kSceneSchemaVersion = 1;

// Deterministic: equal scenes serialize to identical bytes. Doubles are
// written in shortest round-trip form.
std::string SerializeScene(const Scene& scene);

// Applies defaults for optional fields, normalizes headings, then rejects
// any scene with ValidateScene violations. Errors name the offending field.
absl::StatusOr<Scene> ParseScene(std::string_view text);

absl::Status SaveScene(const Scene& scene, const std::string& path);
absl::StatusOr<Scene> LoadScene(const std::string& path);

}  // namespace semclique

#endif  // SEMCLIQUE_SCENE_IO_H_
