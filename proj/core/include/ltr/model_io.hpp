#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "ltr/config.hpp"
#include "ltr/gbdt.hpp"
#include "ltr/linear.hpp"
#include "ltr/metrics.hpp"
#include "ltr/ranknet.hpp"

namespace ltr {

enum class ModelKind { tree_ensemble, linear, ranknet };

// A trained scorer plus the provenance needed to apply it safely: the
// training config echo and the fingerprint of the feature registry it was
// trained against. Exactly one payload field is meaningful, per `kind`.
struct SavedModel {
  ModelKind kind = ModelKind::tree_ensemble;
  std::string algo;       // lambdamart, rf, ranknet, or a linear variant name
  std::string objective;  // label the model was trained on
  std::uint64_t registry_fingerprint = 0;
  KeyValueConfig config;

  TreeEnsemble ensemble;
  LinearModel linear;
  RankNetModel ranknet;

  // Copies the payload into a standalone scoring closure.
  ScoreFn scorer() const;
  // Throws DataError when the registry does not match the training one.
  void verify_registry(const FeatureRegistry& registry) const;
};

// Versioned line-oriented text format. Reals carry 9 significant digits;
// trees are written as pre-order split/leaf lines. Writing is deterministic
// for identical models.
void save_model(const SavedModel& model, const std::filesystem::path& path);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace ltr
