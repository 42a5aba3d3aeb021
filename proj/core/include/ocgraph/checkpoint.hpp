#pragma once

#include <string>

#include "ocgraph/train.hpp"

namespace ocgraph {

// Versioned JSON checkpoint of a trained model: layer specs, weights
// (row-major), sphere center and radius, training configuration, and the best
// validation AUC.  Doubles are written in shortest round-trip form, so within
// one build save → load → save reproduces the file byte for byte.  The
// training history is a run diagnostic and is not persisted.
void save_model(const OcgnnModel& model, const std::string& path);

// Throws CorruptFileError for unreadable, truncated, or inconsistent files
// (bad version, shape mismatches, non-finite values) and ConfigError for a
// stored configuration that violates its own invariants.
OcgnnModel load_model(const std::string& path);

}  // namespace ocgraph
