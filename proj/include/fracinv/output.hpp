#pragma once

#include "fracinv/experiment.hpp"

#include <span>
#include <string>

namespace fracinv {

/// Writes per-run reconstruction and trace CSVs plus the two overlay SVG plots
/// (truth vs reconstruction per delta, for q and for g). Files are emitted
/// with fixed formatting so identical runs produce byte-identical artifacts.
RunArtifacts emit_outputs(const std::string& out_dir, const std::string& stub,
                          const GridSpec& grid, const RegionIndex& regions,
                          const Medium& truth, std::span<const RunOutput> runs);

} // namespace fracinv
