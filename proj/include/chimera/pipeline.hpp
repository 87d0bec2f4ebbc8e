#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "chimera/basin.hpp"
#include "chimera/config.hpp"
#include "chimera/fractal.hpp"
#include "chimera/kmeans.hpp"

namespace chimera {

inline constexpr const char* kProvenanceFile = "provenance.json";
inline constexpr const char* kVpsFile = "vps.bin";
inline constexpr const char* kLabelsFile = "labels.csv";
inline constexpr const char* kBasinImage = "basin.ppm";
inline constexpr const char* kBoundaryImage = "boundary.ppm";
inline constexpr const char* kFractalFile = "fractal.json";
inline constexpr const char* kCheckpointDir = "checkpoints";

struct RunOptions {
    int workers = 0; // overrides cfg.workers when > 0
    std::function<bool(size_t done, size_t total)> progress;
    std::ostream* log = nullptr; // stage announcements land here when set
};

// cfg.workers (CLI override first), 0 meaning all hardware threads.
int resolve_workers(const PipelineConfig& cfg, int override_workers);

std::string output_path(const PipelineConfig& cfg, const char* filename);

uint64_t file_digest(const std::string& path);

// The completed fingerprint matrix from a previous run of the same
// configuration, if provenance.json and vps.bin agree with it.
std::optional<VpsMatrix> maybe_reuse_vps(const ValidatedConfig& vc);

// provenance.json skeleton written before the sweep starts; returns the
// document so the final write can keep started_at.
nlohmann::json write_initial_provenance(const ValidatedConfig& vc);

// Runs the checkpointed sweep into output_dir/vps.bin.
SweepResult run_sweep(const ValidatedConfig& vc, const RunOptions& opts);

struct ClusterOutcome {
    Clustering clustering;
    bool used_elbow = false;
    ElbowResult elbow; // meaningful only when used_elbow
};

ClusterOutcome cluster_vps(const ValidatedConfig& vc, const VpsMatrix& vm);

// Boundary box-counting plus the uncertainty-pair probe; geometric failures
// (no boundary, too few usable scales) are reported in the document instead
// of thrown.
nlohmann::json fractal_report(const ValidatedConfig& vc, const BasinMap& bm);

struct RunSummary {
    std::string output_dir;
    int k = 0;
    std::vector<size_t> cluster_sizes;
    size_t n_diverged = 0;
    size_t n_resumed = 0;
    bool sweep_reused = false;
    nlohmann::json fractal;
};

// Full pipeline: sweep (or reuse) -> cluster -> label grid -> fractal ->
// images -> final provenance.
RunSummary run_pipeline(const ValidatedConfig& vc, const RunOptions& opts);

} // namespace chimera
