#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "chimera/basin.hpp"
#include "chimera/integrate.hpp"
#include "chimera/models.hpp"
#include "chimera/network.hpp"
#include "chimera/vps.hpp"

namespace chimera {

inline constexpr const char* kToolVersion = "1.0.0";

// Every seeded sub-operation draws from the master seed through a fixed tag.
enum class SeedStage : uint64_t {
    Network = 1,
    Elbow = 2,
    Cluster = 3,
    Uncertainty = 4,
    Palette = 5,
};
uint64_t stage_seed(uint64_t master, SeedStage stage);

struct NetworkConfig {
    enum class Source { File, TwoPopulation };
    Source source = Source::File;
    std::string path;      // resolved against the config file's directory
    NetworkFormat format = NetworkFormat::DenseMatrix;
    bool symmetrize = false;
    int pop_size = 5;
    double intra_weight = 0.6;
    double inter_weight = 0.4;
    bool drop_edge = true;
};

struct ClusteringConfig {
    bool use_elbow = true;
    int k = 0; // fixed k when use_elbow is false
    int k_max = 8;
    int restarts = 3;
    int max_iters = 100;
};

struct FractalConfig {
    std::vector<int> box_scales;    // empty = default_box_scales at run time
    bool uncertainty_enabled = true;
    int n_pairs = 4000;
    std::vector<double> epsilons;   // empty = default ladder
};

struct PipelineConfig {
    std::string name = "run";
    uint64_t seed = 1;
    int workers = 0; // 0 = all hardware threads
    std::string output_dir;
    bool long_run = false;
    NetworkConfig network;
    SystemKind kind = SystemKind::HRDiffusive;
    HRParams hr;
    ChemicalParams chem;
    KuramotoParams kur;
    HenonParams hen;
    IntegrationConfig integration;
    VpsConfig vps;
    SliceSpec slice;
    ClusteringConfig clustering;
    FractalConfig fractal;
    uint64_t palette_seed = 0;
    ObservableKind observable = ObservableKind::Component0;
    size_t n_samples = 0; // stored samples implied by the integration config
};

struct ValidatedConfig {
    PipelineConfig cfg;
    SystemModel model;          // network loaded/generated and parameters bound
    nlohmann::json normalized;  // full echo with every default resolved
    uint64_t config_digest = 0; // hash of the normalized document
};

// Parses, applies dotted-path overrides ("integration.dt=0.005"), fills
// defaults, and validates. All problems are reported together in a
// ConfigError, each prefixed with its document path.
ValidatedConfig validate_config(const std::string& path,
                                const std::vector<std::string>& overrides = {});

// Same, starting from an in-memory document; base_dir resolves relative paths.
ValidatedConfig validate_config_json(nlohmann::json doc, const std::string& base_dir,
                                     const std::vector<std::string>& overrides = {});

} // namespace chimera
