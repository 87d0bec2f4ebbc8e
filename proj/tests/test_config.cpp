#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chimera/config.hpp"
#include "chimera/error.hpp"

using namespace chimera;
using nlohmann::json;

namespace {

json two_pop_doc() {
    return json{{"network", {{"source", "two-population"}}}};
}

std::string error_text(const json& doc, const std::vector<std::string>& overrides = {}) {
    try {
        validate_config_json(doc, "", overrides);
    } catch (const ConfigError& e) {
        return e.what();
    }
    FAIL("expected a ConfigError");
    return {};
}

std::filesystem::path fresh_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("chimera_cfg_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("stage seeds are deterministic and pairwise distinct") {
    const SeedStage stages[] = {SeedStage::Network, SeedStage::Elbow, SeedStage::Cluster,
                                SeedStage::Uncertainty, SeedStage::Palette};
    for (SeedStage s : stages) CHECK(stage_seed(42, s) == stage_seed(42, s));
    for (SeedStage a : stages)
        for (SeedStage b : stages)
            if (a != b) CHECK(stage_seed(42, a) != stage_seed(42, b));
    CHECK(stage_seed(1, SeedStage::Cluster) != stage_seed(2, SeedStage::Cluster));
}

TEST_CASE("a minimal document resolves every default") {
    ValidatedConfig vc = validate_config_json(two_pop_doc(), "");
    const PipelineConfig& c = vc.cfg;

    CHECK(c.name == "run");
    CHECK(c.seed == 1);
    CHECK(c.workers == 0);
    CHECK(c.output_dir == "out/run");
    CHECK_FALSE(c.long_run);
    CHECK(c.kind == SystemKind::HRDiffusive);
    CHECK(c.observable == ObservableKind::Component0);

    // small-network variant of the neuron constants
    CHECK(c.hr.a == 1.0);
    CHECK(c.hr.b == 3.0);
    CHECK(c.hr.r == 0.017);
    CHECK(c.hr.x_rest == doctest::Approx(-0.5 * (1.0 + std::sqrt(5.0))));
    CHECK(c.hr.i_ext == 3.27);
    CHECK(c.hr.sigma == 0.0004);

    CHECK(vc.model.network.n_nodes() == 10);
    CHECK(c.integration.dt == 0.01);
    CHECK(c.integration.transient_time == 500.0);
    CHECK(c.integration.window_time == 500.0);
    CHECK(c.integration.sample_stride == 10);
    CHECK(c.n_samples == 5000);
    CHECK(c.vps.beta == 1.0);
    CHECK(c.vps.max_lag == 1250); // a quarter of the stored samples
    CHECK(c.vps.corr_mode == CorrMode::LinearValid);
    CHECK(c.vps.corr_normalization == CorrNormalization::Raw);

    CHECK(c.slice.axis1.node == 0);
    CHECK(c.slice.axis2.node == 1);
    CHECK(c.slice.min1 == -2.5);
    CHECK(c.slice.max1 == 2.5);
    CHECK(c.slice.nx == 100);
    CHECK(c.slice.ny == 100);
    CHECK(c.slice.base_state == std::vector<double>(30, -0.5));

    CHECK(c.clustering.use_elbow);
    CHECK(c.clustering.k_max == 8);
    CHECK(c.clustering.restarts == 3);
    CHECK(c.fractal.box_scales == std::vector<int>{1, 2, 4, 8, 16, 32});
    CHECK(c.fractal.uncertainty_enabled);
    CHECK(c.fractal.n_pairs == 4000);
    CHECK(c.fractal.epsilons.size() == 5); // h1 * {1,2,4,8,16} under extent/4
    CHECK(c.palette_seed == stage_seed(1, SeedStage::Palette));
}

TEST_CASE("phase-oscillator configs change the kind-dependent defaults") {
    json doc = two_pop_doc();
    doc["model"]["kind"] = "kuramoto";
    ValidatedConfig vc = validate_config_json(doc, "");
    const PipelineConfig& c = vc.cfg;
    CHECK(c.kur.sigma == 1.0);
    CHECK(c.kur.gamma == 0.025);
    CHECK(c.integration.transient_time == 200.0);
    CHECK(c.integration.window_time == 200.0);
    CHECK(c.n_samples == 2000);
    CHECK(c.slice.min1 == 0.0);
    CHECK(c.slice.max1 == doctest::Approx(2.0 * 3.14159265358979323846));
    CHECK(c.slice.base_state == std::vector<double>(10, 0.0));
    CHECK(c.observable == ObservableKind::SinPhase);
    CHECK(vc.normalized["model"].contains("kuramoto"));
    CHECK_FALSE(vc.normalized["model"].contains("hr"));
}

TEST_CASE("map configs count steps instead of time") {
    json doc = two_pop_doc();
    doc["model"]["kind"] = "henon";
    ValidatedConfig vc = validate_config_json(doc, "");
    const PipelineConfig& c = vc.cfg;
    CHECK(c.integration.transient_steps == 5000);
    CHECK(c.integration.window_steps == 2048);
    CHECK(c.integration.sample_stride == 1);
    CHECK(c.n_samples == 2048);
    CHECK(c.slice.min1 == -1.5);
    CHECK(c.slice.base_state == std::vector<double>(20, 0.0));
    CHECK(vc.normalized["integration"].contains("window_steps"));
    CHECK_FALSE(vc.normalized["integration"].contains("dt"));
}

TEST_CASE("all problems are reported together with their document paths") {
    json doc = two_pop_doc();
    doc["integration"]["dt"] = -1.0;
    doc["integation"] = json::object(); // typo: unknown key
    doc["clustering"]["k"] = 3;
    doc["clustering"]["elbow"] = {{"k_max", 5}};
    const std::string what = error_text(doc);
    CHECK(what.find("integration: dt must be > 0") != std::string::npos);
    CHECK(what.find("integation") != std::string::npos);
    CHECK(what.find("unknown key") != std::string::npos);
    CHECK(what.find("clustering") != std::string::npos);
    CHECK(what.find("not both") != std::string::npos);
}

TEST_CASE("type mismatches name the offending key") {
    json doc = two_pop_doc();
    doc["vps"]["beta"] = "strong";
    const std::string what = error_text(doc);
    CHECK(what.find("vps.beta") != std::string::npos);

    json doc2 = two_pop_doc();
    doc2["model"]["kind"] = "lorenz";
    const std::string what2 = error_text(doc2);
    CHECK(what2.find("model.kind") != std::string::npos);
    CHECK(what2.find("henon") != std::string::npos); // lists the allowed values
}

TEST_CASE("too-small analysis windows are rejected with the right key") {
    json doc = two_pop_doc();
    doc["integration"]["window_time"] = 1.0; // 100 steps / stride 10 = 10 samples
    CHECK(error_text(doc).find("integration.window_time") != std::string::npos);
    CHECK(error_text(doc).find("fewer than 32") != std::string::npos);

    json mdoc = two_pop_doc();
    mdoc["model"]["kind"] = "henon";
    mdoc["integration"]["window_steps"] = 31;
    CHECK(error_text(mdoc).find("integration.window_steps") != std::string::npos);
}

TEST_CASE("lag bounds depend on the correlation mode") {
    json doc = two_pop_doc();
    doc["vps"]["corr_mode"] = "circular";
    doc["vps"]["max_lag"] = 5000; // = stored samples
    CHECK(error_text(doc).find("max_lag must be below") != std::string::npos);
    doc["vps"]["max_lag"] = 4999;
    CHECK_NOTHROW(validate_config_json(doc, ""));

    doc["vps"]["corr_mode"] = "linear-valid";
    doc["vps"]["max_lag"] = 2500; // needs 2*max_lag < samples
    CHECK(error_text(doc).find("2*max_lag") != std::string::npos);
    doc["vps"]["max_lag"] = 2499;
    CHECK_NOTHROW(validate_config_json(doc, ""));
}

TEST_CASE("dotted-path overrides rewrite and extend the document") {
    json doc = two_pop_doc();
    ValidatedConfig vc = validate_config_json(
        doc, "",
        {"integration.dt=0.005", "name=other", "render.palette_seed=7",
         "network.intra_weight=0.9"});
    CHECK(vc.cfg.integration.dt == 0.005);
    CHECK(vc.cfg.name == "other"); // bare word parses as a string
    CHECK(vc.cfg.palette_seed == 7);
    CHECK(vc.cfg.network.intra_weight == 0.9);
    CHECK(vc.cfg.output_dir == "out/other");

    CHECK(error_text(doc, {"no_equals_sign"}).find("=") != std::string::npos);
    CHECK_FALSE(error_text(doc, {"name.sub=1"}).empty()); // descends into a scalar
}

TEST_CASE("one-based node numbering shifts to internal zero-based") {
    json doc = two_pop_doc();
    doc["slice"]["node_indexing"] = "1-based";
    doc["slice"]["axis1"] = {{"node", 1}};
    doc["slice"]["axis2"] = {{"node", 10}};
    ValidatedConfig vc = validate_config_json(doc, "");
    CHECK(vc.cfg.slice.axis1.node == 0);
    CHECK(vc.cfg.slice.axis2.node == 9);
    CHECK(vc.normalized["slice"]["node_indexing"] == "0-based");
    CHECK(vc.normalized["slice"]["axis2"]["node"] == 9);

    doc["slice"]["axis1"] = {{"node", 0}}; // invalid under 1-based numbering
    CHECK(error_text(doc).find("slice.axis1.node") != std::string::npos);
}

TEST_CASE("node and base-state shapes are checked against the network") {
    json doc = two_pop_doc();
    doc["slice"]["axis2"] = {{"node", 10}}; // two populations of 5 end at node 9
    CHECK(error_text(doc).find("slice.axis2.node") != std::string::npos);

    json doc2 = two_pop_doc();
    doc2["slice"]["base_state"] = std::vector<double>(29, 0.0);
    const std::string what = error_text(doc2);
    CHECK(what.find("slice.base_state") != std::string::npos);
    CHECK(what.find("30") != std::string::npos);

    json doc3 = two_pop_doc();
    doc3["slice"]["base_state"] = std::vector<double>(30, 0.25);
    ValidatedConfig vc = validate_config_json(doc3, "");
    CHECK(vc.cfg.slice.base_state == std::vector<double>(30, 0.25));
}

TEST_CASE("uncertainty epsilons must fit inside the first axis") {
    json doc = two_pop_doc();
    doc["fractal"]["uncertainty"]["epsilons"] = {0.1, 10.0}; // extent is 5
    const std::string what = error_text(doc);
    CHECK(what.find("fractal.uncertainty.epsilons") != std::string::npos);
    CHECK(what.find("exceeds") != std::string::npos);
}

TEST_CASE("fixed k and elbow are mutually exclusive modes") {
    json doc = two_pop_doc();
    doc["clustering"]["k"] = 4;
    ValidatedConfig vc = validate_config_json(doc, "");
    CHECK_FALSE(vc.cfg.clustering.use_elbow);
    CHECK(vc.cfg.clustering.k == 4);
    CHECK(vc.normalized["clustering"]["k"] == 4);
    CHECK_FALSE(vc.normalized["clustering"].contains("elbow"));
}

TEST_CASE("the digest ignores run labels but tracks the physics") {
    json doc = two_pop_doc();
    const uint64_t base = validate_config_json(doc, "").config_digest;

    json relabeled = doc;
    relabeled["name"] = "something-else";
    relabeled["workers"] = 7;
    relabeled["output_dir"] = "elsewhere";
    relabeled["long_run"] = true;
    CHECK(validate_config_json(relabeled, "").config_digest == base);

    json reseeded = doc;
    reseeded["seed"] = 2;
    CHECK(validate_config_json(reseeded, "").config_digest != base);

    json retimed = doc;
    retimed["integration"]["dt"] = 0.02;
    CHECK(validate_config_json(retimed, "").config_digest != base);
}

TEST_CASE("the normalized echo is a fixed point of validation") {
    json doc = two_pop_doc();
    doc["seed"] = 97;
    doc["model"]["kind"] = "kuramoto";
    doc["slice"]["resolution"] = {40, 30};
    ValidatedConfig first = validate_config_json(doc, "");
    ValidatedConfig second = validate_config_json(first.normalized, "");
    CHECK(second.normalized == first.normalized);
    CHECK(second.config_digest == first.config_digest);
}

TEST_CASE("two-population generation is tied to the master seed") {
    json doc = two_pop_doc();
    doc["seed"] = 11;
    ValidatedConfig a = validate_config_json(doc, "");
    ValidatedConfig b = validate_config_json(doc, "");
    CHECK(a.model.network.weights() == b.model.network.weights());
    doc["seed"] = 12;
    ValidatedConfig c = validate_config_json(doc, "");
    CHECK(a.model.network.weights() != c.model.network.weights());
}

TEST_CASE("network files resolve relative to the config directory") {
    auto dir = fresh_dir("netfile");
    {
        std::ofstream f(dir / "net.txt");
        f << "0 1\n1 0\n";
    }
    json doc;
    doc["network"] = {{"source", "file"}, {"path", "net.txt"}};
    ValidatedConfig vc = validate_config_json(doc, dir.string());
    CHECK(vc.model.network.n_nodes() == 2);
    CHECK(vc.cfg.network.path == (dir / "net.txt").string());

    json missing;
    missing["network"] = {{"source", "file"}, {"path", "nope.txt"}};
    const std::string what = error_text(missing);
    CHECK(what.find("network.path") != std::string::npos);
    CHECK(what.find("not found") != std::string::npos);

    // parse failures surface as configuration errors too
    {
        std::ofstream f(dir / "bad.txt");
        f << "0 x\nx 0\n";
    }
    json bad;
    bad["network"] = {{"source", "file"}, {"path", "bad.txt"}};
    CHECK(error_text(bad, {}).find("network.path") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("a file source requires a path") {
    json doc = json::object(); // source defaults to "file"
    CHECK(error_text(doc).find("path is required") != std::string::npos);
    CHECK(error_text(json::array()).find("object") != std::string::npos);
}

TEST_CASE("config files that cannot be read raise configuration errors") {
    CHECK_THROWS_AS(validate_config("/nonexistent_zzz/cfg.json"), ConfigError);
    auto dir = fresh_dir("badjson");
    {
        std::ofstream f(dir / "cfg.json");
        f << "{ not json";
    }
    try {
        validate_config((dir / "cfg.json").string());
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("not valid JSON") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("range bounds catch out-of-band scalars") {
    json doc = two_pop_doc();
    doc["workers"] = 100000;
    CHECK(error_text(doc).find("workers") != std::string::npos);

    json doc2 = two_pop_doc();
    doc2["network"]["pop_size"] = 1;
    CHECK(error_text(doc2).find("network.pop_size") != std::string::npos);

    json doc3 = two_pop_doc();
    doc3["model"]["henon"] = {{"sigma", 1.5}}; // map coupling lives in [0, 1]
    doc3["model"]["kind"] = "henon";
    CHECK(error_text(doc3).find("model.henon.sigma") != std::string::npos);

    json doc4 = two_pop_doc();
    doc4["clustering"]["restarts"] = 0;
    CHECK(error_text(doc4).find("clustering.restarts") != std::string::npos);
}

TEST_SUITE_END();
