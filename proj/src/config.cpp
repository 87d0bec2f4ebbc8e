#include "chimera/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "chimera/error.hpp"
#include "chimera/fractal.hpp"
#include "chimera/hash.hpp"
#include "chimera/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace chimera {

uint64_t stage_seed(uint64_t master, SeedStage stage) {
    return derive_seed(master, static_cast<uint64_t>(stage));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_bound(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

// Schema walker: reads known keys (collecting range/type diagnostics with the
// dotted path of the offending key) and flags everything left over.
class Reader {
public:
    Reader(const json* j, std::string path, std::vector<std::string>* errs)
        : j_(j), path_(std::move(path)), errs_(errs) {
        if (j_ && !j_->is_object()) {
            errs_->push_back(label() + ": expected an object");
            j_ = nullptr;
        }
    }

    bool present(const char* key) const { return j_ && j_->contains(key); }

    Reader child(const char* key) {
        if (!present(key)) return Reader(nullptr, join(key), errs_);
        used_.insert(key);
        return Reader(&j_->at(key), join(key), errs_);
    }

    double num(const char* key, double def, double lo = -kInf, double hi = kInf) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_number()) {
            err(key, "expected a number");
            return def;
        }
        const double x = v->get<double>();
        if (!(x >= lo && x <= hi)) {
            err(key, "must be in [" + fmt_bound(lo) + ", " + fmt_bound(hi) + "]");
            return def;
        }
        return x;
    }

    long integer(const char* key, long def, long lo, long hi) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_number_integer() && !v->is_number_unsigned()) {
            err(key, "expected an integer");
            return def;
        }
        const long x = v->get<long>();
        if (x < lo || x > hi) {
            err(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            return def;
        }
        return x;
    }

    uint64_t u64(const char* key, uint64_t def) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<int64_t>() >= 0)) {
            err(key, "expected a non-negative integer");
            return def;
        }
        return v->get<uint64_t>();
    }

    bool boolean(const char* key, bool def) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_boolean()) {
            err(key, "expected true or false");
            return def;
        }
        return v->get<bool>();
    }

    std::string str(const char* key, std::string def) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_string()) {
            err(key, "expected a string");
            return def;
        }
        return v->get<std::string>();
    }

    std::string str_enum(const char* key, std::string def,
                         std::initializer_list<const char*> allowed) {
        const json* v = take(key);
        if (!v) return def;
        if (v->is_string()) {
            const auto s = v->get<std::string>();
            for (const char* a : allowed)
                if (s == a) return s;
        }
        std::string opts;
        for (const char* a : allowed) opts += (opts.empty() ? "" : ", ") + std::string(a);
        err(key, "must be one of: " + opts);
        return def;
    }

    std::array<double, 2> pair_num(const char* key, std::array<double, 2> def) {
        const json* v = take(key);
        if (!v) return def;
        if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
            err(key, "expected [min, max]");
            return def;
        }
        return {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }

    std::array<long, 2> pair_int(const char* key, std::array<long, 2> def, long lo, long hi) {
        const json* v = take(key);
        if (!v) return def;
        bool ok = v->is_array() && v->size() == 2;
        for (size_t i = 0; ok && i < 2; ++i)
            ok = (*v)[i].is_number_integer() || (*v)[i].is_number_unsigned();
        if (!ok) {
            err(key, "expected [int, int]");
            return def;
        }
        std::array<long, 2> out{(*v)[0].get<long>(), (*v)[1].get<long>()};
        for (long x : out)
            if (x < lo || x > hi) {
                err(key, "entries must be in [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
                return def;
            }
        return out;
    }

    std::vector<double> vec_num(const char* key) {
        const json* v = take(key);
        std::vector<double> out;
        if (!v) return out;
        if (!v->is_array()) {
            err(key, "expected an array of numbers");
            return out;
        }
        for (const auto& e : *v) {
            if (!e.is_number()) {
                err(key, "expected an array of numbers");
                return {};
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<int> vec_int(const char* key, int lo, int hi) {
        const json* v = take(key);
        std::vector<int> out;
        if (!v) return out;
        if (!v->is_array()) {
            err(key, "expected an array of integers");
            return out;
        }
        for (const auto& e : *v) {
            if (!e.is_number_integer() && !e.is_number_unsigned()) {
                err(key, "expected an array of integers");
                return {};
            }
            const long x = e.get<long>();
            if (x < lo || x > hi) {
                err(key, "entries must be in [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
                return {};
            }
            out.push_back(static_cast<int>(x));
        }
        return out;
    }

    void require(bool cond, const std::string& message) {
        if (!cond) errs_->push_back(path_.empty() ? message : path_ + ": " + message);
    }

    // Flags keys that no reader consumed.
    void finish() {
        if (!j_) return;
        for (const auto& item : j_->items())
            if (!used_.count(item.key())) errs_->push_back(join(item.key().c_str()) + ": unknown key");
    }

private:
    const json* take(const char* key) {
        if (!present(key)) return nullptr;
        used_.insert(key);
        return &j_->at(key);
    }
    std::string join(const char* key) const {
        return path_.empty() ? key : path_ + "." + key;
    }
    std::string label() const { return path_.empty() ? "config" : path_; }
    void err(const char* key, const std::string& what) {
        errs_->push_back(join(key) + ": " + what);
    }

    const json* j_;
    std::string path_;
    std::vector<std::string>* errs_;
    std::set<std::string> used_;
};

void apply_override(json& doc, const std::string& spec, std::vector<std::string>& errs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        errs.push_back("override '" + spec + "' must look like path.to.key=value");
        return;
    }
    const std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) {
            errs.push_back("override '" + spec + "': empty path segment");
            return;
        }
        parts.push_back(part);
    }
    json v;
    try {
        v = json::parse(value);
    } catch (const json::exception&) {
        v = value; // not valid JSON: keep as string
    }
    json* node = &doc;
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        json& next = (*node)[parts[i]];
        if (!next.is_object() && !next.is_null()) {
            errs.push_back("override '" + spec + "': " + parts[i] + " is not an object");
            return;
        }
        node = &next;
    }
    (*node)[parts.back()] = v;
}

void throw_if(std::vector<std::string>& errs) {
    if (errs.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
}

json normalized_echo(const PipelineConfig& cfg) {
    json norm;
    norm["name"] = cfg.name;
    norm["seed"] = cfg.seed;
    norm["workers"] = cfg.workers;
    norm["output_dir"] = cfg.output_dir;
    norm["long_run"] = cfg.long_run;

    json net;
    if (cfg.network.source == NetworkConfig::Source::File) {
        net["source"] = "file";
        net["path"] = cfg.network.path;
        net["format"] =
            cfg.network.format == NetworkFormat::DenseMatrix ? "dense" : "edge-list";
        net["symmetrize"] = cfg.network.symmetrize;
    } else {
        net["source"] = "two-population";
        net["pop_size"] = cfg.network.pop_size;
        net["intra_weight"] = cfg.network.intra_weight;
        net["inter_weight"] = cfg.network.inter_weight;
        net["drop_edge"] = cfg.network.drop_edge;
    }
    norm["network"] = net;

    json model;
    switch (cfg.kind) {
    case SystemKind::HRDiffusive: model["kind"] = "hr-diffusive"; break;
    case SystemKind::HRElectrochemical: model["kind"] = "hr-electrochemical"; break;
    case SystemKind::Kuramoto: model["kind"] = "kuramoto"; break;
    case SystemKind::Henon: model["kind"] = "henon"; break;
    }
    if (cfg.kind == SystemKind::HRDiffusive || cfg.kind == SystemKind::HRElectrochemical) {
        model["hr"] = {{"a", cfg.hr.a},     {"b", cfg.hr.b},         {"c", cfg.hr.c},
                       {"d", cfg.hr.d},     {"s", cfg.hr.s},         {"r", cfg.hr.r},
                       {"x_R", cfg.hr.x_rest}, {"I", cfg.hr.i_ext}, {"sigma", cfg.hr.sigma}};
    }
    if (cfg.kind == SystemKind::HRElectrochemical) {
        model["chemical"] = {{"alpha", cfg.chem.alpha},
                             {"V_syn", cfg.chem.v_syn},
                             {"theta_syn", cfg.chem.theta_syn},
                             {"lambda", cfg.chem.lambda}};
    }
    if (cfg.kind == SystemKind::Kuramoto)
        model["kuramoto"] = {{"sigma", cfg.kur.sigma}, {"gamma", cfg.kur.gamma}};
    if (cfg.kind == SystemKind::Henon)
        model["henon"] = {{"p", cfg.hen.p}, {"b", cfg.hen.b}, {"sigma", cfg.hen.sigma}};
    norm["model"] = model;

    json integ;
    if (cfg.kind == SystemKind::Henon) {
        integ["transient_steps"] = cfg.integration.transient_steps;
        integ["window_steps"] = cfg.integration.window_steps;
    } else {
        integ["dt"] = cfg.integration.dt;
        integ["transient_time"] = cfg.integration.transient_time;
        integ["window_time"] = cfg.integration.window_time;
    }
    integ["sample_stride"] = cfg.integration.sample_stride;
    norm["integration"] = integ;

    norm["vps"] = {
        {"beta", cfg.vps.beta},
        {"max_lag", cfg.vps.max_lag},
        {"corr_mode", cfg.vps.corr_mode == CorrMode::Circular ? "circular" : "linear-valid"},
        {"corr_normalization", cfg.vps.corr_normalization == CorrNormalization::Raw
                                   ? "raw"
                                   : "zero-mean-unit-norm"}};

    json slice;
    slice["node_indexing"] = "0-based";
    slice["axis1"] = {{"node", cfg.slice.axis1.node}, {"component", cfg.slice.axis1.component}};
    slice["axis2"] = {{"node", cfg.slice.axis2.node}, {"component", cfg.slice.axis2.component}};
    slice["range1"] = {cfg.slice.min1, cfg.slice.max1};
    slice["range2"] = {cfg.slice.min2, cfg.slice.max2};
    slice["resolution"] = {cfg.slice.nx, cfg.slice.ny};
    slice["base_state"] = cfg.slice.base_state;
    norm["slice"] = slice;

    json clus;
    if (cfg.clustering.use_elbow)
        clus["elbow"] = {{"k_max", cfg.clustering.k_max}};
    else
        clus["k"] = cfg.clustering.k;
    clus["restarts"] = cfg.clustering.restarts;
    clus["max_iters"] = cfg.clustering.max_iters;
    norm["clustering"] = clus;

    norm["fractal"] = {{"box_scales", cfg.fractal.box_scales},
                       {"uncertainty",
                        {{"enabled", cfg.fractal.uncertainty_enabled},
                         {"n_pairs", cfg.fractal.n_pairs},
                         {"epsilons", cfg.fractal.epsilons}}}};

    norm["render"] = {{"palette_seed", cfg.palette_seed}};
    return norm;
}

} // namespace

ValidatedConfig validate_config_json(json doc, const std::string& base_dir,
                                     const std::vector<std::string>& overrides) {
    std::vector<std::string> errs;
    for (const auto& o : overrides) apply_override(doc, o, errs);
    throw_if(errs);
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

    PipelineConfig cfg;
    Reader root(&doc, "", &errs);

    cfg.name = root.str("name", "run");
    cfg.seed = root.u64("seed", 1);
    cfg.workers = static_cast<int>(root.integer("workers", 0, 0, 4096));
    cfg.long_run = root.boolean("long_run", false);

    // The kind decides most defaults, so read the model section first.
    Reader model = root.child("model");
    const std::string kind_s =
        model.str_enum("kind", "hr-diffusive",
                       {"hr-diffusive", "hr-electrochemical", "kuramoto", "henon"});
    if (kind_s == "hr-diffusive") cfg.kind = SystemKind::HRDiffusive;
    else if (kind_s == "hr-electrochemical") cfg.kind = SystemKind::HRElectrochemical;
    else if (kind_s == "kuramoto") cfg.kind = SystemKind::Kuramoto;
    else cfg.kind = SystemKind::Henon;
    const bool is_map = cfg.kind == SystemKind::Henon;
    const int d = node_dim_for(cfg.kind);

    HRParams hr_def; // electrochemical (full-model) defaults
    if (cfg.kind == SystemKind::HRDiffusive) { // small-network defaults
        hr_def.r = 0.017;
        hr_def.x_rest = -0.5 * (1.0 + std::sqrt(5.0));
        hr_def.i_ext = 3.27;
        hr_def.sigma = 0.0004;
    }
    Reader hr = model.child("hr");
    cfg.hr.a = hr.num("a", hr_def.a);
    cfg.hr.b = hr.num("b", hr_def.b);
    cfg.hr.c = hr.num("c", hr_def.c);
    cfg.hr.d = hr.num("d", hr_def.d);
    cfg.hr.s = hr.num("s", hr_def.s);
    cfg.hr.r = hr.num("r", hr_def.r);
    hr.require(cfg.hr.r > 0, "r must be > 0");
    cfg.hr.x_rest = hr.num("x_R", hr_def.x_rest);
    cfg.hr.i_ext = hr.num("I", hr_def.i_ext);
    cfg.hr.sigma = hr.num("sigma", hr_def.sigma, 0.0);
    hr.finish();

    Reader chem = model.child("chemical");
    cfg.chem.alpha = chem.num("alpha", cfg.chem.alpha);
    cfg.chem.v_syn = chem.num("V_syn", cfg.chem.v_syn);
    cfg.chem.theta_syn = chem.num("theta_syn", cfg.chem.theta_syn);
    cfg.chem.lambda = chem.num("lambda", cfg.chem.lambda);
    chem.require(cfg.chem.lambda > 0, "lambda must be > 0");
    chem.finish();

    Reader kur = model.child("kuramoto");
    cfg.kur.sigma = kur.num("sigma", cfg.kur.sigma, 0.0);
    cfg.kur.gamma = kur.num("gamma", cfg.kur.gamma);
    kur.finish();

    Reader hen = model.child("henon");
    cfg.hen.p = hen.num("p", cfg.hen.p);
    cfg.hen.b = hen.num("b", cfg.hen.b);
    cfg.hen.sigma = hen.num("sigma", cfg.hen.sigma, 0.0, 1.0);
    hen.finish();
    model.finish();

    cfg.observable = default_observable(cfg.kind);

    Reader net = root.child("network");
    const std::string source = net.str_enum("source", "file", {"file", "two-population"});
    cfg.network.source = source == "file" ? NetworkConfig::Source::File
                                          : NetworkConfig::Source::TwoPopulation;
    cfg.network.path = net.str("path", "");
    const std::string format = net.str_enum("format", "dense", {"dense", "edge-list"});
    cfg.network.format =
        format == "dense" ? NetworkFormat::DenseMatrix : NetworkFormat::EdgeList;
    cfg.network.symmetrize = net.boolean("symmetrize", false);
    cfg.network.pop_size = static_cast<int>(net.integer("pop_size", 5, 2, 100000));
    cfg.network.intra_weight = net.num("intra_weight", 0.6);
    cfg.network.inter_weight = net.num("inter_weight", 0.4);
    net.require(cfg.network.intra_weight > 0, "intra_weight must be > 0");
    net.require(cfg.network.inter_weight > 0, "inter_weight must be > 0");
    cfg.network.drop_edge = net.boolean("drop_edge", true);
    if (cfg.network.source == NetworkConfig::Source::File)
        net.require(!cfg.network.path.empty(), "path is required when source is \"file\"");
    net.finish();

    IntegrationConfig idef;
    if (cfg.kind == SystemKind::Kuramoto) {
        idef.transient_time = 200.0;
        idef.window_time = 200.0;
    }
    if (is_map) idef.sample_stride = 1;
    Reader integ = root.child("integration");
    cfg.integration.dt = integ.num("dt", idef.dt);
    integ.require(cfg.integration.dt > 0, "dt must be > 0");
    cfg.integration.transient_time = integ.num("transient_time", idef.transient_time, 0.0);
    cfg.integration.window_time = integ.num("window_time", idef.window_time);
    integ.require(cfg.integration.window_time > 0, "window_time must be > 0");
    cfg.integration.transient_steps =
        integ.integer("transient_steps", idef.transient_steps, 0, 1L << 40);
    cfg.integration.window_steps =
        integ.integer("window_steps", idef.window_steps, 1, 1L << 40);
    cfg.integration.sample_stride =
        static_cast<int>(integ.integer("sample_stride", idef.sample_stride, 1, 1L << 30));

    long window_steps;
    const char* window_key;
    if (is_map) {
        window_steps = cfg.integration.window_steps;
        window_key = "integration.window_steps";
    } else {
        window_steps = std::llround(cfg.integration.window_time / cfg.integration.dt);
        window_key = "integration.window_time";
    }
    const long n_samples = window_steps / cfg.integration.sample_stride;
    if (n_samples < 32 && errs.empty())
        errs.push_back(std::string(window_key) +
                       ": window yields fewer than 32 stored samples (got " +
                       std::to_string(n_samples) + ")");
    cfg.n_samples = static_cast<size_t>(std::max(0L, n_samples));
    integ.finish();

    Reader vps = root.child("vps");
    cfg.vps.beta = vps.num("beta", 1.0, 0.0);
    cfg.vps.max_lag = static_cast<int>(vps.integer("max_lag", 0, 0, 1L << 30));
    const std::string mode = vps.str_enum("corr_mode", "linear-valid",
                                          {"circular", "linear-valid"});
    cfg.vps.corr_mode = mode == "circular" ? CorrMode::Circular : CorrMode::LinearValid;
    const std::string cnorm = vps.str_enum("corr_normalization", "raw",
                                           {"raw", "zero-mean-unit-norm"});
    cfg.vps.corr_normalization = cnorm == "raw" ? CorrNormalization::Raw
                                                : CorrNormalization::ZeroMeanUnitNorm;
    if (cfg.vps.max_lag == 0) cfg.vps.max_lag = default_max_lag(cfg.n_samples);
    if (cfg.n_samples > 0) {
        if (cfg.vps.corr_mode == CorrMode::Circular)
            vps.require(cfg.vps.max_lag < static_cast<long>(cfg.n_samples),
                        "max_lag must be below the stored sample count (" +
                            std::to_string(cfg.n_samples) + ")");
        else
            vps.require(2L * cfg.vps.max_lag < static_cast<long>(cfg.n_samples),
                        "stored sample count (" + std::to_string(cfg.n_samples) +
                            ") must exceed 2*max_lag in linear-valid mode");
    }
    vps.finish();

    double range_lo = -2.5, range_hi = 2.5, base_def = -0.5;
    if (cfg.kind == SystemKind::Kuramoto) {
        range_lo = 0.0;
        range_hi = 2.0 * std::numbers::pi;
        base_def = 0.0;
    } else if (cfg.kind == SystemKind::Henon) {
        range_lo = -1.5;
        range_hi = 1.5;
        base_def = 0.0;
    }
    Reader slice = root.child("slice");
    const std::string indexing =
        slice.str_enum("node_indexing", "0-based", {"0-based", "1-based"});
    const int node_shift = indexing == "1-based" ? 1 : 0;
    Reader ax1 = slice.child("axis1");
    cfg.slice.axis1.node = static_cast<int>(ax1.integer("node", node_shift, node_shift,
                                                        1000000)) - node_shift;
    cfg.slice.axis1.component =
        static_cast<int>(ax1.integer("component", 0, 0, d - 1));
    ax1.finish();
    Reader ax2 = slice.child("axis2");
    cfg.slice.axis2.node = static_cast<int>(ax2.integer("node", 1 + node_shift, node_shift,
                                                        1000000)) - node_shift;
    cfg.slice.axis2.component =
        static_cast<int>(ax2.integer("component", 0, 0, d - 1));
    ax2.finish();
    const auto r1 = slice.pair_num("range1", {range_lo, range_hi});
    const auto r2 = slice.pair_num("range2", {range_lo, range_hi});
    cfg.slice.min1 = r1[0];
    cfg.slice.max1 = r1[1];
    cfg.slice.min2 = r2[0];
    cfg.slice.max2 = r2[1];
    slice.require(cfg.slice.min1 < cfg.slice.max1, "range1 must satisfy min < max");
    slice.require(cfg.slice.min2 < cfg.slice.max2, "range2 must satisfy min < max");
    const auto res = slice.pair_int("resolution", {100, 100}, 2, 100000);
    cfg.slice.nx = static_cast<int>(res[0]);
    cfg.slice.ny = static_cast<int>(res[1]);
    slice.require(!(cfg.slice.axis1 == cfg.slice.axis2), "axis1 and axis2 must differ");
    const double base_value = slice.num("base_value", base_def);
    cfg.slice.base_state = slice.vec_num("base_state");
    slice.finish();

    Reader clus = root.child("clustering");
    const bool has_k = clus.present("k");
    const bool has_elbow = clus.present("elbow");
    if (has_k && has_elbow)
        errs.push_back("clustering: set either a fixed k or an elbow block, not both");
    cfg.clustering.use_elbow = !has_k;
    cfg.clustering.k = static_cast<int>(clus.integer("k", 2, 1, 4096));
    Reader elbow = clus.child("elbow");
    cfg.clustering.k_max = static_cast<int>(elbow.integer("k_max", 8, 3, 256));
    elbow.finish();
    cfg.clustering.restarts = static_cast<int>(clus.integer("restarts", 3, 1, 1000));
    cfg.clustering.max_iters = static_cast<int>(clus.integer("max_iters", 100, 1, 100000));
    clus.finish();

    Reader frac = root.child("fractal");
    cfg.fractal.box_scales = frac.vec_int("box_scales", 1, 1 << 20);
    Reader unc = frac.child("uncertainty");
    cfg.fractal.uncertainty_enabled = unc.boolean("enabled", true);
    cfg.fractal.n_pairs = static_cast<int>(unc.integer("n_pairs", 4000, 1000, 100000000));
    cfg.fractal.epsilons = unc.vec_num("epsilons");
    for (double e : cfg.fractal.epsilons)
        unc.require(e > 0, "epsilons must be positive");
    unc.finish();
    frac.finish();

    Reader rend = root.child("render");
    const bool has_palette = rend.present("palette_seed");
    cfg.palette_seed = rend.u64("palette_seed", 0);
    rend.finish();

    cfg.output_dir = root.str("output_dir", "out/" + cfg.name);
    root.finish();
    throw_if(errs);

    // Schema is sound; bind the network and the remaining shape checks.
    Network network = [&]() -> Network {
        try {
            if (cfg.network.source == NetworkConfig::Source::TwoPopulation)
                return generate_two_population(cfg.network.pop_size, cfg.network.intra_weight,
                                               cfg.network.inter_weight,
                                               stage_seed(cfg.seed, SeedStage::Network),
                                               cfg.network.drop_edge);
            fs::path p = cfg.network.path;
            if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
            cfg.network.path = p.string();
            if (!fs::exists(p))
                throw ConfigError("network.path: file not found: " + p.string());
            return load_network(p.string(), cfg.network.format, cfg.network.symmetrize);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("network.path: ") + e.what());
        }
    }();

    const int n_nodes = network.n_nodes();
    auto check_node = [&](int node, const char* which) {
        if (node < 0 || node >= n_nodes)
            errs.push_back(std::string(which) + ": node index out of range [0, " +
                           std::to_string(n_nodes - 1) + "] after indexing adjustment");
    };
    check_node(cfg.slice.axis1.node, "slice.axis1.node");
    check_node(cfg.slice.axis2.node, "slice.axis2.node");

    const size_t state_len = static_cast<size_t>(n_nodes) * d;
    if (cfg.slice.base_state.empty())
        cfg.slice.base_state.assign(state_len, base_value);
    else if (cfg.slice.base_state.size() != state_len)
        errs.push_back("slice.base_state: expected " + std::to_string(state_len) +
                       " values (" + std::to_string(n_nodes) + " nodes x " +
                       std::to_string(d) + " components)");

    const double extent1 = cfg.slice.max1 - cfg.slice.min1;
    for (double e : cfg.fractal.epsilons)
        if (e > extent1)
            errs.push_back("fractal.uncertainty.epsilons: " + std::to_string(e) +
                           " exceeds the axis1 extent " + std::to_string(extent1));
    throw_if(errs);

    if (cfg.fractal.box_scales.empty())
        cfg.fractal.box_scales = default_box_scales(cfg.slice.nx, cfg.slice.ny);
    if (cfg.fractal.epsilons.empty())
        cfg.fractal.epsilons = default_uncertainty_epsilons(cfg.slice);
    if (!has_palette) cfg.palette_seed = stage_seed(cfg.seed, SeedStage::Palette);

    validate_slice(cfg.slice, n_nodes, d);

    SystemModel sys = [&]() {
        switch (cfg.kind) {
        case SystemKind::HRDiffusive:
            return SystemModel::hr_diffusive(std::move(network), cfg.hr);
        case SystemKind::HRElectrochemical:
            return SystemModel::hr_electrochemical(std::move(network), cfg.hr, cfg.chem);
        case SystemKind::Kuramoto:
            return SystemModel::kuramoto(std::move(network), cfg.kur);
        case SystemKind::Henon:
        default:
            return SystemModel::henon(std::move(network), cfg.hen);
        }
    }();

    json normalized = normalized_echo(cfg);
    json digest_doc = normalized;
    for (const char* volatile_key : {"name", "workers", "output_dir", "long_run"})
        digest_doc.erase(volatile_key);
    const uint64_t digest = fnv1a64(digest_doc.dump());
    return ValidatedConfig{std::move(cfg), std::move(sys), std::move(normalized), digest};
}

ValidatedConfig validate_config(const std::string& path,
                                const std::vector<std::string>& overrides) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file: " + path);
    json doc;
    try {
        f >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + path + ": " + e.what());
    }
    return validate_config_json(std::move(doc), fs::path(path).parent_path().string(),
                                overrides);
}

} // namespace chimera
