#include "chimera/basin.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "chimera/error.hpp"
#include "chimera/hash.hpp"

namespace fs = std::filesystem;

namespace chimera {

void validate_slice(const SliceSpec& spec, int n_nodes, int node_dim) {
    auto check_axis = [&](const SliceAxis& a, const char* name) {
        if (a.node < 0 || a.node >= n_nodes || a.component < 0 || a.component >= node_dim)
            throw ArgumentError(std::string(name) + ": axis out of bounds");
    };
    check_axis(spec.axis1, "axis1");
    check_axis(spec.axis2, "axis2");
    if (spec.axis1 == spec.axis2) throw ArgumentError("slice axes must differ");
    if (!(spec.min1 < spec.max1) || !(spec.min2 < spec.max2))
        throw ArgumentError("slice ranges must satisfy min < max");
    if (spec.nx < 2 || spec.ny < 2) throw ArgumentError("slice resolution must be >= 2x2");
    if (spec.base_state.size() != static_cast<size_t>(n_nodes) * node_dim)
        throw ArgumentError("base_state length does not match the model");
    for (double v : spec.base_state)
        if (!std::isfinite(v)) throw ArgumentError("base_state must be finite");
}

SystemState slice_state(const SliceSpec& spec, int node_dim, int ix, int iy) {
    SystemState s = spec.base_state;
    s[static_cast<size_t>(spec.axis1.node) * node_dim + spec.axis1.component] =
        slice_coord1(spec, ix);
    s[static_cast<size_t>(spec.axis2.node) * node_dim + spec.axis2.component] =
        slice_coord2(spec, iy);
    return s;
}

std::vector<SystemState> sample_slice(const SliceSpec& spec, int node_dim) {
    const int n_nodes = static_cast<int>(spec.base_state.size()) / std::max(node_dim, 1);
    validate_slice(spec, n_nodes, node_dim);
    std::vector<SystemState> states(static_cast<size_t>(spec.nx) * spec.ny);
    for (int ix = 0; ix < spec.nx; ++ix)
        for (int iy = 0; iy < spec.ny; ++iy)
            states[slice_index(spec, ix, iy)] = slice_state(spec, node_dim, ix, iy);
    return states;
}

ObservableKind default_observable(SystemKind kind) {
    return kind == SystemKind::Kuramoto ? ObservableKind::SinPhase
                                        : ObservableKind::Component0;
}

uint64_t sweep_digest(const SystemModel& model, const SliceSpec& spec,
                      const IntegrationConfig& icfg, const VpsConfig& vcfg,
                      ObservableKind observable) {
    Hasher h;
    h.update(static_cast<int>(model.kind));
    h.update(model.network.n_nodes());
    h.update(model.network.directed() ? 1 : 0);
    for (double w : model.network.weights()) h.update(w);
    switch (model.kind) {
    case SystemKind::HRDiffusive:
    case SystemKind::HRElectrochemical:
        h.update(model.hr.a);
        h.update(model.hr.b);
        h.update(model.hr.c);
        h.update(model.hr.d);
        h.update(model.hr.s);
        h.update(model.hr.r);
        h.update(model.hr.x_rest);
        h.update(model.hr.i_ext);
        h.update(model.hr.sigma);
        if (model.kind == SystemKind::HRElectrochemical) {
            h.update(model.chem.alpha);
            h.update(model.chem.v_syn);
            h.update(model.chem.theta_syn);
            h.update(model.chem.lambda);
        }
        break;
    case SystemKind::Kuramoto:
        h.update(model.kur.sigma);
        h.update(model.kur.gamma);
        break;
    case SystemKind::Henon:
        h.update(model.hen.p);
        h.update(model.hen.b);
        h.update(model.hen.sigma);
        break;
    }
    h.update(spec.axis1.node);
    h.update(spec.axis1.component);
    h.update(spec.axis2.node);
    h.update(spec.axis2.component);
    h.update(spec.min1);
    h.update(spec.max1);
    h.update(spec.min2);
    h.update(spec.max2);
    h.update(spec.nx);
    h.update(spec.ny);
    for (double v : spec.base_state) h.update(v);
    h.update(icfg.dt);
    h.update(icfg.transient_time);
    h.update(icfg.window_time);
    h.update(static_cast<int64_t>(icfg.transient_steps));
    h.update(static_cast<int64_t>(icfg.window_steps));
    h.update(icfg.sample_stride);
    h.update(vcfg.beta);
    h.update(vcfg.max_lag);
    h.update(static_cast<int>(vcfg.corr_mode));
    h.update(static_cast<int>(vcfg.corr_normalization));
    h.update(static_cast<int>(observable));
    return h.digest();
}

namespace {

struct Checkpoint {
    bool enabled = false;
    fs::path dir, meta_path, bits_path, data_path;
    std::fstream data;
    size_t rows = 0, len = 0;

    static constexpr const char* kMeta = "meta.json";
    static constexpr const char* kBits = "done.bits";
    static constexpr const char* kData = "vps.partial.bin";

    std::streamoff row_offset(size_t r) const {
        return static_cast<std::streamoff>(kVpsHeaderSize + r * len * sizeof(double));
    }
};

// Validates or creates the checkpoint trio; loads finished rows into vm.
size_t open_checkpoint(Checkpoint& ck, const std::string& dir_str, uint64_t digest,
                       const SliceSpec& spec, VpsMatrix& vm, std::vector<uint8_t>& done) {
    ck.enabled = true;
    ck.dir = dir_str;
    ck.meta_path = ck.dir / Checkpoint::kMeta;
    ck.bits_path = ck.dir / Checkpoint::kBits;
    ck.data_path = ck.dir / Checkpoint::kData;
    ck.rows = vm.rows;
    ck.len = vm.len;
    fs::create_directories(ck.dir);

    size_t resumed = 0;
    if (fs::exists(ck.meta_path)) {
        nlohmann::json meta;
        try {
            std::ifstream mf(ck.meta_path);
            mf >> meta;
        } catch (const std::exception& e) {
            throw ValidationError("unreadable checkpoint meta " + ck.meta_path.string() +
                                  ": " + e.what());
        }
        if (meta.value("digest", std::string{}) != hex64(digest) ||
            meta.value("rows", uint64_t{0}) != vm.rows ||
            meta.value("len", uint64_t{0}) != vm.len)
            throw ValidationError("checkpoint in " + ck.dir.string() +
                                  " was made with a different configuration; remove it or "
                                  "point checkpoint_dir elsewhere");
        std::ifstream bf(ck.bits_path, std::ios::binary);
        std::vector<unsigned char> bits((vm.rows + 7) / 8, 0);
        if (bf) bf.read(reinterpret_cast<char*>(bits.data()),
                        static_cast<std::streamsize>(bits.size()));
        std::ifstream df(ck.data_path, std::ios::binary);
        if (!df) throw ValidationError("checkpoint data file missing in " + ck.dir.string());
        for (size_t r = 0; r < vm.rows; ++r) {
            if (!(bits[r / 8] >> (r % 8) & 1)) continue;
            df.seekg(ck.row_offset(r));
            df.read(reinterpret_cast<char*>(vm.row(r).data()),
                    static_cast<std::streamsize>(vm.len * sizeof(double)));
            if (!df)
                throw ValidationError("checkpoint data file truncated in " + ck.dir.string());
            done[r] = 1;
            ++resumed;
        }
    } else {
        std::ofstream df(ck.data_path, std::ios::binary | std::ios::trunc);
        if (!df) throw IoError("cannot create " + ck.data_path.string());
        const uint32_t rows32 = vm.rows, len32 = vm.len;
        df.write(kVpsMagic, 4);
        df.write(reinterpret_cast<const char*>(&rows32), 4);
        df.write(reinterpret_cast<const char*>(&len32), 4);
        if (!df) throw IoError("cannot write " + ck.data_path.string());
        df.close();
        fs::resize_file(ck.data_path,
                        kVpsHeaderSize + static_cast<uintmax_t>(vm.rows) * vm.len * 8);
        std::ofstream bf(ck.bits_path, std::ios::binary | std::ios::trunc);
        std::vector<char> bits((vm.rows + 7) / 8, 0);
        bf.write(bits.data(), static_cast<std::streamsize>(bits.size()));
        if (!bf) throw IoError("cannot write " + ck.bits_path.string());
        nlohmann::json meta{{"digest", hex64(digest)},
                            {"rows", vm.rows},
                            {"len", vm.len},
                            {"nx", spec.nx},
                            {"ny", spec.ny}};
        std::ofstream mf(ck.meta_path);
        mf << meta.dump(2) << "\n";
        if (!mf) throw IoError("cannot write " + ck.meta_path.string());
    }

    ck.data.open(ck.data_path, std::ios::in | std::ios::out | std::ios::binary);
    if (!ck.data) throw IoError("cannot open " + ck.data_path.string());
    return resumed;
}

// Writes the given rows, then atomically replaces the done bitmap.
void flush_checkpoint(Checkpoint& ck, const VpsMatrix& vm, const std::vector<size_t>& rows,
                      const std::vector<uint8_t>& done) {
    if (!ck.enabled || rows.empty()) return;
    for (size_t r : rows) {
        ck.data.seekp(ck.row_offset(r));
        ck.data.write(reinterpret_cast<const char*>(vm.row(r).data()),
                      static_cast<std::streamsize>(ck.len * sizeof(double)));
    }
    ck.data.flush();
    if (!ck.data) throw IoError("checkpoint write failed in " + ck.dir.string());
    std::vector<unsigned char> bits((done.size() + 7) / 8, 0);
    for (size_t r = 0; r < done.size(); ++r)
        if (done[r]) bits[r / 8] |= static_cast<unsigned char>(1u << (r % 8));
    const fs::path tmp = ck.bits_path.string() + ".tmp";
    {
        std::ofstream bf(tmp, std::ios::binary | std::ios::trunc);
        bf.write(reinterpret_cast<const char*>(bits.data()),
                 static_cast<std::streamsize>(bits.size()));
        if (!bf) throw IoError("checkpoint bitmap write failed in " + ck.dir.string());
    }
    fs::rename(tmp, ck.bits_path);
}

} // namespace

SweepResult sweep(const SystemModel& model, const SliceSpec& spec,
                  const IntegrationConfig& icfg, const VpsConfig& vcfg,
                  ObservableKind observable, const SweepOptions& opts) {
    const int n_nodes = model.network.n_nodes();
    validate_slice(spec, n_nodes, model.node_dim);
    const size_t total = static_cast<size_t>(spec.nx) * spec.ny;
    const size_t len = static_cast<size_t>(n_nodes) * (n_nodes - 1);

    VpsMatrix vm;
    vm.rows = static_cast<uint32_t>(total);
    vm.len = static_cast<uint32_t>(len);
    vm.data.assign(total * len, 0.0);

    std::vector<uint8_t> done(total, 0); // owned by the orchestrator thread
    Checkpoint ck;
    size_t resumed = 0;
    if (!opts.checkpoint_dir.empty()) {
        const uint64_t digest = sweep_digest(model, spec, icfg, vcfg, observable);
        resumed = open_checkpoint(ck, opts.checkpoint_dir, digest, spec, vm, done);
    }

    std::atomic<size_t> next{0};
    std::atomic<bool> cancel{false};
    std::mutex mx;
    std::condition_variable cv;
    std::vector<size_t> fresh;      // completed, not yet seen by the orchestrator
    size_t done_count = resumed;    // under mx
    std::exception_ptr worker_error; // under mx

    const std::vector<uint8_t> skip = done; // immutable snapshot for the workers
    auto work = [&] {
        for (;;) {
            if (cancel.load(std::memory_order_relaxed)) return;
            const size_t r = next.fetch_add(1, std::memory_order_relaxed);
            if (r >= total) return;
            if (skip[r]) continue;
            const int ix = static_cast<int>(r / spec.ny);
            const int iy = static_cast<int>(r % spec.ny);
            try {
                const SystemState init = slice_state(spec, model.node_dim, ix, iy);
                const TrajectorySet traj = model.is_map() ? iterate_map(model, init, icfg)
                                                          : integrate_ode(model, init, icfg);
                const VpsVector v = build_vps(traj, vcfg, observable);
                std::copy(v.entries.begin(), v.entries.end(), vm.row(r).begin());
            } catch (const DivergenceError&) {
                auto row = vm.row(r);
                std::fill(row.begin(), row.end(), std::numeric_limits<double>::infinity());
            } catch (const DegenerateSignalError&) {
                auto row = vm.row(r);
                std::fill(row.begin(), row.end(), std::numeric_limits<double>::infinity());
            } catch (...) {
                std::lock_guard lk(mx);
                if (!worker_error) worker_error = std::current_exception();
                cancel.store(true, std::memory_order_relaxed);
                cv.notify_all();
                return;
            }
            {
                std::lock_guard lk(mx);
                fresh.push_back(r);
                ++done_count;
            }
            cv.notify_all();
        }
    };

    const int n_workers = std::max(1, opts.workers);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);

    auto join_all = [&] {
        for (auto& t : pool)
            if (t.joinable()) t.join();
    };
    std::vector<size_t> pending; // completed rows not yet checkpointed
    bool user_cancel = false;
    std::exception_ptr error;
    try {
        for (;;) {
            size_t dc;
            {
                std::unique_lock lk(mx);
                cv.wait_for(lk, std::chrono::milliseconds(200));
                pending.insert(pending.end(), fresh.begin(), fresh.end());
                fresh.clear();
                dc = done_count;
                error = worker_error;
            }
            for (size_t r : pending) done[r] = 1;
            if (ck.enabled && pending.size() >= opts.checkpoint_interval) {
                flush_checkpoint(ck, vm, pending, done);
                pending.clear();
            }
            if (error) break;
            if (opts.progress && !opts.progress(dc, total)) {
                user_cancel = true;
                cancel.store(true, std::memory_order_relaxed);
                break;
            }
            if (dc >= total) break;
        }
    } catch (...) {
        cancel.store(true, std::memory_order_relaxed);
        join_all();
        throw;
    }
    join_all();
    {
        std::lock_guard lk(mx);
        pending.insert(pending.end(), fresh.begin(), fresh.end());
        fresh.clear();
        if (!error) error = worker_error;
    }
    for (size_t r : pending) done[r] = 1;
    if (ck.enabled) {
        flush_checkpoint(ck, vm, pending, done);
        pending.clear();
    }
    if (error) std::rethrow_exception(error);
    if (user_cancel)
        throw SweepInterrupted("sweep stopped on request; progress saved in " +
                               opts.checkpoint_dir);

    if (ck.enabled) {
        ck.data.close();
        if (!opts.final_vps_path.empty()) {
            std::error_code ec;
            fs::rename(ck.data_path, opts.final_vps_path, ec);
            if (ec) { // cross-device move: rewrite instead
                save_vps_matrix(opts.final_vps_path, vm);
                fs::remove(ck.data_path);
            }
            fs::remove(ck.bits_path);
            fs::remove(ck.meta_path);
            std::error_code ignore;
            fs::remove(ck.dir, ignore); // only if now empty
        }
    } else if (!opts.final_vps_path.empty()) {
        save_vps_matrix(opts.final_vps_path, vm);
    }

    SweepResult res;
    res.n_resumed = resumed;
    for (size_t r = 0; r < total; ++r)
        if (is_sentinel_row(vm.row(r))) ++res.n_diverged;
    res.matrix = std::move(vm);
    return res;
}

BasinMap build_basin_map(const SliceSpec& slice, const Clustering& cl) {
    const size_t total = static_cast<size_t>(slice.nx) * slice.ny;
    if (cl.labels.size() != total)
        throw ArgumentError("build_basin_map: label count does not match the slice");
    BasinMap map;
    map.nx = slice.nx;
    map.ny = slice.ny;
    map.k = cl.k;
    map.label_grid.resize(total);
    for (int ix = 0; ix < slice.nx; ++ix)
        for (int iy = 0; iy < slice.ny; ++iy)
            map.label_grid[static_cast<size_t>(iy) * slice.nx + ix] =
                cl.labels[slice_index(slice, ix, iy)];
    return map;
}

void save_label_grid(const std::string& path, const BasinMap& map) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    for (int iy = 0; iy < map.ny; ++iy) {
        for (int ix = 0; ix < map.nx; ++ix) f << (ix ? "," : "") << map.at(ix, iy);
        f << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

BasinMap load_label_grid(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    BasinMap map;
    std::string line;
    long line_no = 0;
    int max_label = -1;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int nx = 0;
        while (std::getline(ss, cell, ',')) {
            size_t pos = 0;
            int v;
            try {
                v = std::stoi(cell, &pos);
            } catch (const std::exception&) {
                throw ParseError("bad label '" + cell + "'", line_no);
            }
            if (pos != cell.size()) throw ParseError("bad label '" + cell + "'", line_no);
            if (v < -1) throw ParseError("labels must be >= -1", line_no);
            map.label_grid.push_back(v);
            max_label = std::max(max_label, v);
            ++nx;
        }
        if (map.nx == 0)
            map.nx = nx;
        else if (nx != map.nx)
            throw ParseError("ragged label grid", line_no);
        ++map.ny;
    }
    if (map.nx < 1 || map.ny < 1) throw ParseError("empty label grid: " + path, 0);
    map.k = max_label + 1;
    return map;
}

} // namespace chimera
