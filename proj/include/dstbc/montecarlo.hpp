#pragma once

// Seeded Monte Carlo sweeps: BER/BLER versus SNR for the coherent,
// differential, and clustered-baseline schemes, plus diversity-slope
// estimation and curve-gap measurement. SNR in dB maps to the total power
// budget P = noise_variance * 10^(dB/10). Every frame draws its own seed
// from (master_seed, point index, frame index), so results are bit-identical
// no matter how frames are spread over workers; frames are processed in
// fixed batches and a point stops at the first batch boundary where the
// error target is met.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "builtin_codes.hpp"
#include "channel.hpp"
#include "decoder.hpp"
#include "differential.hpp"
#include "schedule.hpp"
#include "transceiver.hpp"

namespace dstbc {

enum class Scheme { coherent, differential, clustered_baseline };

inline std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::coherent: return "coherent";
        case Scheme::differential: return "differential";
        case Scheme::clustered_baseline: return "clustered_baseline";
    }
    return "coherent";
}

inline bool scheme_from_name(const std::string& name, Scheme& out) {
    if (name == "coherent") out = Scheme::coherent;
    else if (name == "differential") out = Scheme::differential;
    else if (name == "clustered_baseline") out = Scheme::clustered_baseline;
    else return false;
    return true;
}

inline Scheme parse_scheme(const std::string& name) {
    Scheme s{};
    if (!scheme_from_name(name, s)) throw std::invalid_argument("unknown scheme: " + name);
    return s;
}

struct ExperimentConfig {
    Scheme scheme = Scheme::coherent;
    std::string code_id = "fourgroup_r4";
    std::size_t relays = 0;  // 0: taken from the code
    std::size_t fft_size = 64;
    std::size_t cp_len = 16;
    std::size_t tau_max = 15;
    std::vector<double> snr_grid_db;
    std::size_t max_trials = 200000;
    std::size_t target_errors = 200;
    std::uint64_t master_seed = 1;
    double pi1 = 0.5;
    double pi2 = 0.0;  // 0: 1/(2R) default
    double noise_variance = 1.0;
    std::size_t workers = 1;
    std::size_t diff_data_frames = 2;
    bool allow_cp_violation = false;
    std::string output_path;
};

inline constexpr std::size_t sweep_batch_frames = 256;

// Builds the code an experiment runs on; the baseline scheme always pairs
// relays into an Alamouti cluster regardless of code_id.
inline ConjugateLinearCode experiment_code(const ExperimentConfig& cfg) {
    if (cfg.scheme == Scheme::clustered_baseline) return builtin_clustered_alamouti(cfg.relays ? cfg.relays : 4);
    ConjugateLinearCode code;
    if (!find_builtin_code(cfg.code_id, code, cfg.relays))
        throw std::invalid_argument("unknown code id: " + cfg.code_id);
    return code;
}

inline std::vector<std::string> validate_experiment(const ExperimentConfig& cfg) {
    std::vector<std::string> violations;
    auto power_of_two = [](std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; };
    if (!power_of_two(cfg.fft_size)) violations.push_back("fft_size must be a power of two, at least 2");
    if (cfg.cp_len > cfg.fft_size) violations.push_back("cp_len cannot exceed fft_size");
    if (cfg.tau_max > cfg.cp_len && !cfg.allow_cp_violation)
        violations.push_back("tau_max exceeds cp_len; set allow_cp_violation to simulate past the boundary");
    if (cfg.snr_grid_db.empty()) violations.push_back("snr_grid_db is empty");
    if (cfg.max_trials == 0) violations.push_back("max_trials must be positive");
    if (cfg.target_errors == 0) violations.push_back("target_errors must be positive");
    if (!(cfg.pi1 > 0.0) || cfg.pi1 >= 1.0) violations.push_back("pi1 must lie in (0, 1)");
    if (cfg.pi2 < 0.0) violations.push_back("pi2 must be positive (or 0 for the 1/(2R) default)");
    if (cfg.noise_variance < 0.0) violations.push_back("noise_variance cannot be negative");
    if (cfg.workers == 0) violations.push_back("workers must be positive");
    if (cfg.scheme == Scheme::differential) {
        if (cfg.diff_data_frames == 0) violations.push_back("diff_data_frames must be positive");
        if (cfg.code_id != "fourgroup_r4")
            violations.push_back("the differential scheme is defined for the fourgroup_r4 code");
    }
    try {
        const ConjugateLinearCode code = experiment_code(cfg);
        if (cfg.relays && code.relays != cfg.relays)
            violations.push_back("relays does not match the selected code");
    } catch (const std::exception& e) {
        violations.push_back(e.what());
    }
    return violations;
}

struct SweepPoint {
    double snr_db = 0.0;
    std::size_t trials = 0;
    std::size_t bit_errors = 0;
    std::size_t block_errors = 0;
    std::size_t total_bits = 0;
    std::size_t total_blocks = 0;
    double ber = 0.0;
    double bler = 0.0;
    double wall_seconds = 0.0;
};

struct SweepResult {
    ExperimentConfig config;
    std::string code_hash;
    double rotation_deg = 0.0;
    std::vector<SweepPoint> points;
    double wall_seconds = 0.0;
};

inline void write_sweep_outputs(const SweepResult& result, const std::string& path);

namespace detail {

struct FrameTally {
    std::size_t frames = 0, bits = 0, bit_errors = 0, blocks = 0, block_errors = 0;
    FrameTally& operator+=(const FrameTally& o) {
        frames += o.frames;
        bits += o.bits;
        bit_errors += o.bit_errors;
        blocks += o.blocks;
        block_errors += o.block_errors;
        return *this;
    }
};

struct SweepContext {
    ExperimentConfig cfg;
    ConjugateLinearCode code;
    RelaySchedule sched;
    GroupedConstellation cons;       // coherent paths
    DifferentialCodebook diffbook;   // differential path
    double rotation_deg = 0.0;
};

inline SweepContext build_sweep_context(const ExperimentConfig& cfg) {
    SweepContext ctx;
    ctx.cfg = cfg;
    ctx.code = experiment_code(cfg);
    ctx.sched = derive_relay_schedule(ctx.code);
    if (cfg.scheme == Scheme::differential) {
        ctx.diffbook = build_fourgroup_diff_r4();
        const CommutationReport rep = check_commutation(ctx.diffbook, ctx.code);
        if (!rep.pass) throw std::runtime_error("differential codebook does not commute with the code");
        if ((ctx.diffbook.radix() & (ctx.diffbook.radix() - 1)) != 0)
            throw std::runtime_error("differential codebook radix must be a power of two");
    } else {
        ctx.cons = constellation_for(ctx.code);
        if (ctx.code.name == "fourgroup_r4") ctx.rotation_deg = optimal_rotation_deg();
    }
    return ctx;
}

inline PowerConfig point_power(const ExperimentConfig& cfg, const ConjugateLinearCode& code, double snr_db) {
    PowerConfig power;
    const double nv = cfg.noise_variance > 0.0 ? cfg.noise_variance : 1.0;
    power.total_power = nv * std::pow(10.0, snr_db / 10.0);
    power.pi1 = cfg.pi1;
    power.pi2 = cfg.pi2 > 0.0 ? cfg.pi2 : 0.5 / static_cast<double>(code.relays);
    require_valid(power);
    return power;
}

inline std::size_t bit_diff(std::size_t a, std::size_t b) {
    const auto g = gray_encode(static_cast<std::uint32_t>(a)) ^ gray_encode(static_cast<std::uint32_t>(b));
    return static_cast<std::size_t>(std::popcount(g));
}

inline FrameTally run_coherent_frame(const SweepContext& ctx, const PowerConfig& power, std::uint64_t seed) {
    const auto& cfg = ctx.cfg;
    const std::size_t fft = cfg.fft_size;
    Rng rng(seed);
    const ChannelRealization ch = sample_channel(rng, ctx.code.relays, cfg.tau_max);

    std::vector<std::vector<std::size_t>> truth(fft);
    std::vector<cvec> symbols(fft);
    for (std::size_t k = 0; k < fft; ++k) {
        truth[k].resize(ctx.cons.group_count());
        for (std::size_t g = 0; g < ctx.cons.group_count(); ++g)
            truth[k][g] = rng.uniform_int(ctx.cons.points[g].size() - 1);
        symbols[k] = ctx.cons.assemble(truth[k]);
    }

    const FrameOutput out = transmit_frame(symbols, ctx.sched, ch, power, fft, cfg.cp_len, rng, cfg.noise_variance);

    const double model_nv = cfg.noise_variance > 0.0 ? cfg.noise_variance : 1.0;
    const auto sys0 = build_subcarrier_model(ch, ctx.sched, power, fft, 0, model_nv);
    const CMat w = cfg.noise_variance > 0.0 ? whitener(sys0.noise_cov) : CMat::identity(ctx.code.slots);
    CoherentDecoder dec(ctx.code, ctx.cons, w, sys0.signal_scale);

    FrameTally tally;
    tally.frames = 1;
    for (std::size_t k = 0; k < fft; ++k) {
        const auto sys = build_subcarrier_model(ch, ctx.sched, power, fft, k, model_nv);
        dec.set_channel(sys.h_k);
        const auto& decided = dec.decode_choices(out.y[k]);
        bool block_bad = false;
        for (std::size_t g = 0; g < ctx.cons.group_count(); ++g) {
            const std::size_t errs = bit_diff(decided[g], truth[k][g]);
            tally.bit_errors += errs;
            tally.bits += ctx.cons.bits_in_group(g);
            if (errs) block_bad = true;
        }
        ++tally.blocks;
        if (block_bad) ++tally.block_errors;
    }
    return tally;
}

inline FrameTally run_differential_trial(const SweepContext& ctx, const PowerConfig& power, std::uint64_t seed) {
    const auto& cfg = ctx.cfg;
    const auto& cb = ctx.diffbook;
    const std::size_t fft = cfg.fft_size;
    const std::size_t steps = cfg.diff_data_frames;
    std::size_t bits_per_digit = 0;
    while ((std::size_t{1} << bits_per_digit) < cb.radix()) ++bits_per_digit;

    Rng rng(seed);
    const ChannelRealization ch = sample_channel(rng, ctx.code.relays, cfg.tau_max);

    std::vector<std::vector<std::size_t>> truth(fft);
    std::vector<std::vector<cvec>> chains(fft);
    for (std::size_t k = 0; k < fft; ++k) {
        truth[k].resize(steps);
        for (std::size_t t = 0; t < steps; ++t) truth[k][t] = rng.uniform_int(cb.size() - 1);
        chains[k] = diff_encode(truth[k], cb, ctx.code.relays);
    }

    std::vector<std::vector<cvec>> received;  // [t][k]
    received.reserve(steps + 1);
    for (std::size_t t = 0; t <= steps; ++t) {
        std::vector<cvec> symbols(fft);
        for (std::size_t k = 0; k < fft; ++k) symbols[k] = chains[k][t];
        received.push_back(
            transmit_frame(symbols, ctx.sched, ch, power, fft, cfg.cp_len, rng, cfg.noise_variance).y);
    }

    FrameTally tally;
    tally.frames = 1;
    DifferentialDecoder dec(cb);
    for (std::size_t k = 0; k < fft; ++k) {
        dec.reset();
        for (std::size_t t = 0; t < steps; ++t) {
            const std::size_t idx = dec.decode_step(received[t + 1][k], received[t][k]);
            bool block_bad = false;
            for (std::size_t p = 0; p < cb.digit_count(); ++p) {
                const std::size_t errs = bit_diff(cb.digit_of(idx, p), cb.digit_of(truth[k][t], p));
                tally.bit_errors += errs;
                tally.bits += bits_per_digit;
                if (errs) block_bad = true;
            }
            ++tally.blocks;
            if (block_bad) ++tally.block_errors;
        }
    }
    return tally;
}

inline FrameTally run_frame_span(const SweepContext& ctx, const PowerConfig& power, std::size_t point_index,
                                 std::size_t first_frame, std::size_t count) {
    FrameTally tally;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t seed = derive_seed(ctx.cfg.master_seed, static_cast<std::uint64_t>(point_index),
                                               static_cast<std::uint64_t>(first_frame + i));
        if (ctx.cfg.scheme == Scheme::differential)
            tally += run_differential_trial(ctx, power, seed);
        else
            tally += run_coherent_frame(ctx, power, seed);
    }
    return tally;
}

inline FrameTally run_batch(const SweepContext& ctx, const PowerConfig& power, std::size_t point_index,
                            std::size_t first_frame, std::size_t count) {
    const std::size_t workers = ctx.cfg.workers;
    if (workers <= 1 || count <= 1) return run_frame_span(ctx, power, point_index, first_frame, count);

    const std::size_t per = (count + workers - 1) / workers;
    std::vector<std::future<FrameTally>> futures;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * per;
        if (lo >= count) break;
        const std::size_t n = std::min(per, count - lo);
        futures.push_back(std::async(std::launch::async, [&ctx, &power, point_index, first_frame, lo, n] {
            return run_frame_span(ctx, power, point_index, first_frame + lo, n);
        }));
    }
    FrameTally tally;
    for (auto& f : futures) tally += f.get();
    return tally;
}

}  // namespace detail

inline SweepResult run_sweep(const ExperimentConfig& cfg) {
    const auto violations = validate_experiment(cfg);
    if (!violations.empty()) {
        std::string msg = "invalid experiment config:";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw std::invalid_argument(msg);
    }

    const detail::SweepContext ctx = detail::build_sweep_context(cfg);
    SweepResult result;
    result.config = cfg;
    result.code_hash = code_hash(ctx.code);
    result.rotation_deg = ctx.rotation_deg;

    const auto sweep_start = std::chrono::steady_clock::now();
    for (std::size_t pi = 0; pi < cfg.snr_grid_db.size(); ++pi) {
        const auto point_start = std::chrono::steady_clock::now();
        const PowerConfig power = detail::point_power(cfg, ctx.code, cfg.snr_grid_db[pi]);

        detail::FrameTally tally;
        while (tally.frames < cfg.max_trials && tally.bit_errors < cfg.target_errors) {
            const std::size_t count = std::min(sweep_batch_frames, cfg.max_trials - tally.frames);
            tally += detail::run_batch(ctx, power, pi, tally.frames, count);
        }

        SweepPoint point;
        point.snr_db = cfg.snr_grid_db[pi];
        point.trials = tally.frames;
        point.bit_errors = tally.bit_errors;
        point.block_errors = tally.block_errors;
        point.total_bits = tally.bits;
        point.total_blocks = tally.blocks;
        point.ber = tally.bits ? static_cast<double>(tally.bit_errors) / static_cast<double>(tally.bits) : 0.0;
        point.bler =
            tally.blocks ? static_cast<double>(tally.block_errors) / static_cast<double>(tally.blocks) : 0.0;
        point.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - point_start).count();
        result.points.push_back(point);
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - sweep_start).count();

    if (!cfg.output_path.empty()) write_sweep_outputs(result, cfg.output_path);
    return result;
}

// Least-squares slope of log10(BER) against SNR(dB)/10 inside the window,
// flipped to a positive diversity estimate.
inline double estimate_diversity(const SweepResult& result, double window_lo_db, double window_hi_db) {
    std::vector<double> x, y;
    for (const auto& p : result.points)
        if (p.snr_db >= window_lo_db && p.snr_db <= window_hi_db && p.ber > 0.0) {
            x.push_back(p.snr_db / 10.0);
            y.push_back(std::log10(p.ber));
        }
    if (x.size() < 3)
        throw std::runtime_error("diversity estimate needs at least 3 window points with positive BER");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::runtime_error("diversity estimate needs distinct SNR points");
    return -sxy / sxx;
}

// SNR (dB) where the curve crosses the target BER, log-linearly interpolated.
inline double snr_at_ber(const SweepResult& result, double target_ber) {
    if (!(target_ber > 0.0)) throw std::invalid_argument("target BER must be positive");
    const auto& pts = result.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& a = pts[i];
        const auto& b = pts[i + 1];
        if (a.ber <= 0.0 || b.ber <= 0.0) continue;
        const bool crosses = (a.ber >= target_ber && b.ber <= target_ber) ||
                             (a.ber <= target_ber && b.ber >= target_ber);
        if (!crosses) continue;
        const double la = std::log10(a.ber), lb = std::log10(b.ber), lt = std::log10(target_ber);
        if (la == lb) return a.snr_db;
        return a.snr_db + (b.snr_db - a.snr_db) * (lt - la) / (lb - la);
    }
    throw std::runtime_error("curve does not cross the target BER");
}

// Horizontal dB distance at the target BER; positive when b needs more SNR.
inline double compare_gap(const SweepResult& result_a, const SweepResult& result_b, double target_ber) {
    return snr_at_ber(result_b, target_ber) - snr_at_ber(result_a, target_ber);
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    os << "snr_db,trials,bit_errors,ber,bler\n";
    os << std::setprecision(17);
    for (const auto& p : result.points)
        os << p.snr_db << ',' << p.trials << ',' << p.bit_errors << ',' << p.ber << ',' << p.bler << '\n';
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    return {{"scheme", scheme_name(cfg.scheme)},
            {"code", cfg.code_id},
            {"relays", cfg.relays},
            {"fft_size", cfg.fft_size},
            {"cp_len", cfg.cp_len},
            {"tau_max", cfg.tau_max},
            {"snr_grid_db", cfg.snr_grid_db},
            {"max_trials", cfg.max_trials},
            {"target_errors", cfg.target_errors},
            {"master_seed", cfg.master_seed},
            {"pi1", cfg.pi1},
            {"pi2", cfg.pi2},
            {"noise_variance", cfg.noise_variance},
            {"workers", cfg.workers},
            {"diff_data_frames", cfg.diff_data_frames},
            {"allow_cp_violation", cfg.allow_cp_violation}};
}

// Accepts either a bare config object or a whole result document (the
// sidecar written next to a CSV), whose "config" member is then used.
// Unknown keys are rejected so typos cannot silently fall back to defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& doc) {
    const nlohmann::json& j = doc.contains("config") ? doc.at("config") : doc;
    if (!j.is_object()) throw std::invalid_argument("config json: expected an object");
    static const std::vector<std::string> known = {
        "scheme", "code", "relays", "fft_size", "cp_len", "tau_max", "snr_grid_db",
        "max_trials", "target_errors", "master_seed", "pi1", "pi2", "noise_variance",
        "workers", "diff_data_frames", "allow_cp_violation", "output_path"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("config json: unknown key '" + it.key() + "'");
    ExperimentConfig cfg;
    if (j.contains("scheme")) cfg.scheme = parse_scheme(j.at("scheme").get<std::string>());
    if (j.contains("code")) cfg.code_id = j.at("code").get<std::string>();
    if (j.contains("relays")) cfg.relays = j.at("relays").get<std::size_t>();
    if (j.contains("fft_size")) cfg.fft_size = j.at("fft_size").get<std::size_t>();
    if (j.contains("cp_len")) cfg.cp_len = j.at("cp_len").get<std::size_t>();
    if (j.contains("tau_max")) cfg.tau_max = j.at("tau_max").get<std::size_t>();
    if (j.contains("snr_grid_db")) cfg.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
    if (j.contains("max_trials")) cfg.max_trials = j.at("max_trials").get<std::size_t>();
    if (j.contains("target_errors")) cfg.target_errors = j.at("target_errors").get<std::size_t>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("pi1")) cfg.pi1 = j.at("pi1").get<double>();
    if (j.contains("pi2")) cfg.pi2 = j.at("pi2").get<double>();
    if (j.contains("noise_variance")) cfg.noise_variance = j.at("noise_variance").get<double>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();
    if (j.contains("diff_data_frames")) cfg.diff_data_frames = j.at("diff_data_frames").get<std::size_t>();
    if (j.contains("allow_cp_violation")) cfg.allow_cp_violation = j.at("allow_cp_violation").get<bool>();
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    return cfg;
}

inline nlohmann::json sweep_to_json(const SweepResult& result) {
    nlohmann::json j;
    j["config"] = config_to_json(result.config);
    j["code_hash"] = result.code_hash;
    j["rotation_deg"] = result.rotation_deg;
    j["wall_seconds"] = result.wall_seconds;
    j["points"] = nlohmann::json::array();
    for (const auto& p : result.points)
        j["points"].push_back({{"snr_db", p.snr_db},
                               {"trials", p.trials},
                               {"bit_errors", p.bit_errors},
                               {"block_errors", p.block_errors},
                               {"total_bits", p.total_bits},
                               {"total_blocks", p.total_blocks},
                               {"ber", p.ber},
                               {"bler", p.bler},
                               {"wall_seconds", p.wall_seconds}});
    return j;
}

// Counterpart of write_sweep_csv: only the columns the CSV carries are
// recovered, which is enough for slope and gap estimation.
inline SweepResult read_sweep_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "snr_db,trials,bit_errors,ber,bler")
        throw std::runtime_error("sweep csv: missing or unexpected header row");
    SweepResult result;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        SweepPoint p;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        if (!(row >> p.snr_db >> c1 >> p.trials >> c2 >> p.bit_errors >> c3 >> p.ber >> c4 >> p.bler) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',')
            throw std::runtime_error("sweep csv: malformed row: " + line);
        result.points.push_back(p);
    }
    return result;
}

inline SweepResult read_sweep_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open input file: " + path);
    return read_sweep_csv(is);
}

// Relative paths land in RELAYSIM_OUTPUT_DIR when it is set.
inline std::string resolve_output_path(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("RELAYSIM_OUTPUT_DIR");
    if (!dir || !*dir) return path;
    std::string base(dir);
    if (base.back() != '/') base += '/';
    return base + path;
}

// CSV at the resolved path plus a JSON sidecar next to it.
inline void write_sweep_outputs(const SweepResult& result, const std::string& path) {
    const std::string resolved = resolve_output_path(path);
    std::ofstream csv(resolved);
    if (!csv) throw std::runtime_error("cannot open output file: " + resolved);
    write_sweep_csv(csv, result);
    std::ofstream sidecar(resolved + ".json");
    if (!sidecar) throw std::runtime_error("cannot open output file: " + resolved + ".json");
    sidecar << sweep_to_json(result).dump(2) << '\n';
}

}  // namespace dstbc
