// Command-line front end: BER sweeps, diversity-slope and gap estimation,
// code validation, and relay schedule derivation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dstbc/builtin_codes.hpp"
#include "dstbc/montecarlo.hpp"
#include "dstbc/schedule.hpp"

namespace {

using dstbc::ExperimentConfig;
using dstbc::SweepResult;

// Flag values are staged here so a JSON config file can be applied first
// and explicit flags layered on top of it afterwards.
struct ExperimentFlags {
    std::string config_file;
    std::string scheme;
    std::string code;
    std::size_t relays = 0;
    std::size_t fft_size = 0;
    std::size_t cp_len = 0;
    std::size_t tau_max = 0;
    std::vector<double> snr;
    std::size_t max_trials = 0;
    std::size_t target_errors = 0;
    std::uint64_t seed = 0;
    double pi1 = 0.0;
    double pi2 = 0.0;
    double noise_variance = 0.0;
    std::size_t workers = 0;
    std::size_t diff_frames = 0;
    bool allow_cp_violation = false;
    std::string output;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
    cmd->add_option("--config", f.config_file, "JSON config file; explicit flags override its values");
    cmd->add_option("--scheme", f.scheme, "coherent | differential | clustered_baseline")
        ->check(CLI::IsMember({"coherent", "differential", "clustered_baseline"}));
    cmd->add_option("--code", f.code, "builtin code id (alamouti, example1_r5, fourgroup_r4, clustered_alamouti)");
    cmd->add_option("--relays", f.relays, "relay count for codes with a free size");
    cmd->add_option("--fft-size", f.fft_size, "subcarrier count, power of two");
    cmd->add_option("--cp-len", f.cp_len, "cyclic prefix length in samples");
    cmd->add_option("--tau-max", f.tau_max, "largest relay delay to draw");
    cmd->add_option("--snr", f.snr, "SNR grid in dB")->delimiter(',');
    cmd->add_option("--max-trials", f.max_trials, "trial cap per SNR point");
    cmd->add_option("--target-errors", f.target_errors, "stop a point once this many bit errors are seen");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--pi1", f.pi1, "source share of the power budget, in (0,1)");
    cmd->add_option("--pi2", f.pi2, "per-relay share of the power budget; 0 means 1/(2R)");
    cmd->add_option("--noise-variance", f.noise_variance, "noise variance per complex sample; 0 simulates without noise");
    cmd->add_option("--workers", f.workers, "worker threads (results do not depend on this)");
    cmd->add_option("--diff-frames", f.diff_frames, "data frames per differential chain");
    cmd->add_flag("--allow-cp-violation", f.allow_cp_violation, "permit tau-max beyond the prefix");
    cmd->add_option("--output", f.output, "CSV output path; a JSON sidecar lands next to it");
}

ExperimentConfig build_config(const CLI::App* cmd, const ExperimentFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_file.empty()) {
        std::ifstream is(f.config_file);
        if (!is) throw std::runtime_error("cannot open config file: " + f.config_file);
        nlohmann::json doc;
        is >> doc;
        cfg = dstbc::config_from_json(doc);
    }
    if (cmd->count("--scheme")) cfg.scheme = dstbc::parse_scheme(f.scheme);
    if (cmd->count("--code")) cfg.code_id = f.code;
    if (cmd->count("--relays")) cfg.relays = f.relays;
    if (cmd->count("--fft-size")) cfg.fft_size = f.fft_size;
    if (cmd->count("--cp-len")) cfg.cp_len = f.cp_len;
    if (cmd->count("--tau-max")) cfg.tau_max = f.tau_max;
    if (cmd->count("--snr")) cfg.snr_grid_db = f.snr;
    if (cmd->count("--max-trials")) cfg.max_trials = f.max_trials;
    if (cmd->count("--target-errors")) cfg.target_errors = f.target_errors;
    if (cmd->count("--seed")) cfg.master_seed = f.seed;
    if (cmd->count("--pi1")) cfg.pi1 = f.pi1;
    if (cmd->count("--pi2")) cfg.pi2 = f.pi2;
    if (cmd->count("--noise-variance")) cfg.noise_variance = f.noise_variance;
    if (cmd->count("--workers")) cfg.workers = f.workers;
    if (cmd->count("--diff-frames")) cfg.diff_data_frames = f.diff_frames;
    if (cmd->count("--allow-cp-violation")) cfg.allow_cp_violation = true;
    if (cmd->count("--output")) cfg.output_path = f.output;
    return cfg;
}

void print_sweep(const SweepResult& r) {
    std::printf("scheme=%s code=%s hash=%s rotation_deg=%.6g\n", dstbc::scheme_name(r.config.scheme).c_str(),
                r.config.code_id.c_str(), r.code_hash.c_str(), r.rotation_deg);
    std::printf("%8s %9s %10s %12s %12s %8s\n", "snr_db", "trials", "bit_errs", "ber", "bler", "secs");
    for (const auto& p : r.points)
        std::printf("%8.2f %9zu %10zu %12.5e %12.5e %8.2f\n", p.snr_db, p.trials, p.bit_errors, p.ber,
                    p.bler, p.wall_seconds);
}

SweepResult load_curve(const std::string& path) {
    return dstbc::read_sweep_csv_file(dstbc::resolve_output_path(path));
}

dstbc::ConjugateLinearCode load_code(const std::string& name, const std::string& file, std::size_t relays) {
    if (!file.empty()) {
        std::ifstream is(file);
        if (!is) throw std::runtime_error("cannot open code file: " + file);
        nlohmann::json doc;
        is >> doc;
        return dstbc::code_from_json(doc);
    }
    dstbc::ConjugateLinearCode code;
    if (!dstbc::find_builtin_code(name, code, relays))
        throw std::runtime_error("unknown code id: " + name);
    return code;
}

int run_sweep_cmd(const CLI::App* cmd, const ExperimentFlags& f) {
    const ExperimentConfig cfg = build_config(cmd, f);
    const SweepResult r = dstbc::run_sweep(cfg);
    print_sweep(r);
    if (!cfg.output_path.empty()) {
        const std::string resolved = dstbc::resolve_output_path(cfg.output_path);
        std::printf("wrote %s and %s.json\n", resolved.c_str(), resolved.c_str());
    }
    return 0;
}

int run_diversity_cmd(const CLI::App* cmd, const ExperimentFlags& f, const std::string& input, double lo,
                      double hi) {
    SweepResult r;
    if (!input.empty()) {
        r = load_curve(input);
    } else {
        r = dstbc::run_sweep(build_config(cmd, f));
        print_sweep(r);
    }
    if (r.points.empty()) throw std::runtime_error("no sweep points to fit");
    double wlo = lo, whi = hi;
    if (!cmd->count("--window-lo")) wlo = r.points.front().snr_db;
    if (!cmd->count("--window-hi")) whi = r.points.back().snr_db;
    const double slope = dstbc::estimate_diversity(r, wlo, whi);
    std::printf("window_db [%g, %g]\ndiversity_slope %.6f\n", wlo, whi, slope);
    return 0;
}

int run_gap_cmd(const CLI::App* cmd, const ExperimentFlags& f, const std::string& input_a,
                const std::string& input_b, const std::string& scheme_a, const std::string& scheme_b,
                double target_ber) {
    SweepResult a, b;
    if (!input_a.empty() || !input_b.empty()) {
        if (input_a.empty() || input_b.empty())
            throw std::runtime_error("gap needs both --input-a and --input-b when reading from files");
        a = load_curve(input_a);
        b = load_curve(input_b);
    } else {
        if (scheme_a.empty() || scheme_b.empty())
            throw std::runtime_error("gap needs either two input files or --scheme-a and --scheme-b");
        ExperimentConfig cfg = build_config(cmd, f);
        cfg.output_path.clear();
        cfg.scheme = dstbc::parse_scheme(scheme_a);
        a = dstbc::run_sweep(cfg);
        print_sweep(a);
        cfg.scheme = dstbc::parse_scheme(scheme_b);
        b = dstbc::run_sweep(cfg);
        print_sweep(b);
    }
    const double gap = dstbc::compare_gap(a, b, target_ber);
    std::printf("target_ber %g\ngap_db %.4f\n", target_ber, gap);
    return 0;
}

int run_validate_cmd(const std::string& name, const std::string& file, std::size_t relays, bool rank,
                     std::size_t expect_rank) {
    const dstbc::ConjugateLinearCode code = load_code(name, file, relays);
    const auto issues = dstbc::validate_code(code);
    std::printf("code %s: %zu relays, %zu slots, %zu symbols, hash %s\n",
                code.name.empty() ? "(unnamed)" : code.name.c_str(), code.relays, code.slots, code.symbols,
                dstbc::code_hash(code).c_str());
    if (!issues.empty()) {
        for (const auto& s : issues) std::printf("invalid: %s\n", s.c_str());
        return 1;
    }
    const auto report = dstbc::check_row_conditions(dstbc::row_partitions(code));
    std::printf("row conditions: disjoint=%s laminar=%s balanced=%s -> schedule %s\n",
                report.disjoint ? "yes" : "no", report.laminar ? "yes" : "no",
                report.balanced ? "yes" : "no", report.schedule_gates_pass() ? "derivable" : "blocked");
    if (rank || expect_rank > 0) {
        const auto rr = dstbc::check_full_rank(code, dstbc::constellation_for(code));
        std::printf("minimum codeword-difference rank: %zu over %zu pairs (full: %s)\n", rr.min_rank,
                    rr.pairs_checked, rr.full ? "yes" : "no");
        if (expect_rank > 0 && rr.min_rank < expect_rank) {
            std::printf("rank below the expected %zu\n", expect_rank);
            return 1;
        }
    }
    std::printf("ok\n");
    return 0;
}

int run_schedule_cmd(const std::string& name, const std::string& file, std::size_t relays, bool as_json) {
    const dstbc::ConjugateLinearCode code = load_code(name, file, relays);
    const dstbc::RelaySchedule sched = dstbc::derive_relay_schedule(code);
    if (!as_json) {
        std::fputs(dstbc::format_schedule(sched).c_str(), stdout);
        return 0;
    }
    nlohmann::json j;
    j["code"] = code.name;
    j["plain_relays"] = sched.plain_relays;
    j["relay_order"] = sched.relay_order;
    j["blocks"] = nlohmann::json::array();
    for (auto m : sched.source_modulation) j["blocks"].push_back(m == dstbc::BlockTransform::idft ? "idft" : "dft");
    j["reversed_slots"] = sched.reversed_slots();
    j["actions"] = nlohmann::json::array();
    for (std::size_t r = 0; r < sched.actions.size(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& act : sched.actions[r]) {
            if (act.silent)
                row.push_back(nullptr);
            else
                row.push_back({{"block", act.block}, {"sign", act.sign}});
        }
        j["actions"].push_back(row);
    }
    std::printf("%s\n", j.dump(2).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"asynchronous relay network simulator"};
    app.require_subcommand(1);

    ExperimentFlags sf;
    CLI::App* sweep = app.add_subcommand("sweep", "run a BER/BLER sweep over an SNR grid");
    add_experiment_flags(sweep, sf);

    ExperimentFlags df;
    std::string div_input;
    double window_lo = 0.0, window_hi = 0.0;
    CLI::App* diversity = app.add_subcommand("diversity", "estimate the diversity slope of a curve");
    add_experiment_flags(diversity, df);
    diversity->add_option("--input", div_input, "existing sweep CSV to fit instead of simulating");
    diversity->add_option("--window-lo", window_lo, "window lower edge in dB (default: first point)");
    diversity->add_option("--window-hi", window_hi, "window upper edge in dB (default: last point)");

    ExperimentFlags gf;
    std::string gap_a, gap_b, scheme_a, scheme_b;
    double target_ber = 1e-3;
    CLI::App* gap = app.add_subcommand("gap", "dB distance between two curves at a target BER");
    add_experiment_flags(gap, gf);
    gap->add_option("--input-a", gap_a, "reference curve CSV");
    gap->add_option("--input-b", gap_b, "compared curve CSV");
    gap->add_option("--scheme-a", scheme_a, "simulate the reference with this scheme")
        ->check(CLI::IsMember({"coherent", "differential", "clustered_baseline"}));
    gap->add_option("--scheme-b", scheme_b, "simulate the comparison with this scheme")
        ->check(CLI::IsMember({"coherent", "differential", "clustered_baseline"}));
    gap->add_option("--target-ber", target_ber, "BER level at which to measure, default 1e-3");

    std::string vc_code = "fourgroup_r4", vc_file;
    std::size_t vc_relays = 0, vc_expect_rank = 0;
    bool vc_rank = false;
    CLI::App* validate = app.add_subcommand("validate-code", "check a code and report its properties");
    validate->add_option("--code", vc_code, "builtin code id");
    validate->add_option("--code-file", vc_file, "JSON code description instead of a builtin");
    validate->add_option("--relays", vc_relays, "relay count for codes with a free size");
    validate->add_flag("--rank", vc_rank, "also compute the minimum codeword-difference rank");
    validate->add_option("--expect-rank", vc_expect_rank, "fail unless the minimum rank reaches this");

    std::string ds_code = "fourgroup_r4", ds_file;
    std::size_t ds_relays = 0;
    bool ds_json = false;
    CLI::App* schedule = app.add_subcommand("derive-schedule", "derive the relay forwarding plan for a code");
    schedule->add_option("--code", ds_code, "builtin code id");
    schedule->add_option("--code-file", ds_file, "JSON code description instead of a builtin");
    schedule->add_option("--relays", ds_relays, "relay count for codes with a free size");
    schedule->add_flag("--json", ds_json, "emit the plan as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return run_sweep_cmd(sweep, sf);
        if (diversity->parsed()) return run_diversity_cmd(diversity, df, div_input, window_lo, window_hi);
        if (gap->parsed()) return run_gap_cmd(gap, gf, gap_a, gap_b, scheme_a, scheme_b, target_ber);
        if (validate->parsed()) return run_validate_cmd(vc_code, vc_file, vc_relays, vc_rank, vc_expect_rank);
        if (schedule->parsed()) return run_schedule_cmd(ds_code, ds_file, ds_relays, ds_json);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "relaysim: error: %s\n", e.what());
        return 1;
    }
    return 0;
}
