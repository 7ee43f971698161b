#pragma once

#include <string>
#include <vector>

#include "mimo/detequiv.hpp"
#include "mimo/network.hpp"

namespace mimo {

// Per-UE outcome of one experiment. Monte Carlo fields are NaN when only the
// asymptotic engine ran. SINR and the two decomposition terms are linear;
// spectral efficiencies are bit/s/Hz.
struct UeResult {
    int drop = 0;
    int cell = 0;
    int ue = 0;
    double mean_sinr_mc = 0.0;
    double stderr_sinr_mc = 0.0;
    double se_mc = 0.0;
    double se_mc_first_only = 0.0; // SE with the contamination loss term dropped
    double first_mc = 0.0;
    double loss_mc = 0.0;
    double gamma_bar = 0.0;
    double first_bar = 0.0;
    double loss_bar = 0.0;
    double se_de = 0.0;
};

// Aggregates of one drop. Sum SE is per cell (summed over UEs, averaged over
// cells); the decomposition terms follow the pilot-0 convention: the linear
// term values of UE 0 of each cell, averaged over cells.
struct DropAggregates {
    double sum_se_mc = 0.0;
    double sum_se_de = 0.0;
    double sum_se_mc_first_only = 0.0;
    double term1_mc = 0.0;
    double term2_mc = 0.0;
    double term1_de = 0.0;
    double term2_de = 0.0;
};

struct ExperimentResult {
    NetworkConfig config;
    int n_blocks = 0;
    int n_drops = 1;
    bool has_mc = false;
    bool keep_blocks = false;

    std::vector<UeResult> ue;          // (drop, cell, ue)
    std::vector<DropAggregates> drops; // per drop
    std::vector<double> block_sinr;    // ((drop * n_blocks + b) * L + j) * K + k, if kept

    // Drop-averaged aggregates.
    DropAggregates mean;
    double max_rel_stderr = 0.0; // max over UEs of stderr/mean of the MC SINR

    // Wall-clock seconds; deliberately never serialized (outputs must be
    // byte-stable across reruns).
    double wall_seconds = 0.0;

    const UeResult& at(int drop, int cell, int k) const {
        return ue[(drop * config.L + cell) * config.K + k];
    }
    double block_gamma(int drop, int b, int cell, int k) const {
        return block_sinr[((static_cast<std::size_t>(drop) * n_blocks + b) * config.L + cell) *
                              config.K +
                          k];
    }
};

struct RunOptions {
    int n_blocks = 500;
    int n_drops = 1;
    int threads = 0; // 0: hardware concurrency
    bool with_mc = true;
    bool keep_blocks = false;
    double fp_tol = 1e-10;
    int fp_max_iter = 500;
};

/// Run the experiment: per drop, generate a network, precompute statistics,
/// solve the asymptotic equations, and (optionally) average the Monte Carlo
/// SINR over n_blocks coherence blocks. Deterministic for a given
/// (config, options) regardless of thread count.
ExperimentResult run_experiment(const NetworkConfig& config, const RunOptions& options);

/// Monte Carlo spectral efficiency (also fills the asymptotic columns).
ExperimentResult run_monte_carlo(const NetworkConfig& config, int n_blocks, int n_drops = 1,
                                 int threads = 0);

/// Asymptotic-only run (no coherence blocks sampled).
ExperimentResult run_detequiv(const NetworkConfig& config, int n_drops = 1);

struct SweepPoint {
    double ratio = 0.0;
    int K = 0;
    int M = 0;
    ExperimentResult result;
};

struct SweepOptions {
    std::vector<double> ratios = {2.0, 4.0};
    std::vector<int> K_list = {4, 8, 16};
    RunOptions run;
};

/// Sweep (M/K ratio, K) with M = ratio * K. All points share the base seed,
/// so UE placements are common random numbers nested across K.
std::vector<SweepPoint> run_sweep(const NetworkConfig& base, const SweepOptions& options);

struct Fig1Row {
    double ratio = 0.0;
    int K = 0;
    int M = 0;
    double sum_se_mc = 0.0;
    double sum_se_de = 0.0;
    double sum_se_mc_first_only = 0.0;
};

struct Fig2Row {
    double ratio = 0.0;
    int K = 0;
    double term1_db_mc = 0.0;
    double term2_db_mc = 0.0;
    double term1_db_de = 0.0;
    double term2_db_de = 0.0;
};

std::vector<Fig1Row> fig1_rows(const std::vector<SweepPoint>& points);
std::vector<Fig2Row> fig2_rows(const std::vector<SweepPoint>& points);

// Serialization. CSV schemas are documented in the README; JSON mirrors the
// result structs including per-drop values. path "-" writes to stdout.
std::string experiment_csv(const ExperimentResult& result);
std::string experiment_json(const ExperimentResult& result);
std::string fig1_csv(const std::vector<SweepPoint>& points);
std::string fig2_csv(const std::vector<SweepPoint>& points);
std::string sweep_json(const std::vector<SweepPoint>& points);

void emit(const ExperimentResult& result, const std::string& path, OutputFormat format);
void emit_fig1(const std::vector<SweepPoint>& points, const std::string& path, OutputFormat format);
void emit_fig2(const std::vector<SweepPoint>& points, const std::string& path, OutputFormat format);

} // namespace mimo
