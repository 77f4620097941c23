// experiment.hpp - the Monte Carlo pipelines behind `agile-afdm run`
//
// Every experiment writes <out>/<kind>.csv (long format, one metric per row),
// a few auxiliary tables and <out>/summary.json.  The first CSV line is
// "# " followed by a JSON header holding the resolved config and the version.
// Timing goes to stderr only, so identical inputs give identical files.
#pragma once

#include "agile_afdm/harness/config.hpp"

#include <string>

#define AGILE_AFDM_VERSION "0.3.0"

namespace agile_afdm::harness {

struct RunOptions {
    std::size_t workers = 1;
    bool progress = true;  // progress lines on stderr
};

/// Runs the configured experiment into cfg.output and returns summary.json's content.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

nlohmann::json run_papr_experiment(const ExperimentConfig& cfg, const RunOptions& opt);
nlohmann::json run_sir_experiment(const ExperimentConfig& cfg, const RunOptions& opt);
nlohmann::json run_crlb_experiment(const ExperimentConfig& cfg, const RunOptions& opt);
nlohmann::json run_sensitivity_experiment(const ExperimentConfig& cfg, const RunOptions& opt);

/// Symbols for one block: CN(0, variance) or square QAM scaled to the same power.
CVec draw_symbols(const Modulation& m, std::size_t n, double variance, std::uint64_t seed,
                  std::uint64_t a, std::uint64_t b = 0);

/// One Rayleigh realisation of the configured tap profile.
PathSet draw_channel(const ChannelSection& c, std::uint64_t seed, std::uint64_t realization);

/// Deterministic number formatting used in every output file.
std::string fmt(double v);

}  // namespace agile_afdm::harness
