// config.hpp - experiment configuration (JSON tree)
//
// Every field has a default; a config file only overrides what it names.
// Unknown keys are errors, reported with their dotted path.

#pragma once

#include "agile_afdm/crlb.hpp"
#include "agile_afdm/papr.hpp"
#include "agile_afdm/sir.hpp"

#include "json.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace agile_afdm::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Papr, Sir, Crlb, Sensitivity };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct Modulation {
    std::string kind = "gaussian";  // gaussian | qam
    int qam_order = 16;             // square constellations only
};

struct PaprSection {
    std::size_t subcarriers = 64;
    std::size_t users = 8;
    std::size_t oversample = 10;
    std::size_t blocks = 10000;
    double coarse_step = 1.0 / 80.0;
    double fine_step = 1.0 / 3120.0;
    std::size_t eval_budget = 128;  // per multi-user symbol, split evenly across users
    double static_c2 = 1.0 / 128.0;
    double clipping_ratio = 2.0;
    std::size_t slm_candidates = 16;
    std::size_t pts_subblocks = 4;
    std::string pts_alphabet = "bpsk";  // bpsk | qpsk
    double ccdf_step_db = 0.01;
};

struct ChannelSection {
    std::vector<double> delays{1, 4, 5};
    std::vector<double> dopplers{0.1, 0.4, 0.7};
    std::vector<double> tap_values{1.0, 0.2, 0.05};
    std::string tap_law = "power";  // power | amplitude
    std::size_t prefix = 10;
};

struct SirSection {
    std::size_t subcarriers = 64;
    ChannelSection channel;
    std::size_t blocks = 100;
    std::size_t realizations = 100;
    std::size_t grid = 100;  // static baseline, grid x grid
    // literal trajectory; the best zeta visited along it is reported
    SirOptConfig optimizer = [] {
        SirOptConfig c;
        c.keep_best_iterate = false;
        return c;
    }();
    double delta = kSirDelta;
};

struct CrlbSection {
    std::size_t subcarriers = 64;
    double snr_db = 20.0;
    std::vector<double> delays{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> dopplers{0.1, 0.3, 0.5, 0.7, 0.9};
    std::size_t realizations = 10;
    std::size_t grid = 100;
    PsoConfig pso;
};

struct SensitivitySection {
    std::size_t subcarriers = 64;
    double snr_db = 20.0;
    double delay = 4.0;
    double doppler = 0.3;
    std::size_t trials = 100;
    std::size_t grid = 100;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Papr;
    std::uint64_t seed = 1;
    std::string output = "results";
    Modulation modulation;
    PaprSection papr;
    SirSection sir;
    CrlbSection crlb;
    SensitivitySection sensitivity;
};

/// Parse and validate; throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Resolved config as JSON; only the section of the selected experiment is emitted.
nlohmann::json to_json(const ExperimentConfig& cfg);

ExperimentConfig default_config(ExperimentKind kind);

}  // namespace agile_afdm::harness
