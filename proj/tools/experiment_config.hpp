#ifndef DETMAC_TOOLS_EXPERIMENT_CONFIG_HPP
#define DETMAC_TOOLS_EXPERIMENT_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "detmac/system.hpp"
#include "json.hpp"

namespace detmac::cli {

/// Configuration problems map to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed and normalized experiment description. Lists are always expanded
/// (N and precoding accept scalars or arrays in the file) so the normalized
/// JSON echo is canonical: re-ingesting it yields byte-identical output.
struct ExperimentConfig {
    std::string scenario;                 // two_user_linear | two_user_cubic | custom
    std::vector<int> rx_antennas;         // N values to sweep
    int num_users = 2;                    // custom only; two-user scenarios fix K = 2
    std::vector<int> tx_antennas;         // custom only; per-user n_k (empty = N)
    double spacing_over_lambda = 0.1;
    double snr_db = 20.0;
    std::vector<std::string> precodings;  // subset of {uniform, optimal}
    int trials = 10000;
    std::uint64_t seed = 1;
    double epsilon_fp = 1e-10;
    double eta = 1e-8;
    std::string output_path = "results.csv";

    double sigma2() const { return std::pow(10.0, -snr_db / 10.0); }

    /// Canonical JSON echo (sorted keys, expanded lists).
    nlohmann::json normalized() const;

    /// Parses and validates; collects offending keys into the error message.
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);

    /// System for one swept N value.
    SystemConfig build_system(int rx) const;
};

}  // namespace detmac::cli

#endif
