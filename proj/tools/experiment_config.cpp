#include "experiment_config.hpp"

#include <cmath>
#include <fstream>

#include "detmac/correlation.hpp"

namespace detmac::cli {

namespace {

using nlohmann::json;

std::vector<int> int_list(const json& v) {
    std::vector<int> out;
    if (v.is_array())
        for (const auto& e : v) out.push_back(e.get<int>());
    else
        out.push_back(v.get<int>());
    return out;
}

std::vector<std::string> string_list(const json& v) {
    std::vector<std::string> out;
    if (v.is_array())
        for (const auto& e : v) out.push_back(e.get<std::string>());
    else
        out.push_back(v.get<std::string>());
    return out;
}

}  // namespace

nlohmann::json ExperimentConfig::normalized() const {
    json j;
    j["schema_version"] = 1;
    j["scenario"] = scenario;
    j["N"] = rx_antennas;
    if (scenario == "custom") {
        j["K"] = num_users;
        if (!tx_antennas.empty()) j["n"] = tx_antennas;
    } else {
        j["spacing_over_lambda"] = spacing_over_lambda;
    }
    j["snr_db"] = snr_db;
    j["precoding"] = precodings;
    j["trials"] = trials;
    j["seed"] = seed;
    j["tolerances"] = {{"epsilon_fp", epsilon_fp}, {"eta", eta}};
    j["output_path"] = output_path;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig cfg;
    std::vector<std::string> bad_keys;

    auto take = [&](const char* key, auto&& setter, bool required = false) {
        if (!j.contains(key)) {
            if (required) bad_keys.push_back(std::string(key) + " (missing)");
            return;
        }
        try {
            setter(j.at(key));
        } catch (const json::exception&) {
            bad_keys.push_back(key);
        } catch (const std::exception&) {
            bad_keys.push_back(key);
        }
    };

    take("schema_version", [&](const json& v) {
        if (v.get<int>() != 1) throw ConfigError("unsupported schema_version");
    });
    take("scenario", [&](const json& v) { cfg.scenario = v.get<std::string>(); }, true);
    take("N", [&](const json& v) { cfg.rx_antennas = int_list(v); }, true);
    take("K", [&](const json& v) { cfg.num_users = v.get<int>(); });
    take("n", [&](const json& v) { cfg.tx_antennas = int_list(v); });
    take("spacing_over_lambda",
         [&](const json& v) { cfg.spacing_over_lambda = v.get<double>(); });
    take("snr_db", [&](const json& v) { cfg.snr_db = v.get<double>(); });
    take("precoding", [&](const json& v) { cfg.precodings = string_list(v); });
    take("trials", [&](const json& v) { cfg.trials = v.get<int>(); });
    take("seed", [&](const json& v) { cfg.seed = v.get<std::uint64_t>(); });
    take("tolerances", [&](const json& v) {
        if (v.contains("epsilon_fp")) cfg.epsilon_fp = v.at("epsilon_fp").get<double>();
        if (v.contains("eta")) cfg.eta = v.at("eta").get<double>();
    });
    take("output_path", [&](const json& v) { cfg.output_path = v.get<std::string>(); });

    if (!bad_keys.empty()) {
        std::string msg = "malformed or missing config keys:";
        for (const auto& k : bad_keys) msg += " " + k;
        throw ConfigError(msg);
    }

    if (cfg.precodings.empty()) cfg.precodings = {"uniform"};
    if (cfg.scenario != "two_user_linear" && cfg.scenario != "two_user_cubic" &&
        cfg.scenario != "custom")
        throw ConfigError("scenario must be two_user_linear, two_user_cubic or custom");
    if (cfg.scenario != "custom") cfg.num_users = 2;
    if (cfg.rx_antennas.empty()) throw ConfigError("N must list at least one value");
    for (int n : cfg.rx_antennas)
        if (n < 1) throw ConfigError("N entries must be >= 1");
    for (const std::string& p : cfg.precodings)
        if (p != "uniform" && p != "optimal")
            throw ConfigError("precoding entries must be uniform or optimal");
    if (!std::isfinite(cfg.snr_db)) throw ConfigError("snr_db must be finite");
    if (cfg.trials < 0) throw ConfigError("trials must be >= 0");
    if (!(cfg.epsilon_fp > 0.0) || !(cfg.eta > 0.0))
        throw ConfigError("tolerances must be > 0");
    if (cfg.num_users < 1 || cfg.num_users > 16) throw ConfigError("K must lie in [1, 16]");
    if (!cfg.tx_antennas.empty() && static_cast<int>(cfg.tx_antennas.size()) != cfg.num_users)
        throw ConfigError("n must have K entries");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return from_json(j);
}

SystemConfig ExperimentConfig::build_system(int rx) const {
    if (scenario == "custom") {
        SystemConfig cfg;
        cfg.num_users = num_users;
        cfg.num_rx = rx;
        for (int k = 0; k < num_users; ++k) {
            const int n = tx_antennas.empty() ? rx : tx_antennas[k];
            cfg.num_tx.push_back(n);
            cfg.rx_corr.push_back(HermitianMatrix::identity(rx));
            cfg.tx_corr.push_back(HermitianMatrix::identity(n));
            cfg.power_budget.push_back(1.0);
        }
        cfg.sigma2 = sigma2();
        cfg.validate();
        return cfg;
    }
    const ArrayGeometry geometry =
        scenario == "two_user_cubic" ? ArrayGeometry::cubic : ArrayGeometry::linear;
    SystemConfig cfg = scenario_two_user(rx, spacing_over_lambda, 1.0, geometry);
    cfg.sigma2 = sigma2();
    return cfg;
}

}  // namespace detmac::cli
