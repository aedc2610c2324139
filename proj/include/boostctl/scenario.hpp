#pragma once

#include "boostctl/controllers.hpp"
#include "boostctl/estimators.hpp"
#include "boostctl/plant.hpp"

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace boostctl {

enum class ControllerType { Ftc, Pid, Baseline };
enum class PlantModel { Averaged, Switched };

std::string to_string(ControllerType type);
ControllerType controller_type_from_string(std::string_view name);

struct ControllerConfig {
    ControllerType type = ControllerType::Ftc;
    FtcGains ftc;
    PidGains pid;
    double c1 = 1e5;
    double c2 = 1e5;
    bool use_dob = false;
};

struct ObserverConfig {
    AdaptiveObserverGains gains;
    double G0 = 0.1;  // initial conductance estimate (nominal 10 ohm load), S
};

struct DobConfig {
    bool enabled = false;
    DisturbanceObserverGains gains;
};

struct SimConfig {
    double t_end = 1.0;   // s
    double step = 1e-6;   // s
    PlantModel model = PlantModel::Averaged;
    double noise_sigma_v = 0.0;  // V
    double noise_sigma_i = 0.0;  // A
    int decimation = 10;
    std::uint64_t seed = 1;
    double t_skip = 0.0;  // metrics ignore t < t_skip
};

struct Scenario {
    PlantParams plant;
    LoadSchedule schedule = LoadSchedule::standard_steps();
    PlantState initial{6.0, 0.0, 0.0};
    ControllerConfig controller;
    ObserverConfig observer;
    DobConfig dob;
    SimConfig sim;

    /// Throws ValidationError on any invalid field.
    void validate() const;

    /// The 1 s, 10/20/10 ohm load-step scenario with the default gains.
    static Scenario standard();
};

/// Parses a scenario document. Missing keys keep the standard defaults.
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

}  // namespace boostctl
