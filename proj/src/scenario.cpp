#include "boostctl/scenario.hpp"

#include "boostctl/errors.hpp"

#include <cmath>
#include <fstream>

namespace boostctl {

using nlohmann::json;

std::string to_string(ControllerType type) {
    switch (type) {
        case ControllerType::Ftc: return "ftc";
        case ControllerType::Pid: return "pid";
        case ControllerType::Baseline: return "baseline";
    }
    return {};
}

ControllerType controller_type_from_string(std::string_view name) {
    if (name == "ftc") return ControllerType::Ftc;
    if (name == "pid") return ControllerType::Pid;
    if (name == "baseline") return ControllerType::Baseline;
    throw ValidationError("unknown controller type '" + std::string(name) + "'");
}

void Scenario::validate() const {
    plant.validate(sim.step);
    if (!(sim.t_end > 0.0)) throw ValidationError("sim.t_end must be positive");
    if (sim.decimation < 1) throw ValidationError("sim.decimation must be >= 1");
    if (!(sim.noise_sigma_v >= 0.0 && sim.noise_sigma_i >= 0.0)) throw ValidationError("noise sigma must be >= 0");
    if (!(sim.t_skip >= 0.0 && sim.t_skip < sim.t_end)) throw ValidationError("sim.t_skip must lie in [0, t_end)");
    if (!std::isfinite(initial.v0) || !std::isfinite(initial.iL) || initial.v0 < 0.0) {
        throw ValidationError("initial state must be finite with v0 >= 0");
    }
    if (!(observer.G0 >= observer.gains.g_floor && observer.G0 <= observer.gains.g_ceiling)) {
        throw ValidationError("observer.G0 must lie within the conductance projection bounds");
    }
    observer.gains.validate();
    if (dob.enabled) dob.gains.validate();
    if (controller.use_dob && !dob.enabled) throw ValidationError("controller.use_dob requires dob.enabled");
    switch (controller.type) {
        case ControllerType::Ftc: controller.ftc.validate(); break;
        case ControllerType::Pid: controller.pid.validate(); break;
        case ControllerType::Baseline:
            if (!(controller.c1 > 0.0 && controller.c2 > 0.0)) throw ValidationError("baseline gains must be positive");
            break;
    }
}

Scenario Scenario::standard() { return Scenario{}; }

namespace {

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_controller(const json& c, ControllerConfig& cfg) {
    if (c.contains("type")) cfg.type = controller_type_from_string(c.at("type").get<std::string>());
    read(c, "use_dob", cfg.use_dob);
    if (c.contains("ussf")) cfg.ftc.f = cfg.ftc.g = Ussf::from_name(c.at("ussf").get<std::string>());
    if (c.contains("ussf_g")) cfg.ftc.g = Ussf::from_name(c.at("ussf_g").get<std::string>());
    read(c, "iota", cfg.ftc.iota);
    if (c.contains("cross_term")) {
        const auto term = c.at("cross_term").get<std::string>();
        if (term == "e1") cfg.ftc.cross_term = CrossTerm::E1;
        else if (term == "e2") cfg.ftc.cross_term = CrossTerm::E2;
        else throw ValidationError("controller.cross_term must be 'e1' or 'e2'");
    }
    if (!c.contains("gains")) return;
    const json& g = c.at("gains");
    auto& f = cfg.ftc;
    read(g, "k1", f.k1);
    read(g, "k2", f.k2);
    read(g, "k3", f.k3);
    read(g, "k4", f.k4);
    read(g, "k5", f.k5);
    read(g, "k6", f.k6);
    read(g, "iota", f.iota);
    auto& p = cfg.pid;
    read(g, "kv_p", p.kv_p);
    read(g, "kv_i", p.kv_i);
    read(g, "kv_d", p.kv_d);
    read(g, "ki_p", p.ki_p);
    read(g, "ki_i", p.ki_i);
    read(g, "ki_d", p.ki_d);
    read(g, "voltage_integral_limit", p.voltage_integral_limit);
    read(g, "current_integral_limit", p.current_integral_limit);
    read(g, "c1", cfg.c1);
    read(g, "c2", cfg.c2);
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
    Scenario sc = Scenario::standard();
    try {
        if (doc.contains("plant")) {
            const json& p = doc.at("plant");
            read(p, "L", sc.plant.inductance);
            read(p, "C", sc.plant.capacitance);
            read(p, "Vi", sc.plant.input_voltage);
            read(p, "vr", sc.plant.v_ref);
            read(p, "fs", sc.plant.switching_frequency);
        }
        if (doc.contains("load_schedule")) {
            std::vector<LoadSegment> segs;
            for (const auto& entry : doc.at("load_schedule")) {
                if (!entry.is_array() || entry.size() != 2) throw ValidationError("load_schedule entries are [t, R] pairs");
                segs.push_back({entry[0].get<double>(), entry[1].get<double>()});
            }
            sc.schedule = LoadSchedule(std::move(segs));
        }
        if (doc.contains("initial_state")) {
            read(doc.at("initial_state"), "v0", sc.initial.v0);
            read(doc.at("initial_state"), "iL", sc.initial.iL);
        }
        if (doc.contains("sim")) {
            const json& s = doc.at("sim");
            read(s, "t_end", sc.sim.t_end);
            read(s, "step", sc.sim.step);
            read(s, "decimation", sc.sim.decimation);
            read(s, "seed", sc.sim.seed);
            read(s, "t_skip", sc.sim.t_skip);
            if (s.contains("model")) {
                const auto model = s.at("model").get<std::string>();
                if (model == "averaged") sc.sim.model = PlantModel::Averaged;
                else if (model == "switched") sc.sim.model = PlantModel::Switched;
                else throw ValidationError("sim.model must be 'averaged' or 'switched'");
            }
            if (s.contains("noise_sigma")) {
                const json& n = s.at("noise_sigma");
                if (n.is_object()) {
                    read(n, "v0", sc.sim.noise_sigma_v);
                    read(n, "iL", sc.sim.noise_sigma_i);
                } else {
                    sc.sim.noise_sigma_v = sc.sim.noise_sigma_i = n.get<double>();
                }
            }
        }
        if (doc.contains("observer")) {
            const json& o = doc.at("observer");
            read(o, "K1", sc.observer.gains.K1);
            read(o, "K2", sc.observer.gains.K2);
            read(o, "kappa", sc.observer.gains.kappa);
            read(o, "G0", sc.observer.G0);
        }
        if (doc.contains("dob")) {
            const json& d = doc.at("dob");
            read(d, "enabled", sc.dob.enabled);
            read(d, "theta", sc.dob.gains.theta);
            for (int i = 0; i < 6; ++i) {
                read(d, ("kappa" + std::to_string(i + 1)).c_str(), sc.dob.gains.kappa[static_cast<std::size_t>(i)]);
            }
            if (d.contains("ussf")) sc.dob.gains.r = sc.dob.gains.h = Ussf::from_name(d.at("ussf").get<std::string>());
        }
        if (doc.contains("controller")) read_controller(doc.at("controller"), sc.controller);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed scenario: ") + e.what());
    }
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("scenario '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(doc);
}

}  // namespace boostctl
