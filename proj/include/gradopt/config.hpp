#pragma once

// INI-style configuration files, e.g.
//
//   [campaign]
//   functions = rastrigin, ackley
//   methods = ego_nice, ego_geo
//   runs = 50
//   [go]
//   M = 20
//   [delta1]
//   rastrigin = 2.0
//
// The full key list lives in README.md.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gradopt/campaign.hpp"
#include "gradopt/errors.hpp"

namespace gradopt {

struct Config {
    CampaignSpec campaign;
    std::string go_mode = "explicit";
    ExplicitGoConfig explicit_go;  ///< single-run settings (`explicit` subcommand)
    ImplicitGoConfig implicit_go;  ///< single-run settings (`implicit` subcommand)
    FunctionId function = FunctionId::Rastrigin;
    bool estimate_noise = false;
    std::size_t probe_points = 8;
    std::size_t probe_batch = 1;
    std::size_t resamples = 200;
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

template <class T>
T get_or(const boost::property_tree::ptree& pt, const std::string& key, T fallback) {
    if (!pt.get_child_optional(key)) return fallback;
    try {
        return pt.get<T>(key);
    } catch (const boost::property_tree::ptree_bad_data&) {
        throw InvalidArgument("config: bad value for '" + key + "'");
    }
}

}  // namespace detail

inline Config parse_config(const boost::property_tree::ptree& pt) {
    using detail::get_or;
    Config cfg;
    CampaignSpec& c = cfg.campaign;

    if (auto fs = pt.get_optional<std::string>("campaign.functions")) {
        if (*fs == "all")
            c.functions.assign(kAllFunctions.begin(), kAllFunctions.end());
        else
            for (const auto& f : detail::split_list(*fs)) c.functions.push_back(parse_function_id(f));
    }
    if (auto ms = pt.get_optional<std::string>("campaign.methods"))
        for (const auto& m : detail::split_list(*ms)) c.methods.push_back(parse_method(m));
    c.dim = get_or<std::size_t>(pt, "campaign.dim", c.dim);
    c.runs = get_or<std::size_t>(pt, "campaign.runs", c.runs);
    c.budget = get_or<std::size_t>(pt, "campaign.budget", c.budget);
    c.seed = get_or<std::uint64_t>(pt, "campaign.seed", c.seed);
    c.workers = get_or<std::size_t>(pt, "campaign.workers", c.workers);
    c.output_dir = get_or<std::string>(pt, "campaign.output_dir", c.output_dir);
    c.timing = get_or<bool>(pt, "campaign.timing", c.timing);

    // [schedule] holds the shared defaults, [go] may override M, p and delta1.
    const double p = get_or<double>(pt, "go.p", get_or<double>(pt, "schedule.p", 1.0));
    const double geo_c = get_or<double>(pt, "schedule.c", 0.95);
    const std::size_t M = get_or<std::size_t>(pt, "go.M", get_or<std::size_t>(pt, "schedule.M", c.ego.M));
    for (auto& m : c.methods) {
        if (m.kind == MethodSpec::Kind::EgoNice) m.param = p;
        if (m.kind == MethodSpec::Kind::EgoGeo) m.param = geo_c;
    }
    c.ego.M = M;
    c.ego.samples = get_or<std::size_t>(pt, "smoothing.samples", c.ego.samples);
    c.ego.kernel = parse_kernel(get_or<std::string>(pt, "smoothing.kernel", std::string(to_string(c.ego.kernel))));
    c.ego.project = get_or<bool>(pt, "go.project", c.ego.project);
    if (auto d = pt.get_child_optional("delta1"))
        for (const auto& [key, val] : *d) c.ego.delta1[parse_function_id(key)] = val.get_value<double>();

    c.ga.population = get_or<std::size_t>(pt, "ga.population", c.ga.population);
    c.ga.tournament = get_or<std::size_t>(pt, "ga.tournament", c.ga.tournament);
    c.ga.crossover_rate = get_or<double>(pt, "ga.crossover_rate", c.ga.crossover_rate);
    c.ga.mutation_sigma = get_or<double>(pt, "ga.mutation_sigma", c.ga.mutation_sigma);
    c.ga.mutation_rate = get_or<double>(pt, "ga.mutation_rate", c.ga.mutation_rate);
    c.ga.elites = get_or<std::size_t>(pt, "ga.elites", c.ga.elites);
    c.pso.swarm = get_or<std::size_t>(pt, "pso.swarm", c.pso.swarm);
    c.pso.inertia = get_or<double>(pt, "pso.inertia", c.pso.inertia);
    c.pso.cognitive = get_or<double>(pt, "pso.cognitive", c.pso.cognitive);
    c.pso.social = get_or<double>(pt, "pso.social", c.pso.social);
    c.pso.velocity_clamp = get_or<double>(pt, "pso.velocity_clamp", c.pso.velocity_clamp);

    cfg.go_mode = get_or<std::string>(pt, "go.mode", cfg.go_mode);
    if (cfg.go_mode != "explicit" && cfg.go_mode != "implicit")
        throw InvalidArgument("config: go.mode must be 'explicit' or 'implicit'");
    cfg.function = parse_function_id(get_or<std::string>(pt, "problem.function", std::string(to_string(cfg.function))));

    // Single explicit run.
    ExplicitGoConfig& e = cfg.explicit_go;
    const double delta1 =
        get_or<double>(pt, "go.delta1", get_or<double>(pt, "schedule.delta1", c.ego.delta1_for(cfg.function)));
    const auto kind = parse_schedule_kind(get_or<std::string>(pt, "schedule.kind", "polynomial"));
    e.schedule = NoiseSchedule::polynomial(p, M, delta1);
    e.schedule.kind = kind;
    e.schedule.c = geo_c;
    e.schedule.rate = get_or<double>(pt, "schedule.rate", e.schedule.rate);
    e.samples = c.ego.samples;
    e.kernel = c.ego.kernel;
    const FunctionMetadata md = BenchmarkFunction::metadata_for(cfg.function, c.dim);
    e.lr_rule = md.lr_rule;
    if (c.ego.project) e.box = md.range;
    const std::size_t budget = c.budget;
    e.inner_T = get_or<std::size_t>(pt, "go.inner_t", std::max<std::size_t>(1, budget / (M + 1) / e.samples));
    e.final_stage_T = get_or<std::size_t>(pt, "go.final_t", budget / (M + 1));

    // Single implicit run on a synthetic finite sum.
    ImplicitSettings& is = c.implicit;
    is.optimizer = parse_momentum_kind(get_or<std::string>(pt, "go.optimizer", std::string(to_string(is.optimizer))));
    is.strategy.kind = parse_strategy_kind(get_or<std::string>(pt, "go.strategy", std::string(to_string(is.strategy.kind))));
    is.strategy.exponent = get_or<double>(pt, "go.strategy_exponent", is.strategy.exponent);
    is.initial.eta = get_or<double>(pt, "go.eta", is.initial.eta);
    is.initial.batch = get_or<double>(pt, "go.batch", is.initial.batch);
    is.initial.beta = get_or<double>(pt, "go.beta", is.initial.beta);
    is.M = M;
    is.p = p;
    is.b_max = get_or<std::size_t>(pt, "go.b_max", is.b_max);
    is.noise_model.c_sq = get_or<double>(pt, "noise_model.c_sq", is.noise_model.c_sq);
    is.noise_model.k_sq = get_or<double>(pt, "noise_model.k_sq", is.noise_model.k_sq);
    cfg.estimate_noise = get_or<bool>(pt, "noise_model.estimate", cfg.estimate_noise);
    cfg.probe_points = get_or<std::size_t>(pt, "noise_model.probe_points", cfg.probe_points);
    cfg.probe_batch = get_or<std::size_t>(pt, "noise_model.probe_batch", cfg.probe_batch);
    cfg.resamples = get_or<std::size_t>(pt, "noise_model.resamples", cfg.resamples);
    is.n = get_or<std::size_t>(pt, "problem.n", is.n);
    is.s = get_or<double>(pt, "problem.s", is.s);

    ImplicitGoConfig& g = cfg.implicit_go;
    g.optimizer = is.optimizer;
    g.schedule = NoiseSchedule::polynomial(p, M, 1.0);
    g.schedule.kind = kind;
    g.schedule.c = geo_c;
    g.strategy = is.strategy;
    g.initial = is.initial;
    g.noise_model = is.noise_model;
    g.b_max = is.b_max;
    g.inner_T = get_or<std::size_t>(pt, "go.inner_t", 100);
    return cfg;
}

inline Config load_config(const std::string& path) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::read_ini(path, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InvalidArgument("config " + path + ": " + e.what());
    }
    return parse_config(pt);
}

inline Config parse_config_string(const std::string& text) {
    boost::property_tree::ptree pt;
    std::istringstream is(text);
    boost::property_tree::read_ini(is, pt);
    return parse_config(pt);
}

}  // namespace gradopt
