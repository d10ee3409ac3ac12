#include "bidcast/config.hpp"

#include "bidcast/csv.hpp"
#include "bidcast/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace bidcast {

namespace {

std::string trim(std::string s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.front())) s.erase(s.begin());
    while (!s.empty() && is_space(s.back())) s.pop_back();
    return s;
}

double parse_double(const std::string& v, const std::string& key) {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return x;
}

std::int64_t parse_int(const std::string& v, const std::string& key) {
    std::int64_t x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

ParamRange parse_range(const std::string& v, const std::string& key) {
    const auto colon = v.find(':');
    if (colon == std::string::npos) {
        const double x = parse_double(v, key);
        return {x, x};
    }
    return {parse_double(trim(v.substr(0, colon)), key),
            parse_double(trim(v.substr(colon + 1)), key)};
}

std::vector<RuleKind> parse_rules(const std::string& v, const std::string& key) {
    std::vector<RuleKind> rules;
    std::size_t start = 0;
    while (start <= v.size()) {
        std::size_t comma = v.find(',', start);
        if (comma == std::string::npos) comma = v.size();
        const std::string name = trim(v.substr(start, comma - start));
        start = comma + 1;
        if (name.empty()) continue;
        const auto rk = rule_from_name(name);
        if (!rk) throw ConfigError(key + ": unknown rule '" + name + "'");
        rules.push_back(*rk);
    }
    if (rules.empty()) throw ConfigError(key + ": empty rule list");
    return rules;
}

std::vector<PredictionMode> parse_modes(const std::string& v, const std::string& key) {
    std::vector<PredictionMode> modes;
    std::size_t start = 0;
    while (start <= v.size()) {
        std::size_t comma = v.find(',', start);
        if (comma == std::string::npos) comma = v.size();
        const std::string name = trim(v.substr(start, comma - start));
        start = comma + 1;
        if (name.empty()) continue;
        const auto m = mode_from_name(name);
        if (!m) throw ConfigError(key + ": unknown mode '" + name + "'");
        modes.push_back(*m);
    }
    if (modes.empty()) throw ConfigError(key + ": empty mode list");
    return modes;
}

void set_key(RunConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value) {
    const std::string full = section + "." + key;

    if (section == "simulate") {
        auto& m = cfg.market;
        auto& p = cfg.population;
        if (key == "seed") m.seed = static_cast<std::uint64_t>(parse_int(value, full));
        else if (key == "n_bidders") m.n_bidders = static_cast<int>(parse_int(value, full));
        else if (key == "horizon_hours") m.horizon_hours = static_cast<int>(parse_int(value, full));
        else if (key == "auctions_per_hour") m.auctions_per_hour = parse_double(value, full);
        else if (key == "saturation") m.click_saturation = parse_range(value, full);
        else if (key == "half_sat") m.click_half_sat = parse_range(value, full);
        else if (key == "slope") m.cost_slope = parse_range(value, full);
        else if (key == "diurnal_amplitude") m.diurnal_amplitude = parse_double(value, full);
        else if (key == "curve_drift") {
            if (value == "proportional") m.drift = CurveDrift::Proportional;
            else if (value == "independent") m.drift = CurveDrift::Independent;
            else throw ConfigError(full + ": expected proportional|independent");
        }
        else if (key == "jitter_sd") m.jitter_sd = parse_double(value, full);
        else if (key == "shift") {
            if (value == "none") m.shift = ShiftScenario::None;
            else if (value == "daynight") m.shift = ShiftScenario::DayNight;
            else throw ConfigError(full + ": expected none|daynight");
        } else if (key == "day_uplift") m.day_uplift = parse_double(value, full);
        else if (key == "rules") p.rules = parse_rules(value, full);
        else if (key == "value") p.value = parse_range(value, full);
        else if (key == "eta_rel") p.eta_rel = parse_range(value, full);
        else if (key == "ftrl_eta_rel") p.ftrl_eta_rel = parse_range(value, full);
        else if (key == "beta") p.beta = parse_double(value, full);
        else if (key == "bid_noise_sd") p.bid_noise_sd = parse_double(value, full);
        else if (key == "start_frac") p.start_frac = parse_range(value, full);
        else if (key == "top_slot_fraction") p.top_slot_fraction = parse_double(value, full);
        else if (key == "alpha") p.alpha = parse_double(value, full);
        else if (key == "vis0") p.vis0 = parse_double(value, full);
        else if (key == "vis_sign") p.vis_sign = static_cast<int>(parse_int(value, full));
        else throw ConfigError("unknown key " + full);
        return;
    }
    if (section == "prepare") {
        auto& p = cfg.prepare;
        if (key == "min_hours") p.min_hours = static_cast<std::size_t>(parse_int(value, full));
        else if (key == "shift") p.build_shift = parse_bool(value, full);
        else if (key == "ks_p") p.shift.ks_p_max = parse_double(value, full);
        else if (key == "t_p") p.shift.t_p_max = parse_double(value, full);
        else if (key == "cv_min") p.shift.cv_min = parse_double(value, full);
        else if (key == "input") p.input = value;
        else throw ConfigError("unknown key " + full);
        return;
    }
    if (section == "estimate") {
        auto& e = cfg.rule.estimator;
        if (key == "candidates") e.n_candidates = static_cast<int>(parse_int(value, full));
        else if (key == "deviation_bids") e.n_deviation_bids = static_cast<int>(parse_int(value, full));
        else if (key == "lambda") e.lambda = parse_double(value, full);
        else throw ConfigError("unknown key " + full);
        return;
    }
    if (section == "rules") {
        auto& r = cfg.rule;
        if (key == "beta") r.beta = parse_double(value, full);
        else if (key == "vis_sign") r.vis_sign = static_cast<int>(parse_int(value, full));
        else if (key == "bmax_mult") r.bmax_mult = parse_double(value, full);
        else if (key == "stepahead_refit_value") r.stepahead_refit_value = parse_bool(value, full);
        else throw ConfigError("unknown key " + full);
        return;
    }
    if (section == "baselines") {
        auto& b = cfg.baseline;
        if (key == "rf_trees") b.rf.n_trees = static_cast<int>(parse_int(value, full));
        else if (key == "rf_depth") b.rf.max_depth = static_cast<int>(parse_int(value, full));
        else if (key == "mlp_hidden") b.mlp.hidden = static_cast<int>(parse_int(value, full));
        else if (key == "mlp_epochs") b.mlp.epochs = static_cast<int>(parse_int(value, full));
        else if (key == "mlp_batch") b.mlp.batch = static_cast<int>(parse_int(value, full));
        else if (key == "mlp_lr") b.mlp.learning_rate = parse_double(value, full);
        else if (key == "mlp_stepahead_full_retrain")
            b.mlp_stepahead_full_retrain = parse_bool(value, full);
        else throw ConfigError("unknown key " + full);
        return;
    }
    if (section == "run") {
        auto& r = cfg.run;
        if (key == "seed") r.seed = static_cast<std::uint64_t>(parse_int(value, full));
        else if (key == "methods") r.methods = value;
        else if (key == "modes") r.modes = parse_modes(value, full);
        else if (key == "use_shift") r.use_shift = parse_bool(value, full);
        else if (key == "jobs") r.jobs = static_cast<int>(parse_int(value, full));
        else if (key == "predictions") r.predictions = parse_bool(value, full);
        else throw ConfigError("unknown key " + full);
        return;
    }
    throw ConfigError("unknown section [" + section + "]");
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": key outside a section");
        set_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto dot = key.find('.');
    if (dot == std::string::npos)
        throw ConfigError("override key must be section.key, got '" + key + "'");
    set_key(cfg, key.substr(0, dot), key.substr(dot + 1), value);
}

void validate(const RunConfig& cfg) {
    const auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    const auto& m = cfg.market;
    require(m.n_bidders >= 1, "simulate.n_bidders must be >= 1");
    require(m.horizon_hours >= 1, "simulate.horizon_hours must be >= 1");
    require(m.auctions_per_hour > 0.0, "simulate.auctions_per_hour must be positive");
    for (const auto& [name, r] :
         {std::pair<const char*, ParamRange>{"saturation", m.click_saturation},
          {"half_sat", m.click_half_sat},
          {"slope", m.cost_slope}}) {
        require(r.lo > 0.0 && r.hi >= r.lo,
                std::string("simulate.") + name + " must be a positive lo:hi range");
    }
    require(m.diurnal_amplitude >= 0.0 && m.diurnal_amplitude < 1.0,
            "simulate.diurnal_amplitude must be in [0, 1)");
    require(m.jitter_sd >= 0.0, "simulate.jitter_sd must be >= 0");
    require(m.day_uplift >= 0.0, "simulate.day_uplift must be >= 0");
    const auto& p = cfg.population;
    require(p.value.lo > 0.0 && p.value.hi >= p.value.lo,
            "simulate.value must be a positive lo:hi range");
    require(p.eta_rel.lo >= 0.0 && p.eta_rel.hi >= p.eta_rel.lo,
            "simulate.eta_rel must be a nonnegative lo:hi range");
    require(p.ftrl_eta_rel.lo > 0.0 && p.ftrl_eta_rel.hi >= p.ftrl_eta_rel.lo,
            "simulate.ftrl_eta_rel must be a positive lo:hi range");
    require(p.beta > 0.0 && p.beta <= 1.0, "simulate.beta must be in (0, 1]");
    require(p.bid_noise_sd >= 0.0, "simulate.bid_noise_sd must be >= 0");
    require(p.top_slot_fraction >= 0.0 && p.top_slot_fraction <= 1.0,
            "simulate.top_slot_fraction must be in [0, 1]");
    require(p.alpha >= 0.0, "simulate.alpha must be >= 0");
    require(p.vis0 >= 0.0 && p.vis0 <= 1.0, "simulate.vis0 must be in [0, 1]");
    require(p.vis_sign == 1 || p.vis_sign == -1, "simulate.vis_sign must be +-1");

    require(cfg.rule.beta > 0.0 && cfg.rule.beta <= 1.0, "rules.beta must be in (0, 1]");
    require(cfg.rule.vis_sign == 1 || cfg.rule.vis_sign == -1, "rules.vis_sign must be +-1");
    require(cfg.rule.bmax_mult > 0.0, "rules.bmax_mult must be positive");
    require(cfg.rule.estimator.n_candidates >= 2, "estimate.candidates must be >= 2");
    require(cfg.rule.estimator.n_deviation_bids >= 2, "estimate.deviation_bids must be >= 2");
    require(cfg.rule.estimator.lambda >= 0.0, "estimate.lambda must be >= 0 (0 = auto)");

    require(cfg.baseline.rf.n_trees >= 1, "baselines.rf_trees must be >= 1");
    require(cfg.baseline.rf.max_depth >= 1, "baselines.rf_depth must be >= 1");
    require(cfg.baseline.mlp.hidden >= 1, "baselines.mlp_hidden must be >= 1");
    require(cfg.baseline.mlp.epochs >= 1, "baselines.mlp_epochs must be >= 1");
    require(cfg.baseline.mlp.batch >= 1, "baselines.mlp_batch must be >= 1");
    require(cfg.baseline.mlp.learning_rate > 0.0, "baselines.mlp_lr must be positive");

    require(cfg.prepare.min_hours >= 1, "prepare.min_hours must be >= 1");
    require(cfg.prepare.shift.ks_p_max > 0.0 && cfg.prepare.shift.ks_p_max < 1.0,
            "prepare.ks_p must be in (0, 1)");
    require(cfg.prepare.shift.t_p_max > 0.0 && cfg.prepare.shift.t_p_max < 1.0,
            "prepare.t_p must be in (0, 1)");
    require(cfg.run.jobs >= 0, "run.jobs must be >= 0");
    parse_methods(cfg.run.methods); // throws on unknown names
}

std::string config_echo(const RunConfig& cfg) {
    std::ostringstream out;
    const auto d = [](double x) { return format_double(x); };
    const auto range = [&](const ParamRange& r) { return d(r.lo) + ":" + d(r.hi); };

    out << "[simulate]\n";
    out << "seed = " << cfg.market.seed << "\n";
    out << "n_bidders = " << cfg.market.n_bidders << "\n";
    out << "horizon_hours = " << cfg.market.horizon_hours << "\n";
    out << "auctions_per_hour = " << d(cfg.market.auctions_per_hour) << "\n";
    out << "saturation = " << range(cfg.market.click_saturation) << "\n";
    out << "half_sat = " << range(cfg.market.click_half_sat) << "\n";
    out << "slope = " << range(cfg.market.cost_slope) << "\n";
    out << "diurnal_amplitude = " << d(cfg.market.diurnal_amplitude) << "\n";
    out << "curve_drift = "
        << (cfg.market.drift == CurveDrift::Independent ? "independent" : "proportional")
        << "\n";
    out << "jitter_sd = " << d(cfg.market.jitter_sd) << "\n";
    out << "shift = " << (cfg.market.shift == ShiftScenario::DayNight ? "daynight" : "none")
        << "\n";
    out << "day_uplift = " << d(cfg.market.day_uplift) << "\n";
    out << "rules = ";
    for (std::size_t i = 0; i < cfg.population.rules.size(); ++i)
        out << (i ? "," : "") << rule_name(cfg.population.rules[i]);
    out << "\n";
    out << "value = " << range(cfg.population.value) << "\n";
    out << "eta_rel = " << range(cfg.population.eta_rel) << "\n";
    out << "ftrl_eta_rel = " << range(cfg.population.ftrl_eta_rel) << "\n";
    out << "beta = " << d(cfg.population.beta) << "\n";
    out << "bid_noise_sd = " << d(cfg.population.bid_noise_sd) << "\n";
    out << "start_frac = " << range(cfg.population.start_frac) << "\n";
    out << "top_slot_fraction = " << d(cfg.population.top_slot_fraction) << "\n";
    out << "alpha = " << d(cfg.population.alpha) << "\n";
    out << "vis0 = " << d(cfg.population.vis0) << "\n";
    out << "vis_sign = " << cfg.population.vis_sign << "\n";

    out << "[prepare]\n";
    out << "min_hours = " << cfg.prepare.min_hours << "\n";
    out << "shift = " << (cfg.prepare.build_shift ? "true" : "false") << "\n";
    out << "ks_p = " << d(cfg.prepare.shift.ks_p_max) << "\n";
    out << "t_p = " << d(cfg.prepare.shift.t_p_max) << "\n";
    out << "cv_min = " << d(cfg.prepare.shift.cv_min) << "\n";

    out << "[estimate]\n";
    out << "candidates = " << cfg.rule.estimator.n_candidates << "\n";
    out << "deviation_bids = " << cfg.rule.estimator.n_deviation_bids << "\n";
    out << "lambda = " << d(cfg.rule.estimator.lambda) << "\n";

    out << "[rules]\n";
    out << "beta = " << d(cfg.rule.beta) << "\n";
    out << "vis_sign = " << cfg.rule.vis_sign << "\n";
    out << "bmax_mult = " << d(cfg.rule.bmax_mult) << "\n";
    out << "stepahead_refit_value = " << (cfg.rule.stepahead_refit_value ? "true" : "false")
        << "\n";

    out << "[baselines]\n";
    out << "rf_trees = " << cfg.baseline.rf.n_trees << "\n";
    out << "rf_depth = " << cfg.baseline.rf.max_depth << "\n";
    out << "mlp_hidden = " << cfg.baseline.mlp.hidden << "\n";
    out << "mlp_epochs = " << cfg.baseline.mlp.epochs << "\n";
    out << "mlp_batch = " << cfg.baseline.mlp.batch << "\n";
    out << "mlp_lr = " << d(cfg.baseline.mlp.learning_rate) << "\n";
    out << "mlp_stepahead_full_retrain = "
        << (cfg.baseline.mlp_stepahead_full_retrain ? "true" : "false") << "\n";

    out << "[run]\n";
    out << "seed = " << cfg.run.seed << "\n";
    out << "methods = " << cfg.run.methods << "\n";
    out << "modes = ";
    for (std::size_t i = 0; i < cfg.run.modes.size(); ++i)
        out << (i ? "," : "") << mode_name(cfg.run.modes[i]);
    out << "\n";
    out << "use_shift = " << (cfg.run.use_shift ? "true" : "false") << "\n";
    out << "predictions = " << (cfg.run.predictions ? "true" : "false") << "\n";
    return out.str();
}

} // namespace bidcast
