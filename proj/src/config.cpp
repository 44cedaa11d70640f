#include "esac/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace esac {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& msg) {
    throw ConfigError("key '" + key + "': " + msg);
}

double parse_double(const std::string& key, const std::string& v, int line) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        fail(line, "key '" + key + "': expected a number, got '" + v + "'");
    }
    if (pos != v.size()) fail(line, "key '" + key + "': trailing characters in '" + v + "'");
    if (!std::isfinite(x)) fail(line, "key '" + key + "': value must be finite");
    return x;
}

long parse_long(const std::string& key, const std::string& v, int line) {
    std::size_t pos = 0;
    long x = 0;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        fail(line, "key '" + key + "': expected an integer, got '" + v + "'");
    }
    if (pos != v.size()) fail(line, "key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& v, int line) {
    return static_cast<int>(parse_long(key, v, line));
}

std::uint64_t parse_u64(const std::string& key, const std::string& v, int line) {
    std::size_t pos = 0;
    std::uint64_t x = 0;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        fail(line, "key '" + key + "': expected an unsigned integer, got '" + v + "'");
    }
    if (pos != v.size()) fail(line, "key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(v);
    while (std::getline(in, cur, ',')) parts.push_back(trim(cur));
    return parts;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v, int line) {
    std::vector<int> out;
    for (const auto& p : split_list(v)) out.push_back(parse_int(key, p, line));
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v, int line) {
    std::vector<double> out;
    for (const auto& p : split_list(v)) out.push_back(parse_double(key, p, line));
    return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& key, const std::string& v,
                                          int line) {
    std::vector<std::uint64_t> out;
    for (const auto& p : split_list(v)) out.push_back(parse_u64(key, p, line));
    return out;
}

void apply(RunConfig& rc, const std::string& key, const std::string& v, int line) {
    if (key == "env") rc.env_name = v;
    else if (key == "algorithm") rc.algorithm = v;
    else if (key == "seed") rc.seed = parse_u64(key, v, line);
    else if (key == "generations") rc.generations = parse_int(key, v, line);
    else if (key == "workers") rc.workers = parse_int(key, v, line);
    else if (key == "hidden") rc.hidden = parse_int_list(key, v, line);
    else if (key == "episodes_per_offspring") rc.episodes_per_offspring = parse_int(key, v, line);
    else if (key == "validation_every") rc.validation_every = parse_int(key, v, line);
    else if (key == "stop_at_validation") rc.stop_at_validation = parse_double(key, v, line);
    else if (key == "es.n") rc.n = parse_int(key, v, line);
    else if (key == "es.sigma") rc.sigma = parse_double(key, v, line);
    else if (key == "es.alpha") rc.alpha_es = parse_double(key, v, line);
    else if (key == "esac.e") rc.e = parse_double(key, v, line);
    else if (key == "esac.g") rc.g = parse_int(key, v, line);
    else if (key == "esac.p_sac_initial") rc.p_sac_initial = parse_double(key, v, line);
    else if (key == "esac.p_sac_decay") rc.p_sac_decay = parse_double(key, v, line);
    else if (key == "esac.sac_episodes_per_phase")
        rc.sac_episodes_per_phase = parse_int(key, v, line);
    else if (key == "esac.swap_prob") rc.swap_prob = parse_double(key, v, line);
    else if (key == "amt.zeta") rc.zeta = parse_double(key, v, line);
    else if (key == "sac.gamma") rc.sac.gamma = parse_double(key, v, line);
    else if (key == "sac.lr") rc.sac.lr = parse_double(key, v, line);
    else if (key == "sac.tau") rc.sac.tau = parse_double(key, v, line);
    else if (key == "sac.lambda") rc.sac.lambda = parse_double(key, v, line);
    else if (key == "sac.batch_size") rc.sac.batch_size = parse_int(key, v, line);
    else if (key == "sac.replay_capacity") rc.sac.replay_capacity = parse_int(key, v, line);
    else if (key == "sac.step_budget") rc.step_budget = parse_long(key, v, line);
    else if (key == "sac.start_steps") rc.start_steps = parse_int(key, v, line);
    else if (key == "sac.updates_per_step") rc.updates_per_step = parse_int(key, v, line);
    else if (key == "sac.validation_every_episodes")
        rc.validation_every_episodes = parse_int(key, v, line);
    else if (key == "sweep.parameter") rc.sweep_parameter = v;
    else if (key == "sweep.values") rc.sweep_values = parse_double_list(key, v, line);
    else if (key == "sweep.seeds") rc.sweep_seeds = parse_u64_list(key, v, line);
    else if (key == "bench.workers") rc.bench_workers = parse_int_list(key, v, line);
    else if (key == "bench.populations") rc.bench_populations = parse_int_list(key, v, line);
    else if (key == "bench.timed_generations")
        rc.bench_timed_generations = parse_int(key, v, line);
    else fail(line, "unknown key '" + key + "'");
}

void validate(const RunConfig& rc) {
    if (rc.env_name != "cyclic-mdp" && rc.env_name != "pendulum" &&
        rc.env_name != "pointmass-sparse")
        bad_key("env", "must be one of cyclic-mdp, pendulum, pointmass-sparse");
    if (rc.algorithm != "es" && rc.algorithm != "esac" && rc.algorithm != "sac")
        bad_key("algorithm", "must be one of es, esac, sac");
    if (rc.generations < 1) bad_key("generations", "must be >= 1");
    if (rc.workers < 1) bad_key("workers", "must be >= 1");
    if (rc.hidden.empty()) bad_key("hidden", "needs at least one layer width");
    for (int h : rc.hidden)
        if (h < 1) bad_key("hidden", "layer widths must be >= 1");
    if (rc.episodes_per_offspring < 1) bad_key("episodes_per_offspring", "must be >= 1");
    if (rc.validation_every < 1) bad_key("validation_every", "must be >= 1");
    if (rc.n < 2) bad_key("es.n", "must be >= 2");
    if (rc.sigma <= 0.0) bad_key("es.sigma", "must be > 0");
    if (rc.alpha_es <= 0.0) bad_key("es.alpha", "must be > 0");
    if (rc.e <= 0.0 || rc.e > 1.0) bad_key("esac.e", "winner fraction must be in (0,1]");
    if (static_cast<int>(std::floor(rc.n * rc.e)) < 1)
        bad_key("esac.e", "e * n < 1 leaves no winners");
    if (rc.g < 1) bad_key("esac.g", "must be >= 1");
    if (rc.p_sac_initial < 0.0 || rc.p_sac_initial > 1.0)
        bad_key("esac.p_sac_initial", "must be in [0,1]");
    if (rc.p_sac_decay <= 0.0 || rc.p_sac_decay >= 1.0)
        bad_key("esac.p_sac_decay", "must be in (0,1)");
    if (rc.sac_episodes_per_phase < 1) bad_key("esac.sac_episodes_per_phase", "must be >= 1");
    if (rc.swap_prob < 0.0 || rc.swap_prob > 1.0) bad_key("esac.swap_prob", "must be in [0,1]");
    if (rc.algorithm == "esac" && (rc.p_sac_initial > 0.0 || rc.swap_prob > 0.0) &&
        static_cast<int>(std::floor(rc.n * rc.e)) + 1 > rc.n)
        bad_key("esac.e", "w + 1 exceeds the population size");
    if (rc.zeta < 0.0) bad_key("amt.zeta", "must be >= 0");
    if (rc.sac.gamma <= 0.0 || rc.sac.gamma >= 1.0) bad_key("sac.gamma", "must be in (0,1)");
    if (rc.sac.lr <= 0.0) bad_key("sac.lr", "must be > 0");
    if (rc.sac.tau <= 0.0 || rc.sac.tau > 1.0) bad_key("sac.tau", "must be in (0,1]");
    if (rc.sac.lambda <= 0.0) bad_key("sac.lambda", "temperature must be > 0");
    if (rc.sac.batch_size < 1) bad_key("sac.batch_size", "must be >= 1");
    if (rc.sac.replay_capacity < 1) bad_key("sac.replay_capacity", "must be >= 1");
    if (rc.step_budget < 0) bad_key("sac.step_budget", "must be >= 0");
    if (rc.start_steps < 0) bad_key("sac.start_steps", "must be >= 0");
    if (rc.updates_per_step < 1) bad_key("sac.updates_per_step", "must be >= 1");
    if (rc.validation_every_episodes < 1)
        bad_key("sac.validation_every_episodes", "must be >= 1");
    if (rc.sweep_parameter != "zeta" && rc.sweep_parameter != "sigma")
        bad_key("sweep.parameter", "must be zeta or sigma");
    for (double v : rc.sweep_values) {
        if (rc.sweep_parameter == "sigma" && v <= 0.0)
            bad_key("sweep.values", "sigma values must be > 0");
        if (rc.sweep_parameter == "zeta" && v < 0.0)
            bad_key("sweep.values", "zeta values must be >= 0");
    }
    if (rc.bench_workers.empty()) bad_key("bench.workers", "needs at least one entry");
    for (int w : rc.bench_workers)
        if (w < 1) bad_key("bench.workers", "entries must be >= 1");
    if (rc.bench_populations.empty()) bad_key("bench.populations", "needs at least one entry");
    for (int p : rc.bench_populations)
        if (p < 1) bad_key("bench.populations", "entries must be >= 1");
    if (rc.bench_timed_generations < 1) bad_key("bench.timed_generations", "must be >= 1");
    if (!std::isnan(rc.stop_at_validation) && !std::isfinite(rc.stop_at_validation))
        bad_key("stop_at_validation", "must be finite");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig rc;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(lineno, "empty key");
        if (value.empty()) fail(lineno, "empty value for key '" + key + "'");
        if (!seen.insert(key).second) fail(lineno, "duplicate key '" + key + "'");
        apply(rc, key, value, lineno);
    }
    validate(rc);
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

EsRunConfig make_es_config(const RunConfig& rc) {
    EsRunConfig c;
    c.env_name = rc.env_name;
    c.hidden_dims = rc.hidden;
    c.n = rc.n;
    c.sigma = rc.sigma;
    c.alpha_es = rc.alpha_es;
    c.episodes_per_offspring = rc.episodes_per_offspring;
    c.generations = rc.generations;
    c.validation_every = rc.validation_every;
    c.worker_count = rc.workers;
    c.master_seed = rc.seed;
    c.stop_at_validation = rc.stop_at_validation;
    return c;
}

EsacRunConfig make_esac_config(const RunConfig& rc) {
    EsacRunConfig c;
    c.env_name = rc.env_name;
    c.hidden_dims = rc.hidden;
    c.n = rc.n;
    c.sigma = rc.sigma;
    c.alpha_es = rc.alpha_es;
    c.e = rc.e;
    c.g = rc.g;
    c.p_sac_initial = rc.p_sac_initial;
    c.p_sac_decay = rc.p_sac_decay;
    c.sac_episodes_per_phase = rc.sac_episodes_per_phase;
    c.crossover_swap_prob = rc.swap_prob;
    c.zeta = rc.zeta;
    c.sac = rc.sac;
    c.sac.hidden_dims = rc.hidden;
    c.episodes_per_offspring = rc.episodes_per_offspring;
    c.generations = rc.generations;
    c.validation_every = rc.validation_every;
    c.worker_count = rc.workers;
    c.master_seed = rc.seed;
    c.stop_at_validation = rc.stop_at_validation;
    return c;
}

SacRunConfig make_sac_config(const RunConfig& rc) {
    SacRunConfig c;
    c.env_name = rc.env_name;
    c.sac = rc.sac;
    c.sac.hidden_dims = rc.hidden;
    c.step_budget = rc.step_budget;
    c.start_steps = rc.start_steps;
    c.updates_per_step = rc.updates_per_step;
    c.validation_every_episodes = rc.validation_every_episodes;
    c.master_seed = rc.seed;
    return c;
}

}  // namespace esac
