#include "esac/metrics.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace esac {

using nlohmann::json;

MetricsWriter::MetricsWriter(const std::string& path) : out_(path, std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open metrics file: " + path);
}

void MetricsWriter::write_generation(const GenerationRecord& rec) {
    json j{{"type", "generation"},
           {"generation", rec.generation},
           {"best", rec.best},
           {"mean", rec.mean},
           {"stddev", rec.stddev},
           {"sigma", rec.sigma},
           {"p_sac", rec.p_sac},
           {"sac_phase_ran", rec.sac_phase_ran},
           {"updates_this_gen", rec.updates_this_gen},
           {"updates_total", rec.updates_total},
           {"env_steps_total", rec.env_steps_total},
           {"episodes_total", rec.episodes_total},
           {"winner_mean", rec.winner_mean},
           {"wall_s", rec.wall_s}};
    if (rec.has_validation) j["validation"] = rec.validation;
    out_ << j.dump() << "\n";
    out_.flush();
}

void MetricsWriter::write_sac_episode(const SacEpisodeRecord& rec) {
    json j{{"type", "sac_episode"},
           {"episode", rec.episode},
           {"episodic_return", rec.episodic_return},
           {"length", rec.length},
           {"env_steps_total", rec.env_steps_total},
           {"updates_total", rec.updates_total},
           {"skipped_updates_total", rec.skipped_updates_total},
           {"value_loss", rec.losses.value},
           {"q1_loss", rec.losses.q1},
           {"q2_loss", rec.losses.q2},
           {"policy_loss", rec.losses.policy},
           {"wall_s", rec.wall_s}};
    if (rec.has_validation) j["validation"] = rec.validation;
    out_ << j.dump() << "\n";
    out_.flush();
}

void MetricsWriter::write_sac_update(long counter, const SacLosses& losses) {
    json j{{"type", "sac_update"},
           {"update", counter},
           {"value_loss", losses.value},
           {"q1_loss", losses.q1},
           {"q2_loss", losses.q2},
           {"policy_loss", losses.policy}};
    out_ << j.dump() << "\n";
    out_.flush();
}

void write_summary_csv(const std::string& path, const std::string& algorithm,
                       const std::string& env_name, std::uint64_t seed,
                       const RunSummary& summary) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open summary file: " + path);
    out << "algorithm,env,seed,generations,best_validation,final_validation,"
           "total_updates,total_env_steps,wall_s\n";
    std::ostringstream row;
    row.precision(17);
    row << algorithm << ',' << env_name << ',' << seed << ',' << summary.generations_run << ','
        << summary.best_validation << ',' << summary.final_validation << ','
        << summary.total_updates << ',' << summary.total_env_steps << ',' << summary.wall_s;
    out << row.str() << "\n";
}

void write_timing_csv(const std::string& path, const std::vector<TimingSample>& samples) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open timing file: " + path);
    out << "worker_count,population,mean_s,std_s,samples\n";
    for (const auto& s : samples) {
        std::ostringstream row;
        row.precision(17);
        row << s.worker_count << ',' << s.population << ',' << s.mean_s << ',' << s.std_s << ','
            << s.samples;
        out << row.str() << "\n";
    }
}

std::string canonicalize_metrics(const std::string& jsonl_text) {
    std::istringstream in(jsonl_text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        j.erase("wall_s");
        out << j.dump() << "\n";
    }
    return out.str();
}

}  // namespace esac
