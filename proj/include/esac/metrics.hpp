#pragma once

#include <fstream>
#include <string>

#include "esac/es_core.hpp"
#include "esac/parallel_exec.hpp"
#include "esac/sac_core.hpp"

namespace esac {

// JSON-lines writer for the per-generation / per-episode / per-update records.
// Every line is flushed on write so partial metrics survive interruption.
class MetricsWriter {
public:
    explicit MetricsWriter(const std::string& path);
    void write_generation(const GenerationRecord& rec);
    void write_sac_episode(const SacEpisodeRecord& rec);
    void write_sac_update(long counter, const SacLosses& losses);

private:
    std::ofstream out_;
};

// One-row run summary, schema:
// algorithm,env,seed,generations,best_validation,final_validation,
// total_updates,total_env_steps,wall_s
void write_summary_csv(const std::string& path, const std::string& algorithm,
                       const std::string& env_name, std::uint64_t seed,
                       const RunSummary& summary);

// Timing table, schema: worker_count,population,mean_s,std_s,samples
void write_timing_csv(const std::string& path, const std::vector<TimingSample>& samples);

// Reproducibility comparisons ignore wall-clock fields (the only
// nondeterministic ones): parse each JSONL line, drop them, re-serialize.
std::string canonicalize_metrics(const std::string& jsonl_text);

}  // namespace esac
