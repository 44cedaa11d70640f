#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "esac/amt.hpp"
#include "esac/nnet.hpp"

namespace esac {

// Byte-level ParamVector serialization: spec hash (u64), length (u64), then
// the values as little-endian 64-bit floats.
void append_param_block(std::string& out, const ParamVector& p);
ParamVector read_param_block(const std::string& in, std::size_t& offset);

// Checkpoint payload. There is no sequential RNG cursor to store: every stream
// is re-derived from (master_seed, purpose, generation/phase indices), so the
// seed plus the two counters fully determine future randomness.
struct CheckpointData {
    std::uint32_t version = 1;
    std::string algorithm;
    std::string env_name;
    std::uint64_t master_seed = 0;
    int next_generation = 1;
    int completed_phases = 0;
    double incumbent_fitness = 0.0;
    MutationState mutation{0.0, 0.0, 0.0, 0};
    // Named parameter blocks, e.g. theta_es, sac_policy, sac_value,
    // sac_value_target, sac_q1, sac_q2, incumbent.
    std::vector<std::pair<std::string, ParamVector>> blocks;
};

void save_checkpoint(const std::string& path, const CheckpointData& data);
CheckpointData load_checkpoint(const std::string& path);

}  // namespace esac
