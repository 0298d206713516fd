#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wfs/core.hpp"
#include "wfs/explore.hpp"

namespace wfs {

enum class Holds { True, False, Unknown };

const char* holds_name(Holds h);

using NamedCounts = std::vector<std::pair<std::string, std::int64_t>>;

struct Certificate {
    std::string reason;
    std::optional<std::int64_t> k;
    std::vector<std::string> run;  // from {i:k}
    NamedCounts marking;           // reached by run
    NamedCounts tau;               // firing counts of a homogeneous witness
    std::vector<std::string> dead_transitions;
};

struct Verdict {
    std::string property;
    Holds holds = Holds::Unknown;
    NamedCounts parameters;
    std::optional<Certificate> certificate;
    bool complete = true;
    std::size_t vertices_explored = 0;
    double time_ms = 0;
};

struct SoundOptions {
    std::size_t node_cap = 1'000'000;
    std::int64_t k_max = 64;
    unsigned constant = 1;
};

NamedCounts named_marking(const PetriNet& net, const std::vector<std::int64_t>& m);

// ---- preprocessing ----

std::vector<bool> nonredundant_saturation(const WorkflowNet& wf);

struct CoverRun {
    std::int64_t k;
    Run run;
};

// a run from {i:k} marking p, built along the saturation order; nullopt for redundant p
std::optional<CoverRun> place_cover_run(const WorkflowNet& wf, std::size_t p);

struct Reduction {
    WorkflowNet wf;  // final index is meaningless when disconnected
    bool disconnected = false;
    std::vector<std::string> removed_places;
    std::vector<std::string> removed_transitions;
};

Reduction remove_redundant(const WorkflowNet& wf);

// largest set of places other than f that stays marked once marked
std::vector<bool> maximal_trap(const WorkflowNet& wf);

struct ShortCircuit {
    PetriNet net;
    std::size_t t_sc;
};

ShortCircuit short_circuit(const WorkflowNet& wf);
WorkflowNet scale_net(const WorkflowNet& wf, std::int64_t k);

// ---- decision procedures ----

Verdict check_1_sound(const WorkflowNet& wf, const SoundOptions& opts = {});
Verdict check_classical(const WorkflowNet& wf, const SoundOptions& opts = {});
Verdict check_k_sound(const WorkflowNet& wf, std::int64_t k, const SoundOptions& opts = {});
Verdict oracle_k_sound(const WorkflowNet& wf, std::int64_t k, const SoundOptions& opts = {});
Verdict check_generalised(const WorkflowNet& wf, const SoundOptions& opts = {});
Verdict check_structural(const WorkflowNet& wf, const SoundOptions& opts = {});

struct SoundNums {
    std::int64_t p = 0;
    // sound set is {i*p : 1 <= i < k_limit}; nullopt means no unsound multiple was found
    std::optional<std::int64_t> k_limit = 0;
    bool complete = true;
    std::int64_t checked_up_to = 0;  // multiples c*p checked when k_limit is open
    std::optional<Certificate> certificate;  // why no p was found, or the first unsound multiple
    std::size_t vertices_explored = 0;
    double time_ms = 0;

    bool contains(std::int64_t k) const;
};

SoundNums compute_sound_numbers(const WorkflowNet& wf, const SoundOptions& opts = {});

}  // namespace wfs
