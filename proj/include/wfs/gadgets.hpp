#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfs/core.hpp"

namespace wfs {

struct Fig1 {
    WorkflowNet left;
    WorkflowNet middle;
    WorkflowNet right;
};

Fig1 fig1_examples();

bool is_conservative(const PetriNet& net);

struct Reversibility {
    bool reversible = false;
    // inverse[t] is some transition undoing t, when one exists
    std::vector<std::optional<std::size_t>> inverse;
};

Reversibility is_reversible(const PetriNet& net);

class GadgetError : public NetError {
public:
    using NetError::NetError;
};

class NotConservative : public GadgetError {
public:
    NotConservative() : GadgetError("net is not conservative") {}
};

class SumMismatch : public GadgetError {
public:
    SumMismatch() : GadgetError("source and target markings must carry the same positive number of tokens") {}
};

class NotReversible : public GadgetError {
public:
    NotReversible() : GadgetError("net is not reversible") {}
};

class GenerationFailed : public GadgetError {
public:
    GenerationFailed() : GadgetError("no workflow net found within the retry budget") {}
};

// a marking given by place names
using NamedMarking = std::vector<std::pair<std::string, std::int64_t>>;

struct ReductionInstance {
    WorkflowNet wf;
    // original name -> name in the output net
    std::map<std::string, std::string> place_map;
    std::map<std::string, std::string> transition_map;
    NamedMarking parameters;
    NamedMarking source;
    NamedMarking target;
    // false when some place cannot lie on a path from i to o; the net is still returned
    bool path_condition = true;
};

ReductionInstance pspace_reduction(const PetriNet& net, const NamedMarking& m, const NamedMarking& target);

WorkflowNet structural_hardness_transform(const WorkflowNet& wf);

struct CountingGadget {
    PetriNet net;
    std::size_t s, c, f, b;
    std::int64_t count;

    Marking start() const;  // {s:1, c:1}
    Marking end() const;    // {f:1, c:1, b:count}
};

CountingGadget naive_counting_gadget(std::int64_t c);

// the five counting properties, decided on the explicit reachability graph
std::array<bool, 5> counting_gadget_properties(const CountingGadget& g);

ReductionInstance expspace_reduction(const PetriNet& net, const NamedMarking& m, const NamedMarking& target,
                                     std::int64_t c_n);

// smallest budget letting the mirrored copy of a shortest run from m to target fire,
// or nullopt if target is not found
std::optional<std::int64_t> suggest_cn(const PetriNet& net, const NamedMarking& m, const NamedMarking& target,
                                       std::size_t node_cap = 100'000);

struct RandomParams {
    int places = 4;
    int transitions = 4;
    int max_weight = 2;
};

WorkflowNet random_workflow(std::uint64_t seed, const RandomParams& params, int retries = 1000);

}  // namespace wfs
