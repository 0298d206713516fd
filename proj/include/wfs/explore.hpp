#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wfs/core.hpp"

namespace wfs {

struct ExploreCaps {
    std::size_t max_vertices = 1'000'000;
    // no reachable marking may hold more than this many tokens in one place
    std::optional<std::int64_t> max_norm;
};

enum class CapHit { None, Vertices, Norm };

class ExploreExceeded : public NetError {
public:
    using NetError::NetError;
};

class IncompleteGraph : public NetError {
public:
    IncompleteGraph() : NetError("reachability graph is incomplete") {}
};

class NotBounded : public NetError {
public:
    NotBounded() : NetError("net is not bounded from the given marking") {}
};

struct ReachEdge {
    std::size_t source;
    std::size_t transition;
    std::size_t target;
};

struct ReachGraph {
    std::vector<Marking> vertices;
    std::vector<ReachEdge> edges;
    // breadth-first tree: parent vertex and transition, root points to itself
    std::vector<std::size_t> parent;
    std::vector<std::size_t> via;
    CapHit caps_hit = CapHit::None;
    // for a norm cap hit: the vertex and transition producing the oversized marking
    std::optional<std::pair<std::size_t, std::size_t>> cap_edge;

    std::size_t root() const { return 0; }
    bool complete() const { return caps_hit == CapHit::None; }
    std::optional<std::size_t> find(const Marking& m) const;
    Run path_to(std::size_t v) const;
    std::string edge_list(const PetriNet& net) const;
};

ReachGraph build_reach_graph(const PetriNet& net, const Marking& m0, const ExploreCaps& caps = {});

inline constexpr std::int64_t omega = std::numeric_limits<std::int64_t>::max();

struct BoundednessVerdict {
    enum class Kind { Bounded, Unbounded, Exceeded } kind;
    Marking bound;       // Bounded
    Run prefix;          // Unbounded: m0 -> m'
    Run pump;            // Unbounded: m' -> m'' with m' < m''
    std::size_t tree_nodes = 0;
};

BoundednessVerdict decide_boundedness(const PetriNet& net, const Marking& m0,
                                      std::size_t node_cap = 1'000'000);

struct CyclicityResult {
    bool cyclic;
    std::optional<Marking> counterexample;
};

CyclicityResult decide_cyclicity(const PetriNet& net, const Marking& m0, const ExploreCaps& caps = {});
CyclicityResult decide_cyclicity(const ReachGraph& g);

std::vector<bool> quasi_liveness(const PetriNet& net, const Marking& m0, std::size_t node_cap = 1'000'000);
std::vector<bool> quasi_liveness_explicit(const PetriNet& net, const ReachGraph& g);

std::vector<bool> backward_reachable(const ReachGraph& g, const std::function<bool(const Marking&)>& target);

// Karp-Miller tree, exposed for tests; entries equal to omega stand for unbounded counts
struct KarpMillerTree {
    std::vector<Marking> labels;
    std::vector<std::size_t> parent;
    std::vector<std::size_t> via;
    bool exceeded = false;
    // first acceleration: firing `transition` at node `parent` strictly covered `ancestor`;
    // all labels on that path are still finite
    struct Pump {
        std::size_t ancestor;
        std::size_t parent;
        std::size_t transition;
    };
    std::optional<Pump> first_pump;
};

KarpMillerTree karp_miller(const PetriNet& net, const Marking& m0, std::size_t node_cap,
                           bool stop_at_pump = false);

}  // namespace wfs
