#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace wfs {

using Weight = std::int64_t;
// sparse multiset over place indices, sorted by place, no zero entries
using Bag = std::vector<std::pair<std::size_t, Weight>>;
// dense place-indexed vectors; a Marking never holds negative entries
using Marking = std::vector<std::int64_t>;
using ZMarking = std::vector<std::int64_t>;
using Run = std::vector<std::size_t>;
using BigInt = boost::multiprecision::cpp_int;

class NetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public NetError {
public:
    ParseError(std::size_t line, std::size_t col, const std::string& what);
    std::size_t line;
    std::size_t col;
};

class OverflowError : public NetError {
public:
    OverflowError() : NetError("token count overflow") {}
};

class NotEnabled : public NetError {
public:
    NotEnabled(std::size_t transition, std::size_t place, const std::string& what)
        : NetError(what), transition(transition), place(place) {}
    std::size_t transition;
    std::size_t place;
};

class NotEnabledAt : public NetError {
public:
    NotEnabledAt(std::size_t index, std::size_t transition, const std::string& what)
        : NetError(what), index(index), transition(transition) {}
    std::size_t index;
    std::size_t transition;
};

enum class WorkflowFault { ProducesIntoInitial, ConsumesFromFinal, NotOnPath, BadEndpoints };

class WorkflowError : public NetError {
public:
    WorkflowError(WorkflowFault fault, std::string element, const std::string& what)
        : NetError(what), fault(fault), element(std::move(element)) {}
    WorkflowFault fault;
    std::string element;
};

struct PetriNet {
    std::vector<std::string> places;
    std::vector<std::string> transitions;
    std::vector<Bag> pre;
    std::vector<Bag> post;
    // designations read from the text format, if any
    std::optional<std::size_t> initial;
    std::optional<std::size_t> final;

    std::size_t num_places() const { return places.size(); }
    std::size_t num_transitions() const { return transitions.size(); }

    std::size_t add_place(const std::string& name);
    std::size_t add_transition(const std::string& name, Bag pre, Bag post);
    std::optional<std::size_t> find_place(std::string_view name) const;
    std::optional<std::size_t> find_transition(std::string_view name) const;
    std::size_t place(std::string_view name) const;
    std::size_t transition(std::string_view name) const;

    Weight pre_at(std::size_t t, std::size_t p) const;
    Weight post_at(std::size_t t, std::size_t p) const;
    std::vector<std::int64_t> effect(std::size_t t) const;
    // largest arc weight, 0 for a net without arcs
    Weight max_weight() const;

    bool operator==(const PetriNet&) const = default;
};

struct WorkflowNet {
    PetriNet net;
    std::size_t initial;
    std::size_t final;

    std::size_t i() const { return initial; }
    std::size_t f() const { return final; }
};

struct NetMetrics {
    BigInt abs_value;  // |P| + |T|
    BigInt norm;       // largest arc weight + 1
    BigInt size;       // abs_value * (1 + ceil(log2 norm))
};

NetMetrics net_metrics(const PetriNet& net);

// builds a bag from (name, weight) items, summing repeats
Bag make_bag(const PetriNet& net, const std::vector<std::pair<std::string, Weight>>& items);
Bag normalize_bag(Bag bag);

PetriNet parse_net(std::string_view text);
std::string serialize_net(const PetriNet& net);

WorkflowNet validate_workflow(const PetriNet& net, std::size_t i, std::size_t f);
// uses the designations stored on the net
WorkflowNet validate_workflow(const PetriNet& net);
WorkflowNet parse_workflow(std::string_view text);

Marking unit_marking(const PetriNet& net, std::size_t p, std::int64_t count = 1);
Marking make_marking(const PetriNet& net, const std::vector<std::pair<std::string, std::int64_t>>& items);
std::string format_marking(const PetriNet& net, const std::vector<std::int64_t>& m);
std::int64_t marking_norm(const std::vector<std::int64_t>& m);

bool enabled(const PetriNet& net, const Marking& m, std::size_t t);
Marking fire(const PetriNet& net, const Marking& m, std::size_t t);
ZMarking z_fire(const PetriNet& net, const ZMarking& m, std::size_t t);

enum class Semantics { N, Z };

struct RunResult {
    std::vector<std::int64_t> final;
    std::vector<std::vector<std::int64_t>> trace;  // includes the start marking
};

RunResult apply_run(const PetriNet& net, const std::vector<std::int64_t>& m, const Run& run,
                    Semantics semantics);

Run parse_run(const PetriNet& net, const std::vector<std::string>& names);
std::vector<std::string> run_names(const PetriNet& net, const Run& run);

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

}  // namespace wfs
