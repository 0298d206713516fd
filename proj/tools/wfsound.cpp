#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfs/gadgets.hpp"
#include "wfs/sound.hpp"

using namespace wfs;
using json = nlohmann::ordered_json;

namespace {

constexpr int exit_usage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

WorkflowNet load_workflow(const std::string& path) { return parse_workflow(read_file(path)); }

// "p1:1,p2:2" or "p1,p2" with an implicit count of one
NamedMarking parse_marking_arg(const std::string& text) {
    NamedMarking out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        auto colon = item.find(':');
        std::string name = item.substr(0, colon);
        std::int64_t n = 1;
        if (colon != std::string::npos) {
            try {
                n = std::stoll(item.substr(colon + 1));
            } catch (const std::exception&) {
                throw UsageError("bad marking item '" + item + "'");
            }
        }
        out.emplace_back(name, n);
    }
    return out;
}

json counts_json(const NamedCounts& counts) {
    json j = json::object();
    for (const auto& [name, n] : counts) j[name] = n;
    return j;
}

std::string counts_text(const NamedCounts& counts) {
    std::string s = "{";
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (j) s += ", ";
        s += counts[j].first + ":" + std::to_string(counts[j].second);
    }
    return s + "}";
}

json certificate_json(const Certificate& c) {
    json j;
    j["reason"] = c.reason;
    if (c.k) j["k"] = *c.k;
    j["run"] = c.run;
    j["marking"] = counts_json(c.marking);
    if (!c.tau.empty()) j["tau"] = counts_json(c.tau);
    if (!c.dead_transitions.empty()) j["deadTransitions"] = c.dead_transitions;
    return j;
}

void print_certificate_text(std::ostream& out, const Certificate& c) {
    out << "  reason: " << c.reason << "\n";
    if (c.k) out << "  k: " << *c.k << "\n";
    if (!c.run.empty()) {
        out << "  run:";
        for (const auto& t : c.run) out << " " << t;
        out << "\n";
    }
    if (!c.marking.empty()) out << "  marking: " << counts_text(c.marking) << "\n";
    if (!c.tau.empty()) out << "  tau: " << counts_text(c.tau) << "\n";
    if (!c.dead_transitions.empty()) {
        out << "  dead:";
        for (const auto& t : c.dead_transitions) out << " " << t;
        out << "\n";
    }
}

json document(const std::string& property, Holds holds, const json& parameters, const std::optional<Certificate>& cert,
              bool complete, std::size_t vertices, double ms) {
    json j;
    j["property"] = property;
    j["holds"] = holds_name(holds);
    j["parameters"] = parameters;
    if (cert) j["certificate"] = certificate_json(*cert);
    j["complete"] = complete;
    j["stats"] = {{"verticesExplored", vertices}, {"timeMs", ms}};
    return j;
}

int exit_code(Holds h) {
    switch (h) {
        case Holds::True: return 0;
        case Holds::False: return 1;
        default: return 2;
    }
}

int report(const Verdict& v, bool as_json) {
    json params = json::object();
    for (const auto& [name, n] : v.parameters) params[name] = n;
    if (as_json) {
        std::cout << document(v.property, v.holds, params, v.certificate, v.complete, v.vertices_explored, v.time_ms)
                         .dump(2)
                  << "\n";
    } else {
        std::cout << v.property << ": " << holds_name(v.holds) << "\n";
        for (const auto& [name, n] : v.parameters) std::cout << "  " << name << ": " << n << "\n";
        if (v.certificate) print_certificate_text(std::cout, *v.certificate);
        if (!v.complete) std::cout << "  complete: false\n";
    }
    return exit_code(v.holds);
}

int report(const SoundNums& s, std::int64_t k_max, bool as_json) {
    Holds h = s.p > 0 ? Holds::True : s.complete ? Holds::False : Holds::Unknown;
    json params;
    params["kMax"] = k_max;
    params["p"] = s.p;
    params["kLimit"] = s.k_limit ? json(*s.k_limit) : json("infinite");
    if (!s.k_limit) params["checkedUpTo"] = s.checked_up_to;
    if (as_json) {
        std::cout << document("sound-numbers", h, params, s.certificate, s.complete, s.vertices_explored, s.time_ms)
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "sound-numbers: " << holds_name(h) << "\n  p: " << s.p << "\n  kLimit: ";
        if (s.k_limit)
            std::cout << *s.k_limit << "\n";
        else
            std::cout << "infinite (checked up to " << s.checked_up_to << " multiples)\n";
        if (s.certificate) print_certificate_text(std::cout, *s.certificate);
        if (!s.complete) std::cout << "  complete: false\n";
    }
    return exit_code(h);
}

int report_validation(const std::string& path, bool as_json) {
    std::optional<Certificate> cert;
    try {
        load_workflow(path);
    } catch (const WorkflowError& e) {
        cert = Certificate{};
        cert->reason = e.what();
        if (!e.element.empty()) cert->run = {e.element};
    }
    Holds h = cert ? Holds::False : Holds::True;
    if (as_json) {
        json params = json::object();
        std::cout << document("workflow", h, params, cert, true, 0, 0).dump(2) << "\n";
    } else {
        std::cout << "workflow: " << holds_name(h) << "\n";
        if (cert) std::cout << "  reason: " << cert->reason << "\n";
    }
    return exit_code(h);
}

void write_net(const std::string& path, const PetriNet& net, const json& header) {
    std::string text = "# " + header.dump() + "\n" + serialize_net(net);
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
}

json marking_json(const NamedMarking& m) { return counts_json(m); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soundness checks for workflow Petri nets", "wfsound"};
    app.fallthrough();
    app.require_subcommand(1);
    bool as_json = false;
    SoundOptions opts;
    app.add_flag("--json", as_json, "print a JSON verdict document");
    app.add_option("--node-cap", opts.node_cap, "vertex budget for each exploration")->check(CLI::PositiveNumber);

    std::string file;
    std::int64_t k = 1;
    int rc = 0;

    auto add_k_max = [&](CLI::App* sub) {
        sub->add_option("--k-max", opts.k_max, "largest k scanned")->check(CLI::PositiveNumber);
    };

    auto* validate = app.add_subcommand("validate", "check the workflow-net conditions");
    validate->add_option("file", file)->required();
    validate->callback([&] { rc = report_validation(file, as_json); });

    auto* classical = app.add_subcommand("classical", "classical soundness");
    classical->add_option("file", file)->required();
    classical->callback([&] { rc = report(check_classical(load_workflow(file), opts), as_json); });

    auto* ksound = app.add_subcommand("ksound", "k-soundness");
    ksound->add_option("--k", k)->required()->check(CLI::PositiveNumber);
    ksound->add_option("file", file)->required();
    ksound->callback([&] { rc = report(check_k_sound(load_workflow(file), k, opts), as_json); });

    auto* generalised = app.add_subcommand("generalised", "generalised soundness");
    add_k_max(generalised);
    generalised->add_option("--constant", opts.constant, "constant substituted into the bound exponents")
        ->check(CLI::PositiveNumber);
    generalised->add_option("file", file)->required();
    generalised->callback([&] { rc = report(check_generalised(load_workflow(file), opts), as_json); });

    auto* structural = app.add_subcommand("structural", "structural soundness");
    add_k_max(structural);
    structural->add_option("file", file)->required();
    structural->callback([&] { rc = report(check_structural(load_workflow(file), opts), as_json); });

    auto* numbers = app.add_subcommand("sound-numbers", "the set of k for which the net is k-sound");
    add_k_max(numbers);
    numbers->add_option("file", file)->required();
    numbers->callback([&] { rc = report(compute_sound_numbers(load_workflow(file), opts), opts.k_max, as_json); });

    auto* oracle = app.add_subcommand("oracle", "k-soundness by explicit search");
    oracle->add_option("--k", k)->required()->check(CLI::NonNegativeNumber);
    oracle->add_option("file", file)->required();
    oracle->callback([&] { rc = report(oracle_k_sound(load_workflow(file), k, opts), as_json); });

    auto* gen = app.add_subcommand("gen", "write a generated net");
    gen->require_subcommand(1);
    std::string out_path, from, to, which;
    std::int64_t c_n = 0;
    RandomParams rp;
    std::uint64_t seed = 0;
    gen->add_option("-o,--output", out_path, "output file, '-' for stdout");

    auto* g_fig1 = gen->add_subcommand("fig1", "one of the three example nets");
    g_fig1->add_option("which", which)->required()->check(CLI::IsMember({"left", "middle", "right"}));
    g_fig1->callback([&] {
        Fig1 fig = fig1_examples();
        const WorkflowNet& wf = which == "left" ? fig.left : which == "middle" ? fig.middle : fig.right;
        write_net(out_path, wf.net, {{"generator", "fig1"}, {"net", which}});
    });

    auto* g_pspace = gen->add_subcommand("pspace", "conservative reachability to generalised soundness");
    g_pspace->add_option("net", file)->required();
    g_pspace->add_option("--from", from)->required();
    g_pspace->add_option("--to", to)->required();
    g_pspace->callback([&] {
        ReductionInstance inst =
            pspace_reduction(parse_net(read_file(file)), parse_marking_arg(from), parse_marking_arg(to));
        write_net(out_path, inst.wf.net,
                  {{"generator", "pspace"},
                   {"c", inst.parameters[0].second},
                   {"from", marking_json(inst.source)},
                   {"to", marking_json(inst.target)},
                   {"pathCondition", inst.path_condition}});
    });

    auto* g_structural = gen->add_subcommand("structural", "1-soundness to structural soundness");
    g_structural->add_option("net", file)->required();
    g_structural->callback([&] {
        write_net(out_path, structural_hardness_transform(load_workflow(file)).net, {{"generator", "structural"}});
    });

    auto* g_expspace = gen->add_subcommand("expspace", "reversible reachability to classical soundness");
    g_expspace->add_option("net", file)->required();
    g_expspace->add_option("--from", from)->required();
    g_expspace->add_option("--to", to)->required();
    g_expspace->add_option("--cn", c_n, "budget; suggested from a forward search when omitted")
        ->check(CLI::PositiveNumber);
    g_expspace->callback([&] {
        PetriNet net = parse_net(read_file(file));
        NamedMarking m = parse_marking_arg(from), target = parse_marking_arg(to);
        std::int64_t budget = c_n;
        if (budget == 0) budget = suggest_cn(net, m, target).value_or(1);
        ReductionInstance inst = expspace_reduction(net, m, target, budget);
        write_net(out_path, inst.wf.net,
                  {{"generator", "expspace"},
                   {"c_n", budget},
                   {"from", marking_json(inst.source)},
                   {"to", marking_json(inst.target)},
                   {"pathCondition", inst.path_condition}});
    });

    auto* g_random = gen->add_subcommand("random", "random workflow net");
    g_random->add_option("--seed", seed);
    g_random->add_option("--places", rp.places)->check(CLI::Range(2, 1000));
    g_random->add_option("--transitions", rp.transitions)->check(CLI::Range(1, 1000));
    g_random->add_option("--max-weight", rp.max_weight)->check(CLI::Range(1, 1000));
    g_random->callback([&] {
        write_net(out_path, random_workflow(seed, rp).net,
                  {{"generator", "random"},
                   {"seed", seed},
                   {"places", rp.places},
                   {"transitions", rp.transitions},
                   {"maxWeight", rp.max_weight}});
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const WorkflowError& e) {
        std::cerr << "error: not a workflow net: " << e.what() << "\n";
        return exit_usage;
    } catch (const GadgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const OverflowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
