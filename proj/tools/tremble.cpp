// Command-line front end: compile, solve, simulate, bench, inspect, serve.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "tremble/coassembly/coassembly.hpp"
#include "tremble/errors.hpp"
#include "tremble/ltlf/dfa.hpp"
#include "tremble/ltlf/parser.hpp"
#include "tremble/serve/playground.hpp"
#include "tremble/sim/simulator.hpp"
#include "tremble/solver/synthesis.hpp"

using namespace tremble;

namespace {

/// Missing or conflicting flags; exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Args {
    std::string domain, errors, formula, formula_file;
    double epsilon = solver::kDefaultEpsilon;
    std::uint64_t seed = 0;
    std::string nature = "adversarial";
    std::size_t runs = 1;
    std::optional<std::size_t> max_steps;
    std::optional<double> beta;
    std::string out, dot, csv;
    int port = 8080;
    std::string host = "127.0.0.1";
    std::vector<std::size_t> n, k;
    std::vector<double> p;
};

std::string formula_text(const Args& a) {
    if (!a.formula.empty() && !a.formula_file.empty()) throw UsageError("give --formula or --formula-file, not both");
    if (!a.formula_file.empty()) {
        std::ifstream in(a.formula_file);
        if (!in) throw InputError("cannot open " + a.formula_file);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return a.formula;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

/// A domain from files, or a co-assembly instance from --n/--k/--p.
struct Problem {
    std::optional<coassembly::Instance> inst;
    std::optional<domain::Domain> d;
    std::optional<domain::ErrorModel> e;
    std::optional<ltlf::Formula> goal;

    const domain::Domain& domain() const { return inst ? inst->domain : *d; }
    const domain::ErrorModel& errors() const { return inst ? inst->errors : *e; }
    const ltlf::Formula& formula() const { return inst ? inst->goal : *goal; }
};

Problem load_problem(const Args& a) {
    Problem pr;
    const std::string text = formula_text(a);
    if (a.domain.empty()) {
        if (a.n.size() != 1 || a.k.size() > 1 || a.p.size() > 1)
            throw UsageError("give --domain/--errors/--formula, or a single --n (with optional --k, --p)");
        coassembly::BenchConfig cfg{a.n[0], a.k.empty() ? 0 : a.k[0], a.p.empty() ? 0.0 : a.p[0]};
        if (!text.empty()) cfg.formula = text;
        pr.inst = coassembly::build_coassembly(cfg);
        return pr;
    }
    if (a.errors.empty()) throw UsageError("--errors is required with --domain");
    if (text.empty()) throw UsageError("--formula or --formula-file is required with --domain");
    pr.d = domain::load_domain(a.domain);
    pr.e = domain::load_error_model(a.errors);
    const auto report = domain::validate(*pr.d, *pr.e);
    if (!report.ok()) throw InputError("invalid error model:\n" + report.to_string());
    pr.goal = ltlf::parse(text, pr.d->props());
    return pr;
}

solver::SolveOptions solve_options(const Args& a) {
    if (!(a.epsilon > 0)) throw InputError("--epsilon must be positive");
    solver::SolveOptions o;
    o.vi.epsilon = a.epsilon;
    return o;
}

int cmd_compile(const Args& a) {
    ltlf::PropSet props;
    const auto f = ltlf::parse_declaring(formula_text(a), props);
    ltlf::Dfa dfa(f, props);
    const auto full = ltlf::materialize(dfa);
    const auto min = ltlf::minimize(full);
    std::cout << "formula=" << ltlf::to_string(f) << "\n"
              << "props=" << props.size() << "\n"
              << "states=" << full.num_states << "\n"
              << "accepting=" << full.num_accepting() << "\n"
              << "minimized_states=" << min.num_states << "\n";
    if (!a.dot.empty()) write_file(a.dot, ltlf::to_dot(min));
    return 0;
}

int cmd_solve(const Args& a) {
    const auto pr = load_problem(a);
    const auto syn = solver::synthesize(pr.domain(), pr.errors(), pr.formula(), solve_options(a));
    std::cout << "value=" << syn.value() << "\n";
    if (!a.out.empty()) write_file(a.out, solver::strategy_to_json(*syn.strategy).dump(2) + "\n");
    if (a.beta && syn.value() < *a.beta) {
        std::cerr << "threshold not met: value " << syn.value() << " < beta " << *a.beta << "\n";
        return 2;
    }
    return 0;
}

sim::NaturePolicy make_nature(const Args& a, const std::shared_ptr<const solver::Strategy>& st,
                              const domain::Domain& d) {
    if (a.nature == "adversarial") return sim::adversarial_greedy(st);
    if (a.nature == "random") return sim::uniform_random();
    return sim::interactive([&d](const sim::NatureQuery& q) {
        std::cerr << "step " << q.step << " at " << d.state_name(q.current.s) << ": intended "
                  << d.action_name(q.intended) << ", instructed " << d.action_name(q.instructed) << "\n";
        for (std::size_t i = 0; i < q.theta.size(); ++i) std::cerr << "  [" << i << "] " << d.state_name(q.theta[i]) << "\n";
        std::cerr << "choice> " << std::flush;
        std::size_t k;
        if (!(std::cin >> k)) throw InputError("no choice on standard input");
        return k;
    });
}

int cmd_simulate(const Args& a) {
    if (a.runs < 1) throw InputError("--runs must be at least 1");
    const auto pr = load_problem(a);
    const auto syn = solver::synthesize(pr.domain(), pr.errors(), pr.formula(), solve_options(a));
    const auto nature = make_nature(a, syn.strategy, pr.domain());
    const std::size_t max_steps = a.max_steps.value_or(sim::default_max_steps(*syn.strategy));
    if (a.runs == 1) {
        const auto r = sim::run(pr.domain(), pr.errors(), syn.strategy, nature, a.seed, max_steps);
        const auto log = sim::run_log(*syn.strategy, r.path);
        if (a.out.empty()) std::cout << log;
        else write_file(a.out, log);
        std::cout << "success=" << (r.success ? "true" : "false") << " outcome=" << sim::to_string(r.outcome)
                  << " steps=" << r.steps << " value=" << syn.value() << "\n";
        return 0;
    }
    if (a.nature == "interactive") throw UsageError("--nature interactive needs --runs 1");
    const auto mc = sim::monte_carlo(pr.domain(), pr.errors(), syn.strategy, nature, a.runs, a.seed, max_steps);
    if (!a.out.empty()) {
        std::string lines;
        for (std::size_t i = 0; i < mc.outcomes.size(); ++i)
            lines += nlohmann::json{{"seed", a.seed + i}, {"success", static_cast<bool>(mc.outcomes[i])}}.dump() + "\n";
        write_file(a.out, lines);
    }
    std::cout << "runs=" << mc.runs << " successes=" << mc.successes << " estimate=" << mc.estimate
              << " stderr=" << mc.stderr_ << " value=" << syn.value() << "\n";
    return 0;
}

int cmd_bench(const Args& a) {
    std::vector<coassembly::BenchConfig> configs;
    const auto ns = a.n.empty() ? std::vector<std::size_t>{2, 3, 4} : a.n;
    const auto ks = a.k.empty() ? std::vector<std::size_t>{0, 1, 2, 3} : a.k;
    const auto ps = a.p.empty() ? std::vector<double>{0.0, 0.05} : a.p;
    const std::string text = formula_text(a);
    for (auto n : ns)
        for (auto p : ps)
            for (auto k : ks) {
                coassembly::BenchConfig cfg{n, k, p};
                if (!text.empty()) cfg.formula = text;
                configs.push_back(cfg);
            }
    std::optional<std::filesystem::path> csv;
    if (!a.csv.empty()) csv = a.csv;
    const auto records = coassembly::run_scaling(configs, csv, solve_options(a).vi);
    if (!csv) {
        std::cout << coassembly::csv_header() << "\n";
        for (const auto& r : records) std::cout << coassembly::csv_row(r) << "\n";
    }
    return 0;
}

int cmd_inspect(const Args& a) {
    const auto pr = load_problem(a);
    const auto syn = solver::synthesize(pr.domain(), pr.errors(), pr.formula(), solve_options(a));
    std::size_t fbar = 0;
    for (domain::StateId s = 0; s < syn.model->num_states(); ++s)
        for (const auto& c : syn.model->choices(s)) fbar = std::max(fbar, c.outcomes.size());
    const auto& part = syn.partition;
    std::cout << "domain_states=" << pr.domain().num_states() << "\n"
              << "model_pairs=" << syn.model->num_pairs() << "\n"
              << "dfa_states=" << syn.dfa->discovered() << "\n"
              << "product_states=" << syn.product->num_states() << "\n"
              << "product_transitions=" << syn.product->num_transitions() << "\n"
              << "S_n=" << part.unreachable << "\n"
              << "S_d=" << part.dead << "\n"
              << "S_p=" << part.relevant << "\n"
              << "max_set_family=" << fbar << "\n"
              << "value=" << syn.value() << "\n";
    return 0;
}

int cmd_serve(const Args& a) {
    serve::PlaygroundService service;
    serve::HttpServer server(service);
    const int port = server.bind(a.host, a.port);
    if (port < 0) throw InputError("cannot bind " + a.host + ":" + std::to_string(a.port));
    std::cout << "listening on http://" << a.host << ":" << port << std::endl;
    return server.run() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trembling-hand LTLf synthesis"};
    app.require_subcommand(1);
    Args a;

    auto formula_opts = [&](CLI::App* c) {
        c->add_option("--formula", a.formula, "LTLf goal");
        c->add_option("--formula-file", a.formula_file, "file holding the LTLf goal");
    };
    auto problem_opts = [&](CLI::App* c) {
        c->add_option("--domain", a.domain, "domain JSON");
        c->add_option("--errors", a.errors, "error model JSON");
        formula_opts(c);
        c->add_option("--epsilon", a.epsilon, "value-iteration tolerance")->capture_default_str();
        c->add_option("--n", a.n, "co-assembly objects (instead of --domain)");
        c->add_option("--k", a.k, "co-assembly intervention budget");
        c->add_option("--p", a.p, "co-assembly slip probability");
    };

    auto* compile = app.add_subcommand("compile", "formula to automaton statistics");
    formula_opts(compile);
    compile->add_option("--dot", a.dot, "write the minimized automaton as Graphviz");

    auto* solve = app.add_subcommand("solve", "synthesize a strategy");
    problem_opts(solve);
    solve->add_option("--out", a.out, "strategy JSON output");
    solve->add_option("--beta", a.beta, "fail with exit 2 when the value is below this threshold");

    auto* simulate = app.add_subcommand("simulate", "run the strategy against a nature");
    problem_opts(simulate);
    simulate->add_option("--seed", a.seed, "seed of the first run");
    simulate->add_option("--nature", a.nature, "nature policy")
        ->check(CLI::IsMember({"adversarial", "random", "interactive"}));
    simulate->add_option("--runs", a.runs, "number of runs");
    simulate->add_option("--max-steps", a.max_steps, "step limit per run");
    simulate->add_option("--out", a.out, "run log output");

    auto* bench = app.add_subcommand("bench", "co-assembly scaling sweep");
    formula_opts(bench);
    bench->add_option("--n", a.n, "object counts");
    bench->add_option("--k", a.k, "intervention budgets");
    bench->add_option("--p", a.p, "slip probabilities");
    bench->add_option("--epsilon", a.epsilon, "value-iteration tolerance")->capture_default_str();
    bench->add_option("--csv", a.csv, "CSV output");

    auto* inspect = app.add_subcommand("inspect", "product and partition statistics");
    problem_opts(inspect);

    auto* serve = app.add_subcommand("serve", "playground HTTP/JSON API");
    serve->add_option("--port", a.port, "port (0 picks a free one)")->capture_default_str();
    serve->add_option("--host", a.host, "bind address")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*compile) return cmd_compile(a);
        if (*solve) return cmd_solve(a);
        if (*simulate) return cmd_simulate(a);
        if (*bench) return cmd_bench(a);
        if (*inspect) return cmd_inspect(a);
        return cmd_serve(a);
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Input ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
