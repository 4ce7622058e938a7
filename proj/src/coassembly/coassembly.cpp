#include "tremble/coassembly/coassembly.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <deque>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "tremble/errors.hpp"
#include "tremble/ltlf/parser.hpp"
#include "tremble/solver/synthesis.hpp"

namespace tremble::coassembly {

bool rows_sum_to_one(const Matrix& m) {
    return std::all_of(m.begin(), m.end(), [](Row r) { return std::popcount(r) == 1; });
}

bool columns_valid(const Matrix& m, std::size_t locations, Predicate pred) {
    for (std::size_t j = 1; j <= locations; ++j) {
        int count = 0;
        for (Row r : m) count += (r >> j) & 1;
        if (count > 1 || (pred == Predicate::Strict && count != 1)) return false;
    }
    return true;
}

namespace {

constexpr std::size_t kMaxObjects = 7;

bool valid(const Matrix& m, std::size_t locations, Predicate pred) {
    return rows_sum_to_one(m) && columns_valid(m, locations, pred);
}

}  // namespace

std::set<Matrix> prune_states(std::size_t n, Predicate pred, Expansion rule) {
    if (n < 2 || n > kMaxObjects) throw InputError("pruning needs 2 to " + std::to_string(kMaxObjects) + " objects");
    std::set<Matrix> current;
    for (unsigned bits = 0; bits < (1u << 6); ++bits) {
        Matrix m{static_cast<Row>(bits & 7u), static_cast<Row>(bits >> 3)};
        if (valid(m, 2, pred)) current.insert(m);
    }
    for (std::size_t i = 3; i <= n; ++i) {
        const Row fresh = static_cast<Row>(1u << i);
        std::set<Matrix> next;
        for (const Matrix& prev : current) {
            // every combination of per-row extensions, then every new row
            const std::size_t rows = prev.size();
            for (unsigned pick = 0; pick < (1u << rows); ++pick) {
                Matrix m(rows + 1);
                for (std::size_t k = 0; k < rows; ++k) {
                    const bool one = (pick >> k) & 1;
                    if (!one) m[k] = prev[k];
                    else m[k] = rule == Expansion::Relocating ? fresh : static_cast<Row>(prev[k] | fresh);
                }
                for (std::size_t j = 0; j <= i; ++j) {
                    m[rows] = static_cast<Row>(1u << j);
                    if (valid(m, i, pred)) next.insert(m);
                }
            }
        }
        current = std::move(next);
    }
    return current;
}

std::set<Matrix> brute_force_states(std::size_t n, Predicate pred) {
    if (n < 1 || n > 4) throw InputError("brute force is limited to 4 objects");
    const std::size_t width = n + 1;
    std::set<Matrix> out;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (n * width)); ++bits) {
        Matrix m(n);
        for (std::size_t k = 0; k < n; ++k) m[k] = static_cast<Row>((bits >> (k * width)) & ((1u << width) - 1));
        if (valid(m, n, pred)) out.insert(m);
    }
    return out;
}

Matrix to_matrix(const Placement& p) {
    Matrix m;
    for (auto loc : p) m.push_back(static_cast<Row>(1u << loc));
    return m;
}

Placement to_placement(const Matrix& m) {
    if (!rows_sum_to_one(m)) throw InputError("matrix rows must hold exactly one block each");
    Placement p;
    for (Row r : m) p.push_back(static_cast<std::uint8_t>(std::countr_zero(r)));
    return p;
}

std::string render(const Placement& p) {
    const std::size_t n = p.size();
    std::ostringstream os;
    os << "     S";
    for (std::size_t j = 1; j <= n; ++j) os << " L" << j;
    os << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        os << "Obj" << i + 1 << ' ' << (p[i] == 0 ? '#' : '.');
        for (std::size_t j = 1; j <= n; ++j) os << "  " << (p[i] == j ? '#' : '.');
        os << '\n';
    }
    return os.str();
}

std::string at_atom(std::size_t object, std::size_t location) {
    return "at_" + std::to_string(object) + "_" + std::to_string(location);
}

namespace {

// Parses at_<i>_<j> with 1 <= i <= n and 0 <= j <= n.
std::optional<std::pair<std::size_t, std::size_t>> parse_atom(const std::string& name, std::size_t n) {
    std::size_t i = 0, j = 0;
    char tail = 0;
    if (std::sscanf(name.c_str(), "at_%zu_%zu%c", &i, &j, &tail) != 2) return std::nullopt;
    if (name != at_atom(i, j) || i < 1 || i > n || j > n) return std::nullopt;
    return std::pair(i - 1, j);
}

bool legal_move(const Placement& p, std::size_t i, std::size_t j) {
    if (p[i] == j) return false;
    if (j == 0) return true;
    return std::none_of(p.begin(), p.end(), [&](std::uint8_t loc) { return loc == j; });
}

std::uint32_t encode(const Placement& p) {
    std::uint32_t code = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) code = code * static_cast<std::uint32_t>(p.size() + 1) + *it;
    return code;
}

}  // namespace

Instance build_coassembly(const BenchConfig& cfg) {
    const std::size_t n = cfg.N, K = cfg.K;
    if (n < 2 || n > 6) throw InputError("co-assembly needs 2 to 6 objects");
    if (!(cfg.p >= 0 && cfg.p <= 1)) throw InputError("slip probability outside [0, 1]");
    if (cfg.human_model != "single-move") throw InputError("unknown human model '" + cfg.human_model + "'");
    std::vector<std::uint8_t> goal = cfg.goal;
    if (goal.empty())
        for (std::size_t i = 0; i < n; ++i) goal.push_back(static_cast<std::uint8_t>(i + 1));
    if (goal.size() != n) throw InputError("goal must place every object");
    for (std::size_t i = 0; i < n; ++i) {
        if (goal[i] < 1 || goal[i] > n) throw InputError("goal locations must be in 1..N");
        for (std::size_t k = 0; k < i; ++k)
            if (goal[k] == goal[i]) throw InputError("goal must put distinct objects at distinct locations");
    }

    ltlf::PropSet props;
    std::string text;
    for (std::size_t i = 0; i < n; ++i) {
        props.add(at_atom(i + 1, goal[i]));
        text += (i ? " & " : "") + at_atom(i + 1, goal[i]);
    }
    text = cfg.formula.value_or("F(" + text + ")");
    ltlf::Formula formula = ltlf::parse_declaring(text, props);
    std::vector<std::pair<std::size_t, std::size_t>> atoms;
    for (const auto& name : props.names()) {
        auto a = parse_atom(name, n);
        if (!a) throw InputError("co-assembly formulas may only use at_i_j atoms, found '" + name + "'");
        atoms.push_back(*a);
    }

    Instance inst{cfg, domain::Domain(domain::DomainKind::Det, {}, {{}}, {{"x"}}, 0, {{0, 0, {0}}}),
                  domain::ErrorModel::uniform_slip(0), formula, {}, 0, 0};
    inst.config.goal = goal;
    inst.pruned = prune_states(n, Predicate::Prose).size();
    inst.augmented = inst.pruned * (K + 1);

    // breadth-first over (placement, counter) from all blocks in storage
    std::unordered_map<std::uint64_t, StateId> index;
    auto intern = [&](const Placement& p, std::size_t c) {
        const std::uint64_t key = std::uint64_t{encode(p)} * (K + 1) + c;
        auto [it, fresh] = index.try_emplace(key, static_cast<StateId>(inst.states.size()));
        if (fresh) inst.states.push_back({p, c});
        return it->second;
    };
    intern(Placement(n, 0), 0);
    std::vector<domain::Transition> transitions;
    for (StateId s = 0; s < inst.states.size(); ++s) {
        const CounterState cur = inst.states[s];
        auto outcome = [&](const Placement& after) {
            std::vector<StateId> theta{intern(after, cur.c)};
            if (cur.c < K) {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j <= n; ++j)
                        if (legal_move(after, i, j)) {
                            Placement moved = after;
                            moved[i] = static_cast<std::uint8_t>(j);
                            theta.push_back(intern(moved, cur.c + 1));
                        }
            }
            return theta;
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= n; ++j) {
                if (!legal_move(cur.placement, i, j)) continue;
                Placement after = cur.placement;
                after[i] = static_cast<std::uint8_t>(j);
                transitions.push_back({s, move_action(n, i, j), outcome(after)});
            }
        }
        transitions.push_back({s, do_nothing_action(n), outcome(cur.placement)});
    }

    std::vector<domain::DomainState> states;
    for (std::size_t s = 0; s < inst.states.size(); ++s) {
        domain::DomainState st;
        for (ltlf::PropId a = 0; a < atoms.size(); ++a)
            if (inst.states[s].placement[atoms[a].first] == atoms[a].second) st.label.insert(a);
        states.push_back(std::move(st));
    }
    std::vector<domain::ActionInfo> actions;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= n; ++j)
            actions.push_back({"Obj" + std::to_string(i + 1) + "->" + (j == 0 ? "S" : "L" + std::to_string(j)), false});
    actions.push_back({domain::kDoNothing, true});

    const bool det = K == 0;
    inst.domain = domain::Domain(det ? domain::DomainKind::Det : domain::DomainKind::Nondet, props, std::move(states),
                                 std::move(actions), 0, std::move(transitions));
    // slips keep the location and change the block, or keep the block and
    // change the location
    auto neighbors = [n](const domain::Domain& d, StateId s, ActionId a) {
        std::vector<ActionId> out;
        if (a == do_nothing_action(n)) return out;
        const std::size_t i = a / (n + 1), j = a % (n + 1);
        for (std::size_t k = 0; k < n; ++k)
            if (k != i && d.is_applicable(s, move_action(n, k, j))) out.push_back(move_action(n, k, j));
        for (std::size_t l = 0; l <= n; ++l)
            if (l != j && d.is_applicable(s, move_action(n, i, l))) out.push_back(move_action(n, i, l));
        return out;
    };
    inst.errors = domain::ErrorModel::uniform_slip(cfg.p, neighbors, "coassembly");
    return inst;
}

ScalingRecord run_instance(const BenchConfig& cfg, const solver::ViOptions& vi) {
    const auto t0 = std::chrono::steady_clock::now();
    Instance inst = build_coassembly(cfg);
    const double gen_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    auto s = solver::synthesize(inst.domain, inst.errors, inst.goal, {vi});
    std::size_t transitions = 0;
    for (StateId st = 0; st < s.model->num_states(); ++st)
        for (const auto& c : s.model->choices(st))
            for (const auto& o : c.outcomes) transitions += o.theta.size();
    return {cfg.N, cfg.K, cfg.p, inst.domain.num_states(), s.product->num_states(), transitions, gen_ms + s.build_ms, s.solve_ms, s.value()};
}

std::string csv_header() { return "N,K,p,states,reachable,transitions,model_build_ms,synthesis_ms,value"; }

std::string csv_row(const ScalingRecord& r) {
    std::ostringstream os;
    os << r.N << ',' << r.K << ',' << r.p << ',' << r.states << ',' << r.reachable << ',' << r.transitions << ',';
    os.precision(3);
    os << std::fixed << r.model_build_ms << ',' << r.synthesis_ms << ',';
    os.precision(9);
    os << r.value;
    return os.str();
}

std::vector<ScalingRecord> run_scaling(const std::vector<BenchConfig>& configs,
                                       const std::optional<std::filesystem::path>& out_csv,
                                       const solver::ViOptions& vi) {
    std::vector<ScalingRecord> records;
    for (const auto& cfg : configs) records.push_back(run_instance(cfg, vi));
    if (out_csv) {
        std::ofstream out(*out_csv);
        if (!out) throw InputError("cannot write " + out_csv->string());
        out << csv_header() << '\n';
        for (const auto& r : records) out << csv_row(r) << '\n';
    }
    return records;
}

}  // namespace tremble::coassembly
