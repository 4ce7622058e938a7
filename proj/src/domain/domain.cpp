#include "tremble/domain/domain.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tremble/errors.hpp"

namespace tremble::domain {

using nlohmann::json;

Domain::Domain(DomainKind kind, ltlf::PropSet props, std::vector<DomainState> states,
               std::vector<ActionInfo> actions, StateId initial, std::vector<Transition> transitions)
    : kind_(kind),
      props_(std::move(props)),
      states_(std::move(states)),
      actions_(std::move(actions)),
      initial_(initial),
      applicable_(states_.size()),
      succ_(states_.size()) {
    const std::size_t n = states_.size();
    if (n == 0) throw SchemaError("states", "domain (no states)");
    if (initial_ >= n) throw DanglingStateRef(initial_, n);

    std::sort(transitions.begin(), transitions.end(), [](const Transition& x, const Transition& y) {
        return std::pair(x.from, x.action) < std::pair(y.from, y.action);
    });
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        auto& t = transitions[i];
        if (t.from >= n) throw DanglingStateRef(t.from, n);
        if (t.action >= actions_.size()) {
            throw SchemaError("action", "transition from state " + std::to_string(t.from) + " (action " +
                                            std::to_string(t.action) + " undeclared)");
        }
        if (t.to.empty()) throw EmptySuccessorSet(t.from, t.action);
        for (auto s : t.to)
            if (s >= n) throw DanglingStateRef(s, n);
        if (i > 0 && transitions[i - 1].from == t.from && transitions[i - 1].action == t.action) {
            throw SchemaError("transitions", "duplicate pair (" + std::to_string(t.from) + ", " +
                                                 std::to_string(t.action) + ")");
        }
        std::sort(t.to.begin(), t.to.end());
        t.to.erase(std::unique(t.to.begin(), t.to.end()), t.to.end());
        if (kind_ == DomainKind::Det && t.to.size() != 1) {
            throw SchemaError("to", "deterministic transition (" + std::to_string(t.from) + ", " +
                                        std::to_string(t.action) + ") with several successors");
        }
        applicable_[t.from].push_back(t.action);
        succ_[t.from].push_back(std::move(t.to));
    }
    for (std::size_t s = 0; s < n; ++s)
        if (applicable_[s].empty()) throw EmptyApplicableSet(s);
}

std::string Domain::state_name(StateId s) const {
    const auto& name = states_.at(s).name;
    return name.empty() ? "s" + std::to_string(s) : name;
}

std::string Domain::action_name(ActionId a) const {
    const auto& name = actions_.at(a).name;
    return name.empty() ? "a" + std::to_string(a) : name;
}

bool Domain::is_applicable(StateId s, ActionId a) const {
    const auto& app = applicable_.at(s);
    return std::binary_search(app.begin(), app.end(), a);
}

const std::vector<StateId>& Domain::successors(StateId s, ActionId a) const {
    const auto& app = applicable_.at(s);
    auto it = std::lower_bound(app.begin(), app.end(), a);
    if (it == app.end() || *it != a) {
        throw InputError("action " + action_name(a) + " is not applicable in state " + state_name(s));
    }
    return succ_[s][static_cast<std::size_t>(it - app.begin())];
}

std::vector<Transition> Domain::transitions() const {
    std::vector<Transition> out;
    for (StateId s = 0; s < states_.size(); ++s)
        for (std::size_t i = 0; i < applicable_[s].size(); ++i) out.push_back({s, applicable_[s][i], succ_[s][i]});
    return out;
}

bool operator==(const Domain& a, const Domain& b) {
    if (a.kind_ != b.kind_ || a.initial_ != b.initial_ || a.props_.names() != b.props_.names()) return false;
    if (a.states_.size() != b.states_.size() || a.actions_.size() != b.actions_.size()) return false;
    for (std::size_t i = 0; i < a.states_.size(); ++i) {
        if (a.states_[i].label.bits != b.states_[i].label.bits || a.states_[i].name != b.states_[i].name) return false;
    }
    for (std::size_t i = 0; i < a.actions_.size(); ++i) {
        if (a.actions_[i].name != b.actions_[i].name || a.actions_[i].error_free != b.actions_[i].error_free)
            return false;
    }
    return a.applicable_ == b.applicable_ && a.succ_ == b.succ_;
}

// ---- JSON -------------------------------------------------------------------

namespace {

const json& field(const json& obj, const char* name, const std::string& where) {
    if (!obj.is_object() || !obj.contains(name)) throw SchemaError(name, where);
    return obj.at(name);
}

std::int64_t integer(const json& v, const char* name, const std::string& where) {
    if (!v.is_number_integer()) throw SchemaError(name, where);
    return v.get<std::int64_t>();
}

std::string text(const json& v, const char* name, const std::string& where) {
    if (!v.is_string()) throw SchemaError(name, where);
    return v.get<std::string>();
}

const json& array(const json& v, const char* name, const std::string& where) {
    if (!v.is_array()) throw SchemaError(name, where);
    return v;
}

StateId state_ref(const json& v, const char* name, const std::string& where, std::size_t n) {
    const auto id = integer(v, name, where);
    if (id < 0 || static_cast<std::size_t>(id) >= n) throw DanglingStateRef(id, n);
    return static_cast<StateId>(id);
}

}  // namespace

Domain domain_from_json(const json& j) {
    const std::string root = "domain";
    const std::string kind = text(field(j, "kind", root), "kind", root);
    if (kind != "det" && kind != "nondet") throw SchemaError("kind", root + " (expected \"det\" or \"nondet\")");

    std::vector<std::string> prop_names;
    for (const auto& p : array(field(j, "props", root), "props", root)) prop_names.push_back(text(p, "props", root));
    ltlf::PropSet props;
    for (const auto& name : prop_names) {
        if (!ltlf::PropSet::valid_name(name) || props.contains(name)) throw SchemaError("props", root + " ('" + name + "')");
        props.add(name);
    }

    const json& js = array(field(j, "states", root), "states", root);
    std::vector<DomainState> states(js.size());
    std::vector<bool> seen(js.size(), false);
    for (std::size_t i = 0; i < js.size(); ++i) {
        const std::string where = "states[" + std::to_string(i) + "]";
        const StateId id = state_ref(field(js[i], "id", where), "id", where, js.size());
        if (seen[id]) throw SchemaError("id", where + " (duplicate)");
        seen[id] = true;
        DomainState st;
        if (js[i].contains("name")) st.name = text(js[i]["name"], "name", where);
        for (const auto& p : array(field(js[i], "label", where), "label", where)) {
            const std::string name = text(p, "label", where);
            auto pid = props.find(name);
            if (!pid) throw SchemaError("label", where + " (undeclared proposition '" + name + "')");
            st.label.insert(*pid);
        }
        states[id] = std::move(st);
    }

    const json& ja = array(field(j, "actions", root), "actions", root);
    std::vector<ActionInfo> actions(ja.size());
    std::vector<bool> seen_action(ja.size(), false);
    for (std::size_t i = 0; i < ja.size(); ++i) {
        const std::string where = "actions[" + std::to_string(i) + "]";
        const auto id = integer(field(ja[i], "id", where), "id", where);
        if (id < 0 || static_cast<std::size_t>(id) >= ja.size() || seen_action[id]) throw SchemaError("id", where);
        seen_action[id] = true;
        ActionInfo a;
        if (ja[i].contains("name")) a.name = text(ja[i]["name"], "name", where);
        if (ja[i].contains("error_free")) {
            if (!ja[i]["error_free"].is_boolean()) throw SchemaError("error_free", where);
            a.error_free = ja[i]["error_free"].get<bool>();
        } else {
            a.error_free = a.name == kDoNothing;
        }
        actions[id] = std::move(a);
    }

    const StateId initial = state_ref(field(j, "initial", root), "initial", root, states.size());

    std::vector<Transition> transitions;
    const json& jt = array(field(j, "transitions", root), "transitions", root);
    for (std::size_t i = 0; i < jt.size(); ++i) {
        const std::string where = "transitions[" + std::to_string(i) + "]";
        Transition t;
        t.from = state_ref(field(jt[i], "from", where), "from", where, states.size());
        const auto a = integer(field(jt[i], "action", where), "action", where);
        if (a < 0 || static_cast<std::size_t>(a) >= actions.size()) throw SchemaError("action", where);
        t.action = static_cast<ActionId>(a);
        for (const auto& s : array(field(jt[i], "to", where), "to", where))
            t.to.push_back(state_ref(s, "to", where, states.size()));
        transitions.push_back(std::move(t));
    }

    return Domain(kind == "det" ? DomainKind::Det : DomainKind::Nondet, std::move(props), std::move(states),
                  std::move(actions), initial, std::move(transitions));
}

json domain_to_json(const Domain& d) {
    json j;
    j["kind"] = d.deterministic() ? "det" : "nondet";
    j["props"] = d.props().names();
    j["states"] = json::array();
    for (StateId s = 0; s < d.num_states(); ++s) {
        json st{{"id", s}};
        if (!d.state(s).name.empty()) st["name"] = d.state(s).name;
        json label = json::array();
        for (ltlf::PropId p = 0; p < d.props().size(); ++p)
            if (d.label(s).contains(p)) label.push_back(d.props().name(p));
        st["label"] = std::move(label);
        j["states"].push_back(std::move(st));
    }
    j["actions"] = json::array();
    for (ActionId a = 0; a < d.num_actions(); ++a) {
        json ja{{"id", a}};
        if (!d.action(a).name.empty()) ja["name"] = d.action(a).name;
        ja["error_free"] = d.action(a).error_free;
        j["actions"].push_back(std::move(ja));
    }
    j["initial"] = d.initial();
    j["transitions"] = json::array();
    for (const auto& t : d.transitions()) j["transitions"].push_back({{"from", t.from}, {"action", t.action}, {"to", t.to}});
    return j;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("file", path.string() + " (cannot open)");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("json", path.string() + " (" + e.what() + ")");
    }
}

Domain load_domain(const std::filesystem::path& path) { return domain_from_json(read_json_file(path)); }

void save_domain(const Domain& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << domain_to_json(d).dump(2) << '\n';
}

}  // namespace tremble::domain
