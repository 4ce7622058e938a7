#include "tremble/domain/error_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tremble/errors.hpp"

namespace tremble::domain {

using nlohmann::json;

std::vector<ActionId> all_other_applicable(const Domain& d, StateId s, ActionId a) {
    std::vector<ActionId> out;
    for (auto b : d.applicable(s))
        if (b != a) out.push_back(b);
    return out;
}

ErrorModel ErrorModel::explicit_table(std::map<std::pair<StateId, ActionId>, ErrorDist> rows) {
    ErrorModel e;
    e.kind_ = Kind::Explicit;
    for (auto& [key, row] : rows) {
        std::sort(row.begin(), row.end(), [](const ActionMass& x, const ActionMass& y) { return x.action < y.action; });
    }
    e.rows_ = std::move(rows);
    return e;
}

ErrorModel ErrorModel::uniform_slip(double p, NeighborRule rule, std::string rule_name) {
    ErrorModel e;
    e.kind_ = Kind::UniformSlip;
    e.p_ = p;
    e.rule_ = std::move(rule);
    e.rule_name_ = std::move(rule_name);
    return e;
}

ErrorDist ErrorModel::dist(const Domain& d, StateId s, ActionId a) const {
    if (!d.is_applicable(s, a)) {
        throw InputError("action " + d.action_name(a) + " is not applicable in state " + d.state_name(s));
    }
    if (d.action(a).error_free) return {{a, 1.0}};

    ErrorDist out;
    if (kind_ == Kind::Explicit) {
        auto it = rows_.find({s, a});
        if (it == rows_.end()) throw MissingRow(s, a);
        for (const auto& m : it->second)
            if (m.p != 0) out.push_back(m);
        return out;
    }

    std::vector<ActionId> neighbors = rule_(d, s, a);
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
    std::erase(neighbors, a);
    if (neighbors.empty() || p_ == 0) return {{a, 1.0}};
    const double share = p_ / static_cast<double>(neighbors.size());
    bool placed = false;
    for (auto b : neighbors) {
        if (!placed && a < b) {
            if (p_ != 1) out.push_back({a, 1.0 - p_});
            placed = true;
        }
        out.push_back({b, share});
    }
    if (!placed && p_ != 1) out.push_back({a, 1.0 - p_});
    return out;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v.message << '\n';
    return os.str();
}

ValidationReport validate(const Domain& d, const ErrorModel& e) {
    ValidationReport report;
    auto at = [&](StateId s, ActionId a) {
        return " at (" + d.state_name(s) + ", " + d.action_name(a) + ")";
    };
    auto add = [&](StateId s, ActionId a, std::string msg) { report.violations.push_back({s, a, std::move(msg)}); };

    if (e.kind() == ErrorModel::Kind::UniformSlip) {
        const double p = e.slip_probability();
        if (!(p >= 0 && p <= 1)) add(d.initial(), 0, "slip probability " + std::to_string(p) + " outside [0, 1]");
    } else {
        for (const auto& [key, row] : e.rows()) {
            const auto [s, a] = key;
            if (s >= d.num_states() || a >= d.num_actions() || !d.is_applicable(s, a)) {
                add(s, a, "row for an inapplicable intended action at (" + std::to_string(s) + ", " +
                              std::to_string(a) + ")");
            }
        }
    }

    for (StateId s = 0; s < d.num_states(); ++s) {
        for (ActionId a : d.applicable(s)) {
            ErrorDist dist;
            try {
                dist = e.dist(d, s, a);
            } catch (const MissingRow&) {
                add(s, a, "missing row" + at(s, a));
                continue;
            }
            double sum = 0;
            bool outside = false, negative = false;
            for (const auto& m : dist) {
                sum += m.p;
                negative = negative || m.p < 0 || !std::isfinite(m.p);
                outside = outside || !d.is_applicable(s, m.action);
            }
            if (negative) add(s, a, "negative or non-finite mass" + at(s, a));
            if (std::abs(sum - 1.0) > kSumTolerance) {
                std::ostringstream os;
                os << "sum=" << sum << at(s, a);
                add(s, a, os.str());
            }
            if (outside) add(s, a, "support ⊄ A(s)" + at(s, a));
        }
    }
    return report;
}

// ---- JSON -------------------------------------------------------------------

ErrorModel error_model_from_json(const json& j) {
    const std::string root = "error model";
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw SchemaError("kind", root);
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "uniform_slip") {
        if (!j.contains("p") || !j["p"].is_number()) throw SchemaError("p", root);
        return ErrorModel::uniform_slip(j["p"].get<double>());
    }
    if (kind != "explicit") throw SchemaError("kind", root + " (expected \"explicit\" or \"uniform_slip\")");
    if (!j.contains("rows") || !j["rows"].is_array()) throw SchemaError("rows", root);

    std::map<std::pair<StateId, ActionId>, ErrorDist> rows;
    const json& jr = j["rows"];
    for (std::size_t i = 0; i < jr.size(); ++i) {
        const std::string where = "rows[" + std::to_string(i) + "]";
        auto id = [&](const json& obj, const char* name) {
            if (!obj.is_object() || !obj.contains(name) || !obj[name].is_number_integer() || obj[name].get<long>() < 0)
                throw SchemaError(name, where);
            return static_cast<std::uint32_t>(obj[name].get<long>());
        };
        const auto key = std::pair(id(jr[i], "state"), id(jr[i], "intended"));
        if (!jr[i].contains("dist") || !jr[i]["dist"].is_array()) throw SchemaError("dist", where);
        ErrorDist dist;
        for (const auto& m : jr[i]["dist"]) {
            if (!m.contains("p") || !m["p"].is_number()) throw SchemaError("p", where);
            dist.push_back({id(m, "action"), m["p"].get<double>()});
        }
        if (!rows.emplace(key, std::move(dist)).second) throw SchemaError("rows", where + " (duplicate row)");
    }
    return ErrorModel::explicit_table(std::move(rows));
}

json error_model_to_json(const ErrorModel& e) {
    if (e.kind() == ErrorModel::Kind::UniformSlip) return {{"kind", "uniform_slip"}, {"p", e.slip_probability()}};
    json rows = json::array();
    for (const auto& [key, dist] : e.rows()) {
        json jd = json::array();
        for (const auto& m : dist) jd.push_back({{"action", m.action}, {"p", m.p}});
        rows.push_back({{"state", key.first}, {"intended", key.second}, {"dist", std::move(jd)}});
    }
    return {{"kind", "explicit"}, {"rows", std::move(rows)}};
}

ErrorModel load_error_model(const std::filesystem::path& path) { return error_model_from_json(read_json_file(path)); }

}  // namespace tremble::domain
