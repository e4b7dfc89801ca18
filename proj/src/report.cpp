#include "lmeas/report.hpp"

#include <json.hpp>

namespace lmeas {

namespace {

using Json = nlohmann::ordered_json;

Json verdict_json(const Verdict& v) {
    Json j;
    j["outcome"] = outcome_str(v.outcome);
    j["depth"] = v.depth;
    if (v.witness) {
        Json w;
        w["kind"] = v.witness->kind;
        w["indices"] = v.witness->indices;
        if (!v.witness->text.empty()) w["text"] = v.witness->text;
        j["witness"] = std::move(w);
    }
    return j;
}

Json report_to_json(const TheoremReport& rep) {
    Json j;
    j["schema_version"] = 1;
    j["scenario"] = rep.scenario;
    j["theorem"] = rep.theorem_id;
    Json hyp = Json::array();
    for (const auto& [name, v] : rep.hypothesis_audit) {
        Json e;
        e["name"] = name;
        e["verdict"] = verdict_json(v);
        hyp.push_back(std::move(e));
    }
    j["hypothesis_audit"] = std::move(hyp);
    j["conclusion"] = verdict_json(rep.conclusion);
    if (rep.derived_regulator) j["derived_regulator"] = rep.derived_regulator->str();
    j["decomposition_traces"] = rep.decomposition_traces;
    j["notes"] = rep.notes;
    j["violation"] = rep.violation_flag;
    return j;
}

} // namespace

std::string report_json(const TheoremReport& rep) {
    return report_to_json(rep).dump(2) + "\n";
}

std::string index_json(const std::vector<TheoremReport>& reps) {
    Json j;
    j["schema_version"] = 1;
    Json rows = Json::array();
    for (const auto& rep : reps) {
        Json e;
        e["scenario"] = rep.scenario;
        e["theorem"] = rep.theorem_id;
        e["conclusion"] = outcome_str(rep.conclusion.outcome);
        e["violation"] = rep.violation_flag;
        rows.push_back(std::move(e));
    }
    j["scenarios"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string index_csv(const std::vector<TheoremReport>& reps) {
    std::string out = "scenario,theorem,conclusion,violation\n";
    for (const auto& rep : reps) {
        out += rep.scenario;
        out += ',';
        out += rep.theorem_id;
        out += ',';
        out += outcome_str(rep.conclusion.outcome);
        out += ',';
        out += rep.violation_flag ? "true" : "false";
        out += '\n';
    }
    return out;
}

std::string index_md(const std::vector<TheoremReport>& reps) {
    std::string out = "| scenario | theorem | conclusion | violation |\n";
    out += "| --- | --- | --- | --- |\n";
    for (const auto& rep : reps) {
        out += "| " + rep.scenario + " | " + rep.theorem_id + " | " +
               outcome_str(rep.conclusion.outcome) + " | " +
               (rep.violation_flag ? "true" : "false") + " |\n";
    }
    return out;
}

} // namespace lmeas
