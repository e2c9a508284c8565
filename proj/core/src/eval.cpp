#include "gazenote/eval.hpp"

#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"
#include "gazenote/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

namespace gazenote {

std::vector<EvalRow> eval_rows_from_features(std::span<const FeatureRow> rows) {
    std::vector<EvalRow> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.vec.label == NoteLabel::Unknown) continue;
        EvalRow r;
        r.participant = row.participant_id;
        r.note_id = row.vec.note_id;
        r.passage_id = row.vec.passage_id;
        r.features = row.vec.f;
        r.truth = row.vec.label == NoteLabel::Annotated ? 1 : 0;
        out.push_back(std::move(r));
    }
    if (out.empty()) throw ValidationError("no labeled rows to evaluate");
    return out;
}

namespace {

TrainingSet make_training_set(std::span<const EvalRow> rows,
                              const std::function<bool(const EvalRow&)>& in_train) {
    TrainingSet data;
    for (const auto& r : rows) {
        if (!in_train(r)) continue;
        data.x.push_back(r.features);
        data.y.push_back(r.truth);
    }
    return data;
}

void score_fold(const TrainedForest& model, std::span<const EvalRow> rows,
                const std::function<bool(const EvalRow&)>& held_out,
                std::vector<ScoredRow>& out) {
    for (const auto& r : rows) {
        if (!held_out(r)) continue;
        ScoredRow s;
        s.participant = r.participant;
        s.note_id = r.note_id;
        s.passage_id = r.passage_id;
        s.score = predict_proba(model, r.features);
        s.predicted = s.score >= 0.5 ? 1 : 0;
        s.truth = r.truth;
        out.push_back(std::move(s));
    }
}

bool has_both_classes(const TrainingSet& data) {
    const bool has0 = std::find(data.y.begin(), data.y.end(), 0) != data.y.end();
    const bool has1 = std::find(data.y.begin(), data.y.end(), 1) != data.y.end();
    return has0 && has1;
}

} // namespace

CvResult loo_note_cv(std::span<const EvalRow> rows, const ForestConfig& cfg, unsigned jobs) {
    if (rows.empty()) throw TooFewNotes("no rows for leave-one-note-out");
    const std::string& participant = rows.front().participant;
    std::set<int> note_ids;
    bool has0 = false, has1 = false;
    for (const auto& r : rows) {
        if (r.participant != participant)
            throw ValidationError("leave-one-note-out expects a single participant's rows");
        note_ids.insert(r.note_id);
        (r.truth == 0 ? has0 : has1) = true;
    }
    if (note_ids.size() < 2)
        throw TooFewNotes("participant " + participant + " has fewer than 2 notes");
    if (!has0 || !has1)
        throw TooFewNotes("participant " + participant + " has a single class overall");

    CvResult result;
    std::size_t fold_index = 0;
    for (int held_note : note_ids) {
        ForestConfig fold_cfg = cfg;
        fold_cfg.seed = derive_seed(cfg.seed, fold_index);
        ++fold_index;
        TrainingSet train = make_training_set(
            rows, [&](const EvalRow& r) { return r.note_id != held_note; });
        if (!has_both_classes(train)) {
            result.warnings.push_back("note " + std::to_string(held_note) +
                                      ": training fold has a single class, skipped");
            continue;
        }
        const TrainedForest model = train_forest(train, fold_cfg, jobs);
        ++result.folds;
        score_fold(model, rows, [&](const EvalRow& r) { return r.note_id == held_note; },
                   result.rows);
    }
    return result;
}

CvResult lopo_cv(std::span<const EvalRow> rows, const ForestConfig& cfg, unsigned jobs) {
    std::set<std::string> participants;
    for (const auto& r : rows) participants.insert(r.participant);
    if (participants.size() < 2)
        throw TooFewParticipants("leave-one-participant-out needs >= 2 participants");

    CvResult result;
    std::size_t fold_index = 0;
    for (const std::string& held : participants) {
        ForestConfig fold_cfg = cfg;
        fold_cfg.seed = derive_seed(cfg.seed, fold_index);
        ++fold_index;
        TrainingSet train = make_training_set(
            rows, [&](const EvalRow& r) { return r.participant != held; });
        if (!has_both_classes(train)) {
            result.warnings.push_back("participant " + held +
                                      ": training fold has a single class, skipped");
            continue;
        }
        const TrainedForest model = train_forest(train, fold_cfg, jobs);
        ++result.folds;
        score_fold(model, rows, [&](const EvalRow& r) { return r.participant == held; },
                   result.rows);
    }
    return result;
}

namespace {

UnitMetrics metrics_for(const std::string& unit, std::span<const ScoredRow> rows) {
    UnitMetrics m;
    m.unit = unit;
    m.rows = rows.size();
    std::vector<int> pred, truth;
    std::vector<double> scores;
    pred.reserve(rows.size());
    truth.reserve(rows.size());
    scores.reserve(rows.size());
    for (const auto& r : rows) {
        pred.push_back(r.predicted);
        truth.push_back(r.truth);
        scores.push_back(r.score);
    }
    m.prf = precision_recall_f1(pred, truth);
    try {
        m.auc = roc_auc(scores, truth);
    } catch (const SingleClass&) {
        m.auc.reset();
    }
    return m;
}

std::pair<double, double> mean_sd(std::span<const double> values) {
    if (values.empty()) return {0.0, 0.0};
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

const std::array<const char*, 3> kNoteTypes = {"short", "reflective", "summary"};

} // namespace

std::vector<TypeMetrics> per_note_type_report(std::span<const ScoredRow> rows,
                                              const NoteTypeMap& types,
                                              std::vector<std::string>* warnings) {
    for (const auto& [key, type] : types)
        if (std::find(kNoteTypes.begin(), kNoteTypes.end(), type) == kNoteTypes.end())
            throw UnknownTag("unknown note type '" + type + "' for participant " + key.first +
                             " note " + std::to_string(key.second));

    std::vector<TypeMetrics> out;
    for (const char* type : kNoteTypes) {
        std::vector<ScoredRow> subset;
        std::set<std::pair<std::string, int>> notes;
        for (const auto& r : rows) {
            auto it = types.find({r.participant, r.note_id});
            if (it == types.end())
                throw UnknownTag("note " + std::to_string(r.note_id) + " of participant " +
                                 r.participant + " has no type tag");
            if (it->second != type) continue;
            subset.push_back(r);
            notes.insert({r.participant, r.note_id});
        }
        if (subset.empty()) {
            if (warnings)
                warnings->push_back(std::string("note type '") + type +
                                    "' has no rows; omitted from the per-type table");
            continue;
        }
        UnitMetrics m = metrics_for(type, subset);
        TypeMetrics tm;
        tm.type = type;
        tm.notes = notes.size();
        tm.rows = m.rows;
        tm.prf = m.prf;
        tm.auc = m.auc;
        out.push_back(std::move(tm));
    }
    return out;
}

StrategyReport summarize_strategy(const std::string& strategy, const std::string& cv,
                                  std::size_t folds, std::span<const ScoredRow> rows,
                                  const NoteTypeMap* types) {
    StrategyReport report;
    report.strategy = strategy;
    report.cv = cv;
    report.folds = folds;

    std::map<std::string, std::vector<ScoredRow>> by_participant;
    for (const auto& r : rows) by_participant[r.participant].push_back(r);

    std::vector<double> precisions, recalls, f1s, aucs;
    for (const auto& [participant, prows] : by_participant) {
        UnitMetrics m = metrics_for(participant, prows);
        precisions.push_back(m.prf.precision);
        recalls.push_back(m.prf.recall);
        f1s.push_back(m.prf.f1);
        if (m.auc)
            aucs.push_back(*m.auc);
        else
            ++report.auc_skips;
        report.per_participant.push_back(std::move(m));
    }

    std::tie(report.mean_prf.precision, report.sd_prf.precision) = mean_sd(precisions);
    std::tie(report.mean_prf.recall, report.sd_prf.recall) = mean_sd(recalls);
    std::tie(report.mean_prf.f1, report.sd_prf.f1) = mean_sd(f1s);
    std::tie(report.mean_auc, report.sd_auc) = mean_sd(aucs);

    report.pooled = metrics_for("pooled", rows);
    if (types) report.per_type = per_note_type_report(rows, *types, &report.warnings);
    return report;
}

namespace {

nlohmann::json unit_to_json(const UnitMetrics& m) {
    nlohmann::json j;
    j["unit"] = m.unit;
    j["rows"] = m.rows;
    j["precision"] = m.prf.precision;
    j["recall"] = m.prf.recall;
    j["f1"] = m.prf.f1;
    if (m.auc)
        j["auc"] = *m.auc;
    else
        j["auc"] = nullptr;
    return j;
}

UnitMetrics unit_from_json(const nlohmann::json& j) {
    UnitMetrics m;
    m.unit = j.at("unit").get<std::string>();
    m.rows = j.at("rows").get<std::size_t>();
    m.prf.precision = j.at("precision").get<double>();
    m.prf.recall = j.at("recall").get<double>();
    m.prf.f1 = j.at("f1").get<double>();
    if (!j.at("auc").is_null()) m.auc = j.at("auc").get<double>();
    return m;
}

} // namespace

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["seed"] = report.seed;
    j["config"] = report.config_echo;
    j["strategies"] = nlohmann::json::array();
    for (const auto& s : report.strategies) {
        nlohmann::json js;
        js["strategy"] = s.strategy;
        js["cv"] = s.cv;
        js["folds"] = s.folds;
        js["per_participant"] = nlohmann::json::array();
        for (const auto& m : s.per_participant) js["per_participant"].push_back(unit_to_json(m));
        js["mean"] = {{"precision", s.mean_prf.precision},
                      {"recall", s.mean_prf.recall},
                      {"f1", s.mean_prf.f1},
                      {"auc", s.mean_auc}};
        js["sd"] = {{"precision", s.sd_prf.precision},
                    {"recall", s.sd_prf.recall},
                    {"f1", s.sd_prf.f1},
                    {"auc", s.sd_auc}};
        js["auc_skips"] = s.auc_skips;
        js["pooled"] = unit_to_json(s.pooled);
        js["per_note_type"] = nlohmann::json::array();
        for (const auto& t : s.per_type) {
            nlohmann::json jt;
            jt["type"] = t.type;
            jt["notes"] = t.notes;
            jt["rows"] = t.rows;
            jt["precision"] = t.prf.precision;
            jt["recall"] = t.prf.recall;
            jt["f1"] = t.prf.f1;
            if (t.auc)
                jt["auc"] = *t.auc;
            else
                jt["auc"] = nullptr;
            js["per_note_type"].push_back(jt);
        }
        js["warnings"] = s.warnings;
        j["strategies"].push_back(js);
    }
    return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report.json: ") + e.what());
    }
    EvalReport report;
    try {
        report.seed = j.at("seed").get<std::uint64_t>();
        report.config_echo = j.at("config").get<std::map<std::string, std::string>>();
        for (const auto& js : j.at("strategies")) {
            StrategyReport s;
            s.strategy = js.at("strategy").get<std::string>();
            s.cv = js.at("cv").get<std::string>();
            s.folds = js.at("folds").get<std::size_t>();
            for (const auto& jm : js.at("per_participant"))
                s.per_participant.push_back(unit_from_json(jm));
            s.mean_prf.precision = js.at("mean").at("precision").get<double>();
            s.mean_prf.recall = js.at("mean").at("recall").get<double>();
            s.mean_prf.f1 = js.at("mean").at("f1").get<double>();
            s.mean_auc = js.at("mean").at("auc").get<double>();
            s.sd_prf.precision = js.at("sd").at("precision").get<double>();
            s.sd_prf.recall = js.at("sd").at("recall").get<double>();
            s.sd_prf.f1 = js.at("sd").at("f1").get<double>();
            s.sd_auc = js.at("sd").at("auc").get<double>();
            s.auc_skips = js.at("auc_skips").get<std::size_t>();
            s.pooled = unit_from_json(js.at("pooled"));
            for (const auto& jt : js.at("per_note_type")) {
                TypeMetrics t;
                t.type = jt.at("type").get<std::string>();
                t.notes = jt.at("notes").get<std::size_t>();
                t.rows = jt.at("rows").get<std::size_t>();
                t.prf.precision = jt.at("precision").get<double>();
                t.prf.recall = jt.at("recall").get<double>();
                t.prf.f1 = jt.at("f1").get<double>();
                if (!jt.at("auc").is_null()) t.auc = jt.at("auc").get<double>();
                s.per_type.push_back(std::move(t));
            }
            s.warnings = js.at("warnings").get<std::vector<std::string>>();
            report.strategies.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report.json: ") + e.what());
    }
    return report;
}

std::string format_report_table(const EvalReport& report,
                                std::span<const std::string> metrics) {
    auto selected = [&](const char* name) {
        if (metrics.empty()) return true;
        return std::find(metrics.begin(), metrics.end(), name) != metrics.end();
    };

    std::ostringstream out;
    out << std::fixed << std::setprecision(3);
    out << std::left << std::setw(12) << "strategy" << std::setw(6) << "cv" << std::setw(7)
        << "folds";
    if (selected("precision")) out << std::setw(16) << "precision";
    if (selected("recall")) out << std::setw(16) << "recall";
    if (selected("f1")) out << std::setw(16) << "f1";
    if (selected("auc")) out << std::setw(16) << "auc";
    out << "\n";
    for (const auto& s : report.strategies) {
        out << std::left << std::setw(12) << s.strategy << std::setw(6) << s.cv << std::setw(7)
            << s.folds;
        auto cell = [&](double mean, double sd) {
            std::ostringstream c;
            c << std::fixed << std::setprecision(3) << mean << " +- " << sd;
            out << std::setw(16) << c.str();
        };
        if (selected("precision")) cell(s.mean_prf.precision, s.sd_prf.precision);
        if (selected("recall")) cell(s.mean_prf.recall, s.sd_prf.recall);
        if (selected("f1")) cell(s.mean_prf.f1, s.sd_prf.f1);
        if (selected("auc")) cell(s.mean_auc, s.sd_auc);
        out << "\n";
        for (const auto& t : s.per_type) {
            out << "  " << std::left << std::setw(23) << ("note type: " + t.type);
            if (selected("f1")) out << "f1 " << t.prf.f1 << "  ";
            if (selected("auc")) {
                out << "auc ";
                if (t.auc)
                    out << *t.auc;
                else
                    out << "n/a";
            }
            out << "  (" << t.notes << " notes, " << t.rows << " rows)\n";
        }
    }
    return out.str();
}

} // namespace gazenote
