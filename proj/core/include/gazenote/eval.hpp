#pragma once

#include "gazenote/features.hpp"
#include "gazenote/forest.hpp"
#include "gazenote/metrics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gazenote {

/// One labeled (participant, note, passage) example entering cross-validation.
struct EvalRow {
    std::string participant;
    int note_id = 0;
    int passage_id = 0;
    std::array<double, kFeatureCount> features{};
    int truth = 0;      // 1 = Annotated
};

/// The same example after scoring by a strategy.
struct ScoredRow {
    std::string participant;
    int note_id = 0;
    int passage_id = 0;
    double score = 0;
    int predicted = 0;
    int truth = 0;
};

struct CvResult {
    std::vector<ScoredRow> rows;
    std::size_t folds = 0;      // number of models trained
    std::vector<std::string> warnings;
};

/// Drops Unknown-label rows; throws ValidationError if nothing labeled remains.
std::vector<EvalRow> eval_rows_from_features(std::span<const FeatureRow> rows);

/// Person-dependent protocol for one participant: one fold per note, trained
/// on the remaining notes' rows, scoring the held-out note's rows. Throws
/// TooFewNotes (needs >= 2 notes and both classes overall).
CvResult loo_note_cv(std::span<const EvalRow> rows, const ForestConfig& cfg, unsigned jobs = 1);

/// Person-independent protocol: one fold per participant, trained on all
/// other participants' rows. Throws TooFewParticipants.
CvResult lopo_cv(std::span<const EvalRow> rows, const ForestConfig& cfg, unsigned jobs = 1);

struct UnitMetrics {
    std::string unit;       // participant id, or "pooled"
    std::size_t rows = 0;
    Prf prf;
    std::optional<double> auc;      // absent when the unit has a single class
};

struct TypeMetrics {
    std::string type;
    std::size_t notes = 0;
    std::size_t rows = 0;
    Prf prf;
    std::optional<double> auc;
};

/// note type lookup: (participant, note_id) -> short | reflective | summary
using NoteTypeMap = std::map<std::pair<std::string, int>, std::string>;

/// Metrics restricted to each note type, pooled over rows. Throws UnknownTag
/// on a tag outside {short, reflective, summary}; types with no rows are
/// omitted (with a warning when `warnings` is given).
std::vector<TypeMetrics> per_note_type_report(std::span<const ScoredRow> rows,
                                              const NoteTypeMap& types,
                                              std::vector<std::string>* warnings = nullptr);

struct StrategyReport {
    std::string strategy;
    std::string cv;             // "lopo" | "lono" | "none"
    std::size_t folds = 0;
    std::vector<UnitMetrics> per_participant;
    // headline aggregation: mean +- sd across participants
    Prf mean_prf, sd_prf;
    double mean_auc = 0, sd_auc = 0;
    std::size_t auc_skips = 0;  // participants excluded from the AUC mean
    UnitMetrics pooled;         // all rows pooled, for diagnostics
    std::vector<TypeMetrics> per_type;
    std::vector<std::string> warnings;
};

/// Groups scored rows by participant, computes per-participant and pooled
/// metrics, and (when note types are provided) the per-type table.
StrategyReport summarize_strategy(const std::string& strategy, const std::string& cv,
                                  std::size_t folds, std::span<const ScoredRow> rows,
                                  const NoteTypeMap* types = nullptr);

struct EvalReport {
    std::vector<StrategyReport> strategies;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config_echo;
};

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

/// Plain-text comparison table. `metrics` filters columns
/// (precision/recall/f1/auc); empty selects all.
std::string format_report_table(const EvalReport& report,
                                std::span<const std::string> metrics = {});

} // namespace gazenote
