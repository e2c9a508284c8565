#include "gazenote/errors.hpp"
#include "gazenote/eval.hpp"
#include "gazenote/metrics.hpp"
#include "gazenote/rng.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace gazenote;

namespace {

/// Labeled rows for one participant where feature 0 carries the signal.
std::vector<EvalRow> synthetic_rows(Rng& rng, const std::string& participant, int notes,
                                    int passages_per_note, double signal = 3.0) {
    std::vector<EvalRow> rows;
    for (int n = 0; n < notes; ++n) {
        const int target = static_cast<int>(rng.below(passages_per_note));
        for (int p = 0; p < passages_per_note; ++p) {
            EvalRow r;
            r.participant = participant;
            r.note_id = n;
            r.passage_id = p;
            for (auto& f : r.features) f = rng.uniform(0, 1);
            r.truth = p == target ? 1 : 0;
            if (r.truth) r.features[0] += signal;
            rows.push_back(r);
        }
    }
    return rows;
}

} // namespace

TEST_SUITE("evaluation") {

TEST_CASE("all-correct predictions score (1,1,1)") {
    const std::vector<int> pred{1, 0, 1, 0};
    const Prf m = precision_recall_f1(pred, pred);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
}

TEST_CASE("hand confusion matrix: TP=2 FP=1 FN=1") {
    const std::vector<int> pred{1, 1, 1, 0, 0};
    const std::vector<int> truth{1, 1, 0, 1, 0};
    const Prf m = precision_recall_f1(pred, truth);
    CHECK(m.precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall == doctest::Approx(2.0 / 3.0));
    CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("no positive predictions with positives present yields zeros") {
    const std::vector<int> pred{0, 0, 0};
    const std::vector<int> truth{1, 0, 1};
    const Prf m = precision_recall_f1(pred, truth);
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
}

TEST_CASE("mismatched lengths raise LengthMismatch") {
    const std::vector<int> a{1, 0};
    const std::vector<int> b{1};
    CHECK_THROWS_AS(precision_recall_f1(a, b), LengthMismatch);
}

TEST_CASE("F1 is invariant under row swaps") {
    std::vector<int> pred{1, 0, 1, 1, 0, 0};
    std::vector<int> truth{1, 1, 0, 1, 0, 1};
    const double f1 = precision_recall_f1(pred, truth).f1;
    std::swap(pred[0], pred[3]);
    std::swap(truth[0], truth[3]);
    CHECK(precision_recall_f1(pred, truth).f1 == f1);
}

TEST_CASE("perfectly ranked scores reach AUC 1") {
    const std::vector<double> scores{0.9, 0.8, 0.2, 0.1};
    const std::vector<int> truth{1, 1, 0, 0};
    CHECK(roc_auc(scores, truth) == 1.0);
}

TEST_CASE("all-identical scores give 0.5 by the tie convention") {
    const std::vector<double> scores{0.4, 0.4, 0.4, 0.4};
    const std::vector<int> truth{1, 0, 1, 0};
    CHECK(roc_auc(scores, truth) == doctest::Approx(0.5));
}

TEST_CASE("worked 4-row example: 3 wins of 4 pairs = 0.75") {
    const std::vector<double> scores{0.1, 0.4, 0.35, 0.8};
    const std::vector<int> truth{0, 0, 1, 1};
    CHECK(roc_auc(scores, truth) == doctest::Approx(0.75));
}

TEST_CASE("single-class truth raises SingleClass") {
    const std::vector<double> scores{0.1, 0.4};
    const std::vector<int> truth{1, 1};
    CHECK_THROWS_AS(roc_auc(scores, truth), SingleClass);
}

TEST_CASE("AUC matches brute force on random vectors, ties included") {
    Rng rng(555);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(499);
        std::vector<double> scores;
        std::vector<int> truth;
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            // coarse grid makes ties frequent
            scores.push_back(rng.bernoulli(0.5) ? std::floor(rng.uniform(0, 5)) / 4.0
                                                : rng.uniform(0, 1));
            const int t = rng.bernoulli(0.3) ? 1 : 0;
            truth.push_back(t);
            (t == 0 ? has0 : has1) = true;
        }
        if (!has0) truth[0] = 0;
        if (!has1) truth[0] = 1;
        const double expected = testing::brute_force_auc(scores, truth);
        CHECK(roc_auc(scores, truth) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("negating tie-free scores flips AUC around one half") {
    Rng rng(556);
    std::vector<double> scores;
    std::vector<int> truth;
    for (int i = 0; i < 200; ++i) {
        scores.push_back(rng.uniform(0, 1) + i * 1e-9);  // distinct
        truth.push_back(i % 3 == 0 ? 1 : 0);
    }
    std::vector<double> negated;
    for (double s : scores) negated.push_back(-s);
    CHECK(roc_auc(scores, truth) + roc_auc(negated, truth) == doctest::Approx(1.0));
}

TEST_CASE("leave-one-note-out trains one model per note") {
    Rng rng(31);
    const auto rows = synthetic_rows(rng, "p0", 15, 5);
    ForestConfig cfg;
    cfg.n_trees = 10;
    cfg.seed = 1;
    const CvResult result = loo_note_cv(rows, cfg);
    CHECK(result.folds == 15);  // one trained model per note
    CHECK(result.rows.size() == rows.size());

    // folds partition the notes: each row scored exactly once
    std::set<std::pair<int, int>> seen;
    for (const auto& r : result.rows) CHECK(seen.insert({r.note_id, r.passage_id}).second);
}

TEST_CASE("strongly aligned synthetic notes give high person-dependent AUC") {
    Rng rng(32);
    const auto rows = synthetic_rows(rng, "p0", 18, 5, 4.0);
    ForestConfig cfg;
    cfg.n_trees = 40;
    cfg.seed = 2;
    const CvResult result = loo_note_cv(rows, cfg, 4);
    const StrategyReport report = summarize_strategy("learned", "lono", result.folds,
                                                     result.rows);
    REQUIRE(report.per_participant.size() == 1);
    REQUIRE(report.per_participant[0].auc.has_value());
    CHECK(*report.per_participant[0].auc > 0.9);
}

TEST_CASE("too few notes or single-class rows are rejected") {
    Rng rng(33);
    auto rows = synthetic_rows(rng, "p0", 1, 5);
    ForestConfig cfg;
    CHECK_THROWS_AS(loo_note_cv(rows, cfg), TooFewNotes);
    for (auto& r : rows) r.truth = 0;
    CHECK_THROWS_AS(loo_note_cv(rows, cfg), TooFewNotes);
}

TEST_CASE("LOPO: one fold per participant, rows never self-trained") {
    Rng rng(34);
    std::vector<EvalRow> rows;
    for (int p = 0; p < 4; ++p) {
        const auto part = synthetic_rows(rng, "p" + std::to_string(p), 6, 4);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    ForestConfig cfg;
    cfg.n_trees = 10;
    cfg.seed = 3;
    const CvResult result = lopo_cv(rows, cfg);
    CHECK(result.folds == 4);
    CHECK(result.rows.size() == rows.size());
    // each participant's rows all present exactly once
    std::map<std::string, std::size_t> counts;
    for (const auto& r : result.rows) ++counts[r.participant];
    for (const auto& [p, c] : counts) CHECK(c == 24);
}

TEST_CASE("LOPO requires at least two participants") {
    Rng rng(35);
    const auto rows = synthetic_rows(rng, "solo", 6, 4);
    CHECK_THROWS_AS(lopo_cv(rows, ForestConfig{}), TooFewParticipants);
}

TEST_CASE("per-type table: one type equals the pooled overall metrics") {
    Rng rng(36);
    const auto rows = synthetic_rows(rng, "p0", 8, 4);
    ForestConfig cfg;
    cfg.n_trees = 10;
    const CvResult result = loo_note_cv(rows, cfg);
    NoteTypeMap types;
    for (const auto& r : result.rows) types[{r.participant, r.note_id}] = "short";
    std::vector<std::string> warnings;
    const auto table = per_note_type_report(result.rows, types, &warnings);
    REQUIRE(table.size() == 1);
    CHECK(table[0].type == "short");
    const StrategyReport report =
        summarize_strategy("learned", "lono", result.folds, result.rows, &types);
    CHECK(table[0].prf.f1 == doctest::Approx(report.pooled.prf.f1));
    REQUIRE(table[0].auc.has_value());
    REQUIRE(report.pooled.auc.has_value());
    CHECK(*table[0].auc == doctest::Approx(*report.pooled.auc));
    // the empty classes were reported as warnings and omitted
    CHECK(warnings.size() == 2);
}

TEST_CASE("unknown tags are rejected") {
    Rng rng(37);
    const auto rows = synthetic_rows(rng, "p0", 4, 3);
    std::vector<ScoredRow> scored;
    for (const auto& r : rows)
        scored.push_back({r.participant, r.note_id, r.passage_id, 0.5, 0, r.truth});
    NoteTypeMap types;
    for (const auto& r : rows) types[{r.participant, r.note_id}] = "musing";
    CHECK_THROWS_AS(per_note_type_report(scored, types), UnknownTag);
    NoteTypeMap missing;  // untagged notes are also an error
    CHECK_THROWS_AS(per_note_type_report(scored, missing), UnknownTag);
}

TEST_CASE("single-class participants are skipped in the AUC mean") {
    std::vector<ScoredRow> rows;
    // p0 has both classes; p1 is all-negative (AUC undefined there)
    rows.push_back({"p0", 0, 0, 0.9, 1, 1});
    rows.push_back({"p0", 0, 1, 0.2, 0, 0});
    rows.push_back({"p1", 0, 0, 0.4, 0, 0});
    rows.push_back({"p1", 0, 1, 0.3, 0, 0});
    const StrategyReport report = summarize_strategy("learned", "lopo", 2, rows);
    CHECK(report.auc_skips == 1);
    CHECK(report.mean_auc == doctest::Approx(1.0));  // over the one valid unit
}

TEST_CASE("report JSON round-trips") {
    Rng rng(38);
    const auto rows = synthetic_rows(rng, "p0", 6, 4);
    ForestConfig cfg;
    cfg.n_trees = 5;
    const CvResult result = loo_note_cv(rows, cfg);
    EvalReport report;
    report.seed = 42;
    report.config_echo = {{"n_trees", "5"}};
    report.strategies.push_back(
        summarize_strategy("learned", "lono", result.folds, result.rows));
    const std::string json = report_to_json(report);
    const EvalReport back = report_from_json(json);
    CHECK(report_to_json(back) == json);
    CHECK(back.strategies[0].folds == result.folds);
    CHECK(back.strategies[0].mean_auc == report.strategies[0].mean_auc);
}

} // TEST_SUITE
