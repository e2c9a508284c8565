// gazenote: batch toolkit that anchors voice notes to document passages
// from gaze traces. Subcommands cover the whole pipeline: simulate sessions,
// segment audio into notes, compute features, train/apply the forest, run
// the two baselines, and evaluate strategies under cross-validation.

#include "gazenote/audio.hpp"
#include "gazenote/baselines.hpp"
#include "gazenote/config.hpp"
#include "gazenote/csv.hpp"
#include "gazenote/errors.hpp"
#include "gazenote/eval.hpp"
#include "gazenote/features.hpp"
#include "gazenote/forest.hpp"
#include "gazenote/parallel.hpp"
#include "gazenote/pipeline.hpp"
#include "gazenote/rng.hpp"
#include "gazenote/simulate.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>

namespace fs = std::filesystem;
using namespace gazenote;

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed_value = 0;
    std::vector<CLI::Option*> seed_opts;  // one per subcommand, same binding
    unsigned jobs = default_jobs();

    bool seed_given() const {
        for (const auto* opt : seed_opts)
            if (opt->count() > 0) return true;
        return false;
    }

    PipelineConfig load() const {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        if (seed_given()) {
            cfg.seed = seed_value;
            cfg.forest.seed = seed_value;
        }
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "pipeline config file (key = value lines)");
    opts.seed_opts.push_back(
        cmd->add_option("--seed", opts.seed_value, "random seed (overrides the config value)"));
    cmd->add_option("--jobs", opts.jobs, "worker threads (default: logical cores)");
}

struct LoadedCorpus {
    std::vector<Session> sessions;
    std::vector<SessionPipeline> pipelines;
    std::vector<std::map<int, std::string>> note_types;  // empty map when absent
};

LoadedCorpus process_corpus(const fs::path& corpus_dir, const PipelineConfig& cfg,
                            unsigned jobs) {
    const auto dirs = corpus_session_dirs(corpus_dir);
    LoadedCorpus corpus;
    corpus.sessions.resize(dirs.size());
    corpus.pipelines.resize(dirs.size());
    corpus.note_types.resize(dirs.size());
    parallel_for(dirs.size(), jobs, [&](std::size_t i) {
        corpus.sessions[i] = load_session(dirs[i]);
        corpus.pipelines[i] = run_session_pipeline(corpus.sessions[i], cfg);
        const fs::path types_path = dirs[i] / "note_types.csv";
        if (fs::exists(types_path)) corpus.note_types[i] = read_note_types_csv(types_path);
    });
    std::set<std::string> ids;
    for (const auto& s : corpus.sessions)
        if (!ids.insert(s.participant_id).second)
            throw ValidationError("duplicate participant_id '" + s.participant_id +
                                  "' in corpus " + corpus_dir.string());
    return corpus;
}

std::vector<FeatureRow> all_feature_rows(const LoadedCorpus& corpus) {
    std::vector<FeatureRow> rows;
    for (const auto& pipe : corpus.pipelines)
        rows.insert(rows.end(), pipe.feature_rows.begin(), pipe.feature_rows.end());
    return rows;
}

std::optional<NoteTypeMap> corpus_note_types(const LoadedCorpus& corpus) {
    NoteTypeMap types;
    for (std::size_t i = 0; i < corpus.pipelines.size(); ++i) {
        if (corpus.note_types[i].empty()) return std::nullopt;
        for (const auto& [note_id, type] : corpus.note_types[i])
            types[{corpus.pipelines[i].participant_id, note_id}] = type;
    }
    return types;
}

int cmd_simulate(const CommonOpts& common, int participants, int notes, bool emit_wav,
                 const std::string& profile_path, const std::string& out_dir) {
    const PipelineConfig cfg = common.load();
    const BehaviorProfile profile =
        profile_path.empty() ? BehaviorProfile{} : load_profile(profile_path);
    const auto names =
        simulate_corpus(out_dir, participants, notes, profile, cfg.seed, emit_wav, common.jobs);
    std::cout << "simulated " << names.size() << " session(s) under " << out_dir << "\n";
    return 0;
}

int cmd_segment_audio(const CommonOpts& common, const std::string& session_dir,
                      std::string out_path) {
    const PipelineConfig cfg = common.load();
    const Session session = load_session(session_dir);
    Envelope env;
    if (session.audio.envelope)
        env = *session.audio.envelope;
    else
        env = compute_envelope(session.audio.pcm->samples, session.audio.pcm->sample_rate,
                               cfg.audio.frame_ms);
    const auto notes = extract_voice_notes(env, cfg.audio);
    if (out_path.empty()) out_path = (fs::path(session_dir) / "notes.csv").string();
    write_notes_csv(out_path, notes);
    std::cout << "wrote " << notes.size() << " note(s) to " << out_path << "\n";
    return 0;
}

int cmd_featurize(const CommonOpts& common, const std::string& corpus_dir,
                  const std::string& session_dir, const std::string& out_path,
                  const std::string& fixations_out) {
    const PipelineConfig cfg = common.load();
    std::vector<FeatureRow> rows;
    if (!session_dir.empty()) {
        const Session session = load_session(session_dir);
        const SessionPipeline pipe = run_session_pipeline(session, cfg);
        rows = pipe.feature_rows;
        if (!fixations_out.empty()) {
            std::vector<Fixation> all;
            for (const auto& fx : pipe.roa_fixations)
                all.insert(all.end(), fx.begin(), fx.end());
            write_fixations_csv(fixations_out, all);
        }
    } else {
        const LoadedCorpus corpus = process_corpus(corpus_dir, cfg, common.jobs);
        rows = all_feature_rows(corpus);
    }
    write_features_csv(out_path, rows);
    std::cout << "wrote " << rows.size() << " feature row(s) to " << out_path << "\n";
    return 0;
}

int cmd_train(const CommonOpts& common, const std::string& features_path,
              const std::string& out_path) {
    const PipelineConfig cfg = common.load();
    const auto rows = read_features_csv(features_path);
    const TrainingSet data = training_set_from_rows(rows);
    if (data.x.empty())
        throw ValidationError(features_path + " has no labeled rows; cannot train");
    const TrainedForest model = train_forest(data, cfg.forest, common.jobs);
    save_model(model, out_path);
    std::cout << "trained " << model.trees.size() << " tree(s) on " << data.x.size()
              << " rows -> " << out_path << "\n";
    std::cout << "feature importances:\n";
    for (const auto& [name, score] : feature_importance(model))
        std::cout << "  " << name << " " << format_double(score) << "\n";
    return 0;
}

int cmd_predict(const CommonOpts& common, const std::string& model_path,
                const std::string& session_dir, const std::string& out_path) {
    const PipelineConfig cfg = common.load();
    const TrainedForest model = load_model(model_path);
    const Session session = load_session(session_dir);
    const SessionPipeline pipe = run_session_pipeline(session, cfg);
    std::vector<PredictionRow> rows;
    for (const auto& feature_row : pipe.feature_rows) {
        AnchorPrediction p;
        p.note_id = feature_row.vec.note_id;
        p.passage_id = feature_row.vec.passage_id;
        p.score = predict_proba(model, feature_row.vec.f);
        p.annotated = p.score >= 0.5;
        rows.push_back({"learned", session.participant_id, p});
    }
    write_predictions_csv(out_path, rows);
    std::cout << "wrote " << rows.size() << " prediction(s) to " << out_path << "\n";
    return 0;
}

int cmd_baselines(const CommonOpts& common, const std::string& corpus_dir,
                  const std::string& session_dir, const std::string& strategy,
                  const std::string& out_path) {
    const PipelineConfig cfg = common.load();
    LoadedCorpus corpus;
    if (!session_dir.empty()) {
        corpus.sessions.push_back(load_session(session_dir));
        corpus.pipelines.push_back(run_session_pipeline(corpus.sessions[0], cfg));
    } else {
        corpus = process_corpus(corpus_dir, cfg, common.jobs);
    }
    std::vector<PredictionRow> rows;
    for (std::size_t i = 0; i < corpus.sessions.size(); ++i) {
        if (strategy == "position" || strategy == "all") {
            const auto r = position_predictions(corpus.sessions[i], corpus.pipelines[i]);
            rows.insert(rows.end(), r.begin(), r.end());
        }
        if (strategy == "fixation" || strategy == "all") {
            const auto r = fixation_predictions(corpus.sessions[i], corpus.pipelines[i], cfg);
            rows.insert(rows.end(), r.begin(), r.end());
        }
    }
    write_predictions_csv(out_path, rows);
    std::cout << "wrote " << rows.size() << " prediction(s) to " << out_path << "\n";
    return 0;
}

int cmd_evaluate(const CommonOpts& common, const std::string& corpus_dir, const std::string& cv,
                 const std::string& strategy, const std::string& out_path,
                 const std::string& features_out, const std::vector<std::string>& metrics) {
    const PipelineConfig cfg = common.load();
    const LoadedCorpus corpus = process_corpus(corpus_dir, cfg, common.jobs);
    const std::vector<FeatureRow> feature_rows = all_feature_rows(corpus);
    if (!features_out.empty()) write_features_csv(features_out, feature_rows);

    const std::optional<NoteTypeMap> types = corpus_note_types(corpus);
    const NoteTypeMap* types_ptr = types ? &*types : nullptr;

    EvalReport report;
    report.seed = cfg.seed;
    report.config_echo = config_echo(cfg);

    if (strategy == "learned" || strategy == "all") {
        const std::vector<EvalRow> eval_rows = eval_rows_from_features(feature_rows);
        CvResult result;
        if (cv == "lopo") {
            result = lopo_cv(eval_rows, cfg.forest, common.jobs);
        } else if (cv == "lono") {
            std::map<std::string, std::vector<EvalRow>> by_participant;
            for (const auto& r : eval_rows) by_participant[r.participant].push_back(r);
            for (const auto& [participant, rows] : by_participant) {
                CvResult one = loo_note_cv(rows, cfg.forest, common.jobs);
                result.folds += one.folds;
                result.rows.insert(result.rows.end(), one.rows.begin(), one.rows.end());
                result.warnings.insert(result.warnings.end(), one.warnings.begin(),
                                       one.warnings.end());
            }
        } else {
            throw ValidationError("unknown cv protocol '" + cv + "'");
        }
        StrategyReport sr =
            summarize_strategy("learned", cv, result.folds, result.rows, types_ptr);
        sr.warnings.insert(sr.warnings.end(), result.warnings.begin(), result.warnings.end());
        report.strategies.push_back(std::move(sr));
    }

    auto add_baseline = [&](const std::string& name) {
        std::vector<ScoredRow> rows;
        for (std::size_t i = 0; i < corpus.sessions.size(); ++i) {
            const auto preds =
                name == "position"
                    ? position_predictions(corpus.sessions[i], corpus.pipelines[i])
                    : fixation_predictions(corpus.sessions[i], corpus.pipelines[i], cfg);
            const auto scored = scored_rows_from_predictions(preds, corpus.sessions[i]);
            rows.insert(rows.end(), scored.begin(), scored.end());
        }
        report.strategies.push_back(
            summarize_strategy(name, "none", corpus.sessions.size(), rows, types_ptr));
    };
    if (strategy == "position" || strategy == "all") add_baseline("position");
    if (strategy == "fixation" || strategy == "all") add_baseline("fixation");

    write_text_file(out_path, report_to_json(report));
    std::cout << format_report_table(report, metrics);
    std::cout << "report written to " << out_path << "\n";
    return 0;
}

int cmd_report(const std::string& input, const std::vector<std::string>& metrics) {
    const EvalReport report = report_from_json(read_text_file(input));
    std::cout << format_report_table(report, metrics);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"anchor voice notes to document passages from gaze traces"};
    app.require_subcommand(1);

    CommonOpts common;

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a labeled synthetic corpus");
    int sim_participants = 32;
    int sim_notes = 22;
    bool sim_wav = false;
    std::string sim_profile, sim_out;
    sim->add_option("--participants", sim_participants, "number of participants (default 32)");
    sim->add_option("--notes-per-participant", sim_notes, "notes per participant (default 22)");
    sim->add_option("--profile", sim_profile, "behavior profile JSON file");
    sim->add_option("--out", sim_out, "output corpus directory")->required();
    sim->add_flag("--emit-wav", sim_wav, "synthesize audio.wav instead of envelope.csv");
    add_common(sim, common);

    // segment-audio
    auto* seg = app.add_subcommand("segment-audio", "extract voice notes from session audio");
    std::string seg_session, seg_out;
    seg->add_option("--session", seg_session, "session directory")->required();
    seg->add_option("--out", seg_out, "output notes.csv (default: <session>/notes.csv)");
    add_common(seg, common);

    // featurize
    auto* feat = app.add_subcommand("featurize", "compute per-passage feature vectors");
    std::string feat_corpus, feat_session, feat_out, feat_fixations;
    feat->add_option("--corpus", feat_corpus, "corpus directory of sessions");
    feat->add_option("--session", feat_session, "single session directory");
    feat->add_option("--out", feat_out, "output features.csv")->required();
    feat->add_option("--fixations-out", feat_fixations,
                     "debug fixations.csv (single session only)");
    add_common(feat, common);

    // train
    auto* train = app.add_subcommand("train", "train the tree ensemble on features.csv");
    std::string train_features, train_out;
    train->add_option("--features", train_features, "labeled features.csv")->required();
    train->add_option("--out", train_out, "output model file")->required();
    add_common(train, common);

    // predict
    auto* predict = app.add_subcommand("predict", "score a session with a trained model");
    std::string pred_model, pred_session, pred_out;
    predict->add_option("--model", pred_model, "trained model file")->required();
    predict->add_option("--session", pred_session, "session directory")->required();
    predict->add_option("--out", pred_out, "output predictions.csv")->required();
    add_common(predict, common);

    // baselines
    auto* base = app.add_subcommand("baselines", "run the two baseline strategies");
    std::string base_corpus, base_session, base_out;
    std::string base_strategy = "all";
    base->add_option("--corpus", base_corpus, "corpus directory of sessions");
    base->add_option("--session", base_session, "single session directory");
    base->add_option("--strategy", base_strategy, "position | fixation | all (default all)")
        ->check(CLI::IsMember({"position", "fixation", "all"}));
    base->add_option("--out", base_out, "output predictions.csv")->required();
    add_common(base, common);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "cross-validated strategy comparison");
    std::string eval_corpus, eval_out = "report.json", eval_features;
    std::string eval_cv = "lopo";
    std::string eval_strategy = "all";
    std::vector<std::string> eval_metrics;
    eval->add_option("--corpus", eval_corpus, "corpus directory of labeled sessions")
        ->required();
    eval->add_option("--cv", eval_cv, "lopo | lono (default lopo)")
        ->check(CLI::IsMember({"lopo", "lono"}));
    eval->add_option("--strategy", eval_strategy,
                     "learned | position | fixation | all (default all)")
        ->check(CLI::IsMember({"learned", "position", "fixation", "all"}));
    eval->add_option("--out", eval_out, "output report.json (default report.json)");
    eval->add_option("--features-out", eval_features, "also write the pooled features.csv");
    eval->add_option("--metrics", eval_metrics,
                     "subset of precision,recall,f1,auc to print")
        ->delimiter(',');
    add_common(eval, common);

    // report
    auto* rep = app.add_subcommand("report", "pretty-print an existing report.json");
    std::string rep_input;
    std::vector<std::string> rep_metrics;
    rep->add_option("--input", rep_input, "report.json produced by evaluate")->required();
    rep->add_option("--metrics", rep_metrics, "subset of precision,recall,f1,auc to print")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(common, sim_participants, sim_notes, sim_wav, sim_profile,
                                sim_out);
        if (seg->parsed()) return cmd_segment_audio(common, seg_session, seg_out);
        if (feat->parsed()) {
            if (feat_corpus.empty() == feat_session.empty())
                throw ValidationError("featurize needs exactly one of --corpus / --session");
            return cmd_featurize(common, feat_corpus, feat_session, feat_out, feat_fixations);
        }
        if (train->parsed()) return cmd_train(common, train_features, train_out);
        if (predict->parsed()) return cmd_predict(common, pred_model, pred_session, pred_out);
        if (base->parsed()) {
            if (base_corpus.empty() == base_session.empty())
                throw ValidationError("baselines needs exactly one of --corpus / --session");
            return cmd_baselines(common, base_corpus, base_session, base_strategy, base_out);
        }
        if (eval->parsed())
            return cmd_evaluate(common, eval_corpus, eval_cv, eval_strategy, eval_out,
                                eval_features, eval_metrics);
        if (rep->parsed()) return cmd_report(rep_input, rep_metrics);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
