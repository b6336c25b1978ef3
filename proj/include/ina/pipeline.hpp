#pragma once
// The answering pipeline's trained models.
//
// Seven steps turn a question into an answer. Five are classifiers backed by
// information matrices (the answer-POS and MLSU models, plus the
// next/previous token models); the two word-form models realise a chosen
// lemma as a surface word in either direction. The remaining two steps (verb
// and token set of an MLSU) are registry lookups.

#include "ina/information_matrix.hpp"
#include "ina/mlsu.hpp"
#include "ina/question.hpp"
#include "ina/text.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ina {

enum class ModelId : int {
    AnswerPos = 0,
    Mlsu = 1,
    NextToken = 2,
    PrevToken = 3,
    WordFormNext = 4,
    WordFormPrev = 5,
};

inline constexpr std::array<ModelId, 6> kAllModels = {ModelId::AnswerPos,    ModelId::Mlsu,
                                                      ModelId::NextToken,    ModelId::PrevToken,
                                                      ModelId::WordFormNext, ModelId::WordFormPrev};

std::string_view model_name(ModelId id);
std::optional<ModelId> parse_model_name(std::string_view name);
inline std::size_t model_index(ModelId id) { return static_cast<std::size_t>(id); }

enum class TrainingMode { Parallel, Consecutive };
std::string_view mode_name(TrainingMode mode);
std::optional<TrainingMode> parse_mode(std::string_view name);

enum class Direction { Right, Left };
std::string_view direction_name(Direction d);

// ---------------------------------------------------------------------------
// Feature encoding

/// "man_noun": lemma suffixed with its POS name.
std::string token_feature(const std::string& lemma, PosTag pos);
/// "pos=noun": required-answer-POS feature of the MLSU model.
std::string pos_feature(PosTag pos);
/// Answer-POS model input: the construction plus the POS name of every informative word.
std::vector<std::string> answer_pos_features(const QuestionSplit& split);
/// MLSU model input: lemmas of the informative content words.
std::vector<std::string> content_lemmas(std::span<const Token> tokens);
/// Word-form model input. adjacent lists surface words nearest first (at most two used).
std::vector<std::string> word_form_features(std::span<const std::string> adjacent, const std::string& lemma,
                                            PosTag pos, const std::string& verb);

// ---------------------------------------------------------------------------
// Training data

/// Where a row's feature values came from when they are produced by another
/// model at answer time. Consecutive training re-derives them from that
/// model's prediction.
struct UpstreamLink {
    ModelId source = ModelId::AnswerPos;
    std::vector<std::string> query;
    /// Classes the upstream model may choose from; empty means all.
    std::vector<std::string> candidates;
    /// Features of this row that encode the gold upstream value.
    std::vector<std::string> gold_features;
    /// Token sources: lemma -> POS used to re-encode a predicted token.
    std::map<std::string, PosTag> token_pos;

    friend bool operator==(const UpstreamLink&, const UpstreamLink&) = default;
};

struct TrainingRow {
    ModelId model = ModelId::AnswerPos;
    std::vector<std::string> features;
    std::string label;
    /// Answer-time class mask, used for held-out scoring; empty means all classes.
    std::vector<std::string> candidates;
    std::optional<UpstreamLink> upstream;

    friend bool operator==(const TrainingRow&, const TrainingRow&) = default;
};

struct QaPair {
    std::string question;
    std::string answer;
};

/// TSV question<TAB>answer; blank and '#' lines skipped.
std::vector<QaPair> read_qa_pairs(std::istream& in);

/// Answer-word POS for a QA pair: the highest-priority POS among answer words
/// absent from the question. nullopt when the answer has no taggable content.
std::optional<PosTag> missing_answer_pos(const QuestionSplit& question, std::span<const Token> answer);

/// Emits rows for models 0-5 in a fixed order (deterministic).
std::vector<TrainingRow> build_training_rows(const MlsuRegistry& registry, std::span<const QaPair> qa_pairs,
                                             const Tagger& tagger);

// ---------------------------------------------------------------------------
// Bundle

struct BundleConfig {
    WeightConfig weights;
    TrainingMode mode = TrainingMode::Parallel;
    std::uint64_t seed = 17;
    /// Fraction of each model's rows held out for the report's P/R/F1.
    double holdout = 0.1;
    std::size_t max_steps = 32;
    /// Minimum MLSU confidence for an answer to be produced.
    double reject_threshold = 0.1;

    friend bool operator==(const BundleConfig&, const BundleConfig&) = default;
};

struct ModelStats {
    ModelId model = ModelId::AnswerPos;
    std::size_t classes = 0;
    std::size_t features = 0;
    std::uint64_t connections = 0;
    std::size_t rows = 0;
    std::size_t size_bytes = 0;
    std::size_t holdout_rows = 0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;

    friend bool operator==(const ModelStats&, const ModelStats&) = default;
};

struct BundleMetadata {
    std::string created_at;
    std::string corpus_hash;
    std::vector<ModelStats> model_stats;

    friend bool operator==(const BundleMetadata&, const BundleMetadata&) = default;
};

using ModelSet = std::array<InformationMatrix, 6>;

/// Everything needed to answer questions. Immutable after construction and
/// safe for concurrent readers.
class ModelBundle {
public:
    ModelBundle(ModelSet models, MlsuRegistry registry, Lexicon lexicon, BundleConfig config,
                BundleMetadata metadata);

    const InformationMatrix& model(ModelId id) const { return models_[model_index(id)]; }
    const ModelSet& models() const { return models_; }
    const MlsuRegistry& registry() const { return registry_; }
    const Lexicon& lexicon() const { return lexicon_; }
    const BundleConfig& config() const { return config_; }
    const BundleMetadata& metadata() const { return metadata_; }

    bool pos_model_trained() const { return !model(ModelId::AnswerPos).empty(); }

    /// Known surface forms of a lemma in a word-form model, class order.
    std::span<const std::string> forms_of(ModelId word_form_model, const std::string& lemma) const;

private:
    ModelSet models_;
    MlsuRegistry registry_;
    Lexicon lexicon_;
    BundleConfig config_;
    BundleMetadata metadata_;
    std::array<std::unordered_map<std::string, std::vector<std::string>>, 2> forms_;
};

std::string mlsu_class_id(MlsuId id);

// ---------------------------------------------------------------------------
// Training

struct TrainReport {
    TrainingMode mode = TrainingMode::Parallel;
    std::vector<ModelStats> models;
    double wall_seconds = 0.0;
};

/// Model-parameter table: model, size, classes, features, connections, F1, P/R.
std::string format_train_report(const TrainReport& report);

struct TrainResult {
    ModelBundle bundle;
    TrainReport report;
};

/// Trains the six matrices. Consecutive mode trains in pipeline order and
/// rewrites upstream-derived features of downstream rows with the upstream
/// model's predictions. Throws Error(EmptyModel) if models 1-5 lack rows.
TrainResult train(std::span<const TrainingRow> rows, const MlsuRegistry& registry, const Lexicon& lexicon,
                  const BundleConfig& config, BundleMetadata metadata = {});

/// Corpus text -> registry -> rows -> train. Fills corpus hash and timestamp.
TrainResult train_from_corpus(std::string_view corpus, std::span<const QaPair> qa_pairs, const Lexicon& lexicon,
                              const BundleConfig& config);

/// Rows after consecutive-mode substitution against already trained upstream models.
std::vector<TrainingRow> substitute_upstream(std::span<const TrainingRow> rows, const ModelSet& upstream,
                                             ModelId target);

// ---------------------------------------------------------------------------
// Prediction

struct PosPrediction {
    PosTag tag = PosTag::Any;
    double confidence = 0.0;
    bool model_trained = false;
    std::vector<std::string> features;
    std::vector<ScoredClass> ranking;
};

/// Throws Error(NoEvidence) when a trained model recognises none of the features.
PosPrediction predict_answer_pos(const ModelBundle& bundle, const QuestionSplit& split);

struct MlsuPrediction {
    MlsuId id = 0;
    double score = 0.0;
    double confidence = 0.0;
    std::vector<std::string> features;
    std::vector<ScoredClass> ranking;
};

/// Throws Error(NoEvidence) when no informative lemma is known to the model.
MlsuPrediction resolve_mlsu(const ModelBundle& bundle, const QuestionSplit& split, PosTag required_pos);

const std::string& mlsu_verb(const ModelBundle& bundle, MlsuId id);
const std::vector<std::string>& mlsu_tokens(const ModelBundle& bundle, MlsuId id);

struct ContextItem {
    std::string lemma;
    PosTag pos = PosTag::Other;
};

struct TokenPrediction {
    std::string token;
    double score = 0.0;
    double confidence = 0.0;
    std::vector<std::string> features;
};

/// Picks the next token among remaining + END from the last two context
/// items. Throws Error(NoEvidence) when no context feature is known.
TokenPrediction next_token(const ModelBundle& bundle, std::span<const ContextItem> context,
                           std::span<const std::string> remaining);
/// Mirror of next_token over remaining + START.
TokenPrediction prev_token(const ModelBundle& bundle, std::span<const ContextItem> context,
                           std::span<const std::string> remaining);

struct WordPrediction {
    std::string word;
    double score = 0.0;
    double confidence = 0.0;
    bool fallback = false;
};

/// Surface form for a token, chosen among the lemma's known forms. Falls back
/// to the lemma itself when the lemma has no known form.
WordPrediction token_to_word(const ModelBundle& bundle, std::span<const std::string> adjacent,
                             const std::string& token, PosTag token_pos, const std::string& verb, Direction direction);

}  // namespace ina
