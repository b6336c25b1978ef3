#include "ina/pipeline.hpp"

#include "ina/digest.hpp"
#include "ina/error.hpp"
#include "ina/log.hpp"
#include "ina/matrix_format.hpp"
#include "ina/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

namespace ina {

namespace {

constexpr std::array<std::string_view, 6> kModelNames = {"answer_pos",   "mlsu",           "next_token",
                                                         "prev_token",   "word_form_next", "word_form_prev"};

std::vector<LabeledFeatures> labeled(std::span<const TrainingRow> rows) {
    std::vector<LabeledFeatures> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r.features, r.label});
    return out;
}

struct HoldoutScore {
    std::size_t rows = 0;
    std::size_t answered = 0;
    std::size_t correct = 0;
};

HoldoutScore score_rows(const InformationMatrix& m, std::span<const TrainingRow> rows) {
    HoldoutScore s;
    s.rows = rows.size();
    for (const auto& row : rows) {
        const auto act = activate(row.features, m);
        if (act.active_count() == 0) continue;
        std::optional<std::span<const std::string>> mask;
        if (!row.candidates.empty()) mask = std::span<const std::string>(row.candidates);
        try {
            const auto result = classify(m, act, mask);
            ++s.answered;
            if (result.winner().id == row.label) ++s.correct;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyMask) throw;
        }
    }
    return s;
}

// Held-out estimate: a seeded shuffle splits off floor(holdout * n) rows, a
// matrix is trained on the rest and scored on them.
void fill_holdout_stats(ModelStats& stats, std::span<const TrainingRow> rows, const BundleConfig& config) {
    const auto n_test = static_cast<std::size_t>(std::floor(config.holdout * static_cast<double>(rows.size())));
    stats.holdout_rows = n_test;
    if (n_test == 0 || n_test >= rows.size()) return;

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(config.seed * 1000003ULL + static_cast<std::uint64_t>(stats.model));
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<TrainingRow> test, fit;
    for (std::size_t k = 0; k < order.size(); ++k) (k < n_test ? test : fit).push_back(rows[order[k]]);

    InformationMatrix m;
    try {
        m = train_matrix(labeled(fit), config.weights);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateSystem) throw;
        return;
    }
    const auto s = score_rows(m, test);
    const double p = s.answered ? static_cast<double>(s.correct) / static_cast<double>(s.answered) : 0.0;
    const double r = static_cast<double>(s.correct) / static_cast<double>(s.rows);
    stats.precision = p;
    stats.recall = r;
    stats.f1 = f1_score(p, r);
}

std::string predicted_token(const InformationMatrix& m, const UpstreamLink& link) {
    const auto act = activate(link.query, m);
    if (act.active_count() == 0) return {};
    std::optional<std::span<const std::string>> mask;
    if (!link.candidates.empty()) mask = std::span<const std::string>(link.candidates);
    try {
        return classify(m, act, mask).winner().id;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyMask) return {};
        throw;
    }
}

void replace_gold(std::vector<std::string>& features, const std::vector<std::string>& gold,
                  const std::vector<std::string>& predicted) {
    auto it = std::find(features.begin(), features.end(), gold.empty() ? std::string() : gold.front());
    std::size_t at = it == features.end() ? features.size() : static_cast<std::size_t>(it - features.begin());
    std::erase_if(features, [&](const std::string& f) { return std::find(gold.begin(), gold.end(), f) != gold.end(); });
    at = std::min(at, features.size());
    features.insert(features.begin() + static_cast<std::ptrdiff_t>(at), predicted.begin(), predicted.end());
}

ModelStats base_stats(ModelId id, const InformationMatrix& m, std::size_t rows) {
    ModelStats s;
    s.model = id;
    s.classes = m.classes().size();
    s.features = m.features().size();
    s.connections = m.connection_count();
    s.rows = rows;
    s.size_bytes = m.empty() ? 0 : matrix_to_string(m).size();
    return s;
}

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::string human_size(std::size_t bytes) {
    if (bytes < 1024) return std::to_string(bytes) + " B";
    if (bytes < 1024 * 1024) return fixed(static_cast<double>(bytes) / 1024.0, 1) + " KB";
    return fixed(static_cast<double>(bytes) / (1024.0 * 1024.0), 1) + " MB";
}

}  // namespace

std::string_view model_name(ModelId id) { return kModelNames.at(model_index(id)); }

std::optional<ModelId> parse_model_name(std::string_view name) {
    for (auto id : kAllModels)
        if (model_name(id) == name) return id;
    return std::nullopt;
}

std::string_view mode_name(TrainingMode mode) { return mode == TrainingMode::Parallel ? "parallel" : "consecutive"; }

std::optional<TrainingMode> parse_mode(std::string_view name) {
    if (name == "parallel") return TrainingMode::Parallel;
    if (name == "consecutive") return TrainingMode::Consecutive;
    return std::nullopt;
}

std::string_view direction_name(Direction d) { return d == Direction::Right ? "right" : "left"; }

std::string mlsu_class_id(MlsuId id) { return std::to_string(id); }

ModelBundle::ModelBundle(ModelSet models, MlsuRegistry registry, Lexicon lexicon, BundleConfig config,
                         BundleMetadata metadata)
    : models_(std::move(models)),
      registry_(std::move(registry)),
      lexicon_(std::move(lexicon)),
      config_(std::move(config)),
      metadata_(std::move(metadata)) {
    for (const auto& cls : model(ModelId::Mlsu).classes().names()) {
        MlsuId id = 0;
        const auto [ptr, ec] = std::from_chars(cls.data(), cls.data() + cls.size(), id);
        if (ec != std::errc() || ptr != cls.data() + cls.size() || !registry_.find(id))
            throw Error(ErrorCode::UnknownMlsuId, "MLSU model class " + cls + " is not in the registry");
    }
    for (auto id : {ModelId::WordFormNext, ModelId::WordFormPrev}) {
        auto& index = forms_[id == ModelId::WordFormNext ? 0 : 1];
        for (const auto& form : model(id).classes().names()) index[lexicon_.tag(form).lemma].push_back(form);
    }
}

std::span<const std::string> ModelBundle::forms_of(ModelId word_form_model, const std::string& lemma) const {
    const auto& index = forms_[word_form_model == ModelId::WordFormNext ? 0 : 1];
    const auto it = index.find(lemma);
    if (it == index.end()) return {};
    return it->second;
}

std::vector<TrainingRow> substitute_upstream(std::span<const TrainingRow> rows, const ModelSet& upstream,
                                             ModelId target) {
    std::vector<TrainingRow> out;
    for (const auto& row : rows) {
        if (row.model != target) continue;
        if (!row.upstream) {
            out.push_back(row);
            continue;
        }
        const auto& link = *row.upstream;
        const auto& source = upstream[model_index(link.source)];
        auto copy = row;

        if (link.source == ModelId::AnswerPos) {
            std::vector<std::string> replacement;
            if (source.empty()) {
                replacement.push_back(pos_feature(PosTag::Any));
            } else {
                const auto winner = predicted_token(source, link);
                if (!winner.empty()) {
                    const auto tag = parse_pos(winner);
                    replacement.push_back(pos_feature(tag.value_or(PosTag::Any)));
                }
            }
            replace_gold(copy.features, link.gold_features, replacement);
            if (copy.features.empty()) continue;
        } else {
            const auto token = predicted_token(source, link);
            if (token.empty() || token == kStartToken || token == kEndToken) continue;
            const auto pos_it = link.token_pos.find(token);
            const PosTag pos = pos_it == link.token_pos.end() ? PosTag::Other : pos_it->second;
            replace_gold(copy.features, link.gold_features, {"t=" + token, "p=" + std::string(pos_name(pos))});
        }
        out.push_back(std::move(copy));
    }
    return out;
}

TrainResult train(std::span<const TrainingRow> rows, const MlsuRegistry& registry, const Lexicon& lexicon,
                  const BundleConfig& config, BundleMetadata metadata) {
    config.weights.validate();
    if (!(config.holdout >= 0.0 && config.holdout < 1.0))
        throw Error(ErrorCode::ParseError, "holdout fraction must lie in [0, 1)");
    const auto start = std::chrono::steady_clock::now();

    ModelSet models;
    TrainReport report;
    report.mode = config.mode;

    for (auto id : kAllModels) {
        std::vector<TrainingRow> model_rows;
        if (config.mode == TrainingMode::Consecutive) {
            model_rows = substitute_upstream(rows, models, id);
        } else {
            for (const auto& r : rows)
                if (r.model == id) model_rows.push_back(r);
        }

        auto& matrix = models[model_index(id)];
        if (model_rows.empty()) {
            if (id != ModelId::AnswerPos)
                throw Error(ErrorCode::EmptyModel, "model " + std::string(model_name(id)) + " has no training rows");
            log::warn("answer_pos model has no training rows; answers fall back to ANY");
        } else {
            try {
                matrix = train_matrix(labeled(model_rows), config.weights);
            } catch (const Error& e) {
                if (id != ModelId::AnswerPos || e.code() != ErrorCode::DegenerateSystem) throw;
                log::warn(std::string("answer_pos model left untrained: ") + e.what());
            }
        }

        auto stats = base_stats(id, matrix, model_rows.size());
        if (!matrix.empty()) fill_holdout_stats(stats, model_rows, config);
        report.models.push_back(stats);
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    metadata.model_stats = report.models;
    ModelBundle bundle(std::move(models), registry, lexicon, config, std::move(metadata));
    return {std::move(bundle), std::move(report)};
}

TrainResult train_from_corpus(std::string_view corpus, std::span<const QaPair> qa_pairs, const Lexicon& lexicon,
                              const BundleConfig& config) {
    auto registry = build_registry(corpus, lexicon);
    if (registry.empty()) throw Error(ErrorCode::EmptyTrainingSet, "corpus yields no MLSU");
    const auto rows = build_training_rows(registry, qa_pairs, lexicon);
    BundleMetadata metadata;
    metadata.created_at = utc_timestamp();
    metadata.corpus_hash = sha256_hex(corpus);
    return train(rows, registry, lexicon, config, std::move(metadata));
}

std::string format_train_report(const TrainReport& report) {
    std::ostringstream os;
    os << "Model parameters (" << mode_name(report.mode) << " training, " << fixed(report.wall_seconds, 3)
       << " s)\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %10s %8s %9s %14s %8s %8s %8s %6s\n", "model", "size", "classes",
                  "features", "connections", "F1", "P", "R", "test");
    os << line;
    for (const auto& m : report.models) {
        auto opt = [](const std::optional<double>& v) { return v ? fixed(*v, 5) : std::string("-"); };
        std::snprintf(line, sizeof line, "%-16s %10s %8zu %9zu %14llu %8s %8s %8s %6zu\n",
                      std::string(model_name(m.model)).c_str(), human_size(m.size_bytes).c_str(), m.classes,
                      m.features, static_cast<unsigned long long>(m.connections), opt(m.f1).c_str(),
                      opt(m.precision).c_str(), opt(m.recall).c_str(), m.holdout_rows);
        os << line;
    }
    return os.str();
}

PosPrediction predict_answer_pos(const ModelBundle& bundle, const QuestionSplit& split) {
    PosPrediction out;
    out.features = answer_pos_features(split);
    const auto& m = bundle.model(ModelId::AnswerPos);
    if (m.empty()) return out;

    out.model_trained = true;
    const auto act = activate(out.features, m);
    if (act.active_count() == 0) throw Error(ErrorCode::NoEvidence, "no question feature is known to the POS model");
    const auto result = classify(m, act);
    out.ranking = result.ranked;
    out.tag = parse_pos(result.winner().id).value_or(PosTag::Any);
    out.confidence = result.winner().confidence;
    return out;
}

MlsuPrediction resolve_mlsu(const ModelBundle& bundle, const QuestionSplit& split, PosTag required_pos) {
    MlsuPrediction out;
    out.features = content_lemmas(split.informative);
    out.features.push_back(pos_feature(required_pos));
    const auto& m = bundle.model(ModelId::Mlsu);
    const auto act = activate(out.features, m);
    const bool has_lemma = std::any_of(act.active.begin(), act.active.end(), [&](std::size_t i) {
        return !m.features().name(i).starts_with("pos=");
    });
    if (!has_lemma) throw Error(ErrorCode::NoEvidence, "no informative word is known to the MLSU model");

    const auto result = classify(m, act);
    out.ranking = result.ranked;
    out.id = std::stoull(result.winner().id);
    out.score = result.winner().score;
    out.confidence = result.winner().confidence;
    bundle.registry().at(out.id);
    return out;
}

const std::string& mlsu_verb(const ModelBundle& bundle, MlsuId id) { return bundle.registry().at(id).verb(); }

const std::vector<std::string>& mlsu_tokens(const ModelBundle& bundle, MlsuId id) {
    return bundle.registry().at(id).context_tokens;
}

namespace {

TokenPrediction predict_token(const InformationMatrix& m, std::span<const ContextItem> context,
                              std::span<const std::string> remaining, const std::string& sentinel,
                              const std::string& other_sentinel) {
    TokenPrediction out;
    const std::size_t first = context.size() > 2 ? context.size() - 2 : 0;
    for (std::size_t k = first; k < context.size(); ++k) {
        const auto& item = context[k];
        if (item.lemma == kStartToken || item.lemma == kEndToken) continue;
        out.features.push_back(token_feature(item.lemma, item.pos));
    }

    std::vector<std::string> mask;
    for (const auto& t : remaining)
        if (t != other_sentinel && t != sentinel) mask.push_back(t);
    mask.push_back(sentinel);

    const auto act = activate(out.features, m);
    if (act.active_count() == 0) throw Error(ErrorCode::NoEvidence, "no context feature is known to the token model");
    try {
        const auto result = classify(m, act, std::span<const std::string>(mask));
        out.token = result.winner().id;
        out.score = result.winner().score;
        out.confidence = result.winner().confidence;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyMask) throw;
        out.token = sentinel;
    }
    return out;
}

}  // namespace

TokenPrediction next_token(const ModelBundle& bundle, std::span<const ContextItem> context,
                           std::span<const std::string> remaining) {
    return predict_token(bundle.model(ModelId::NextToken), context, remaining, kEndToken, kStartToken);
}

TokenPrediction prev_token(const ModelBundle& bundle, std::span<const ContextItem> context,
                           std::span<const std::string> remaining) {
    return predict_token(bundle.model(ModelId::PrevToken), context, remaining, kStartToken, kEndToken);
}

WordPrediction token_to_word(const ModelBundle& bundle, std::span<const std::string> adjacent,
                             const std::string& token, PosTag token_pos, const std::string& verb,
                             Direction direction) {
    const auto id = direction == Direction::Right ? ModelId::WordFormNext : ModelId::WordFormPrev;
    const auto forms = bundle.forms_of(id, token);
    WordPrediction fallback{token, 0.0, 0.0, true};
    if (forms.empty()) return fallback;

    const auto& m = bundle.model(id);
    const auto act = activate(word_form_features(adjacent, token, token_pos, verb), m);
    if (act.active_count() == 0) return fallback;
    const auto result = classify(m, act, forms);
    return {result.winner().id, result.winner().score, result.winner().confidence, false};
}

}  // namespace ina
