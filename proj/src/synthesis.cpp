#include "ina/synthesis.hpp"

#include "ina/error.hpp"

#include <algorithm>
#include <numeric>

namespace ina {

namespace {

ContextItem item_of(const Mlsu& unit, const std::string& lemma) {
    return {lemma, unit.pos_of(lemma).value_or(PosTag::Other)};
}

std::vector<std::string> context_features(const std::vector<ContextItem>& context) {
    std::vector<std::string> out;
    const std::size_t first = context.size() > 2 ? context.size() - 2 : 0;
    for (std::size_t k = first; k < context.size(); ++k) out.push_back(token_feature(context[k].lemma, context[k].pos));
    return out;
}

void close_direction(SynthesisState& state) {
    if (state.direction == Direction::Left) {
        state.finished = true;
        return;
    }
    const Mlsu& unit = *state.unit;
    const ContextItem anchor{unit.anchor_token().lemma, unit.anchor_token().pos};
    state.direction = Direction::Left;
    state.step_count = 0;
    state.context = {anchor};
    state.adjacent = {unit.verb()};
    const auto first_right = std::find_if(state.steps.begin(), state.steps.end(), [](const SynthesisStep& s) {
        return s.direction == Direction::Right && !s.word.empty();
    });
    if (first_right != state.steps.end()) {
        state.context.insert(state.context.begin(), item_of(unit, first_right->token));
        state.adjacent.push_back(first_right->word);
    }
}

RejectReason reason_for(const Error& e) {
    if (e.code() == ErrorCode::NoEvidence || e.code() == ErrorCode::EmptyMask) return RejectReason::NoEvidence;
    throw;
}

nlohmann::ordered_json ranking_json(const std::vector<ScoredClass>& ranking, std::size_t limit) {
    auto out = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < ranking.size() && k < limit; ++k)
        out.push_back({{"id", ranking[k].id}, {"score", ranking[k].score}, {"confidence", ranking[k].confidence}});
    return out;
}

}  // namespace

RejectConfig reject_config_for(const ModelBundle& bundle) { return {bundle.config().reject_threshold}; }

std::string_view reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::None: return "None";
        case RejectReason::NoEvidence: return "NoEvidence";
        case RejectReason::LowConfidence: return "LowConfidence";
    }
    return "None";
}

SynthesisState start_state(const Mlsu& unit, std::size_t max_steps) {
    SynthesisState state;
    state.unit = &unit;
    state.max_steps = max_steps;
    state.context = {{unit.anchor_token().lemma, unit.anchor_token().pos}};
    state.adjacent = {unit.verb()};
    for (const auto& t : unit.context_tokens)
        if (t != kStartToken && t != kEndToken) state.remaining.push_back(t);
    return state;
}

SynthesisState expand(SynthesisState state, const ModelBundle& bundle) {
    if (state.finished) return state;
    if (!state.unit) throw Error(ErrorCode::InvalidIdentifier, "synthesis state has no MLSU");
    if (state.step_count >= state.max_steps) {
        state.truncated = true;
        close_direction(state);
        return state;
    }

    const Mlsu& unit = *state.unit;
    const bool right = state.direction == Direction::Right;
    const std::string& sentinel = right ? kEndToken : kStartToken;

    SynthesisStep step;
    step.direction = state.direction;
    step.context = context_features(state.context);
    try {
        const auto pred = right ? next_token(bundle, state.context, state.remaining)
                                : prev_token(bundle, state.context, state.remaining);
        step.token = pred.token;
        step.score = pred.score;
        step.confidence = pred.confidence;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoEvidence) throw;
        step.token = sentinel;
        step.forced = true;
    }
    ++state.step_count;

    if (step.token == sentinel) {
        if (step.forced) state.early_stop = true;
        state.steps.push_back(std::move(step));
        close_direction(state);
        return state;
    }

    const auto item = item_of(unit, step.token);
    const auto word = token_to_word(bundle, state.adjacent, step.token, item.pos, unit.verb(), state.direction);
    step.word = word.word;
    step.word_confidence = word.confidence;
    step.word_fallback = word.fallback;

    std::erase(state.remaining, step.token);
    state.context.push_back(item);
    state.adjacent.insert(state.adjacent.begin(), step.word);
    if (state.adjacent.size() > 2) state.adjacent.resize(2);
    (right ? state.words_right : state.words_left).push_back(step.word);
    state.steps.push_back(std::move(step));
    return state;
}

SynthesisState run_synthesis(const ModelBundle& bundle, const Mlsu& unit, std::size_t max_steps) {
    auto state = start_state(unit, max_steps);
    while (!state.finished) state = expand(std::move(state), bundle);
    return state;
}

std::string assemble_answer(const SynthesisState& state) {
    std::vector<std::string> words(state.words_left.rbegin(), state.words_left.rend());
    if (state.unit) words.push_back(state.unit->verb());
    words.insert(words.end(), state.words_right.begin(), state.words_right.end());
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

AnswerTrace synthesize(const ModelBundle& bundle, std::string_view question) {
    return synthesize(bundle, question, reject_config_for(bundle));
}

AnswerTrace synthesize(const ModelBundle& bundle, std::string_view question, const RejectConfig& reject) {
    AnswerTrace trace;
    trace.threshold = reject.mlsu_min;
    trace.split = split_question(question, bundle.lexicon());

    auto reject_with = [&](RejectReason reason, std::string detail) {
        trace.rejected = true;
        trace.reason = reason;
        trace.reason_detail = std::move(detail);
        trace.overall_confidence = 0.0;
        return trace;
    };

    try {
        trace.pos = predict_answer_pos(bundle, trace.split);
    } catch (const Error& e) {
        return reject_with(reason_for(e), e.what());
    }
    trace.answer_spec.role = role_for_pos(trace.pos.tag);
    trace.answer_spec.required_pos = role_to_pos(trace.answer_spec.role);

    try {
        trace.mlsu = resolve_mlsu(bundle, trace.split, trace.pos.tag);
    } catch (const Error& e) {
        return reject_with(reason_for(e), e.what());
    }
    if (trace.mlsu->confidence < reject.mlsu_min)
        return reject_with(RejectReason::LowConfidence,
                           "MLSU confidence " + std::to_string(trace.mlsu->confidence) + " is below " +
                               std::to_string(reject.mlsu_min));

    const Mlsu& unit = bundle.registry().at(trace.mlsu->id);
    trace.verb = unit.verb();
    trace.tokens = unit.context_tokens;

    const auto state = run_synthesis(bundle, unit, bundle.config().max_steps);
    trace.steps = state.steps;
    trace.truncated = state.truncated;
    trace.early_stop = state.early_stop;
    trace.final_answer = assemble_answer(state);

    double overall = trace.mlsu->confidence;
    if (trace.pos.model_trained) overall = std::min(overall, trace.pos.confidence);
    if (!trace.steps.empty()) {
        const double sum = std::accumulate(trace.steps.begin(), trace.steps.end(), 0.0,
                                           [](double acc, const SynthesisStep& s) { return acc + s.confidence; });
        overall = std::min(overall, sum / static_cast<double>(trace.steps.size()));
    }
    trace.overall_confidence = std::clamp(overall, 0.0, 1.0);
    return trace;
}

nlohmann::ordered_json trace_to_json(const AnswerTrace& trace, std::size_t ranking_limit) {
    using json = nlohmann::ordered_json;
    json informative = json::array();
    for (const auto& t : trace.split.informative)
        informative.push_back({{"surface", t.surface}, {"lemma", t.lemma}, {"pos", pos_code(t.pos)}});

    json required = json::array();
    for (auto tag : trace.answer_spec.required_pos) required.push_back(pos_code(tag));

    json mlsu = nullptr;
    if (trace.mlsu)
        mlsu = {{"id", trace.mlsu->id},
                {"score", trace.mlsu->score},
                {"confidence", trace.mlsu->confidence},
                {"features", trace.mlsu->features},
                {"ranking", ranking_json(trace.mlsu->ranking, ranking_limit)}};

    json steps = json::array();
    for (const auto& s : trace.steps)
        steps.push_back({{"direction", direction_name(s.direction)},
                         {"context", s.context},
                         {"token", s.token},
                         {"word", s.word},
                         {"score", s.score},
                         {"confidence", s.confidence},
                         {"word_confidence", s.word_confidence},
                         {"word_fallback", s.word_fallback},
                         {"forced", s.forced}});

    json out;
    out["question"] = trace.split.raw;
    out["interrogative"] = trace.split.interrogative;
    out["informative"] = std::move(informative);
    out["answer_spec"] = {{"role", role_code(trace.answer_spec.role)}, {"required_pos", std::move(required)}};
    out["pos"] = {{"tag", pos_code(trace.pos.tag)},
                  {"confidence", trace.pos.confidence},
                  {"model_trained", trace.pos.model_trained},
                  {"features", trace.pos.features},
                  {"ranking", ranking_json(trace.pos.ranking, ranking_limit)}};
    out["mlsu"] = std::move(mlsu);
    out["verb"] = trace.verb;
    out["tokens"] = trace.tokens;
    out["steps"] = std::move(steps);
    out["answer"] = trace.final_answer;
    out["confidence"] = trace.overall_confidence;
    out["rejected"] = trace.rejected;
    out["reason"] = trace.rejected ? json(reject_reason_name(trace.reason)) : json(nullptr);
    out["reason_detail"] = trace.reason_detail;
    out["threshold"] = trace.threshold;
    out["truncated"] = trace.truncated;
    out["early_stop"] = trace.early_stop;
    return out;
}

std::string trace_to_string(const AnswerTrace& trace) { return trace_to_json(trace).dump(2); }

}  // namespace ina
