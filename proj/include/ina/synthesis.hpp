#pragma once
// Answer construction: POS decision, MLSU resolution, then a rightward walk
// from the anchor to END and a leftward walk to START. Every walk step picks a
// token among the MLSU tokens not yet used and realises it as a surface word.

#include "ina/pipeline.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace ina {

struct RejectConfig {
    /// Answers whose MLSU confidence is below this are rejected.
    double mlsu_min = 0.1;
};

RejectConfig reject_config_for(const ModelBundle& bundle);

enum class RejectReason { None, NoEvidence, LowConfidence };
std::string_view reject_reason_name(RejectReason reason);

struct SynthesisStep {
    Direction direction = Direction::Right;
    /// Token-model features used for the choice.
    std::vector<std::string> context;
    std::string token;
    /// Realised surface form; empty for START/END.
    std::string word;
    double score = 0.0;
    double confidence = 0.0;
    double word_confidence = 0.0;
    bool word_fallback = false;
    /// The token model had no evidence and the walk was closed.
    bool forced = false;

    friend bool operator==(const SynthesisStep&, const SynthesisStep&) = default;
};

struct SynthesisState {
    const Mlsu* unit = nullptr;
    Direction direction = Direction::Right;
    std::vector<ContextItem> context;
    /// Surface words nearest the next position first.
    std::vector<std::string> adjacent;
    std::vector<std::string> remaining;
    std::vector<std::string> words_right;
    std::vector<std::string> words_left;
    std::vector<SynthesisStep> steps;
    /// Steps taken in the current direction.
    std::size_t step_count = 0;
    std::size_t max_steps = 32;
    bool finished = false;
    bool truncated = false;
    bool early_stop = false;
};

SynthesisState start_state(const Mlsu& unit, std::size_t max_steps);

/// One walk step. The direction flips to left once END is emitted and the
/// state finishes at START. A direction that reaches max_steps is closed and
/// the state flagged as truncated.
SynthesisState expand(SynthesisState state, const ModelBundle& bundle);

/// Runs expand() until finished.
SynthesisState run_synthesis(const ModelBundle& bundle, const Mlsu& unit, std::size_t max_steps);

/// left words reversed, anchor word, right words.
std::string assemble_answer(const SynthesisState& state);

struct AnswerTrace {
    QuestionSplit split;
    AnswerSpec answer_spec;
    PosPrediction pos;
    std::optional<MlsuPrediction> mlsu;
    std::string verb;
    std::vector<std::string> tokens;
    std::vector<SynthesisStep> steps;
    std::string final_answer;
    double overall_confidence = 0.0;
    bool rejected = false;
    RejectReason reason = RejectReason::None;
    std::string reason_detail;
    double threshold = 0.0;
    bool truncated = false;
    bool early_stop = false;
};

/// Throws Error(EmptyQuestion) for questions without words; unanswerable
/// questions come back as rejected traces without synthesis steps.
AnswerTrace synthesize(const ModelBundle& bundle, std::string_view question, const RejectConfig& reject);
AnswerTrace synthesize(const ModelBundle& bundle, std::string_view question);

/// Only the top entries of each ranking are serialized.
nlohmann::ordered_json trace_to_json(const AnswerTrace& trace, std::size_t ranking_limit = 5);
std::string trace_to_string(const AnswerTrace& trace);

}  // namespace ina
