#pragma once
// Information-matrix learner and classifier.
//
// A matrix holds one weight per (feature, class) pair: the amount of
// information a present feature contributes toward a class, in bits.
// Training tallies (feature-set, label) rows into a CountTable and converts it
// with compute_weights(); prediction activates the known input features and
// picks the class with the largest summed weight.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ina {

/// Insertion-ordered, deduplicated string vocabulary.
class Vocabulary {
public:
    std::size_t add(const std::string& name);
    std::optional<std::size_t> find(const std::string& name) const;
    bool contains(const std::string& name) const { return index_.count(name) != 0; }

    const std::string& name(std::size_t index) const { return names_.at(index); }
    const std::vector<std::string>& names() const { return names_; }
    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct LabeledFeatures {
    std::vector<std::string> features;
    std::string label;
};

/// Raw co-occurrence tallies. Each row is treated as a set of features, so a
/// feature repeated inside one row is counted once.
struct CountTable {
    Vocabulary features;
    Vocabulary classes;
    /// Per feature: class index -> number of rows containing the feature with that label.
    std::vector<std::map<std::size_t, std::uint64_t>> co_counts;
    std::vector<std::uint64_t> feature_totals;
    /// N_j: rows labeled with class j.
    std::vector<std::uint64_t> class_totals;
    /// N: total rows.
    std::uint64_t grand_total = 0;

    std::uint64_t co_count(std::size_t feature, std::size_t cls) const;
};

CountTable accumulate_counts(std::span<const LabeledFeatures> rows);

/// log2(2^W - 1) / log2(N). W is the number of features, N the number of
/// classes. For W > 30 the numerator is taken as W.
double emergence_coefficient(std::size_t feature_count, std::size_t class_count);

struct WeightConfig {
    bool emergence_enabled = true;
    /// I_0. Every observed cell of class j receives the offset I_0 - bias_j.
    double bias_default = 0.0;
    /// Per-class activation bias (bias_j); classes not listed use 0.
    std::map<std::string, double> class_bias;
    /// Additive smoothing. With alpha = 0 unseen (feature, class) pairs weigh 0.
    double alpha = 0.0;
    /// Reserved for fuzzy activation; presence semantics ignore it.
    double activation_epsilon = 0.0;
    static constexpr int log_base = 2;

    void validate() const;
    double activation_bias(const std::string& cls) const;

    friend bool operator==(const WeightConfig&, const WeightConfig&) = default;
};

struct MatrixCell {
    std::size_t feature;
    std::size_t cls;
    double weight;
};

/// Feature x class weight table. Immutable once built; safe to share between
/// threads.
class InformationMatrix {
public:
    struct Entry {
        std::size_t cls;
        double weight;
    };

    InformationMatrix() = default;

    /// Builds a matrix from explicit cells. Zero weights are dropped, cells
    /// must reference valid indices, and a (feature, class) pair may appear once.
    static InformationMatrix from_cells(std::vector<std::string> classes,
                                        std::vector<std::string> features,
                                        std::span<const MatrixCell> cells,
                                        std::vector<double> bias = {},
                                        std::vector<std::uint64_t> class_counts = {});

    const Vocabulary& features() const { return features_; }
    const Vocabulary& classes() const { return classes_; }

    /// Nonzero cells of one feature row, ordered by class index.
    std::span<const Entry> row(std::size_t feature) const { return rows_.at(feature); }
    double weight(std::size_t feature, std::size_t cls) const;
    double bias(std::size_t cls) const { return bias_.at(cls); }
    std::uint64_t class_count(std::size_t cls) const { return class_counts_.at(cls); }

    std::uint64_t connection_count() const;
    std::size_t stored_cells() const;
    /// Mean of the strictly positive weights; 0 when there are none.
    double mean_positive_weight() const { return mean_positive_; }
    bool empty() const { return classes_.empty(); }

    std::vector<MatrixCell> cells() const;

    friend bool operator==(const InformationMatrix& a, const InformationMatrix& b);

private:
    Vocabulary features_;
    Vocabulary classes_;
    std::vector<std::vector<Entry>> rows_;
    std::vector<double> bias_;
    std::vector<std::uint64_t> class_counts_;
    double mean_positive_ = 0.0;

    void finish();
};

std::uint64_t connection_count(std::uint64_t classes, std::uint64_t features);

InformationMatrix compute_weights(const CountTable& counts, const WeightConfig& config);

/// Convenience: accumulate_counts() followed by compute_weights().
InformationMatrix train_matrix(std::span<const LabeledFeatures> rows, const WeightConfig& config);

struct ActivationVector {
    /// Indices of the known input features, ascending, no duplicates.
    std::vector<std::size_t> active;
    /// Input identifiers missing from the vocabulary, in input order, no duplicates.
    std::vector<std::string> unknown;

    std::size_t active_count() const { return active.size(); }
};

ActivationVector activate(std::span<const std::string> input, const InformationMatrix& matrix);

struct ScoredClass {
    std::string id;
    std::size_t index = 0;
    double score = 0.0;
    double confidence = 0.0;
};

struct Classification {
    /// Candidates by descending score; ties keep the lower vocabulary index first.
    std::vector<ScoredClass> ranked;

    const ScoredClass& winner() const { return ranked.front(); }
};

/// score_j = bias_j + sum of I_ij over active features. When a mask is given
/// only masked classes are ranked; names outside the vocabulary are ignored.
Classification classify(const InformationMatrix& matrix, const ActivationVector& activation,
                        std::optional<std::span<const std::string>> mask = std::nullopt);

/// clamp(score / (n_active * mean positive weight), 0, 1); 0 without active features.
double confidence(const InformationMatrix& matrix, const ActivationVector& activation, double score);

}  // namespace ina
