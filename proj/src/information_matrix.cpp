#include "ina/information_matrix.hpp"

#include "ina/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ina {

namespace {

void check_identifier(const std::string& id, const char* what) {
    if (id.empty()) throw Error(ErrorCode::InvalidIdentifier, std::string("empty ") + what);
    if (id.find_first_of("\t\n\r") != std::string::npos)
        throw Error(ErrorCode::InvalidIdentifier, std::string(what) + " contains a tab or newline: " + id);
}

}  // namespace

std::size_t Vocabulary::add(const std::string& name) {
    auto [it, inserted] = index_.try_emplace(name, names_.size());
    if (inserted) names_.push_back(name);
    return it->second;
}

std::optional<std::size_t> Vocabulary::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t CountTable::co_count(std::size_t feature, std::size_t cls) const {
    const auto& row = co_counts.at(feature);
    auto it = row.find(cls);
    return it == row.end() ? 0 : it->second;
}

CountTable accumulate_counts(std::span<const LabeledFeatures> rows) {
    if (rows.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");

    CountTable table;
    std::set<std::size_t> seen;
    for (const auto& row : rows) {
        check_identifier(row.label, "class label");
        const std::size_t cls = table.classes.add(row.label);
        if (cls == table.class_totals.size()) table.class_totals.push_back(0);
        ++table.class_totals[cls];
        ++table.grand_total;

        seen.clear();
        for (const auto& feature : row.features) {
            check_identifier(feature, "feature");
            const std::size_t f = table.features.add(feature);
            if (f == table.co_counts.size()) {
                table.co_counts.emplace_back();
                table.feature_totals.push_back(0);
            }
            if (!seen.insert(f).second) continue;
            ++table.co_counts[f][cls];
            ++table.feature_totals[f];
        }
    }
    return table;
}

double emergence_coefficient(std::size_t feature_count, std::size_t class_count) {
    if (class_count < 2)
        throw Error(ErrorCode::DegenerateSystem,
                    "emergence coefficient needs at least 2 classes, got " + std::to_string(class_count));
    if (feature_count < 1) throw Error(ErrorCode::DegenerateSystem, "emergence coefficient needs at least 1 feature");

    double numerator = 0.0;
    if (feature_count > 30) {
        // log2(2^W - 1) = W + log2(1 - 2^-W); the correction is below 2^-30.
        numerator = static_cast<double>(feature_count);
    } else {
        const auto combos = (std::uint64_t{1} << feature_count) - 1;
        numerator = std::log2(static_cast<double>(combos));
    }
    return numerator / std::log2(static_cast<double>(class_count));
}

void WeightConfig::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw Error(ErrorCode::ParseError, "smoothing alpha must be finite and >= 0");
    if (!std::isfinite(bias_default)) throw Error(ErrorCode::ParseError, "bias_default must be finite");
    for (const auto& [cls, b] : class_bias)
        if (!std::isfinite(b)) throw Error(ErrorCode::ParseError, "bias for class " + cls + " must be finite");
}

double WeightConfig::activation_bias(const std::string& cls) const {
    auto it = class_bias.find(cls);
    return it == class_bias.end() ? 0.0 : it->second;
}

InformationMatrix InformationMatrix::from_cells(std::vector<std::string> classes,
                                                std::vector<std::string> features,
                                                std::span<const MatrixCell> cells,
                                                std::vector<double> bias,
                                                std::vector<std::uint64_t> class_counts) {
    InformationMatrix m;
    for (const auto& c : classes) {
        check_identifier(c, "class");
        if (m.classes_.contains(c)) throw Error(ErrorCode::InvalidIdentifier, "duplicate class " + c);
        m.classes_.add(c);
    }
    for (const auto& f : features) {
        check_identifier(f, "feature");
        if (m.features_.contains(f)) throw Error(ErrorCode::InvalidIdentifier, "duplicate feature " + f);
        m.features_.add(f);
    }

    const std::size_t w = m.classes_.size();
    if (bias.empty()) bias.assign(w, 0.0);
    if (class_counts.empty()) class_counts.assign(w, 0);
    if (bias.size() != w || class_counts.size() != w)
        throw Error(ErrorCode::ParseError, "bias/class count vectors must match the class vocabulary");
    m.bias_ = std::move(bias);
    m.class_counts_ = std::move(class_counts);

    m.rows_.assign(m.features_.size(), {});
    for (const auto& cell : cells) {
        if (cell.feature >= m.features_.size() || cell.cls >= w)
            throw Error(ErrorCode::ParseError, "matrix cell index out of range");
        if (!std::isfinite(cell.weight)) throw Error(ErrorCode::ParseError, "non-finite matrix weight");
        if (cell.weight == 0.0) continue;
        m.rows_[cell.feature].push_back({cell.cls, cell.weight});
    }
    for (auto& row : m.rows_) {
        std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.cls < b.cls; });
        auto dup = std::adjacent_find(row.begin(), row.end(),
                                      [](const Entry& a, const Entry& b) { return a.cls == b.cls; });
        if (dup != row.end()) throw Error(ErrorCode::ParseError, "duplicate matrix cell");
    }
    m.finish();
    return m;
}

void InformationMatrix::finish() {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : rows_)
        for (const auto& e : row)
            if (e.weight > 0.0) {
                sum += e.weight;
                ++n;
            }
    mean_positive_ = n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double InformationMatrix::weight(std::size_t feature, std::size_t cls) const {
    const auto& row = rows_.at(feature);
    auto it = std::lower_bound(row.begin(), row.end(), cls,
                               [](const Entry& e, std::size_t c) { return e.cls < c; });
    return (it != row.end() && it->cls == cls) ? it->weight : 0.0;
}

std::uint64_t InformationMatrix::connection_count() const {
    return ina::connection_count(classes_.size(), features_.size());
}

std::size_t InformationMatrix::stored_cells() const {
    return std::accumulate(rows_.begin(), rows_.end(), std::size_t{0},
                           [](std::size_t acc, const auto& row) { return acc + row.size(); });
}

std::vector<MatrixCell> InformationMatrix::cells() const {
    std::vector<MatrixCell> out;
    out.reserve(stored_cells());
    for (std::size_t f = 0; f < rows_.size(); ++f)
        for (const auto& e : rows_[f]) out.push_back({f, e.cls, e.weight});
    return out;
}

bool operator==(const InformationMatrix& a, const InformationMatrix& b) {
    if (a.classes_.names() != b.classes_.names() || a.features_.names() != b.features_.names()) return false;
    if (a.bias_ != b.bias_ || a.class_counts_ != b.class_counts_) return false;
    for (std::size_t f = 0; f < a.rows_.size(); ++f) {
        const auto& ra = a.rows_[f];
        const auto& rb = b.rows_[f];
        if (ra.size() != rb.size()) return false;
        for (std::size_t k = 0; k < ra.size(); ++k)
            if (ra[k].cls != rb[k].cls || ra[k].weight != rb[k].weight) return false;
    }
    return true;
}

std::uint64_t connection_count(std::uint64_t classes, std::uint64_t features) { return classes * features; }

InformationMatrix compute_weights(const CountTable& counts, const WeightConfig& config) {
    config.validate();
    if (counts.grand_total == 0) throw Error(ErrorCode::EmptyTrainingSet, "count table is empty");

    const std::size_t n_classes = counts.classes.size();
    const std::size_t n_features = counts.features.size();
    const double psi = config.emergence_enabled ? emergence_coefficient(n_features, n_classes) : 1.0;
    const double alpha = config.alpha;
    const double total = static_cast<double>(counts.grand_total);

    std::vector<double> activation_bias(n_classes);
    std::vector<double> offset(n_classes);
    std::vector<double> prior(n_classes);
    for (std::size_t j = 0; j < n_classes; ++j) {
        activation_bias[j] = config.activation_bias(counts.classes.name(j));
        offset[j] = config.bias_default - activation_bias[j];
        prior[j] = static_cast<double>(counts.class_totals[j]) / total;
    }

    auto information = [&](std::size_t j, double co, double feature_total) {
        const double p_ij = (co + alpha) / (feature_total + alpha * static_cast<double>(n_classes));
        return psi * std::log2(p_ij / prior[j]) + offset[j];
    };

    std::vector<MatrixCell> cells;
    for (std::size_t i = 0; i < n_features; ++i) {
        const double f_total = static_cast<double>(counts.feature_totals[i]);
        if (alpha > 0.0) {
            for (std::size_t j = 0; j < n_classes; ++j)
                cells.push_back({i, j, information(j, static_cast<double>(counts.co_count(i, j)), f_total)});
        } else {
            for (const auto& [j, c] : counts.co_counts[i])
                cells.push_back({i, j, information(j, static_cast<double>(c), f_total)});
        }
    }

    return InformationMatrix::from_cells(counts.classes.names(), counts.features.names(), cells,
                                         std::move(activation_bias), counts.class_totals);
}

InformationMatrix train_matrix(std::span<const LabeledFeatures> rows, const WeightConfig& config) {
    return compute_weights(accumulate_counts(rows), config);
}

ActivationVector activate(std::span<const std::string> input, const InformationMatrix& matrix) {
    ActivationVector out;
    std::set<std::string> unknown_seen;
    for (const auto& id : input) {
        if (auto idx = matrix.features().find(id)) {
            out.active.push_back(*idx);
        } else if (unknown_seen.insert(id).second) {
            out.unknown.push_back(id);
        }
    }
    std::sort(out.active.begin(), out.active.end());
    out.active.erase(std::unique(out.active.begin(), out.active.end()), out.active.end());
    return out;
}

Classification classify(const InformationMatrix& matrix, const ActivationVector& activation,
                        std::optional<std::span<const std::string>> mask) {
    const std::size_t n_classes = matrix.classes().size();

    std::vector<std::size_t> candidates;
    if (mask) {
        for (const auto& name : *mask)
            if (auto idx = matrix.classes().find(name)) candidates.push_back(*idx);
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    } else {
        candidates.resize(n_classes);
        std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    }
    if (candidates.empty()) throw Error(ErrorCode::EmptyMask, "no candidate class is known to the matrix");

    std::vector<double> scores(n_classes);
    for (std::size_t j = 0; j < n_classes; ++j) scores[j] = matrix.bias(j);
    for (std::size_t f : activation.active)
        for (const auto& e : matrix.row(f)) scores[e.cls] += e.weight;

    Classification out;
    out.ranked.reserve(candidates.size());
    for (std::size_t j : candidates)
        out.ranked.push_back({matrix.classes().name(j), j, scores[j], confidence(matrix, activation, scores[j])});
    std::stable_sort(out.ranked.begin(), out.ranked.end(),
                     [](const ScoredClass& a, const ScoredClass& b) { return a.score > b.score; });
    return out;
}

double confidence(const InformationMatrix& matrix, const ActivationVector& activation, double score) {
    const auto n = activation.active_count();
    const double mean = matrix.mean_positive_weight();
    if (n == 0 || mean <= 0.0) return 0.0;
    return std::clamp(score / (static_cast<double>(n) * mean), 0.0, 1.0);
}

}  // namespace ina
