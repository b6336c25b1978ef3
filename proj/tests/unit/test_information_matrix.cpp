#include "ina/error.hpp"
#include "ina/information_matrix.hpp"
#include "ina/matrix_format.hpp"

#include "../support.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

using namespace ina;

namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_100;

// ψ evaluated at 100 significant digits, no approximation branch.
double psi_oracle(unsigned w, unsigned n) {
    const BigFloat two = 2;
    const BigFloat numerator = boost::multiprecision::log2(boost::multiprecision::pow(two, w) - 1);
    return static_cast<double>(numerator / boost::multiprecision::log2(BigFloat(n)));
}

// log2(P(j|i) / P(j)) tallied straight from the rows, each row read as a set.
double pmi_oracle(const std::vector<LabeledFeatures>& rows, const std::string& f, const std::string& c) {
    double with_f = 0, with_f_and_c = 0, with_c = 0;
    for (const auto& r : rows) {
        const std::set<std::string> s(r.features.begin(), r.features.end());
        const bool has = s.count(f) != 0;
        with_f += has;
        with_f_and_c += has && r.label == c;
        with_c += r.label == c;
    }
    return std::log2((with_f_and_c / with_f) / (with_c / static_cast<double>(rows.size())));
}

std::vector<LabeledFeatures> random_rows(std::mt19937_64& rng, int features, int classes, int n) {
    std::vector<LabeledFeatures> rows;
    std::uniform_int_distribution<int> pick_f(0, features - 1), pick_c(0, classes - 1), width(1, 6);
    for (int k = 0; k < n; ++k) {
        LabeledFeatures r;
        for (int w = width(rng); w > 0; --w) r.features.push_back("f" + std::to_string(pick_f(rng)));
        r.label = "c" + std::to_string(pick_c(rng));
        rows.push_back(std::move(r));
    }
    return rows;
}

WeightConfig plain() {
    WeightConfig c;
    c.emergence_enabled = false;
    return c;
}

InformationMatrix question_words() { return matrix_from_string(test::read_text(test::source_dir() / "tests/data/question_words.matrix")); }

}  // namespace

TEST_SUITE("ina-core") {

TEST_CASE("accumulate_counts tallies rows") {
    std::vector<LabeledFeatures> rows = {{{"a", "b"}, "X"}, {{"a"}, "Y"}};
    const auto t = accumulate_counts(rows);
    CHECK(t.co_count(*t.features.find("a"), *t.classes.find("X")) == 1);
    CHECK(t.co_count(*t.features.find("a"), *t.classes.find("Y")) == 1);
    CHECK(t.co_count(*t.features.find("b"), *t.classes.find("X")) == 1);
    CHECK(t.co_count(*t.features.find("b"), *t.classes.find("Y")) == 0);
    CHECK(t.class_totals == std::vector<std::uint64_t>{1, 1});
    CHECK(t.grand_total == 2);
    CHECK(t.features.names() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("accumulate_counts uses set semantics per row") {
    std::vector<LabeledFeatures> rows = {{{"a", "a", "b", "a"}, "X"}, {{"b", "b"}, "X"}};
    const auto t = accumulate_counts(rows);
    // hand tally with each row read as a set
    CHECK(t.co_count(0, 0) == 1);
    CHECK(t.co_count(1, 0) == 2);
    CHECK(t.feature_totals == std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("accumulate_counts class totals") {
    std::vector<LabeledFeatures> rows;
    for (int k = 0; k < 100; ++k) rows.push_back({{"f"}, k % 2 ? "odd" : "even"});
    const auto t = accumulate_counts(rows);
    CHECK(t.class_totals[*t.classes.find("even")] == 50);
    CHECK(t.grand_total == 100);
}

TEST_CASE("accumulate_counts invariants on random tables") {
    std::mt19937_64 rng(3);
    const auto t = accumulate_counts(random_rows(rng, 12, 4, 200));
    std::uint64_t class_sum = 0;
    for (auto c : t.class_totals) class_sum += c;
    CHECK(class_sum == t.grand_total);
    for (std::size_t i = 0; i < t.features.size(); ++i) {
        std::uint64_t sum = 0;
        for (const auto& [j, c] : t.co_counts[i]) sum += c;
        CHECK(sum == t.feature_totals[i]);
    }
}

TEST_CASE("accumulate_counts rejects bad input") {
    CHECK_THROWS_AS(accumulate_counts({}), Error);
    std::vector<LabeledFeatures> empty_label = {{{"a"}, ""}};
    CHECK_THROWS_AS(accumulate_counts(empty_label), Error);
    std::vector<LabeledFeatures> tabbed = {{{"a\tb"}, "X"}};
    CHECK_THROWS_AS(accumulate_counts(tabbed), Error);
}

TEST_CASE("emergence coefficient") {
    CHECK(emergence_coefficient(1, 2) == 0.0);
    CHECK(emergence_coefficient(2, 4) == doctest::Approx(psi_oracle(2, 4)).epsilon(1e-12));
    CHECK(std::abs(emergence_coefficient(2, 4) - 0.79248) < 1e-5);
    for (unsigned w : {31u, 64u, 128u})
        for (unsigned n : {2u, 5u, 133u}) CHECK(std::abs(emergence_coefficient(w, n) - psi_oracle(w, n)) < 1e-6);
    CHECK(emergence_coefficient(64, 2) == 64.0);
    try {
        emergence_coefficient(3, 1);
        FAIL("expected DegenerateSystem");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateSystem);
    }
}

TEST_CASE("compute_weights matches a PMI example") {
    // feature in 10 rows, 8 of class j; N_j = 50 of N = 100
    std::vector<LabeledFeatures> rows;
    for (int k = 0; k < 8; ++k) rows.push_back({{"f"}, "j"});
    for (int k = 0; k < 2; ++k) rows.push_back({{"f"}, "k"});
    for (int k = 0; k < 42; ++k) rows.push_back({{"g"}, "j"});
    for (int k = 0; k < 48; ++k) rows.push_back({{"g"}, "k"});
    const auto m = train_matrix(rows, plain());
    const auto f = *m.features().find("f");
    const auto j = *m.classes().find("j");
    CHECK(m.weight(f, j) == doctest::Approx(std::log(1.6) / std::log(2.0)).epsilon(1e-12));
    CHECK(std::abs(m.weight(f, j) - 0.67807) < 1e-5);
}

TEST_CASE("compute_weights against brute-force PMI on random tables") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rows = random_rows(rng, 20, 5, 300);
        const auto m = train_matrix(rows, plain());
        const auto t = accumulate_counts(rows);
        for (std::size_t i = 0; i < m.features().size(); ++i)
            for (std::size_t j = 0; j < m.classes().size(); ++j) {
                if (t.co_count(i, j) == 0) {
                    CHECK(m.weight(i, j) == 0.0);
                    continue;
                }
                CHECK(std::abs(m.weight(i, j) - pmi_oracle(rows, m.features().name(i), m.classes().name(j))) < 1e-9);
            }
    }
}

TEST_CASE("compute_weights edge cases") {
    SUBCASE("uninformative feature weighs the bias") {
        std::vector<LabeledFeatures> rows = {{{"u", "a"}, "X"}, {{"u", "b"}, "Y"}};
        auto config = plain();
        config.bias_default = 0.25;
        const auto m = train_matrix(rows, config);
        CHECK(m.weight(*m.features().find("u"), 0) == doctest::Approx(0.25));
        CHECK(m.weight(*m.features().find("u"), 1) == doctest::Approx(0.25));
    }
    SUBCASE("zero co-count weighs zero without smoothing") {
        std::vector<LabeledFeatures> rows = {{{"a"}, "X"}, {{"b"}, "Y"}};
        const auto m = train_matrix(rows, plain());
        CHECK(m.weight(*m.features().find("a"), *m.classes().find("Y")) == 0.0);
    }
    SUBCASE("smoothing fills every cell with finite weights") {
        std::vector<LabeledFeatures> rows = {{{"a"}, "X"}, {{"b"}, "Y"}};
        auto config = plain();
        config.alpha = 1.0;
        const auto m = train_matrix(rows, config);
        // P = (0 + 1) / (1 + 2), P_j = 1/2
        CHECK(m.weight(*m.features().find("a"), *m.classes().find("Y")) ==
              doctest::Approx(std::log2((1.0 / 3.0) / 0.5)));
        CHECK(m.stored_cells() == 4);
    }
    SUBCASE("emergence scales every weight") {
        std::vector<LabeledFeatures> rows = {{{"a", "c"}, "X"}, {{"b"}, "Y"}, {{"a"}, "Y"}};
        const auto scaled = train_matrix(rows, WeightConfig{});
        const auto raw = train_matrix(rows, plain());
        const double psi = emergence_coefficient(3, 2);
        for (const auto& cell : raw.cells())
            CHECK(scaled.weight(cell.feature, cell.cls) == doctest::Approx(psi * cell.weight));
    }
    SUBCASE("single class is degenerate under emergence") {
        std::vector<LabeledFeatures> rows = {{{"a"}, "X"}};
        CHECK_THROWS_AS(train_matrix(rows, WeightConfig{}), Error);
        CHECK_NOTHROW(train_matrix(rows, plain()));
    }
    SUBCASE("negative smoothing is rejected") {
        auto config = plain();
        config.alpha = -1.0;
        std::vector<LabeledFeatures> rows = {{{"a"}, "X"}, {{"b"}, "Y"}};
        CHECK_THROWS_AS(train_matrix(rows, config), Error);
    }
}

TEST_CASE("connection count is classes times features") {
    std::mt19937_64 rng(5);
    const auto m = train_matrix(random_rows(rng, 9, 3, 40), plain());
    CHECK(m.connection_count() == m.classes().size() * m.features().size());
    CHECK(connection_count(12, 133) == 1596);
    CHECK(connection_count(636, 1577) == 1002972);
    CHECK(connection_count(1488, 8031) == 11950128);
    CHECK(connection_count(1464, 8069) == 11813016);
    CHECK(connection_count(2656, 15118) == 40153408);
}

TEST_CASE("activate uses presence semantics") {
    const auto m = question_words();
    std::vector<std::string> in = {"which", "adverb"};
    auto a = activate(in, m);
    CHECK(a.active_count() == 2);
    CHECK(a.unknown.empty());

    std::vector<std::string> oov = {"zorblat", "zorblat"};
    a = activate(oov, m);
    CHECK(a.active.empty());
    CHECK(a.unknown == std::vector<std::string>{"zorblat"});

    CHECK(activate({}, m).active.empty());
}

TEST_CASE("classify reproduces the question-word fixture") {
    const auto m = question_words();
    std::vector<std::string> which = {"which"};
    const auto r = classify(m, activate(which, m));
    CHECK(r.winner().id == "ANY");
    CHECK(std::abs(r.winner().score - 0.649) < 1e-9);
    auto score_of = [&](const std::string& id) {
        for (const auto& s : r.ranked)
            if (s.id == id) return s.score;
        return std::nan("");
    };
    CHECK(std::abs(score_of("ADJ") - 0.534) < 1e-9);
    CHECK(std::abs(score_of("NOUN") + 0.239) < 1e-9);
    CHECK(std::abs(score_of("ADV") - 0.113) < 1e-9);
    CHECK(r.ranked.size() == 4);

    std::vector<std::string> whose = {"whose"};
    const auto w = classify(m, activate(whose, m));
    CHECK(w.winner().id == "ANY");
    CHECK(std::abs(w.winner().score - 0.894) < 1e-9);
}

TEST_CASE("classify ties and masks") {
    const auto m = InformationMatrix::from_cells({"A", "B", "C"}, {"f"},
                                                 std::vector<MatrixCell>{{0, 0, 1.0}, {0, 1, 1.0}, {0, 2, 0.5}});
    std::vector<std::string> f = {"f"};
    const auto act = activate(f, m);
    CHECK(classify(m, act).winner().id == "A");

    std::vector<std::string> mask = {"C", "B", "unknown"};
    const auto masked = classify(m, act, std::span<const std::string>(mask));
    CHECK(masked.winner().id == "B");
    CHECK(masked.ranked.size() == 2);

    std::vector<std::string> none = {"Z"};
    try {
        classify(m, act, std::span<const std::string>(none));
        FAIL("expected EmptyMask");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyMask);
    }
}

TEST_CASE("confidence") {
    // mean positive weight 0.5
    const auto m = InformationMatrix::from_cells({"A", "B"}, {"a", "b", "c", "d"},
                                                 std::vector<MatrixCell>{{0, 0, 0.5}, {1, 0, 0.5}, {2, 1, 0.5},
                                                                         {3, 1, 0.5}, {3, 0, -1.0}});
    CHECK(m.mean_positive_weight() == doctest::Approx(0.5));
    std::vector<std::string> all = {"a", "b", "c", "d"};
    const auto act = activate(all, m);
    CHECK(confidence(m, act, 1.0) == doctest::Approx(1.0 / (4 * 0.5)));
    CHECK(confidence(m, act, 4 * 0.5) == 1.0);
    CHECK(confidence(m, act, 100.0) == 1.0);
    CHECK(confidence(m, act, -3.0) == 0.0);
    CHECK(confidence(m, ActivationVector{}, 1.0) == 0.0);
}

TEST_CASE("classification properties on random matrices") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rows = random_rows(rng, 15, 4, 60);
        const auto m = train_matrix(rows, WeightConfig{});
        std::vector<std::string> input;
        for (int k = 0; k < 4; ++k) input.push_back("f" + std::to_string(rng() % 15));
        const auto act = activate(input, m);
        const auto base = classify(m, act);

        // feature rows permuted
        auto cells = m.cells();
        std::vector<std::string> names = m.features().names();
        std::vector<std::size_t> perm(names.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::string> permuted(names.size());
        for (std::size_t i = 0; i < names.size(); ++i) permuted[perm[i]] = names[i];
        for (auto& c : cells) c.feature = perm[c.feature];
        const auto pm = InformationMatrix::from_cells(m.classes().names(), permuted, cells);
        CHECK(classify(pm, activate(input, pm)).winner().id == base.winner().id);

        // an all-zero feature leaves scores untouched
        auto with_zero = m.features().names();
        with_zero.push_back("zero");
        const auto zm = InformationMatrix::from_cells(m.classes().names(), with_zero, m.cells());
        auto input_zero = input;
        input_zero.push_back("zero");
        const auto zr = classify(zm, activate(input_zero, zm));
        for (std::size_t k = 0; k < base.ranked.size(); ++k) CHECK(zr.ranked[k].score == base.ranked[k].score);

        // positive scaling keeps the winner
        auto scaled = m.cells();
        for (auto& c : scaled) c.weight *= 3.5;
        const auto sm = InformationMatrix::from_cells(m.classes().names(), m.features().names(), scaled);
        CHECK(classify(sm, activate(input, sm)).winner().id == base.winner().id);

        // confidence monotone and bounded
        double prev = -1.0;
        for (double s = -2.0; s <= 6.0; s += 0.25) {
            const double c = confidence(m, act, s);
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
            CHECK(c >= prev);
            prev = c;
        }
    }
}

}  // TEST_SUITE
