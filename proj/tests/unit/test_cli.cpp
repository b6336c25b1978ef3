#include "ina/cli.hpp"

#include "../support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>

using namespace ina;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string lexicon_path() { return (test::source_dir() / "data" / "lexicon_en.tsv").string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("train, ask and eval") {
    test::TempDir dir("cli");
    const auto corpus = dir.path() / "corpus.txt";
    const auto qa = dir.path() / "qa.tsv";
    const auto bundle = (dir.path() / "bundle").string();
    write_text(corpus, test::kToyCorpus);
    write_text(qa, "Why it is light at morning?\tThe sun shines.\nWhere do men go?\tMen go to work\n");

    auto r = run({"-q", "train", "--corpus", corpus.string(), "--qa", qa.string(), "--lexicon", lexicon_path(),
                  "--out", bundle});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("next_token") != std::string::npos);
    CHECK(fs::exists(fs::path(bundle) / "manifest.json"));

    r = run({"ask", "--model", bundle, "--question", "Where do men go?"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "Men go to work\n");

    r = run({"ask", "--model", bundle, "--question", "Where do men go?", "--trace"});
    CHECK(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out)["answer"] == "Men go to work");

    r = run({"ask", "--model", bundle, "--question", "Is a hexagonal moon tasty?"});
    CHECK(r.code == kExitRejected);
    CHECK(r.out.empty());
    CHECK(r.err.find("NoEvidence") != std::string::npos);

    const auto suite = (dir.path() / "suite.tsv").string();
    const auto report = (dir.path() / "report.txt").string();
    r = run({"eval", "--model", bundle, "--suite", suite, "--generate", "30", "--report", report, "--compare", bundle});
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(suite));
    CHECK(test::read_text(report).find("F-measure") != std::string::npos);
    CHECK(nlohmann::json::parse(test::read_text(report + ".json"))["columns"].size() == 2);
}

TEST_CASE("exit codes for bad input") {
    test::TempDir dir("cli-bad");
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"frobnicate"}).code == kExitUsage);
    CHECK(run({"ask", "--question", "x"}).code == kExitUsage);
    CHECK(run({"ask", "--model", dir.path().string(), "--question", "x"}).code == kExitData);
    CHECK(run({"--help"}).code == kExitOk);

    const auto corpus = dir.path() / "corpus.txt";
    write_text(corpus, "very quickly");
    CHECK(run({"-q", "train", "--corpus", corpus.string(), "--lexicon", lexicon_path(), "--out",
               (dir.path() / "b").string()})
              .code == kExitData);
}

}  // TEST_SUITE
