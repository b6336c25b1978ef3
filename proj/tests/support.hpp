#pragma once
// Shared fixtures for the unit and acceptance tests.

#include "ina/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>
#include <string>

namespace ina::test {

inline std::filesystem::path source_dir() { return INA_SOURCE_DIR; }

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline const Lexicon& english() {
    static const Lexicon lexicon = Lexicon::load(source_dir() / "data" / "lexicon_en.tsv");
    return lexicon;
}

inline std::vector<QaPair> qa_file(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    return read_qa_pairs(in);
}

inline const std::string kToyCorpus = "The sun shines at morning. Men go to work.";
inline const std::vector<QaPair> kToyQa = {{"Why it is light at morning?", "The sun shines."},
                                           {"Where do men go?", "Men go to work"}};
inline const std::string kJohnCorpus =
    "John listens to classical music every day while his sisters listen to emo.";

inline BundleConfig config_for(TrainingMode mode) {
    BundleConfig config;
    config.mode = mode;
    return config;
}

inline TrainResult toy_bundle(TrainingMode mode = TrainingMode::Parallel) {
    return train_from_corpus(kToyCorpus, kToyQa, english(), config_for(mode));
}

inline TrainResult john_bundle(TrainingMode mode = TrainingMode::Parallel) {
    return train_from_corpus(kJohnCorpus, qa_file(source_dir() / "data" / "john" / "qa.tsv"), english(),
                             config_for(mode));
}

/// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("ina-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace ina::test
