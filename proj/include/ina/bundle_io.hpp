#pragma once
// Bundle directory:
//   manifest.json          format version, timestamps, per-model stats, config, file digests
//   lexicon.tsv            surface<TAB>lemma<TAB>POS
//   mlsu.tsv               id<TAB>anchor<TAB>surface|lemma|POS ...<TAB>source sentence
//   <model>.matrix         one per model, matrix text format

#include "ina/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace ina {

inline constexpr int kBundleFormatVersion = 1;

std::string matrix_file_name(ModelId id);

struct BundleManifest {
    int format_version = kBundleFormatVersion;
    BundleMetadata metadata;
    BundleConfig config;
    /// File name -> SHA-256 hex digest.
    std::map<std::string, std::string> files;
};

nlohmann::ordered_json manifest_to_json(const BundleManifest& manifest);
/// Throws Error(VersionMismatch) for unsupported versions, Error(CorruptBundle) for malformed content.
BundleManifest manifest_from_json(const nlohmann::ordered_json& doc);

void write_registry(std::ostream& out, const MlsuRegistry& registry);
MlsuRegistry read_registry(std::istream& in);

/// Writes every file through a temporary name and renames it into place; the
/// manifest goes last.
BundleManifest save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);

/// Throws Error(IoFailure) for missing files, Error(VersionMismatch) and
/// Error(CorruptBundle) when digests, stats or contents disagree.
ModelBundle load_bundle(const std::filesystem::path& dir);

}  // namespace ina
