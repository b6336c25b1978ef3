#include "ina/bundle_io.hpp"

#include "ina/digest.hpp"
#include "ina/error.hpp"
#include "ina/matrix_format.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ina {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kLexicon = "lexicon.tsv";
constexpr const char* kRegistry = "mlsu.tsv";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
    return buf.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot rename " + tmp.string() + ": " + ec.message());
}

json optional_real(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_real(const json& v) {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_uint(const std::string& text, const std::string& what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw Error(ErrorCode::ParseError, "bad " + what + ": '" + text + "'");
    return value;
}

}  // namespace

std::string matrix_file_name(ModelId id) { return std::string(model_name(id)) + ".matrix"; }

json manifest_to_json(const BundleManifest& manifest) {
    json models = json::array();
    for (const auto& s : manifest.metadata.model_stats)
        models.push_back({{"model", model_name(s.model)},
                          {"classes", s.classes},
                          {"features", s.features},
                          {"connections", s.connections},
                          {"rows", s.rows},
                          {"size_bytes", s.size_bytes},
                          {"holdout_rows", s.holdout_rows},
                          {"precision", optional_real(s.precision)},
                          {"recall", optional_real(s.recall)},
                          {"f1", optional_real(s.f1)}});

    const auto& c = manifest.config;
    json class_bias = json::object();
    for (const auto& [cls, b] : c.weights.class_bias) class_bias[cls] = b;
    json config = {{"weights",
                    {{"emergence_enabled", c.weights.emergence_enabled},
                     {"bias_default", c.weights.bias_default},
                     {"class_bias", std::move(class_bias)},
                     {"alpha", c.weights.alpha},
                     {"activation_epsilon", c.weights.activation_epsilon},
                     {"log_base", WeightConfig::log_base}}},
                   {"mode", mode_name(c.mode)},
                   {"seed", c.seed},
                   {"holdout", c.holdout},
                   {"max_steps", c.max_steps},
                   {"reject_threshold", c.reject_threshold}};

    json files = json::object();
    for (const auto& [name, digest] : manifest.files) files[name] = {{"sha256", digest}};

    return {{"format_version", manifest.format_version},
            {"created_at", manifest.metadata.created_at},
            {"corpus_hash", manifest.metadata.corpus_hash},
            {"models", std::move(models)},
            {"config", std::move(config)},
            {"files", std::move(files)}};
}

BundleManifest manifest_from_json(const json& doc) {
    BundleManifest m;
    try {
        m.format_version = doc.at("format_version").get<int>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptBundle, std::string("manifest has no format_version: ") + e.what());
    }
    if (m.format_version != kBundleFormatVersion)
        throw Error(ErrorCode::VersionMismatch, "bundle format " + std::to_string(m.format_version) +
                                                    " is not supported (expected " +
                                                    std::to_string(kBundleFormatVersion) + ")");
    try {
        m.metadata.created_at = doc.at("created_at").get<std::string>();
        m.metadata.corpus_hash = doc.at("corpus_hash").get<std::string>();
        for (const auto& s : doc.at("models")) {
            ModelStats stats;
            const auto id = parse_model_name(s.at("model").get<std::string>());
            if (!id) throw Error(ErrorCode::CorruptBundle, "unknown model " + s.at("model").get<std::string>());
            stats.model = *id;
            stats.classes = s.at("classes").get<std::size_t>();
            stats.features = s.at("features").get<std::size_t>();
            stats.connections = s.at("connections").get<std::uint64_t>();
            stats.rows = s.at("rows").get<std::size_t>();
            stats.size_bytes = s.at("size_bytes").get<std::size_t>();
            stats.holdout_rows = s.at("holdout_rows").get<std::size_t>();
            stats.precision = read_optional_real(s.at("precision"));
            stats.recall = read_optional_real(s.at("recall"));
            stats.f1 = read_optional_real(s.at("f1"));
            m.metadata.model_stats.push_back(stats);
        }
        const auto& c = doc.at("config");
        const auto& w = c.at("weights");
        m.config.weights.emergence_enabled = w.at("emergence_enabled").get<bool>();
        m.config.weights.bias_default = w.at("bias_default").get<double>();
        for (const auto& [cls, b] : w.at("class_bias").items()) m.config.weights.class_bias[cls] = b.get<double>();
        m.config.weights.alpha = w.at("alpha").get<double>();
        m.config.weights.activation_epsilon = w.at("activation_epsilon").get<double>();
        if (w.at("log_base").get<int>() != WeightConfig::log_base)
            throw Error(ErrorCode::CorruptBundle, "unsupported log base");
        const auto mode = parse_mode(c.at("mode").get<std::string>());
        if (!mode) throw Error(ErrorCode::CorruptBundle, "unknown training mode");
        m.config.mode = *mode;
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.holdout = c.at("holdout").get<double>();
        m.config.max_steps = c.at("max_steps").get<std::size_t>();
        m.config.reject_threshold = c.at("reject_threshold").get<double>();
        for (const auto& [name, entry] : doc.at("files").items()) m.files[name] = entry.at("sha256").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptBundle, std::string("malformed manifest: ") + e.what());
    }
    return m;
}

void write_registry(std::ostream& out, const MlsuRegistry& registry) {
    for (const auto& [id, unit] : registry) {
        out << id << '\t' << unit.anchor << '\t';
        for (std::size_t k = 0; k < unit.segment.size(); ++k) {
            const auto& t = unit.segment[k];
            out << (k ? " " : "") << t.surface << '|' << t.lemma << '|' << pos_code(t.pos);
        }
        out << '\t' << unit.source_sentence << '\n';
    }
}

MlsuRegistry read_registry(std::istream& in) {
    MlsuRegistry registry;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cols = split(line, '\t');
        if (cols.size() != 4) throw Error(ErrorCode::ParseError, "mlsu line " + std::to_string(line_no) + ": expected 4 fields");
        const auto id = parse_uint<MlsuId>(cols[0], "MLSU id");
        const auto anchor = parse_uint<std::size_t>(cols[1], "anchor index");
        std::vector<Token> segment;
        for (const auto& item : split(cols[2], ' ')) {
            const auto parts = split(item, '|');
            const auto pos = parts.size() == 3 ? parse_pos(parts[2]) : std::nullopt;
            if (!pos || parts[0].empty() || parts[1].empty())
                throw Error(ErrorCode::ParseError, "mlsu line " + std::to_string(line_no) + ": bad token '" + item + "'");
            segment.push_back({parts[0], parts[1], *pos});
        }
        registry.add(make_mlsu(id, std::move(segment), anchor, cols[3]));
    }
    return registry;
}

BundleManifest save_bundle(const ModelBundle& bundle, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

    BundleManifest manifest;
    manifest.metadata = bundle.metadata();
    manifest.config = bundle.config();

    auto put = [&](const std::string& name, const std::string& content) {
        write_file_atomic(dir / name, content);
        manifest.files[name] = sha256_hex(content);
    };

    std::ostringstream lexicon;
    bundle.lexicon().write(lexicon);
    put(kLexicon, lexicon.str());

    std::ostringstream registry;
    write_registry(registry, bundle.registry());
    put(kRegistry, registry.str());

    for (auto id : kAllModels) put(matrix_file_name(id), matrix_to_string(bundle.model(id)));

    write_file_atomic(dir / kManifest, manifest_to_json(manifest).dump(2) + "\n");
    return manifest;
}

ModelBundle load_bundle(const fs::path& dir) {
    json doc;
    try {
        doc = json::parse(read_file(dir / kManifest));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptBundle, std::string("manifest is not valid JSON: ") + e.what());
    }
    const auto manifest = manifest_from_json(doc);

    std::map<std::string, std::string> contents;
    std::vector<std::string> required = {kLexicon, kRegistry};
    for (auto id : kAllModels) required.push_back(matrix_file_name(id));
    for (const auto& name : required) {
        const auto it = manifest.files.find(name);
        if (it == manifest.files.end()) throw Error(ErrorCode::CorruptBundle, "manifest lists no digest for " + name);
        auto content = read_file(dir / name);
        if (sha256_hex(content) != it->second)
            throw Error(ErrorCode::CorruptBundle, name + " does not match its manifest digest");
        contents[name] = std::move(content);
    }

    try {
        std::istringstream lexicon_in(contents[kLexicon]);
        auto lexicon = Lexicon::read(lexicon_in);
        std::istringstream registry_in(contents[kRegistry]);
        auto registry = read_registry(registry_in);

        ModelSet models;
        for (auto id : kAllModels) models[model_index(id)] = matrix_from_string(contents[matrix_file_name(id)]);

        for (const auto& s : manifest.metadata.model_stats) {
            const auto& m = models[model_index(s.model)];
            if (s.connections != connection_count(s.classes, s.features) || s.classes != m.classes().size() ||
                s.features != m.features().size() || s.connections != m.connection_count())
                throw Error(ErrorCode::CorruptBundle,
                            "connection stats of " + std::string(model_name(s.model)) + " disagree with the matrix");
        }
        return ModelBundle(std::move(models), std::move(registry), std::move(lexicon), manifest.config,
                           manifest.metadata);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptBundle) throw;
        throw Error(ErrorCode::CorruptBundle, e.what());
    }
}

}  // namespace ina
