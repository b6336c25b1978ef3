#include "ina/cli.hpp"

#include "ina/bundle_io.hpp"
#include "ina/error.hpp"
#include "ina/evaluation.hpp"
#include "ina/log.hpp"
#include "ina/service.hpp"
#include "ina/synthesis.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace ina {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content)) throw Error(ErrorCode::IoFailure, "cannot write " + path);
}

struct TrainArgs {
    std::string corpus, qa, lexicon, out, mode = "parallel";
    std::uint64_t seed = 17;
    double holdout = 0.1;
    double threshold = 0.1;
    double alpha = 0.0;
    bool no_emergence = false;
    std::size_t max_steps = 32;
};

struct AskArgs {
    std::string model, question;
    bool trace = false;
    std::optional<double> threshold;
};

struct EvalArgs {
    std::string model, suite, report, compare;
    std::optional<std::size_t> generate;
    std::uint64_t seed = 17;
    std::optional<double> threshold;
};

struct ServeArgs {
    std::string model, bind = "127.0.0.1", static_dir;
    int port = 8080;
};

int run_train(const TrainArgs& a, std::ostream& out) {
    BundleConfig config;
    config.mode = *parse_mode(a.mode);
    config.seed = a.seed;
    config.holdout = a.holdout;
    config.reject_threshold = a.threshold;
    config.max_steps = a.max_steps;
    config.weights.alpha = a.alpha;
    config.weights.emergence_enabled = !a.no_emergence;

    const auto lexicon = Lexicon::load(a.lexicon);
    const auto corpus = slurp(a.corpus);
    std::vector<QaPair> qa;
    if (!a.qa.empty()) {
        std::istringstream in(slurp(a.qa));
        qa = read_qa_pairs(in);
    }
    const auto result = train_from_corpus(corpus, qa, lexicon, config);
    save_bundle(result.bundle, a.out);
    out << format_train_report(result.report);
    out << "bundle written to " << a.out << '\n';
    return kExitOk;
}

int run_ask(const AskArgs& a, std::ostream& out, std::ostream& err) {
    const auto bundle = load_bundle(a.model);
    auto reject = reject_config_for(bundle);
    if (a.threshold) reject.mlsu_min = *a.threshold;
    const auto trace = synthesize(bundle, a.question, reject);
    if (a.trace) out << trace_to_string(trace) << '\n';
    if (trace.rejected) {
        err << "rejected: " << reject_reason_name(trace.reason) << " (" << trace.reason_detail << ")\n";
        return kExitRejected;
    }
    if (!a.trace) out << trace.final_answer << '\n';
    return kExitOk;
}

std::string column_name(const ModelBundle& bundle) { return std::string(mode_name(bundle.config().mode)); }

int run_eval(const EvalArgs& a, std::ostream& out) {
    const auto bundle = load_bundle(a.model);
    EvalSuite suite;
    if (a.generate) {
        suite = generate_technical_suite(bundle, *a.generate, a.seed);
        std::ostringstream text;
        write_suite(text, suite);
        spill(a.suite, text.str());
    } else {
        std::istringstream in(slurp(a.suite));
        suite = read_suite(in);
    }

    auto reject_for = [&](const ModelBundle& b) {
        auto r = reject_config_for(b);
        if (a.threshold) r.mlsu_min = *a.threshold;
        return r;
    };

    std::vector<ReportColumn> columns;
    columns.push_back({column_name(bundle), evaluate(bundle, suite, reject_for(bundle))});
    if (!a.compare.empty()) {
        const auto other = load_bundle(a.compare);
        auto name = column_name(other);
        if (name == columns.front().name) name += " (2)";
        columns.push_back({name, evaluate(other, suite, reject_for(other))});
    }

    const auto table = format_report_table(columns);
    spill(a.report, table);
    spill(a.report + ".json", report_to_json(columns).dump(2) + "\n");
    out << table;
    return kExitOk;
}

int run_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
    QaService service;
    ServeOptions options;
    options.bind = a.bind;
    options.port = a.port;
    if (!a.static_dir.empty()) options.static_dir = a.static_dir;
    HttpServer server(service, options);
    const int port = server.bind();
    out << "listening on " << a.bind << ':' << port << std::endl;

    std::thread loader([&] {
        try {
            service.set_bundle(std::make_shared<const ModelBundle>(load_bundle(a.model)));
            log::info("bundle loaded from " + a.model);
        } catch (const Error& e) {
            err << e.what() << std::endl;
            server.stop();
        }
    });
    server.listen();
    loader.join();
    return service.ready() ? kExitOk : kExitData;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"INA question answering engine", "ina"};
    app.require_subcommand(1);
    bool verbose = false, quiet = false;
    app.add_flag("-v,--verbose", verbose, "Log progress");
    app.add_flag("-q,--quiet", quiet, "Suppress warnings");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train a model bundle from a corpus and QA pairs");
    train_cmd->add_option("--corpus", train_args.corpus, "Corpus text file")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--qa", train_args.qa, "QA pairs TSV (question<TAB>answer)")->check(CLI::ExistingFile);
    train_cmd->add_option("--lexicon", train_args.lexicon, "Lexicon TSV")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--out", train_args.out, "Bundle directory")->required();
    train_cmd->add_option("--mode", train_args.mode, "Training mode")
        ->check(CLI::IsMember({"parallel", "consecutive"}))
        ->capture_default_str();
    train_cmd->add_option("--seed", train_args.seed, "Hold-out split seed")->capture_default_str();
    train_cmd->add_option("--holdout", train_args.holdout, "Held-out fraction")
        ->check(CLI::Range(0.0, 0.99))
        ->capture_default_str();
    train_cmd->add_option("--threshold", train_args.threshold, "Default MLSU confidence threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    train_cmd->add_option("--alpha", train_args.alpha, "Additive smoothing")->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--max-steps", train_args.max_steps, "Synthesis steps per direction")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train_cmd->add_flag("--no-emergence", train_args.no_emergence, "Disable the emergence coefficient");

    AskArgs ask_args;
    auto* ask_cmd = app.add_subcommand("ask", "Answer one question");
    ask_cmd->add_option("--model", ask_args.model, "Bundle directory")->required()->check(CLI::ExistingDirectory);
    ask_cmd->add_option("--question", ask_args.question, "Question text")->required();
    ask_cmd->add_flag("--trace", ask_args.trace, "Print the JSON trace");
    ask_cmd->add_option("--threshold", ask_args.threshold, "MLSU confidence threshold")->check(CLI::Range(0.0, 1.0));

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Score a question suite");
    eval_cmd->add_option("--model", eval_args.model, "Bundle directory")->required()->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--suite", eval_args.suite, "Suite TSV (written when --generate is given)")->required();
    eval_cmd->add_option("--generate", eval_args.generate, "Generate a technical suite of N questions");
    eval_cmd->add_option("--seed", eval_args.seed, "Generator seed")->capture_default_str();
    eval_cmd->add_option("--report", eval_args.report, "Report file; JSON goes to <report>.json")->required();
    eval_cmd->add_option("--compare", eval_args.compare, "Second bundle for a side-by-side column")
        ->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--threshold", eval_args.threshold, "MLSU confidence threshold")->check(CLI::Range(0.0, 1.0));

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    serve_cmd->add_option("--model", serve_args.model, "Bundle directory")->required()->check(CLI::ExistingDirectory);
    serve_cmd->add_option("--port", serve_args.port, "TCP port")->check(CLI::Range(0, 65535))->capture_default_str();
    serve_cmd->add_option("--bind", serve_args.bind, "Bind address")->capture_default_str();
    serve_cmd->add_option("--static", serve_args.static_dir, "Directory served at /")->check(CLI::ExistingDirectory);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << "run 'ina --help' for usage\n";
        return kExitUsage;
    }
    if (verbose) log::set_level(log::Level::Info);
    if (quiet) log::set_level(log::Level::Quiet);

    try {
        if (*train_cmd) return run_train(train_args, out);
        if (*ask_cmd) return run_ask(ask_args, out, err);
        if (*eval_cmd) return run_eval(eval_args, out);
        if (*serve_cmd) return run_serve(serve_args, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace ina
