#include "sgf/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "sgf/aer.hpp"
#include "sgf/config.hpp"
#include "sgf/costmodel.hpp"
#include "sgf/pipeline.hpp"
#include "sgf/sgf_model.hpp"
#include "sgf/stcore.hpp"
#include "sgf/synthetic.hpp"

namespace sgf::cli {

namespace fs = std::filesystem;

std::vector<ManifestEntry> read_manifest(const fs::path& manifest) {
    std::ifstream in(manifest, std::ios::binary);
    if (!in) {
        throw DataError(manifest.string() + ": cannot open manifest");
    }
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto comma = line.rfind(',');
        const std::string where = manifest.string() + ":" + std::to_string(line_no);
        if (comma == std::string::npos || comma == 0) {
            throw DataError(where + ": expected \"path,label\"");
        }
        int label = 0;
        const std::string label_text = line.substr(comma + 1);
        const auto r = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
        if (label_text.empty() || r.ec != std::errc{} || r.ptr != label_text.data() + label_text.size() ||
            label < 1 || label > events::kClassCount) {
            throw DataError(where + ": label must be an integer in 1..10");
        }
        fs::path p = line.substr(0, comma);
        if (p.is_relative()) {
            p = manifest.parent_path() / p;
        }
        entries.push_back({p, label});
    }
    if (entries.empty()) {
        throw DataError(manifest.string() + ": empty manifest");
    }
    return entries;
}

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string model_path;
    std::string out_path;
    bool trace = false;
    std::string format = "text";
    std::string similarity;
};

RunConfig resolve_config(const Globals& g) {
    RunConfig config;
    std::string path = g.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("SGF_CONFIG"); env && *env) {
            path = env;
        }
    }
    if (!path.empty()) {
        config = load_config(path);
    }
    if (g.seed) {
        config.seed = *g.seed;
    }
    if (!g.similarity.empty()) {
        config.network.similarity = *parse_similarity(g.similarity);
    }
    return config;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw DataError(path + ": cannot open for writing");
    }
    f << text;
}

SgfModel load_model(const Globals& g, const RunConfig& config) {
    if (g.model_path.empty()) {
        throw DataError("--model: a model file is required");
    }
    std::ifstream in(g.model_path, std::ios::binary);
    if (!in) {
        throw DataError(g.model_path + ": cannot open model");
    }
    SgfModel model = [&] {
        try {
            return SgfModel::load(in, config.build());
        } catch (const DataError& e) {
            throw DataError(g.model_path + ": " + e.what());
        }
    }();
    if (!g.similarity.empty()) {
        model.set_similarity(config.network.similarity);
    }
    return model;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string path_string(const std::vector<UnitId>& path) {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        s += (i ? ">" : "") + std::string(to_string(path[i]));
    }
    return s;
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
    int class_id = 0;
    std::string trajectory;
    std::string suite_dir;
    unsigned per_class = 10;
    std::uint32_t frames = 60;
    std::optional<double> noise;
};

int cmd_generate(const GenerateArgs& a, const Globals& g, std::ostream& out) {
    const RunConfig config = resolve_config(g);
    events::SuiteSettings settings = config.synthetic;
    if (a.noise) {
        settings.noise_density = *a.noise;
    }
    if (!a.suite_dir.empty()) {
        fs::create_directories(a.suite_dir);
        std::string manifest;
        for (int c = 1; c <= events::kClassCount; ++c) {
            for (unsigned i = 0; i < a.per_class; ++i) {
                const std::uint64_t seed = events::CounterRng::mix(config.seed, static_cast<std::uint64_t>(c), i);
                char name[32];
                std::snprintf(name, sizeof name, "c%02d_%04u.csv", c, i);
                events::save_event_file(fs::path(a.suite_dir) / name, events::suite_sample(c, seed, settings));
                manifest += std::string(name) + "," + std::to_string(c) + "\n";
            }
        }
        write_text((fs::path(a.suite_dir) / "manifest.csv").string(), manifest, out);
        out << "wrote " << a.per_class * events::kClassCount << " samples and manifest.csv to " << a.suite_dir
            << "\n";
        return kOk;
    }
    events::EventStream stream;
    if (a.class_id != 0) {
        if (a.class_id < 1 || a.class_id > events::kClassCount) {
            throw ConfigError("--class: must be in 1..10");
        }
        stream = events::suite_sample(a.class_id, config.seed, settings);
    } else {
        const auto t = events::parse_trajectory(a.trajectory);
        if (!t) {
            throw ConfigError("--trajectory: unknown trajectory \"" + a.trajectory + "\"");
        }
        events::SyntheticGestureSpec spec;
        spec.trajectory = *t;
        spec.geometry = settings.geometry;
        spec.center_x = settings.geometry.width / 2.0;
        spec.center_y = settings.geometry.height / 2.0;
        spec.noise_density = settings.noise_density;
        spec.blob_radius = settings.blob_radius;
        spec.blob_rate = settings.blob_rate;
        spec.frame_count = a.frames;
        stream = events::gen_synthetic(spec, config.seed);
    }
    write_text(g.out_path, events::serialize_event_stream(stream), out);
    return kOk;
}

// --- filter -----------------------------------------------------------------

struct FilterArgs {
    std::string input;
    std::string unit = "a";
    std::string format = "records";  // or pgm
    std::optional<int> delta_s, theta_s, delta_t, theta_t;
};

int cmd_filter(const FilterArgs& a, const Globals& g, std::ostream& out) {
    const RunConfig config = resolve_config(g);
    stcore::STCoreParams p = a.unit == "a"   ? config.network.stcore_a
                             : a.unit == "b" ? config.network.stcore_b
                                             : config.network.stcore_c;
    if (a.delta_s) p.delta_s = *a.delta_s;
    if (a.theta_s) p.theta_s = *a.theta_s;
    if (a.delta_t) p.delta_t = *a.delta_t;
    if (a.theta_t) p.theta_t = *a.theta_t;
    stcore::validate(p);
    const auto stream = events::load_event_file(a.input, config.network.geometry);
    const auto frames = events::bin_frames(stream, config.network.spikes_per_frame);
    const auto st = stcore::st_filter(frames, p);
    if (a.format == "pgm") {
        if (g.out_path.empty()) {
            throw DataError("--out: pgm output needs a file prefix");
        }
        for (std::size_t f = 0; f < st.size(); ++f) {
            const Geometry& geo = st[f].geometry();
            std::string img = "P2\n" + std::to_string(geo.width) + " " + std::to_string(geo.height) + "\n1\n";
            for (std::uint32_t y = 0; y < geo.height; ++y) {
                for (std::uint32_t x = 0; x < geo.width; ++x) {
                    img += (x ? " " : "") + std::to_string(int{st[f].at(x, y)});
                }
                img += "\n";
            }
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, "-%04zu.pgm", f);
            write_text(g.out_path + suffix, img, out);
        }
        out << "wrote " << st.size() << " frames\n";
        return kOk;
    }
    std::string text;
    for (std::size_t f = 0; f < st.size(); ++f) {
        const Geometry& geo = st[f].geometry();
        for (std::uint32_t y = 0; y < geo.height; ++y) {
            for (std::uint32_t x = 0; x < geo.width; ++x) {
                if (st[f].at(x, y)) {
                    text += std::to_string(f) + "," + std::to_string(x) + "," + std::to_string(y) + ",1\n";
                }
            }
        }
    }
    write_text(g.out_path, text, out);
    return kOk;
}

// --- train / infer / evaluate ------------------------------------------------

std::vector<events::EventStream> load_manifest_streams(const std::string& manifest, const RunConfig& config) {
    std::vector<events::EventStream> streams;
    for (const auto& e : read_manifest(manifest)) {
        auto s = events::load_event_file(e.path, config.network.geometry);
        s.label = e.label;
        streams.push_back(std::move(s));
    }
    return streams;
}

int cmd_train(const std::string& manifest, const std::string& knowledge_path, const Globals& g,
              std::ostream& out) {
    const RunConfig config = resolve_config(g);
    const std::string model_path = !g.model_path.empty() ? g.model_path : g.out_path;
    if (model_path.empty()) {
        throw DataError("--model: an output model path is required");
    }
    const auto streams = load_manifest_streams(manifest, config);
    SgfModel model(config.build());
    online_learn(streams, model);

    std::ostringstream text;
    model.save(text);
    write_text(model_path, text.str(), out);
    const std::string kpath = knowledge_path.empty() ? model_path + ".knowledge.csv" : knowledge_path;
    write_text(kpath, knowledge_csv(model.knowledge_report()), out);

    out << "trained " << streams.size() << " samples\n";
    for (UnitId id : {UnitId::A, UnitId::B, UnitId::C}) {
        const SGFUnit& u = model.unit(id);
        std::size_t stored = 0;
        for (const auto& [label, neuron] : u.outputs()) {
            stored += neuron.neurons().size();
        }
        out << "unit " << to_string(id) << ": " << u.slot_count() << " slots, " << u.outputs().size()
            << " output neurons, " << stored << " global feature neurons\n";
    }
    out << "model: " << model_path << "\nknowledge: " << kpath << "\n";
    return kOk;
}

void write_trace(const events::EventStream& stream, const SgfModel& model, const pipeline::InferenceResult& r,
                 std::ostream& out) {
    out << "vector A " << r.vector_a.to_string() << "\n";
    if (r.vector_downstream) {
        out << "vector " << to_string(r.path.back()) << " " << r.vector_downstream->to_string() << "\n";
    }
    if (r.path.size() < 2) {
        return;
    }
    const UnitNetwork& net = model.config().unit(r.path.back());
    if (net.temporal.empty()) {
        return;
    }
    const auto frames = events::bin_frames(stream, model.config().spikes_per_frame);
    const auto st = stcore::st_filter(frames, net.stcore);
    const bool per_frame = net.temporal.size() <= 8;
    for (const auto& p : net.temporal) {
        const auto eval = temporal::evaluate(st, p);
        out << "slot " << p.feature_id << " tokens " << temporal::to_string(eval.observed) << " fired "
            << (eval.fired ? 1 : 0) << "\n";
        if (per_frame) {
            for (std::size_t t = 0; t < eval.vertical.size(); ++t) {
                const auto v = eval.vertical[t];
                const auto h = eval.horizontal[t];
                out << "  frame " << t << " row " << (v ? std::to_string(*v) : "-") << " col "
                    << (h ? std::to_string(*h) : "-") << "\n";
            }
        }
    }
}

int cmd_infer(const std::string& input, const Globals& g, std::ostream& out) {
    const RunConfig config = resolve_config(g);
    const SgfModel model = load_model(g, config);
    const auto stream = events::load_event_file(input, config.network.geometry);
    pipeline::PipelineConfig pc;
    pc.fifo_capacity = config.fifo_capacity;
    const auto r = pipeline::run_inference(stream, model, pc);

    std::ostringstream text;
    if (g.format == "csv") {
        text << "unit,label,score,selected\n";
        const int group = argmax_label(r.scores_a);
        for (const auto& s : r.scores_a) {
            text << "A," << s.label << "," << fmt(s.score) << "," << (s.label == group ? 1 : 0) << "\n";
        }
        if (r.path.size() > 1) {
            for (const auto& s : r.scores) {
                text << to_string(r.path.back()) << "," << s.label << "," << fmt(s.score) << ","
                     << (s.label == r.class_id ? 1 : 0) << "\n";
            }
        }
    } else {
        text << "class " << r.class_id << " (" << events::gesture_name(r.class_id) << ")\n";
        text << "path " << path_string(r.path) << "\n";
        text << "scores A";
        for (const auto& s : r.scores_a) {
            text << " " << s.label << ":" << fmt(s.score);
        }
        text << "\n";
        if (r.path.size() > 1) {
            text << "scores " << to_string(r.path.back());
            for (const auto& s : r.scores) {
                text << " " << s.label << ":" << fmt(s.score);
            }
            text << "\n";
        }
        text << "events " << r.stats.events_in << " packets " << r.stats.packets_transferred << " frames "
             << r.stats.frames_processed << " fifo_high_watermark " << r.stats.fifo_high_watermark << "\n";
    }
    if (g.trace) {
        write_trace(stream, model, r, text);
    }
    write_text(g.out_path, text.str(), out);
    return kOk;
}

int cmd_evaluate(const std::string& manifest, std::optional<unsigned> jobs, const Globals& g, std::ostream& out) {
    const RunConfig config = resolve_config(g);
    const auto entries = read_manifest(manifest);  // reports an empty manifest before loading the model
    const SgfModel model = load_model(g, config);
    std::vector<events::EventStream> streams;
    for (const auto& e : entries) {
        auto s = events::load_event_file(e.path, config.network.geometry);
        s.label = e.label;
        streams.push_back(std::move(s));
    }
    pipeline::PipelineConfig pc;
    pc.fifo_capacity = config.fifo_capacity;
    const auto summary = pipeline::run_batch(streams, model, pc, jobs.value_or(config.jobs));

    std::ostringstream text;
    if (g.format == "csv") {
        text << "truth";
        for (int p = 1; p <= events::kClassCount; ++p) {
            text << ",pred_" << p;
        }
        text << "\n";
        for (int t = 1; t <= events::kClassCount; ++t) {
            text << t;
            for (int p = 1; p <= events::kClassCount; ++p) {
                text << "," << summary.confusion[t][p];
            }
            text << "\n";
        }
        text << "accuracy," << fmt(summary.accuracy) << "\n";
    } else {
        text << "samples " << summary.samples << " correct " << summary.correct << " accuracy "
             << fmt(summary.accuracy) << "\n";
        text << "confusion (rows: truth, columns: predicted 1..10)\n";
        for (int t = 1; t <= events::kClassCount; ++t) {
            char head[8];
            std::snprintf(head, sizeof head, "%3d:", t);
            text << head;
            for (int p = 1; p <= events::kClassCount; ++p) {
                char cell[16];
                std::snprintf(cell, sizeof cell, " %4zu", summary.confusion[t][p]);
                text << cell;
            }
            text << "\n";
        }
    }
    write_text(g.out_path, text.str(), out);
    return kOk;
}

// --- cost / aer-dump ---------------------------------------------------------

int cmd_cost(const std::string& target, const Globals& g, std::ostream& out) {
    std::vector<cost::CostReport> reports;
    if (target == "convnet") {
        reports.push_back(cost::convnet_report());
    } else if (target == "pat") {
        reports.push_back(cost::pat_report());
    } else {
        reports.push_back(cost::sgf_size_report());
        reports.push_back(cost::sgf_ops_report());
    }
    std::string text;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) {
            text += "\n";
        }
        text += g.format == "csv" ? cost::format_csv(reports[i]) : cost::format_text(reports[i]);
    }
    write_text(g.out_path, text, out);
    return kOk;
}

int cmd_aer_dump(const std::string& input, bool reverse, const Globals& g, std::ostream& out) {
    const RunConfig config = resolve_config(g);
    if (reverse) {
        std::ifstream in(input, std::ios::binary);
        if (!in) {
            throw DataError(input + ": cannot open");
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        try {
            write_text(g.out_path, events::serialize_event_stream(aer::parse_hex(ss.str(), config.network.geometry)),
                       out);
        } catch (const DataError& e) {
            throw DataError(input + ": " + e.what());
        }
        return kOk;
    }
    const auto stream = events::load_event_file(input, config.network.geometry);
    write_text(g.out_path, aer::dump_hex(stream), out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Event-camera gesture recognition with spike gating flow"};
    app.name("sgf");
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config_path, "Configuration file (default: $SGF_CONFIG)");
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--model", g.model_path, "Model file");
    app.add_option("--out", g.out_path, "Output path (default: stdout)");
    app.add_flag("--trace", g.trace, "Print feature vectors and per-frame traces");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "csv", "records", "pgm"}));
    app.add_option("--similarity", g.similarity, "Similarity operator")->check(CLI::IsMember({"nor", "xnor"}));

    GenerateArgs gen_args;
    auto* gen = app.add_subcommand("generate", "Write synthetic gesture event streams");
    gen->add_option("--class", gen_args.class_id, "Gesture class 1..10");
    gen->add_option("--trajectory", gen_args.trajectory, "Trajectory name, e.g. circular-cw");
    gen->add_option("--frames", gen_args.frames, "Frames for --trajectory");
    gen->add_option("--noise", gen_args.noise, "Noise density per pixel per frame");
    gen->add_option("--suite", gen_args.suite_dir, "Write a whole suite plus manifest.csv to this directory");
    gen->add_option("--per-class", gen_args.per_class, "Samples per class for --suite");

    FilterArgs filter_args;
    auto* filter = app.add_subcommand("filter", "Run the ST core over an event file");
    filter->add_option("input", filter_args.input, "Event file")->required();
    filter->add_option("--unit", filter_args.unit, "Unit whose ST parameters to use")->check(CLI::IsMember({"a", "b", "c"}));
    filter->add_option("--delta-s", filter_args.delta_s);
    filter->add_option("--theta-s", filter_args.theta_s);
    filter->add_option("--delta-t", filter_args.delta_t);
    filter->add_option("--theta-t", filter_args.theta_t);

    std::string train_manifest;
    std::string knowledge_path;
    auto* train = app.add_subcommand("train", "Train a model from a manifest of labelled event files");
    train->add_option("manifest", train_manifest, "Manifest of path,label lines")->required();
    train->add_option("--knowledge", knowledge_path, "Knowledge report CSV (default: <model>.knowledge.csv)");

    std::string infer_input;
    auto* infer = app.add_subcommand("infer", "Classify one event file");
    infer->add_option("input", infer_input, "Event file")->required();

    std::string eval_manifest;
    std::optional<unsigned> jobs;
    auto* evaluate = app.add_subcommand("evaluate", "Classify a manifest and report accuracy");
    evaluate->add_option("manifest", eval_manifest, "Manifest of path,label lines")->required();
    evaluate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    std::string cost_target;
    std::string cost_target_flag;
    auto* cost_cmd = app.add_subcommand("cost", "Print parameter and operation tables");
    cost_cmd->add_option("TARGET", cost_target, "sgf, convnet or pat")->check(CLI::IsMember({"sgf", "convnet", "pat"}));
    cost_cmd->add_option("--target", cost_target_flag, "sgf, convnet or pat")->check(CLI::IsMember({"sgf", "convnet", "pat"}));

    std::string aer_input;
    bool aer_reverse = false;
    auto* aer_cmd = app.add_subcommand("aer-dump", "Convert events to AER hex words (or back with --reverse)");
    aer_cmd->add_option("input", aer_input, "Event file, or hex listing with --reverse")->required();
    aer_cmd->add_flag("--reverse", aer_reverse, "Read a hex listing and write event records");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    auto usage = [&](const std::string& what) {
        err << "usage error: " << what << "\n";
        return kUsage;
    };
    if (filter->parsed()) {
        filter_args.format = g.format == "text" ? "records" : g.format;
        if (filter_args.format != "records" && filter_args.format != "pgm") {
            return usage("filter --format must be records or pgm");
        }
    } else if (g.format != "text" && g.format != "csv") {
        return usage("--format must be text or csv");
    }

    try {
        resolve_config(g);  // a bad config fails every subcommand, not only the ones reading it
        if (gen->parsed()) {
            const int modes = (gen_args.class_id != 0) + !gen_args.trajectory.empty() + !gen_args.suite_dir.empty();
            if (modes != 1) {
                return usage("generate needs exactly one of --class, --trajectory or --suite");
            }
            return cmd_generate(gen_args, g, out);
        }
        if (filter->parsed()) {
            return cmd_filter(filter_args, g, out);
        }
        if (train->parsed()) {
            return cmd_train(train_manifest, knowledge_path, g, out);
        }
        if (infer->parsed()) {
            return cmd_infer(infer_input, g, out);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(eval_manifest, jobs, g, out);
        }
        if (cost_cmd->parsed()) {
            if (!cost_target.empty() && !cost_target_flag.empty() && cost_target != cost_target_flag) {
                return usage("cost target given twice with different values");
            }
            const std::string target = !cost_target.empty() ? cost_target : cost_target_flag;
            return cmd_cost(target.empty() ? "sgf" : target, g, out);
        }
        if (aer_cmd->parsed()) {
            return cmd_aer_dump(aer_input, aer_reverse, g, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kUsage;
}

}  // namespace sgf::cli
