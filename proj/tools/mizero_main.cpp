// mizero: train, verify, attack and evaluate implicit style watermarks.

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <cmath>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mizero/attacks.hpp"
#include "mizero/common.hpp"
#include "mizero/corpus.hpp"
#include "mizero/evaluation.hpp"
#include "mizero/registry.hpp"
#include "mizero/synthetic.hpp"
#include "mizero/training.hpp"
#include "mizero/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mizero;

namespace {

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

void log_event(const std::string& event, json fields = json::object()) {
    fields["event"] = event;
    fields["ts"] = iso_now();
    std::clog << fields.dump() << "\n";
}

// Exclusive ownership of a run directory for the lifetime of the command.
class RunLock {
public:
    explicit RunLock(const fs::path& dir) : path_(dir / ".mizero.lock") {
        fs::create_directories(dir);
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw MizeroError("run directory is locked by another invocation: " + dir.string());
    }
    ~RunLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            fs::remove(path_, ec);
        }
    }
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

// Append-only run manifest, one JSON record per artifact-producing command.
void append_manifest(const fs::path& dir, json record) {
    record["ts"] = iso_now();
    std::ofstream out(dir / "manifest.jsonl", std::ios::app);
    if (!out) throw MizeroError("cannot append manifest in " + dir.string());
    out << record.dump() << "\n";
}

struct LlmOptions {
    std::string model;       // empty: offline stub
    bool stub = false;       // explicit --llm-stub
    std::string cache_dir;
    int max_concurrency = 4;

    void attach(CLI::App* cmd) {
        cmd->add_option("--llm", model, "LLM model id for condensation (OpenAI-compatible API)");
        cmd->add_flag("--llm-stub", stub, "Use the offline deterministic condenser (no network)");
        const char* env = std::getenv("MIZERO_CACHE_DIR");
        if (env) cache_dir = env;
        cmd->add_option("--cache-dir", cache_dir, "Condensation cache directory");
        cmd->add_option("--max-concurrency", max_concurrency,
                        "Max in-flight condensation requests");
    }

    std::unique_ptr<LlmClient> make_client() const {
        if (!model.empty() && !stub) {
            HttpLlmConfig cfg;
            cfg.model = model;
            return std::make_unique<HttpLlmClient>(cfg);
        }
        return std::make_unique<StubLlmClient>();
    }

    std::unique_ptr<CondenseCache> make_cache() const {
        if (cache_dir.empty()) return nullptr;
        return std::make_unique<CondenseCache>(cache_dir);
    }
};

// Training hyperparameters as CLI flags; only flags the user actually passed
// override the config file, which overrides the defaults.
struct TrainFlags {
    TrainingConfig cfg;
    std::string backend = "trainable_hash_encoder";
    std::string ablation = "none";
    double epsilon_fraction = 0.01;

    void attach(CLI::App* cmd) {
        cmd->add_option("--ep,--epochs", cfg.epochs, "Training epochs");
        cmd->add_option("-R,--episodes", cfg.episodes, "Episodes per epoch");
        cmd->add_option("--num", cfg.num, "Samples per class per episode");
        cmd->add_option("--len", cfg.len, "Watermark bit length");
        cmd->add_option("--sigma", cfg.sigma, "Delimitation distance threshold");
        cmd->add_option("-m,--margin", cfg.margin_m, "Contrastive margin");
        cmd->add_option("--lr-encoder", cfg.lr_encoder_start, "Encoder LR (cosine start)");
        cmd->add_option("--lr-encoder-floor", cfg.lr_encoder_floor, "Encoder LR floor");
        cmd->add_option("--lr-matrix", cfg.lr_matrix, "Watermark matrix LR");
        cmd->add_option("--weight-decay", cfg.weight_decay, "Decoupled weight decay");
        cmd->add_option("--seed", cfg.seed, "Training seed");
        cmd->add_option("--dim", cfg.encoder.dim, "Encoder embedding width");
        cmd->add_option("--la", cfg.encoder.la, "Encoder head layers");
        cmd->add_option("--encoder-seed", cfg.encoder.seed, "Encoder init seed");
        cmd->add_option("--encoder-backend", backend,
                        "pretrained_sentence_encoder|deterministic_hash_encoder|"
                        "trainable_hash_encoder");
        cmd->add_option("--checkpoint", cfg.encoder.checkpoint_ref,
                        "Encoder checkpoint (pretrained backend)");
        cmd->add_option("--init-scale", cfg.matrix_init_scale, "Watermark matrix init scale");
        cmd->add_flag("--hard-target", cfg.bce_hard_target,
                      "Binarize the anchor as the L_w BCE target");
        cmd->add_option("--ablation", ablation, "none|-L_con|-L_o|-C|freeze_alpha|-q_p");
        cmd->add_option("--epsilon-fraction", epsilon_fraction,
                        "Decision threshold as a fraction of len");
    }

    // Applies the file under the already-parsed flags: file sets only values
    // whose flag was not given on the command line.
    void apply_config_file(CLI::App* cmd, const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError("cannot open config file: " + path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParseError(std::string("config parse: ") + e.what());
        }
        auto unset = [&](const char* flag) { return cmd->get_option(flag)->count() == 0; };
        auto take = [&](const char* key, const char* flag, auto& dst) {
            if (j.contains(key) && unset(flag)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
        };
        take("epochs", "--ep", cfg.epochs);
        take("episodes", "--episodes", cfg.episodes);
        take("num", "--num", cfg.num);
        take("len", "--len", cfg.len);
        take("sigma", "--sigma", cfg.sigma);
        take("margin_m", "--margin", cfg.margin_m);
        take("lr_encoder_start", "--lr-encoder", cfg.lr_encoder_start);
        take("lr_encoder_floor", "--lr-encoder-floor", cfg.lr_encoder_floor);
        take("lr_matrix", "--lr-matrix", cfg.lr_matrix);
        take("weight_decay", "--weight-decay", cfg.weight_decay);
        take("seed", "--seed", cfg.seed);
        take("encoder_dim", "--dim", cfg.encoder.dim);
        take("encoder_la", "--la", cfg.encoder.la);
        take("encoder_seed", "--encoder-seed", cfg.encoder.seed);
        take("encoder_backend", "--encoder-backend", backend);
        take("checkpoint_ref", "--checkpoint", cfg.encoder.checkpoint_ref);
        take("matrix_init_scale", "--init-scale", cfg.matrix_init_scale);
        take("bce_hard_target", "--hard-target", cfg.bce_hard_target);
        take("ablation", "--ablation", ablation);
        take("epsilon_fraction", "--epsilon-fraction", epsilon_fraction);
    }

    TrainingConfig resolve(const std::string& cache_dir) {
        cfg.encoder.backend = encoder_backend_from_string(backend);
        cfg.encoder.trainable = cfg.encoder.backend != EncoderBackend::deterministic_hash_encoder;
        cfg.ablation = ablation_from_string(ablation);
        cfg.cache_dir = cache_dir;
        cfg.validate();
        return cfg;
    }
};

json metrics_to_json(const MetricsRecord& m) {
    json j{{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}, {"f1", m.f1}};
    if (m.tpr) j["tpr"] = *m.tpr;
    if (m.fpr) j["fpr"] = *m.fpr;
    if (!m.metadata.empty()) j["metadata"] = m.metadata;
    return j;
}

json report_to_json(const TrainingReport& r) {
    json recs = json::array();
    for (const auto& e : r.records)
        recs.push_back({{"epoch", e.epoch},
                        {"episode", e.episode},
                        {"l_ce", e.l_ce},
                        {"l_con", e.l_con},
                        {"l_w", e.l_w},
                        {"l_o", e.l_o},
                        {"l_total", e.l_total},
                        {"hard_ce", e.hard_ce},
                        {"pp_size", e.pp_size},
                        {"neg_size", e.neg_size}});
    return json{{"ablation", r.ablation},
                {"elapsed_sec", r.elapsed_sec},
                {"cache_hits", r.cache_hits},
                {"cache_misses", r.cache_misses},
                {"lo_curve", r.lo_curve()},
                {"records", std::move(recs)}};
}

json verdict_to_json(const VerificationVerdict& v) {
    return json{{"test_id", v.test_id},
                {"match_probability", v.match_probability},
                {"hamming", v.hamming},
                {"epsilon", v.epsilon},
                {"pr", v.pr},
                {"nearest_train_id", v.nearest_train_id},
                {"prompt_kind", to_string(v.prompt_kind)}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw MizeroError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

// Loads a registry plus the encoder/matrix checkpoints it references,
// resolving relative paths against the registry location.
struct LoadedRegistry {
    Registry registry;
    std::shared_ptr<Encoder> encoder;
    std::shared_ptr<WatermarkMatrix> matrix;
};

LoadedRegistry load_registry_stack(const std::string& registry_path) {
    LoadedRegistry lr;
    lr.registry = Registry::load(registry_path);
    fs::path base = fs::path(registry_path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) throw RegistryError("registry carries no checkpoint path");
        fs::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    lr.encoder = std::make_shared<Encoder>(
        Encoder::load_checkpoint(resolve(lr.registry.encoder_path).string()));
    lr.matrix = std::make_shared<WatermarkMatrix>(
        WatermarkMatrix::load(resolve(lr.registry.matrix_path).string()));
    return lr;
}

std::string read_text_arg(const std::string& arg) {
    std::error_code ec;
    if (fs::is_regular_file(arg, ec)) {
        std::ifstream in(arg);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return arg;
}

std::optional<int> epsilon_override(int len, double fraction, std::optional<int> explicit_eps) {
    if (explicit_eps) return explicit_eps;
    if (fraction != 0.01)
        return static_cast<int>(std::ceil(fraction * static_cast<double>(len)));
    return std::nullopt;
}

// ---- subcommand bodies ----

int cmd_corpus_validate(const std::string& path, const std::string& style_id) {
    Corpus c = Corpus::load(path, style_id);
    auto m = c.manifest();
    std::cout << "ok: " << c.samples().size() << " samples, num=" << m.num << "\n";
    return 0;
}

int cmd_corpus_stats(const std::string& path, const std::string& style_id) {
    Corpus c = Corpus::load(path, style_id);
    auto m = c.manifest();
    json j;
    j["style_id"] = m.style_id;
    j["num"] = m.num;
    for (const auto& [key, n] : m.counts)
        j["counts"][to_string(key.first) + "/" + to_string(key.second)] = n;
    for (const auto& [label, len] : m.avg_len) j["avg_len"][to_string(label)] = len;
    for (const auto& [model, frac] : m.neg_mixture) j["neg_mixture"][model] = frac;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_corpus_synth(const std::string& out, std::size_t train_n, std::size_t test_n,
                     std::size_t val_n, std::uint64_t seed) {
    Corpus c = make_synthetic_corpus(train_n, test_n, seed, val_n);
    c.save(out);
    std::cout << "wrote " << c.samples().size() << " samples to " << out << "\n";
    return 0;
}

int cmd_train(const std::string& corpus_path, const std::string& style_id, TrainFlags& flags,
              const LlmOptions& llm, const std::string& out_dir) {
    RunLock lock{fs::path(out_dir)};
    TrainingConfig cfg = flags.resolve(llm.cache_dir);
    Corpus corpus = Corpus::load(corpus_path, style_id);
    auto client = llm.make_client();
    auto cache = llm.make_cache();
    log_event("train.start", {{"corpus", corpus_path}, {"out", out_dir}});

    TrainedArtifacts art = train(corpus, cfg, *client, cache.get());

    fs::path out(out_dir);
    art.encoder->save_checkpoint((out / "encoder.json").string());
    art.matrix->save((out / "matrix.json").string());
    Registry reg = make_registry(art, cfg, "encoder.json", "matrix.json");
    if (flags.epsilon_fraction != 0.01)
        reg.epsilon = static_cast<int>(std::ceil(flags.epsilon_fraction * cfg.len));
    reg.save((out / "registry.json").string());
    write_json(out / "report.json", report_to_json(art.report));

    append_manifest(out, {{"command", "train"},
                          {"corpus", corpus_path},
                          {"seed", cfg.seed},
                          {"config", reg.training_manifest},
                          {"encoder_fingerprint", reg.encoder_fingerprint},
                          {"matrix_fingerprint", reg.matrix_fingerprint},
                          {"llm", client->id()},
                          {"cache_hits", art.report.cache_hits},
                          {"cache_misses", art.report.cache_misses}});
    auto lo = art.report.lo_curve();
    std::cout << "trained " << cfg.epochs << " epochs x " << cfg.episodes
              << " episodes; anchor len=" << cfg.len << ", final L_o=" << (lo.empty() ? 0.0 : lo.back())
              << "\nregistry: " << (out / "registry.json").string() << "\n";
    return 0;
}

int cmd_verify(const std::string& registry_path, const std::string& text_arg,
               const std::string& test_id, const LlmOptions& llm, double eps_fraction,
               std::optional<int> eps) {
    LoadedRegistry lr = load_registry_stack(registry_path);
    Verifier verifier(lr.registry, lr.encoder, lr.matrix);
    auto client = llm.make_client();
    auto cache = llm.make_cache();
    auto verdict = verifier.verify(read_text_arg(text_arg), test_id, *client, cache.get(),
                                   epsilon_override(lr.registry.len, eps_fraction, eps));
    std::cout << verdict_to_json(verdict).dump(2) << "\n";
    return 0;
}

int cmd_verify_batch(const std::string& registry_path, const std::string& corpus_path,
                     const std::string& style_id, const std::string& split,
                     const std::string& report_path, const LlmOptions& llm, double eps_fraction,
                     std::optional<int> eps) {
    LoadedRegistry lr = load_registry_stack(registry_path);
    Verifier verifier(lr.registry, lr.encoder, lr.matrix);
    Corpus corpus = Corpus::load(corpus_path, style_id);
    auto samples = corpus.subset(split_from_string(split));
    auto client = llm.make_client();
    auto cache = llm.make_cache();
    auto result = verifier.batch_verify(samples, *client, cache.get(),
                                        epsilon_override(lr.registry.len, eps_fraction, eps));

    std::ofstream out(report_path);
    if (!out) throw MizeroError("cannot write report: " + report_path);
    for (const auto& v : result.verdicts) out << verdict_to_json(v).dump() << "\n";
    for (const auto& [id, err] : result.failures)
        out << json{{"test_id", id}, {"error", err}}.dump() << "\n";
    MetricsRecord metrics = metrics_from_confusion(result.confusion);
    out << json{{"summary", metrics_to_json(metrics)}}.dump() << "\n";

    fs::path dir = fs::path(report_path).parent_path();
    if (dir.empty()) dir = ".";
    append_manifest(dir, {{"command", "verify-batch"},
                          {"registry", registry_path},
                          {"corpus", corpus_path},
                          {"report", report_path},
                          {"encoder_fingerprint", lr.registry.encoder_fingerprint},
                          {"matrix_fingerprint", lr.registry.matrix_fingerprint}});
    std::cout << "verified " << result.verdicts.size() << " samples ("
              << result.failures.size() << " failed): F1=" << metrics.f1;
    if (metrics.tpr) std::cout << " TPR=" << *metrics.tpr;
    if (metrics.fpr) std::cout << " FPR=" << *metrics.fpr;
    std::cout << "\n";
    return 0;
}

int cmd_attack(const std::string& kind_str, double rate, std::uint64_t seed, bool budget,
               const std::string& in_path, const std::string& style_id,
               const std::string& out_path) {
    AttackConfig cfg;
    cfg.kind = attack_kind_from_string(kind_str);
    cfg.rate = rate;
    cfg.budget_mode = budget;
    StubRewriteClient rewrite(rate, seed);
    if (cfg.kind == AttackKind::rewrite) cfg.rewrite_client = &rewrite;

    if (in_path.size() > 6 && in_path.substr(in_path.size() - 6) == ".jsonl") {
        Corpus corpus = Corpus::load(in_path, style_id);
        std::vector<StyleSample> out_samples;
        for (StyleSample s : corpus.samples()) {
            AttackConfig per = cfg;
            per.seed = seed ^ fnv1a(s.id.data(), s.id.size());
            s.text = perturb(s.text, per);
            out_samples.push_back(std::move(s));
        }
        Corpus(std::move(out_samples), corpus.style_id()).save(out_path);
        std::cout << "perturbed corpus written to " << out_path << "\n";
    } else {
        cfg.seed = seed;
        std::string text = read_text_arg(in_path);
        std::ofstream out(out_path);
        if (!out) throw MizeroError("cannot write " + out_path);
        out << perturb(text, cfg);
        std::cout << "perturbed text written to " << out_path << "\n";
    }
    return 0;
}

int cmd_eval(const std::string& corpus_path, const std::string& style_id, bool synthetic,
             TrainFlags& flags, const LlmOptions& llm, const std::string& out_dir,
             bool with_attacks, double attack_rate, int repeats) {
    if (repeats < 1) throw CLI::ValidationError("eval", "--repeats must be >= 1");
    RunLock lock{fs::path(out_dir)};
    TrainingConfig cfg = flags.resolve(llm.cache_dir);
    Corpus corpus =
        synthetic ? make_synthetic_corpus(200, 120, 42) : Corpus::load(corpus_path, style_id);
    auto client = llm.make_client();
    auto cache = llm.make_cache();
    log_event("eval.start", {{"out", out_dir}, {"synthetic", synthetic}, {"repeats", repeats}});

    auto bench = run_benchmark(corpus, cfg, *client, cache.get(),
                               epsilon_override(cfg.len, flags.epsilon_fraction, std::nullopt));
    fs::path out(out_dir);
    json metrics_json = metrics_to_json(bench.metrics);
    if (repeats > 1) {
        // mean/std aggregation over repeated runs at consecutive seeds
        std::vector<double> f1s = {bench.metrics.f1};
        json runs = json::array({metrics_to_json(bench.metrics)});
        for (int r = 1; r < repeats; ++r) {
            TrainingConfig rcfg = cfg;
            rcfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
            auto rb = run_benchmark(corpus, rcfg, *client, cache.get(),
                                    epsilon_override(cfg.len, flags.epsilon_fraction,
                                                     std::nullopt));
            f1s.push_back(rb.metrics.f1);
            runs.push_back(metrics_to_json(rb.metrics));
        }
        double mean = 0.0;
        for (double v : f1s) mean += v;
        mean /= static_cast<double>(f1s.size());
        double var = 0.0;
        for (double v : f1s) var += (v - mean) * (v - mean);
        var /= static_cast<double>(f1s.size() - 1); // sample std (n-1)
        metrics_json["aggregate"] = {{"repeats", repeats},
                                     {"f1_mean", mean},
                                     {"f1_std", std::sqrt(var)}};
        metrics_json["runs"] = std::move(runs);
    }
    write_json(out / "metrics.json", metrics_json);
    write_json(out / "report.json", report_to_json(bench.report));
    json verdicts = json::array();
    for (const auto& v : bench.verdicts) verdicts.push_back(verdict_to_json(v));
    write_json(out / "verdicts.json", verdicts);

    if (with_attacks) {
        TrainedArtifacts art = train(corpus, cfg, *client, cache.get());
        Registry reg = make_registry(art, cfg, "", "");
        Verifier verifier(reg, art.encoder, art.matrix);
        auto test = corpus.subset(Split::test);
        StubRewriteClient rewrite(attack_rate, cfg.seed + 31);
        auto ev = attack_evaluation(test,
                                    {AttackKind::upper_lower, AttackKind::misspelling,
                                     AttackKind::number, AttackKind::add_paragraph,
                                     AttackKind::rewrite},
                                    verifier, *client, attack_rate, cfg.seed + 17, &rewrite,
                                    cache.get());
        json ja;
        ja["clean"] = metrics_to_json(ev.clean);
        ja["outcomes"] = json::array();
        for (const auto& o : ev.outcomes)
            ja["outcomes"].push_back({{"kind", to_string(o.kind)},
                                      {"metrics", metrics_to_json(o.metrics)},
                                      {"f1_delta", o.f1_delta},
                                      {"tpr_delta", o.tpr_delta},
                                      {"fpr_delta", o.fpr_delta}});
        write_json(out / "attacks.json", ja);
    }

    append_manifest(out, {{"command", "eval"},
                          {"synthetic", synthetic},
                          {"corpus", synthetic ? "<synthetic>" : corpus_path},
                          {"seed", cfg.seed},
                          {"llm", client->id()},
                          {"metrics", metrics_to_json(bench.metrics)}});
    std::cout << "eval F1=" << bench.metrics.f1;
    if (bench.metrics.fpr) std::cout << " FPR=" << *bench.metrics.fpr;
    std::cout << " (reports in " << out_dir << ")\n";
    return 0;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

int cmd_sweep(const std::string& corpus_path, const std::string& style_id, bool synthetic,
              const std::string& bits_csv, const std::string& num_csv, TrainFlags& flags,
              const LlmOptions& llm, const std::string& out_dir) {
    if (bits_csv.empty() == num_csv.empty())
        throw CLI::ValidationError("sweep", "pass exactly one of --bits or --num");
    RunLock lock{fs::path(out_dir)};
    TrainingConfig cfg = flags.resolve(llm.cache_dir);
    Corpus corpus =
        synthetic ? make_synthetic_corpus(200, 120, 42) : Corpus::load(corpus_path, style_id);
    auto client = llm.make_client();
    auto cache = llm.make_cache();

    json table = json::array();
    if (!bits_csv.empty()) {
        for (const auto& p : bit_length_study(corpus, parse_int_list(bits_csv), cfg, *client,
                                              cache.get()))
            table.push_back({{"len", p.len},
                             {"metrics", metrics_to_json(p.metrics)},
                             {"error", p.error}});
    } else {
        for (const auto& p : sample_size_study(corpus, parse_int_list(num_csv), cfg, *client,
                                               cache.get()))
            table.push_back({{"num", p.num},
                             {"metrics", metrics_to_json(p.metrics)},
                             {"decline_region", p.decline_region},
                             {"error", p.error}});
    }
    fs::path out(out_dir);
    write_json(out / "sweep.json", table);
    append_manifest(out, {{"command", "sweep"},
                          {"axis", bits_csv.empty() ? "num" : "bits"},
                          {"values", bits_csv.empty() ? num_csv : bits_csv},
                          {"seed", cfg.seed}});
    std::cout << "sweep table written to " << (out / "sweep.json").string() << "\n";
    return 0;
}

int cmd_export_registry(const std::string& registry_path, const std::string& out_path) {
    Registry reg = Registry::load(registry_path);
    fs::path base = fs::path(registry_path).parent_path();
    auto slurp = [&](const std::string& rel) {
        if (rel.empty()) return json();
        fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base / rel;
        std::ifstream in(p);
        if (!in) throw MizeroError("cannot read checkpoint: " + p.string());
        json j;
        in >> j;
        return j;
    };
    json bundle;
    {
        std::ifstream in(registry_path);
        in >> bundle["registry"];
    }
    bundle["encoder"] = slurp(reg.encoder_path);
    bundle["matrix"] = slurp(reg.matrix_path);
    bundle["format"] = "mizero-registry-bundle-v1";
    write_json(out_path, bundle);
    std::cout << "bundle written to " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implicit zero-watermarking for text style protection"};
    app.require_subcommand(1);

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "Corpus utilities");
    corpus_cmd->require_subcommand(1);
    std::string c_path, c_style = "style", c_out = "corpus.jsonl";
    std::size_t c_train = 200, c_test = 120, c_val = 0;
    std::uint64_t c_seed = 42;
    auto* c_validate = corpus_cmd->add_subcommand("validate", "Validate a JSONL corpus");
    c_validate->add_option("path", c_path)->required();
    c_validate->add_option("--style-id", c_style);
    auto* c_stats = corpus_cmd->add_subcommand("stats", "Print corpus statistics");
    c_stats->add_option("path", c_path)->required();
    c_stats->add_option("--style-id", c_style);
    auto* c_synth = corpus_cmd->add_subcommand("synth", "Generate the synthetic benchmark corpus");
    c_synth->add_option("--out", c_out)->required();
    c_synth->add_option("--train", c_train);
    c_synth->add_option("--test", c_test);
    c_synth->add_option("--val", c_val);
    c_synth->add_option("--seed", c_seed);

    // train
    auto* train_cmd = app.add_subcommand("train", "Learn a watermark registry from a corpus");
    std::string t_corpus, t_style = "style", t_config, t_out;
    TrainFlags t_flags;
    LlmOptions t_llm;
    train_cmd->add_option("--corpus", t_corpus)->required();
    train_cmd->add_option("--style-id", t_style);
    train_cmd->add_option("--config", t_config, "JSON config file mirroring TrainingConfig");
    train_cmd->add_option("--out", t_out)->required();
    t_flags.attach(train_cmd);
    t_llm.attach(train_cmd);

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "Verify one text against a registry");
    std::string v_registry, v_text, v_id = "suspect";
    double v_eps_fraction = 0.01;
    int v_eps_int = -1;
    LlmOptions v_llm;
    verify_cmd->add_option("--registry", v_registry)->required();
    verify_cmd->add_option("--text", v_text, "Literal text or a path to a text file")->required();
    verify_cmd->add_option("--id", v_id);
    verify_cmd->add_option("--epsilon", v_eps_int, "Explicit bit threshold override");
    verify_cmd->add_option("--epsilon-fraction", v_eps_fraction);
    v_llm.attach(verify_cmd);

    // verify-batch
    auto* batch_cmd = app.add_subcommand("verify-batch", "Verify a labeled corpus split");
    std::string b_registry, b_corpus, b_style = "style", b_split = "test", b_report;
    double b_eps_fraction = 0.01;
    int b_eps_int = -1;
    LlmOptions b_llm;
    batch_cmd->add_option("--registry", b_registry)->required();
    batch_cmd->add_option("--corpus", b_corpus)->required();
    batch_cmd->add_option("--style-id", b_style);
    batch_cmd->add_option("--split", b_split, "train|val|test");
    batch_cmd->add_option("--report", b_report)->required();
    batch_cmd->add_option("--epsilon", b_eps_int);
    batch_cmd->add_option("--epsilon-fraction", b_eps_fraction);
    b_llm.attach(batch_cmd);

    // attack
    auto* attack_cmd = app.add_subcommand("attack", "Perturb texts for robustness testing");
    std::string a_kind, a_in, a_out, a_style = "style";
    double a_rate = 0.30;
    std::uint64_t a_seed = 0;
    bool a_budget = false;
    attack_cmd->add_option("--kind", a_kind,
                           "upper_lower|misspelling|number|add_paragraph|rewrite")
        ->required();
    attack_cmd->add_option("--rate", a_rate);
    attack_cmd->add_option("--seed", a_seed);
    attack_cmd->add_flag("--budget", a_budget, "Treat rate as a fraction-of-length budget");
    attack_cmd->add_option("--in", a_in)->required();
    attack_cmd->add_option("--style-id", a_style);
    attack_cmd->add_option("--out", a_out)->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Train and evaluate on a held-out split");
    std::string e_corpus, e_style = "style", e_out;
    bool e_synth = false, e_attacks = false;
    double e_attack_rate = 0.30;
    int e_repeats = 1;
    TrainFlags e_flags;
    LlmOptions e_llm;
    eval_cmd->add_option("--corpus", e_corpus);
    eval_cmd->add_option("--style-id", e_style);
    eval_cmd->add_flag("--synthetic", e_synth, "Use the built-in synthetic benchmark corpus");
    eval_cmd->add_option("--out", e_out)->required();
    eval_cmd->add_flag("--attacks", e_attacks, "Also run the attack suite");
    eval_cmd->add_option("--attack-rate", e_attack_rate);
    eval_cmd->add_option("--repeats", e_repeats,
                         "Aggregate mean/std over N runs at consecutive seeds")
        ->check(CLI::PositiveNumber);
    e_flags.attach(eval_cmd);
    e_llm.attach(eval_cmd);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Bit-length or sample-size study");
    std::string s_corpus, s_style = "style", s_bits, s_num, s_out;
    bool s_synth = false;
    TrainFlags s_flags;
    LlmOptions s_llm;
    sweep_cmd->add_option("--corpus", s_corpus);
    sweep_cmd->add_option("--style-id", s_style);
    sweep_cmd->add_flag("--synthetic", s_synth);
    sweep_cmd->add_option("--bits", s_bits, "Comma-separated watermark lengths");
    sweep_cmd->add_option("--num-list,--nums", s_num, "Comma-separated per-class sample counts");
    sweep_cmd->add_option("--out", s_out)->required();
    s_flags.attach(sweep_cmd);
    s_llm.attach(sweep_cmd);

    // export-registry
    auto* export_cmd = app.add_subcommand("export-registry",
                                          "Bundle a registry with its checkpoints");
    std::string x_registry, x_out;
    export_cmd->add_option("--registry", x_registry)->required();
    export_cmd->add_option("--out", x_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_validate->parsed()) return cmd_corpus_validate(c_path, c_style);
        if (c_stats->parsed()) return cmd_corpus_stats(c_path, c_style);
        if (c_synth->parsed()) return cmd_corpus_synth(c_out, c_train, c_test, c_val, c_seed);
        if (train_cmd->parsed()) {
            if (!t_config.empty()) t_flags.apply_config_file(train_cmd, t_config);
            return cmd_train(t_corpus, t_style, t_flags, t_llm, t_out);
        }
        if (verify_cmd->parsed())
            return cmd_verify(v_registry, v_text, v_id, v_llm, v_eps_fraction,
                              v_eps_int >= 0 ? std::optional<int>(v_eps_int) : std::nullopt);
        if (batch_cmd->parsed())
            return cmd_verify_batch(b_registry, b_corpus, b_style, b_split, b_report, b_llm,
                                    b_eps_fraction,
                                    b_eps_int >= 0 ? std::optional<int>(b_eps_int) : std::nullopt);
        if (attack_cmd->parsed())
            return cmd_attack(a_kind, a_rate, a_seed, a_budget, a_in, a_style, a_out);
        if (eval_cmd->parsed())
            return cmd_eval(e_corpus, e_style, e_synth, e_flags, e_llm, e_out, e_attacks,
                            e_attack_rate, e_repeats);
        if (sweep_cmd->parsed())
            return cmd_sweep(s_corpus, s_style, s_synth, s_bits, s_num, s_flags, s_llm, s_out);
        if (export_cmd->parsed()) return cmd_export_registry(x_registry, x_out);
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const RegistryError& e) {
        log_event("error", {{"kind", "registry"}, {"what", e.what()}});
        std::cerr << "registry error: " << e.what() << "\n";
        return 3;
    } catch (const MizeroError& e) {
        log_event("error", {{"kind", "runtime"}, {"what", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        log_event("error", {{"kind", "unexpected"}, {"what", e.what()}});
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
