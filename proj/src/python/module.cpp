#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mizero/attacks.hpp"
#include "mizero/evaluation.hpp"
#include "mizero/registry.hpp"
#include "mizero/synthetic.hpp"
#include "mizero/training.hpp"
#include "mizero/verification.hpp"

namespace py = pybind11;
using namespace mizero;

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

} // namespace

PYBIND11_MODULE(_mizero, m) {
    m.doc() = "Implicit zero-watermarking for text style protection";

    py::register_exception<MizeroError>(m, "MizeroError");

    py::enum_<Label>(m, "Label")
        .value("protected_style", Label::protected_style)
        .value("unprotected_style", Label::unprotected_style);
    py::enum_<Split>(m, "Split")
        .value("train", Split::train)
        .value("val", Split::val)
        .value("test", Split::test);

    py::class_<StyleSample>(m, "StyleSample")
        .def(py::init<>())
        .def_readwrite("id", &StyleSample::id)
        .def_readwrite("text", &StyleSample::text)
        .def_readwrite("label", &StyleSample::label)
        .def_readwrite("source_model", &StyleSample::source_model)
        .def_readwrite("split", &StyleSample::split);

    py::class_<Corpus>(m, "Corpus")
        .def(py::init<std::vector<StyleSample>, std::string>(), py::arg("samples"),
             py::arg("style_id"))
        .def_static("load", &Corpus::load, py::arg("path"), py::arg("style_id"))
        .def("save", &Corpus::save)
        .def_property_readonly("style_id", &Corpus::style_id)
        .def_property_readonly("samples", &Corpus::samples);

    m.def("make_synthetic_corpus", &make_synthetic_corpus, py::arg("train_per_class"),
          py::arg("test_per_class"), py::arg("seed"), py::arg("val_per_class") = 0);

    py::enum_<EncoderBackend>(m, "EncoderBackend")
        .value("pretrained_sentence_encoder", EncoderBackend::pretrained_sentence_encoder)
        .value("deterministic_hash_encoder", EncoderBackend::deterministic_hash_encoder)
        .value("trainable_hash_encoder", EncoderBackend::trainable_hash_encoder);

    py::class_<EncoderConfig>(m, "EncoderConfig")
        .def(py::init<>())
        .def_readwrite("backend", &EncoderConfig::backend)
        .def_readwrite("dim", &EncoderConfig::dim)
        .def_readwrite("la", &EncoderConfig::la)
        .def_readwrite("trainable", &EncoderConfig::trainable)
        .def_readwrite("seed", &EncoderConfig::seed);

    py::class_<Encoder, std::shared_ptr<Encoder>>(m, "Encoder")
        .def(py::init<const EncoderConfig&>())
        .def("encode",
             [](const Encoder& e, const std::string& text) {
                 return to_vec(e.encode(text).values);
             })
        .def("fingerprint", &Encoder::fingerprint)
        .def_property_readonly("trainable", &Encoder::trainable);

    py::class_<LlmClient>(m, "LlmClient");
    py::class_<StubLlmClient, LlmClient>(m, "StubLlmClient").def(py::init<>());

    m.def("stub_condense", [](const std::string& text) {
        CondensedList c = stub_condense(text);
        return py::make_tuple(c.aspects, c.joined());
    });

    py::enum_<Ablation>(m, "Ablation")
        .value("none", Ablation::none)
        .value("drop_lcon", Ablation::drop_lcon)
        .value("drop_lo", Ablation::drop_lo)
        .value("drop_condensation", Ablation::drop_condensation)
        .value("freeze_alpha", Ablation::freeze_alpha)
        .value("drop_qp", Ablation::drop_qp);

    py::class_<TrainingConfig>(m, "TrainingConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainingConfig::epochs)
        .def_readwrite("episodes", &TrainingConfig::episodes)
        .def_readwrite("num", &TrainingConfig::num)
        .def_readwrite("len", &TrainingConfig::len)
        .def_readwrite("sigma", &TrainingConfig::sigma)
        .def_readwrite("margin_m", &TrainingConfig::margin_m)
        .def_readwrite("lr_encoder_start", &TrainingConfig::lr_encoder_start)
        .def_readwrite("lr_encoder_floor", &TrainingConfig::lr_encoder_floor)
        .def_readwrite("lr_matrix", &TrainingConfig::lr_matrix)
        .def_readwrite("weight_decay", &TrainingConfig::weight_decay)
        .def_readwrite("bce_hard_target", &TrainingConfig::bce_hard_target)
        .def_readwrite("seed", &TrainingConfig::seed)
        .def_readwrite("encoder", &TrainingConfig::encoder)
        .def_readwrite("matrix_init_scale", &TrainingConfig::matrix_init_scale)
        .def_readwrite("ablation", &TrainingConfig::ablation)
        .def_readwrite("cache_dir", &TrainingConfig::cache_dir);

    py::class_<EpisodeRecord>(m, "EpisodeRecord")
        .def_readonly("epoch", &EpisodeRecord::epoch)
        .def_readonly("episode", &EpisodeRecord::episode)
        .def_readonly("l_ce", &EpisodeRecord::l_ce)
        .def_readonly("l_con", &EpisodeRecord::l_con)
        .def_readonly("l_w", &EpisodeRecord::l_w)
        .def_readonly("l_o", &EpisodeRecord::l_o)
        .def_readonly("l_total", &EpisodeRecord::l_total);

    py::class_<TrainingReport>(m, "TrainingReport")
        .def_readonly("records", &TrainingReport::records)
        .def_readonly("ablation", &TrainingReport::ablation)
        .def_readonly("elapsed_sec", &TrainingReport::elapsed_sec)
        .def("lo_curve", &TrainingReport::lo_curve);

    py::class_<TrainedArtifacts>(m, "TrainedArtifacts")
        .def_readonly("report", &TrainedArtifacts::report)
        .def_property_readonly("anchor_bits",
                               [](const TrainedArtifacts& a) { return a.anchor.bits; })
        .def_property_readonly("anchor", [](const TrainedArtifacts& a) { return to_vec(a.anchor.a); });

    m.def(
        "train",
        [](const Corpus& corpus, const TrainingConfig& cfg, LlmClient& client) {
            return train(corpus, cfg, client);
        },
        py::arg("corpus"), py::arg("config"), py::arg("client"),
        py::call_guard<py::gil_scoped_release>());

    m.def("default_epsilon", &default_epsilon);
    m.def("hamming_distance", &hamming_distance);

    py::class_<Registry>(m, "Registry")
        .def_readonly("style_id", &Registry::style_id)
        .def_readonly("len", &Registry::len)
        .def_readonly("bits", &Registry::bits)
        .def_readonly("epsilon", &Registry::epsilon)
        .def_readonly("encoder_fingerprint", &Registry::encoder_fingerprint)
        .def_readonly("matrix_fingerprint", &Registry::matrix_fingerprint)
        .def("save", &Registry::save)
        .def_static("load", &Registry::load);

    m.def("make_registry", &make_registry, py::arg("artifacts"), py::arg("config"),
          py::arg("encoder_path") = "", py::arg("matrix_path") = "");

    py::class_<VerificationVerdict>(m, "VerificationVerdict")
        .def_readonly("test_id", &VerificationVerdict::test_id)
        .def_readonly("match_probability", &VerificationVerdict::match_probability)
        .def_readonly("hamming", &VerificationVerdict::hamming)
        .def_readonly("epsilon", &VerificationVerdict::epsilon)
        .def_readonly("pr", &VerificationVerdict::pr)
        .def_readonly("nearest_train_id", &VerificationVerdict::nearest_train_id);

    py::class_<Verifier>(m, "Verifier")
        .def(py::init([](const TrainedArtifacts& art, const TrainingConfig& cfg) {
                 return Verifier(make_registry(art, cfg, "", ""), art.encoder, art.matrix);
             }),
             py::arg("artifacts"), py::arg("config"))
        .def(
            "verify",
            [](const Verifier& v, const std::string& text, const std::string& id,
               LlmClient& client) { return v.verify(text, id, client); },
            py::arg("text"), py::arg("id"), py::arg("client"));

    py::enum_<AttackKind>(m, "AttackKind")
        .value("upper_lower", AttackKind::upper_lower)
        .value("misspelling", AttackKind::misspelling)
        .value("number", AttackKind::number)
        .value("add_paragraph", AttackKind::add_paragraph)
        .value("rewrite", AttackKind::rewrite);

    m.def(
        "perturb",
        [](const std::string& text, AttackKind kind, double rate, std::uint64_t seed) {
            AttackConfig cfg;
            cfg.kind = kind;
            cfg.rate = rate;
            cfg.seed = seed;
            StubRewriteClient rewrite(rate, seed);
            if (kind == AttackKind::rewrite) cfg.rewrite_client = &rewrite;
            return perturb(text, cfg);
        },
        py::arg("text"), py::arg("kind"), py::arg("rate") = 0.30, py::arg("seed") = 0);

    py::class_<MetricsRecord>(m, "MetricsRecord")
        .def_readonly("tp", &MetricsRecord::tp)
        .def_readonly("fp", &MetricsRecord::fp)
        .def_readonly("tn", &MetricsRecord::tn)
        .def_readonly("fn", &MetricsRecord::fn)
        .def_readonly("f1", &MetricsRecord::f1)
        .def_property_readonly("tpr", [](const MetricsRecord& r) { return r.tpr; })
        .def_property_readonly("fpr", [](const MetricsRecord& r) { return r.fpr; });

    py::class_<BenchmarkResult>(m, "BenchmarkResult")
        .def_readonly("metrics", &BenchmarkResult::metrics)
        .def_readonly("report", &BenchmarkResult::report);

    m.def(
        "run_benchmark",
        [](const Corpus& corpus, const TrainingConfig& cfg, LlmClient& client) {
            return run_benchmark(corpus, cfg, client);
        },
        py::arg("corpus"), py::arg("config"), py::arg("client"),
        py::call_guard<py::gil_scoped_release>());
}
