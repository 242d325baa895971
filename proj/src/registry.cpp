#include "mizero/registry.hpp"

#include <cmath>
#include <fstream>

namespace mizero {

using nlohmann::json;

int default_epsilon(int len) {
    return static_cast<int>(std::ceil(0.01 * static_cast<double>(len)));
}

void Registry::save(const std::string& path) const {
    json j;
    j["style_id"] = style_id;
    j["len"] = len;
    j["anchor"] = std::vector<double>(anchor.data(), anchor.data() + anchor.size());
    j["bits"] = bits;
    j["epsilon"] = epsilon;
    j["sigma"] = sigma;
    j["encoder_fingerprint"] = encoder_fingerprint;
    j["matrix_fingerprint"] = matrix_fingerprint;
    j["encoder_path"] = encoder_path;
    j["matrix_path"] = matrix_path;
    j["condensation_enabled"] = condensation_enabled;
    j["qp_enabled"] = qp_enabled;
    j["training_manifest"] = training_manifest;
    json snap = json::array();
    for (std::size_t i = 0; i < snapshot_samples.size(); ++i) {
        const auto& s = snapshot_samples[i];
        const auto& f = snapshot_features[i];
        snap.push_back({{"id", s.id},
                        {"text", s.text},
                        {"label", to_string(s.label)},
                        {"source_model", s.source_model},
                        {"split", to_string(s.split)},
                        {"feature", std::vector<double>(f.data(), f.data() + f.size())}});
    }
    j["snapshot"] = std::move(snap);
    std::ofstream out(path);
    if (!out) throw MizeroError("cannot write registry: " + path);
    out << j.dump(2) << "\n";
}

Registry Registry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open registry: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("registry parse: ") + e.what());
    }
    Registry r;
    r.style_id = j.at("style_id").get<std::string>();
    r.len = j.at("len").get<int>();
    auto av = j.at("anchor").get<std::vector<double>>();
    r.anchor = Eigen::Map<Eigen::VectorXd>(av.data(), static_cast<Eigen::Index>(av.size()));
    r.bits = j.at("bits").get<std::vector<uint8_t>>();
    r.epsilon = j.at("epsilon").get<int>();
    r.sigma = j.at("sigma").get<double>();
    r.encoder_fingerprint = j.at("encoder_fingerprint").get<std::string>();
    r.matrix_fingerprint = j.at("matrix_fingerprint").get<std::string>();
    r.encoder_path = j.at("encoder_path").get<std::string>();
    r.matrix_path = j.at("matrix_path").get<std::string>();
    r.condensation_enabled = j.value("condensation_enabled", true);
    r.qp_enabled = j.value("qp_enabled", true);
    r.training_manifest = j.value("training_manifest", json::object());
    for (const auto& rec : j.at("snapshot")) {
        StyleSample s;
        s.id = rec.at("id").get<std::string>();
        s.text = rec.at("text").get<std::string>();
        s.label = label_from_string(rec.at("label").get<std::string>());
        s.source_model = rec.value("source_model", "");
        s.split = split_from_string(rec.at("split").get<std::string>());
        r.snapshot_samples.push_back(std::move(s));
        auto fv = rec.at("feature").get<std::vector<double>>();
        r.snapshot_features.push_back(
            Eigen::Map<Eigen::VectorXd>(fv.data(), static_cast<Eigen::Index>(fv.size())));
    }
    if (r.bits.size() != static_cast<std::size_t>(r.len) ||
        r.anchor.size() != static_cast<Eigen::Index>(r.len))
        throw ParseError("registry: anchor/bits length disagrees with len");
    return r;
}

Registry make_registry(const TrainedArtifacts& artifacts, const TrainingConfig& config,
                       const std::string& encoder_path, const std::string& matrix_path) {
    Registry r;
    r.style_id = artifacts.anchor.style_id;
    r.len = config.len;
    r.anchor = artifacts.anchor.a;
    r.bits = artifacts.anchor.bits;
    r.epsilon = default_epsilon(config.len);
    r.sigma = config.sigma;
    r.encoder_fingerprint = artifacts.anchor.encoder_fingerprint;
    r.matrix_fingerprint = artifacts.anchor.matrix_fingerprint;
    r.encoder_path = encoder_path;
    r.matrix_path = matrix_path;
    r.condensation_enabled = config.ablation != Ablation::drop_condensation;
    r.qp_enabled = config.ablation != Ablation::drop_qp;
    for (std::size_t i = 0; i < artifacts.snapshot_samples.size(); ++i) {
        r.snapshot_samples.push_back(artifacts.snapshot_samples[i]);
        r.snapshot_features.push_back(artifacts.snapshot_features[i].values);
    }
    json manifest;
    manifest["epochs"] = config.epochs;
    manifest["episodes"] = config.episodes;
    manifest["num"] = config.num;
    manifest["len"] = config.len;
    manifest["sigma"] = config.sigma;
    manifest["margin_m"] = config.margin_m;
    manifest["seed"] = config.seed;
    manifest["ablation"] = to_string(config.ablation);
    manifest["encoder_backend"] = to_string(config.encoder.backend);
    manifest["encoder_dim"] = config.encoder.dim;
    manifest["encoder_la"] = config.encoder.la;
    r.training_manifest = std::move(manifest);
    return r;
}

} // namespace mizero
