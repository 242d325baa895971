#include "mizero/encoder.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

namespace mizero {

using nlohmann::json;

std::string to_string(EncoderBackend b) {
    switch (b) {
        case EncoderBackend::pretrained_sentence_encoder: return "pretrained_sentence_encoder";
        case EncoderBackend::deterministic_hash_encoder: return "deterministic_hash_encoder";
        default: return "trainable_hash_encoder";
    }
}

EncoderBackend encoder_backend_from_string(const std::string& s) {
    if (s == "pretrained_sentence_encoder") return EncoderBackend::pretrained_sentence_encoder;
    if (s == "deterministic_hash_encoder") return EncoderBackend::deterministic_hash_encoder;
    if (s == "trainable_hash_encoder") return EncoderBackend::trainable_hash_encoder;
    throw ParseError("unknown encoder backend: " + s);
}

double cosine_similarity(const FeatureVector& a, const FeatureVector& b) {
    if (a.values.size() != b.values.size())
        throw ContractError("cosine_similarity: dim mismatch " +
                            std::to_string(a.values.size()) + " vs " +
                            std::to_string(b.values.size()));
    double na = a.values.norm(), nb = b.values.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.values.dot(b.values) / (na * nb);
}

Encoder::Encoder(const EncoderConfig& config) : config_(config) {
    if (config_.dim <= 0 || config_.la < 1)
        throw ContractError("encoder config requires dim > 0 and la >= 1");
    if (config_.backend == EncoderBackend::deterministic_hash_encoder)
        config_.trainable = false;
    if (config_.backend == EncoderBackend::pretrained_sentence_encoder &&
        config_.checkpoint_ref.empty())
        throw ContractError("pretrained_sentence_encoder requires checkpoint_ref");

    std::mt19937_64 rng(config_.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    projection_.resize(config_.dim, kBuckets);
    const double scale = 1.0 / std::sqrt(static_cast<double>(kBuckets));
    for (int r = 0; r < config_.dim; ++r)
        for (int c = 0; c < kBuckets; ++c) projection_(r, c) = gauss(rng) * scale;

    // Head layers start near identity so the frozen backend is close to the
    // raw hash features.
    for (int k = 0; k < config_.la; ++k) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(config_.dim, config_.dim);
        for (int r = 0; r < config_.dim; ++r)
            for (int c = 0; c < config_.dim; ++c) a(r, c) += gauss(rng) * 0.02;
        layers_.push_back(std::move(a));
    }
}

Eigen::VectorXd Encoder::featurize(const std::string& text) const {
    std::uint64_t key = fnv1a(text.data(), text.size());
    auto it = feature_cache_.find(key);
    if (it != feature_cache_.end()) return it->second;

    std::string t = text;
    if (t.size() > config_.max_chars) {
        t.resize(config_.max_chars);
        ++truncations_;
    }
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(kBuckets);
    if (t.size() >= 3) {
        for (std::size_t i = 0; i + 3 <= t.size(); ++i) {
            std::uint64_t h = fnv1a(t.data() + i, 3);
            int bucket = static_cast<int>(h % kBuckets);
            double sign = (h >> 32) & 1 ? 1.0 : -1.0;
            counts[bucket] += sign;
        }
    } else {
        std::uint64_t h = fnv1a(t.data(), t.size());
        counts[static_cast<int>(h % kBuckets)] += 1.0;
    }
    double n = counts.norm();
    if (n > 0) counts /= n;
    Eigen::VectorXd h = projection_ * counts;
    feature_cache_.emplace(key, h);
    return h;
}

Encoder::Trace Encoder::encode_traced(const std::string& text) const {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ContractError("encode: empty text");
    Trace tr;
    tr.truncated = text.size() > config_.max_chars;
    tr.h = featurize(text);
    Eigen::VectorXd cur = tr.h;
    for (const auto& a : layers_) {
        cur = (a * cur).array().tanh().matrix();
        tr.z.push_back(cur);
    }
    double n = cur.norm();
    if (n < 1e-12) {
        cur[0] += 1e-9;
        n = cur.norm();
    }
    tr.e = cur / n;
    return tr;
}

FeatureVector Encoder::encode(const std::string& text, const std::string& source_id) const {
    FeatureVector fv;
    fv.values = encode_traced(text).e;
    fv.source_id = source_id;
    return fv;
}

void Encoder::accumulate_grad(const Trace& trace, const Eigen::VectorXd& de,
                              std::vector<Eigen::MatrixXd>& grads) const {
    const Eigen::VectorXd& z_last = trace.z.back();
    double n = std::max(z_last.norm(), 1e-12);
    // through e = z / ||z||
    Eigen::VectorXd dz = (de - trace.e * trace.e.dot(de)) / n;
    for (int k = static_cast<int>(layers_.size()) - 1; k >= 0; --k) {
        const Eigen::VectorXd& zk = trace.z[static_cast<std::size_t>(k)];
        Eigen::VectorXd dpre = dz.array() * (1.0 - zk.array().square());
        const Eigen::VectorXd& input = k == 0 ? trace.h : trace.z[static_cast<std::size_t>(k - 1)];
        grads[static_cast<std::size_t>(k)] += dpre * input.transpose();
        dz = layers_[static_cast<std::size_t>(k)].transpose() * dpre;
    }
}

std::vector<Eigen::MatrixXd> Encoder::zero_grads() const {
    std::vector<Eigen::MatrixXd> g;
    for (const auto& a : layers_) g.push_back(Eigen::MatrixXd::Zero(a.rows(), a.cols()));
    return g;
}

void Encoder::apply_gradient_update(const std::vector<Eigen::MatrixXd>& grads, double lr) {
    if (!config_.trainable)
        throw ContractError("apply_gradient_update on frozen backend " +
                            to_string(config_.backend));
    if (grads.size() != layers_.size())
        throw ContractError("apply_gradient_update: grad count mismatch");
    for (std::size_t k = 0; k < layers_.size(); ++k) layers_[k] -= lr * grads[k];
}

std::string Encoder::fingerprint() const {
    std::uint64_t h = fnv1a(nullptr, 0);
    std::string meta = to_string(config_.backend) + "/" + std::to_string(config_.dim) + "/" +
                       std::to_string(config_.la) + "/" + std::to_string(config_.seed);
    h = fnv1a(meta.data(), meta.size(), h);
    for (const auto& a : layers_)
        h = fnv1a(a.data(), sizeof(double) * static_cast<std::size_t>(a.size()), h);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void Encoder::save_checkpoint(const std::string& path) const {
    json j;
    j["backend"] = to_string(config_.backend);
    j["dim"] = config_.dim;
    j["la"] = config_.la;
    j["trainable"] = config_.trainable;
    j["seed"] = config_.seed;
    j["max_chars"] = config_.max_chars;
    j["fingerprint"] = fingerprint();
    json params = json::array();
    for (const auto& a : layers_) {
        json rows = json::array();
        for (int r = 0; r < a.rows(); ++r) {
            json row = json::array();
            for (int c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
            rows.push_back(std::move(row));
        }
        params.push_back(std::move(rows));
    }
    j["layers"] = std::move(params);
    std::ofstream out(path);
    if (!out) throw MizeroError("cannot write checkpoint: " + path);
    out << j.dump(2) << "\n";
}

Encoder Encoder::load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("checkpoint parse: ") + e.what());
    }
    EncoderConfig cfg;
    cfg.backend = encoder_backend_from_string(j.at("backend").get<std::string>());
    cfg.dim = j.at("dim").get<int>();
    cfg.la = j.at("la").get<int>();
    cfg.trainable = j.at("trainable").get<bool>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.max_chars = j.value("max_chars", std::size_t{4096});
    cfg.checkpoint_ref = path;
    Encoder enc(cfg);
    const auto& params = j.at("layers");
    if (params.size() != enc.layers_.size())
        throw ParseError("checkpoint layer count mismatch");
    for (std::size_t k = 0; k < enc.layers_.size(); ++k) {
        auto& a = enc.layers_[k];
        for (int r = 0; r < a.rows(); ++r)
            for (int c = 0; c < a.cols(); ++c)
                a(r, c) = params[k][static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                              .get<double>();
    }
    std::string want = j.at("fingerprint").get<std::string>();
    if (enc.fingerprint() != want)
        throw RegistryError("checkpoint fingerprint mismatch: " + path);
    return enc;
}

} // namespace mizero
