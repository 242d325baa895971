#include "mizero/watermark.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

namespace mizero {

using nlohmann::json;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

WatermarkMatrix::WatermarkMatrix(int len, int dim, std::uint64_t seed, double init_scale)
    : seed_(seed) {
    if (len <= 0 || dim <= 0) throw ContractError("watermark matrix needs len > 0 and dim > 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, init_scale);
    gamma_.resize(len, dim);
    for (int r = 0; r < len; ++r)
        for (int c = 0; c < dim; ++c) gamma_(r, c) = gauss(rng);
}

std::string WatermarkMatrix::fingerprint() const {
    std::uint64_t h = fnv1a(gamma_.data(), sizeof(double) * static_cast<std::size_t>(gamma_.size()));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void WatermarkMatrix::save(const std::string& path) const {
    json j;
    j["len"] = len();
    j["dim"] = dim();
    j["seed"] = seed_;
    j["fingerprint"] = fingerprint();
    json rows = json::array();
    for (int r = 0; r < gamma_.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < gamma_.cols(); ++c) row.push_back(gamma_(r, c));
        rows.push_back(std::move(row));
    }
    j["gamma"] = std::move(rows);
    std::ofstream out(path);
    if (!out) throw MizeroError("cannot write matrix file: " + path);
    out << j.dump(2) << "\n";
}

WatermarkMatrix WatermarkMatrix::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matrix file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("matrix parse: ") + e.what());
    }
    WatermarkMatrix m;
    m.seed_ = j.at("seed").get<std::uint64_t>();
    int len = j.at("len").get<int>(), dim = j.at("dim").get<int>();
    m.gamma_.resize(len, dim);
    const auto& rows = j.at("gamma");
    for (int r = 0; r < len; ++r)
        for (int c = 0; c < dim; ++c)
            m.gamma_(r, c) =
                rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    if (m.fingerprint() != j.at("fingerprint").get<std::string>())
        throw RegistryError("matrix fingerprint mismatch: " + path);
    return m;
}

WatermarkVector extract_watermark(const Eigen::VectorXd& encoded, const WatermarkMatrix& matrix,
                                  const std::string& sample_id) {
    if (encoded.size() != matrix.dim())
        throw ContractError("extract_watermark: encoder dim " + std::to_string(encoded.size()) +
                            " does not match matrix columns " + std::to_string(matrix.dim()));
    WatermarkVector wv;
    wv.sample_id = sample_id;
    wv.w = (matrix.gamma() * encoded).unaryExpr([](double x) { return sigmoid(x); });
    return wv;
}

WatermarkVector extract_watermark(const CondensedList& c, const Encoder& encoder,
                                  const WatermarkMatrix& matrix) {
    auto fv = encoder.encode(c.joined(), c.sample_id);
    return extract_watermark(fv.values, matrix, c.sample_id);
}

std::vector<uint8_t> binarize(const Eigen::VectorXd& v) {
    std::vector<uint8_t> bits(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) bits[static_cast<std::size_t>(i)] = v[i] >= 0.5;
    return bits;
}

WatermarkAnchor compute_anchor(const std::vector<WatermarkVector>& pp_watermarks) {
    if (pp_watermarks.empty())
        throw DegenerateEpisodeError("compute_anchor: empty positive-pair set");
    WatermarkAnchor anchor;
    anchor.l = static_cast<int>(pp_watermarks.size());
    anchor.a = Eigen::VectorXd::Zero(pp_watermarks.front().w.size());
    for (const auto& wv : pp_watermarks) {
        if (wv.w.size() != anchor.a.size())
            throw ContractError("compute_anchor: inconsistent watermark lengths");
        anchor.a += wv.w;
    }
    anchor.a /= static_cast<double>(anchor.l);
    anchor.bits = binarize(anchor.a);
    return anchor;
}

double regularization_penalty(const std::vector<WatermarkVector>& pp_watermarks,
                              const WatermarkAnchor& anchor) {
    if (pp_watermarks.empty()) throw ContractError("regularization_penalty: empty pp");
    double total = 0.0;
    for (const auto& wv : pp_watermarks) total += (wv.w - anchor.a).squaredNorm();
    return total / static_cast<double>(pp_watermarks.size());
}

double watermark_bce_loss(const std::vector<WatermarkVector>& protected_watermarks,
                          const WatermarkAnchor& anchor, bool hard_target) {
    if (protected_watermarks.empty()) return 0.0;
    constexpr double clamp = 1e-7;
    double total = 0.0;
    std::size_t terms = 0;
    for (const auto& wv : protected_watermarks) {
        if (wv.w.size() != anchor.a.size())
            throw ContractError("watermark_bce_loss: length mismatch");
        for (Eigen::Index i = 0; i < wv.w.size(); ++i) {
            double raw = hard_target ? (anchor.a[i] >= 0.5 ? 1.0 : 0.0) : anchor.a[i];
            double target = std::min(1.0 - clamp, std::max(clamp, raw));
            double p = std::min(1.0 - clamp, std::max(clamp, wv.w[i]));
            total += -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
            ++terms;
        }
    }
    return total / static_cast<double>(terms);
}

int hamming_distance(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
    if (a.size() != b.size())
        throw ContractError("hamming_distance: length mismatch " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != 0) != (b[i] != 0);
    return d;
}

} // namespace mizero
