#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mizero/condensation.hpp"
#include "mizero/encoder.hpp"

namespace mizero {

// Learnable projection from the encoder space into watermark logits.
class WatermarkMatrix {
public:
    WatermarkMatrix(int len, int dim, std::uint64_t seed, double init_scale = 0.5);

    const Eigen::MatrixXd& gamma() const { return gamma_; }
    Eigen::MatrixXd& gamma() { return gamma_; }
    int len() const { return static_cast<int>(gamma_.rows()); }
    int dim() const { return static_cast<int>(gamma_.cols()); }

    std::string fingerprint() const;
    void save(const std::string& path) const;
    static WatermarkMatrix load(const std::string& path);

private:
    WatermarkMatrix() = default;
    Eigen::MatrixXd gamma_;
    std::uint64_t seed_ = 0;
};

struct WatermarkVector {
    Eigen::VectorXd w; // entries in (0, 1)
    std::string sample_id;
};

struct WatermarkAnchor {
    Eigen::VectorXd a;         // elementwise mean over pp watermark vectors
    std::vector<uint8_t> bits; // bits[i] = 1 iff a[i] >= 0.5
    int l = 0;                 // contributing pp sample count
    std::string style_id;
    std::string encoder_fingerprint;
    std::string matrix_fingerprint;
};

// w = sigmoid(gamma * e) over an already-encoded condensed-list embedding.
WatermarkVector extract_watermark(const Eigen::VectorXd& encoded, const WatermarkMatrix& matrix,
                                  const std::string& sample_id = "");
WatermarkVector extract_watermark(const CondensedList& c, const Encoder& encoder,
                                  const WatermarkMatrix& matrix);

std::vector<uint8_t> binarize(const Eigen::VectorXd& v); // threshold 0.5

WatermarkAnchor compute_anchor(const std::vector<WatermarkVector>& pp_watermarks);

// (1/l) * sum ||w_i - a||^2
double regularization_penalty(const std::vector<WatermarkVector>& pp_watermarks,
                              const WatermarkAnchor& anchor);

// Mean BCE of protected watermark vectors against the (clamped) real anchor.
// With hard_target the anchor is binarized first, which drives logit margin.
double watermark_bce_loss(const std::vector<WatermarkVector>& protected_watermarks,
                          const WatermarkAnchor& anchor, bool hard_target = false);

int hamming_distance(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b);

double sigmoid(double x);

} // namespace mizero
