#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mizero/encoder.hpp"

namespace mizero {

// Nearest-neighbor result for one sample over P ∪ N minus itself.
struct NeighborAssignment {
    std::string x_id;
    std::string y_star_id;
    double d_star = 0.0;
    int pseudo_label = 0; // 1 iff nearest neighbor is protected

    // class-restricted maxima, kept for the soft relaxation used in training
    std::string best_protected_id;
    double d_best_protected = -2.0;
    std::string best_unprotected_id;
    double d_best_unprotected = -2.0;
};

struct PairSets {
    std::vector<std::pair<std::string, std::string>> pp; // (x, optimal partner in P)
    std::vector<std::string> neg;
    double sigma = 0.5;
    double margin_m = 1.0;
};

// Exhaustive argmax over all other samples; ties broken by lowest id.
// P and N are the protected/unprotected feature vectors of one episode.
std::vector<NeighborAssignment> assign_neighbors(const std::vector<FeatureVector>& P,
                                                 const std::vector<FeatureVector>& N);

PairSets build_pair_sets(const std::vector<NeighborAssignment>& assignments, double sigma);

// Hard pseudo-label cross entropy: mean over samples of H(y, y_hat) with the
// pseudo-label probability clamped to [1e-7, 1 - 1e-7].
double cross_entropy_loss(const std::vector<NeighborAssignment>& assignments,
                          const std::map<std::string, int>& ground_truth);

// Contrastive loss over episode embeddings:
//   (1/(2 num)) [ sum over unordered distinct P pairs ||x - x'||^2
//               + sum over (x in N, x'' in P) max(0, m - ||x - x''||^2) ]
double contrastive_loss(const std::vector<FeatureVector>& P, const std::vector<FeatureVector>& N,
                        double margin_m);

constexpr double kProbClamp = 1e-7;

} // namespace mizero
