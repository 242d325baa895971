#include "mizero/delimitation.hpp"

#include <algorithm>
#include <cmath>

namespace mizero {

std::vector<NeighborAssignment> assign_neighbors(const std::vector<FeatureVector>& P,
                                                 const std::vector<FeatureVector>& N) {
    if (P.size() + N.size() < 2) throw CapacityError("assign_neighbors needs >= 2 samples");
    struct Entry {
        const FeatureVector* fv;
        bool is_protected;
    };
    std::vector<Entry> all;
    for (const auto& p : P) all.push_back({&p, true});
    for (const auto& n : N) all.push_back({&n, false});

    std::vector<NeighborAssignment> out;
    out.reserve(all.size());
    for (const auto& x : all) {
        NeighborAssignment a;
        a.x_id = x.fv->source_id;
        double best = -2.0;
        for (const auto& y : all) {
            if (y.fv == x.fv) continue;
            double d = cosine_similarity(*x.fv, *y.fv);
            const std::string& yid = y.fv->source_id;
            bool wins = d > best || (d == best && yid < a.y_star_id);
            if (wins) {
                best = d;
                a.y_star_id = yid;
                a.d_star = d;
                a.pseudo_label = y.is_protected ? 1 : 0;
            }
            if (y.is_protected) {
                if (d > a.d_best_protected ||
                    (d == a.d_best_protected && yid < a.best_protected_id)) {
                    a.d_best_protected = d;
                    a.best_protected_id = yid;
                }
            } else {
                if (d > a.d_best_unprotected ||
                    (d == a.d_best_unprotected && yid < a.best_unprotected_id)) {
                    a.d_best_unprotected = d;
                    a.best_unprotected_id = yid;
                }
            }
        }
        out.push_back(std::move(a));
    }
    return out;
}

PairSets build_pair_sets(const std::vector<NeighborAssignment>& assignments, double sigma) {
    PairSets ps;
    ps.sigma = sigma;
    for (const auto& a : assignments) {
        if (a.pseudo_label == 1 && a.d_star > sigma)
            ps.pp.emplace_back(a.x_id, a.y_star_id);
        else
            ps.neg.push_back(a.x_id);
    }
    return ps;
}

double cross_entropy_loss(const std::vector<NeighborAssignment>& assignments,
                          const std::map<std::string, int>& ground_truth) {
    if (assignments.empty()) throw ContractError("cross_entropy_loss: no assignments");
    double total = 0.0;
    for (const auto& a : assignments) {
        auto it = ground_truth.find(a.x_id);
        if (it == ground_truth.end())
            throw ContractError("cross_entropy_loss: missing label for " + a.x_id);
        int y = it->second;
        double p_hat = a.pseudo_label == 1 ? 1.0 - kProbClamp : kProbClamp;
        total += y == 1 ? -std::log(p_hat) : -std::log(1.0 - p_hat);
    }
    return total / static_cast<double>(assignments.size());
}

double contrastive_loss(const std::vector<FeatureVector>& P, const std::vector<FeatureVector>& N,
                        double margin_m) {
    if (margin_m <= 0) throw ContractError("contrastive_loss: margin must be positive");
    double pull = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = i + 1; j < P.size(); ++j)
            pull += (P[i].values - P[j].values).squaredNorm();
    double push = 0.0;
    for (const auto& n : N)
        for (const auto& p : P)
            push += std::max(0.0, margin_m - (n.values - p.values).squaredNorm());
    double denom = static_cast<double>(P.size() + N.size());
    if (denom == 0) return 0.0;
    return (pull + push) / denom;
}

} // namespace mizero
