#include "mizero/evaluation.hpp"

#include <algorithm>
#include <iostream>
#include <set>

namespace mizero {

MetricsRecord metrics_from_confusion(const ConfusionCounts& c) {
    MetricsRecord m;
    m.tp = c.tp;
    m.fp = c.fp;
    m.tn = c.tn;
    m.fn = c.fn;
    if (c.tp + c.fn > 0) m.tpr = static_cast<double>(c.tp) / (c.tp + c.fn);
    if (c.fp + c.tn > 0) m.fpr = static_cast<double>(c.fp) / (c.fp + c.tn);
    int denom = 2 * c.tp + c.fp + c.fn;
    m.f1 = denom > 0 ? 2.0 * c.tp / denom : 0.0;
    return m;
}

MetricsRecord compute_metrics(const std::vector<VerificationVerdict>& verdicts,
                              const std::vector<bool>& labels) {
    if (verdicts.size() != labels.size())
        throw ContractError("compute_metrics: verdicts and labels misaligned");
    ConfusionCounts c;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        if (verdicts[i].pr == 1)
            (labels[i] ? c.tp : c.fp)++;
        else
            (labels[i] ? c.fn : c.tn)++;
    }
    return metrics_from_confusion(c);
}

SweepPoint threshold_sweep(const std::vector<double>& match_probabilities,
                           const std::vector<bool>& labels, double fpr_cap) {
    if (fpr_cap <= 0.0 || fpr_cap >= 1.0)
        throw ContractError("threshold_sweep: fpr_cap must lie in (0, 1)");
    if (match_probabilities.size() != labels.size() || match_probabilities.empty())
        throw ContractError("threshold_sweep: scores and labels misaligned");

    auto eval_at = [&](double t) {
        ConfusionCounts c;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            bool positive = match_probabilities[i] >= t;
            if (positive)
                (labels[i] ? c.tp : c.fp)++;
            else
                (labels[i] ? c.fn : c.tn)++;
        }
        return metrics_from_confusion(c);
    };

    std::set<double> cuts(match_probabilities.begin(), match_probabilities.end());
    cuts.insert(*cuts.rbegin() + 1.0); // predict-nothing sentinel

    // lowest threshold (highest TPR) still respecting the cap
    std::optional<SweepPoint> best;
    for (double t : cuts) {
        MetricsRecord m = eval_at(t);
        bool ok = !m.fpr.has_value() || *m.fpr <= fpr_cap;
        if (ok && (!best || t < best->threshold)) best = SweepPoint{t, m, false};
    }
    if (best) return *best;
    SweepPoint strict{*cuts.rbegin(), eval_at(*cuts.rbegin()), true};
    return strict;
}

BenchmarkResult run_benchmark(const Corpus& corpus, const TrainingConfig& config,
                              LlmClient& client, CondenseCache* cache,
                              std::optional<int> epsilon_override) {
    TrainedArtifacts art = train(corpus, config, client, cache);
    Registry reg = make_registry(art, config, "", "");
    Verifier verifier(reg, art.encoder, art.matrix);

    auto test = corpus.subset(Split::test);
    BatchVerifyResult bv = verifier.batch_verify(test, client, cache, epsilon_override);

    BenchmarkResult out;
    out.report = art.report;
    out.metrics = metrics_from_confusion(bv.confusion);
    out.metrics.metadata = {{"num", config.num},
                            {"len", config.len},
                            {"seed", config.seed},
                            {"ablation", to_string(config.ablation)},
                            {"failed_samples", bv.failures.size()}};
    std::size_t vi = 0;
    std::set<std::string> failed;
    for (const auto& [id, err] : bv.failures) failed.insert(id);
    for (const auto* s : test) {
        if (failed.count(s->id)) continue;
        out.labels.push_back(s->label == Label::protected_style);
        out.verdicts.push_back(bv.verdicts[vi++]);
    }
    return out;
}

std::vector<BitLengthPoint> bit_length_study(const Corpus& corpus, std::vector<int> lens,
                                             TrainingConfig config, LlmClient& client,
                                             CondenseCache* cache) {
    std::sort(lens.begin(), lens.end());
    lens.erase(std::unique(lens.begin(), lens.end()), lens.end());
    if (lens.size() < 2) throw ContractError("bit_length_study: need at least 2 lengths");
    std::vector<BitLengthPoint> out;
    for (int len : lens) {
        BitLengthPoint pt;
        pt.len = len;
        try {
            config.len = len;
            pt.metrics = run_benchmark(corpus, config, client, cache).metrics;
        } catch (const MizeroError& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

std::vector<SampleSizePoint> sample_size_study(const Corpus& corpus, std::vector<int> nums,
                                               TrainingConfig config, LlmClient& client,
                                               CondenseCache* cache) {
    std::vector<int> uniq;
    for (int n : nums)
        if (std::find(uniq.begin(), uniq.end(), n) == uniq.end())
            uniq.push_back(n);
        else
            std::clog << "[mizero] duplicate num " << n << " in sweep, skipping\n";
    if (uniq.size() < 2) throw ContractError("sample_size_study: need at least 2 sizes");
    std::vector<SampleSizePoint> out;
    for (int n : uniq) {
        SampleSizePoint pt;
        pt.num = n;
        pt.decline_region = n >= 50;
        try {
            config.num = n;
            pt.metrics = run_benchmark(corpus, config, client, cache).metrics;
        } catch (const MizeroError& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

} // namespace mizero
