#include "mizero/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <unordered_map>

namespace mizero {

std::string to_string(Ablation a) {
    switch (a) {
        case Ablation::none: return "none";
        case Ablation::drop_lcon: return "-L_con";
        case Ablation::drop_lo: return "-L_o";
        case Ablation::drop_condensation: return "-C";
        case Ablation::freeze_alpha: return "freeze_alpha";
        default: return "-q_p";
    }
}

Ablation ablation_from_string(const std::string& s) {
    if (s == "none") return Ablation::none;
    if (s == "-L_con" || s == "drop_lcon") return Ablation::drop_lcon;
    if (s == "-L_o" || s == "drop_lo") return Ablation::drop_lo;
    if (s == "-C" || s == "drop_c") return Ablation::drop_condensation;
    if (s == "freeze_alpha" || s == "froze_alpha") return Ablation::freeze_alpha;
    if (s == "-q_p" || s == "drop_qp") return Ablation::drop_qp;
    throw ContractError("unknown ablation id: " + s);
}

void TrainingConfig::validate() const {
    if (epochs < 1 || episodes < 1) throw ContractError("config: epochs and episodes must be >= 1");
    if (num < 2) throw ContractError("config: num must be >= 2");
    if (len < 8) throw ContractError("config: len must be >= 8");
    if (lr_encoder_start <= 0 || lr_encoder_floor <= 0 || lr_matrix <= 0)
        throw ContractError("config: learning rates must be positive");
    if (lr_encoder_floor > lr_encoder_start)
        throw ContractError("config: encoder lr schedule must be non-increasing");
    if (margin_m <= 0) throw ContractError("config: margin must be positive");
}

std::vector<double> TrainingReport::lo_curve() const {
    std::vector<double> curve;
    int cur_epoch = -1;
    double sum = 0.0;
    int n = 0;
    for (const auto& r : records) {
        if (r.epoch != cur_epoch) {
            if (n > 0) curve.push_back(sum / n);
            cur_epoch = r.epoch;
            sum = 0.0;
            n = 0;
        }
        sum += r.l_o;
        ++n;
    }
    if (n > 0) curve.push_back(sum / n);
    return curve;
}

AdamW::AdamW(double beta1, double beta2, double eps, double weight_decay)
    : beta1_(beta1), beta2_(beta2), eps_(eps), weight_decay_(weight_decay) {}

std::vector<Eigen::MatrixXd> AdamW::step(const std::vector<Eigen::MatrixXd>& grads,
                                         const std::vector<Eigen::MatrixXd>& params) {
    if (m_.empty()) {
        for (const auto& g : grads) {
            m_.push_back(Eigen::MatrixXd::Zero(g.rows(), g.cols()));
            v_.push_back(Eigen::MatrixXd::Zero(g.rows(), g.cols()));
        }
    }
    ++t_;
    std::vector<Eigen::MatrixXd> dir;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < grads.size(); ++k) {
        m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grads[k];
        v_[k] = beta2_ * v_[k].array().matrix() +
                (1.0 - beta2_) * grads[k].array().square().matrix();
        Eigen::ArrayXXd mhat = m_[k].array() / bc1;
        Eigen::ArrayXXd vhat = v_[k].array() / bc2;
        Eigen::MatrixXd d = (mhat / (vhat.sqrt() + eps_)).matrix();
        if (weight_decay_ > 0) d += weight_decay_ * params[k];
        dir.push_back(std::move(d));
    }
    return dir;
}

double cosine_decay_lr(double start, double floor, long step, long total_steps) {
    if (total_steps <= 1) return start;
    double frac = static_cast<double>(std::min(step, total_steps - 1)) /
                  static_cast<double>(total_steps - 1);
    return floor + 0.5 * (start - floor) * (1.0 + std::cos(std::numbers::pi * frac));
}

namespace {

constexpr double kClamp = 1e-7;

struct EpisodeData {
    std::vector<StyleSample> samples; // protected first, then unprotected
    std::size_t n_protected = 0;
    bool is_protected(std::size_t i) const { return i < n_protected; }
};

struct ForwardState {
    std::vector<Encoder::Trace> raw_traces;
    std::vector<FeatureVector> raw_feats;
    std::vector<NeighborAssignment> assignments;
    PairSets pairs;
    std::vector<CondensedList> condensed; // empty when condensation is ablated
    std::vector<Encoder::Trace> cond_traces;
    std::vector<Eigen::VectorXd> cond_embeds;
    std::vector<WatermarkVector> watermarks;   // per sample
    std::vector<std::size_t> pp_indices;       // sample index of each pp entry
    std::vector<WatermarkVector> pp_watermarks;
    std::vector<WatermarkVector> protected_watermarks;
    WatermarkAnchor anchor;
    std::unordered_map<std::string, std::size_t> index_of;
};

EpisodeData draw_episode(const Corpus& corpus, const TrainingConfig& cfg, std::uint64_t seed) {
    auto [tp, tn] = sample_episode(corpus, static_cast<std::size_t>(cfg.num), seed);
    EpisodeData ep;
    ep.n_protected = tp.size();
    ep.samples = std::move(tp);
    ep.samples.insert(ep.samples.end(), tn.begin(), tn.end());
    return ep;
}

// Runs the full episode pipeline: encode, delimit, condense, extract.
// Returns false when the episode is degenerate (empty pp).
bool episode_forward(const EpisodeData& ep, const TrainingConfig& cfg, const Encoder& encoder,
                     const WatermarkMatrix& matrix, LlmClient& client, CondenseCache* cache,
                     std::unordered_map<std::uint64_t, CondensedList>& memo, ForwardState& st) {
    st = ForwardState{};
    const std::size_t n = ep.samples.size();
    std::vector<FeatureVector> P, N;
    for (std::size_t i = 0; i < n; ++i) {
        st.raw_traces.push_back(encoder.encode_traced(ep.samples[i].text));
        FeatureVector fv{st.raw_traces.back().e, ep.samples[i].id};
        st.raw_feats.push_back(fv);
        (ep.is_protected(i) ? P : N).push_back(fv);
        st.index_of[ep.samples[i].id] = i;
    }
    st.assignments = assign_neighbors(P, N);
    st.pairs = build_pair_sets(st.assignments, cfg.sigma);
    if (st.pairs.pp.empty()) return false;

    std::unordered_map<std::string, std::string> partner_of;
    for (const auto& [x, y] : st.pairs.pp) partner_of[x] = y;

    const bool drop_c = cfg.ablation == Ablation::drop_condensation;
    const bool drop_qp = cfg.ablation == Ablation::drop_qp;

    for (std::size_t i = 0; i < n; ++i) {
        if (drop_c) {
            st.cond_traces.push_back(st.raw_traces[i]);
            st.cond_embeds.push_back(st.raw_traces[i].e);
            continue;
        }
        const auto& s = ep.samples[i];
        auto pit = partner_of.find(s.id);
        std::string prompt;
        if (pit != partner_of.end() && !drop_qp) {
            const StyleSample& partner = ep.samples[st.index_of.at(pit->second)];
            prompt = build_prompt(s, &partner, PromptKind::q_p);
        } else {
            prompt = build_prompt(s, nullptr, PromptKind::q_n);
        }
        std::uint64_t key = fnv1a(prompt.data(), prompt.size());
        auto mit = memo.find(key);
        if (mit == memo.end()) {
            CondensedList cl = condense(prompt, s.id, client, cache);
            mit = memo.emplace(key, std::move(cl)).first;
        }
        CondensedList cl = mit->second;
        cl.sample_id = s.id;
        st.condensed.push_back(cl);
        st.cond_traces.push_back(encoder.encode_traced(cl.joined()));
        st.cond_embeds.push_back(st.cond_traces.back().e);
    }

    for (std::size_t i = 0; i < n; ++i) {
        st.watermarks.push_back(extract_watermark(st.cond_embeds[i], matrix, ep.samples[i].id));
        if (ep.is_protected(i)) st.protected_watermarks.push_back(st.watermarks.back());
    }
    for (const auto& [x, y] : st.pairs.pp) {
        std::size_t i = st.index_of.at(x);
        st.pp_indices.push_back(i);
        st.pp_watermarks.push_back(st.watermarks[i]);
    }
    st.anchor = compute_anchor(st.pp_watermarks);
    return true;
}

struct LossBundle {
    double l_ce_soft = 0.0;
    double l_con = 0.0;
    double l_w = 0.0;
    double l_o = 0.0;
    double hard_ce = 0.0;
    double total = 0.0;
};

LossBundle compute_losses(const EpisodeData& ep, const TrainingConfig& cfg,
                          const ForwardState& st) {
    LossBundle lb;
    const std::size_t n = ep.samples.size();
    const double tau = cfg.soft_ce_temperature;

    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = st.assignments[i];
        double p = sigmoid((a.d_best_protected - a.d_best_unprotected) / tau);
        p = std::clamp(p, kClamp, 1.0 - kClamp);
        lb.l_ce_soft += ep.is_protected(i) ? -std::log(p) : -std::log(1.0 - p);
    }
    lb.l_ce_soft /= static_cast<double>(n);

    std::map<std::string, int> gt;
    for (std::size_t i = 0; i < n; ++i) gt[ep.samples[i].id] = ep.is_protected(i) ? 1 : 0;
    lb.hard_ce = cross_entropy_loss(st.assignments, gt);

    if (cfg.ablation != Ablation::drop_lcon) {
        std::vector<FeatureVector> P(st.raw_feats.begin(),
                                     st.raw_feats.begin() + static_cast<long>(ep.n_protected));
        std::vector<FeatureVector> N(st.raw_feats.begin() + static_cast<long>(ep.n_protected),
                                     st.raw_feats.end());
        lb.l_con = contrastive_loss(P, N, cfg.margin_m);
    }
    lb.l_w = watermark_bce_loss(st.protected_watermarks, st.anchor, cfg.bce_hard_target);
    if (cfg.ablation != Ablation::drop_lo)
        lb.l_o = regularization_penalty(st.pp_watermarks, st.anchor);
    lb.total = lb.l_ce_soft + lb.l_con + lb.l_w + lb.l_o;
    return lb;
}

void episode_backward(const EpisodeData& ep, const TrainingConfig& cfg, const Encoder& encoder,
                      const WatermarkMatrix& matrix, const ForwardState& st,
                      std::vector<Eigen::MatrixXd>& enc_grads, Eigen::MatrixXd& mat_grad) {
    const std::size_t n = ep.samples.size();
    const int dim = encoder.config().dim;
    const double tau = cfg.soft_ce_temperature;
    const bool drop_c = cfg.ablation == Ablation::drop_condensation;

    std::vector<Eigen::VectorXd> de_raw(n, Eigen::VectorXd::Zero(dim));
    std::vector<Eigen::VectorXd> de_cond(n, Eigen::VectorXd::Zero(dim));

    // soft pseudo-label cross entropy
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = st.assignments[i];
        double p = sigmoid((a.d_best_protected - a.d_best_unprotected) / tau);
        double y = ep.is_protected(i) ? 1.0 : 0.0;
        double coef = (p - y) / (tau * static_cast<double>(n));
        std::size_t bp = st.index_of.at(a.best_protected_id);
        std::size_t bn = st.index_of.at(a.best_unprotected_id);
        const auto& ei = st.raw_feats[i].values;
        de_raw[i] += coef * (st.raw_feats[bp].values - st.raw_feats[bn].values);
        de_raw[bp] += coef * ei;
        de_raw[bn] -= coef * ei;
    }

    // contrastive loss
    if (cfg.ablation != Ablation::drop_lcon) {
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < ep.n_protected; ++i)
            for (std::size_t j = i + 1; j < ep.n_protected; ++j) {
                Eigen::VectorXd diff = st.raw_feats[i].values - st.raw_feats[j].values;
                de_raw[i] += 2.0 * inv * diff;
                de_raw[j] -= 2.0 * inv * diff;
            }
        for (std::size_t i = ep.n_protected; i < n; ++i)
            for (std::size_t j = 0; j < ep.n_protected; ++j) {
                Eigen::VectorXd diff = st.raw_feats[i].values - st.raw_feats[j].values;
                if (cfg.margin_m - diff.squaredNorm() > 0) {
                    de_raw[i] -= 2.0 * inv * diff;
                    de_raw[j] += 2.0 * inv * diff;
                }
            }
    }

    // watermark losses -> logits
    const int len = matrix.len();
    std::vector<Eigen::VectorXd> du(n, Eigen::VectorXd::Zero(len));
    const double n_prot_terms =
        static_cast<double>(st.protected_watermarks.size()) * static_cast<double>(len);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd& w = st.watermarks[i].w;
        if (ep.is_protected(i) && n_prot_terms > 0) {
            Eigen::VectorXd target = st.anchor.a.unaryExpr([&](double t) {
                if (cfg.bce_hard_target) t = t >= 0.5 ? 1.0 : 0.0;
                return std::clamp(t, kClamp, 1.0 - kClamp);
            });
            du[i] += (w - target) / n_prot_terms;
        }
    }
    if (cfg.ablation != Ablation::drop_lo) {
        const double l = static_cast<double>(st.pp_watermarks.size());
        for (std::size_t k = 0; k < st.pp_indices.size(); ++k) {
            std::size_t i = st.pp_indices[k];
            const Eigen::VectorXd& w = st.watermarks[i].w;
            Eigen::VectorXd dw = (2.0 / l) * (w - st.anchor.a);
            du[i] += (dw.array() * w.array() * (1.0 - w.array())).matrix();
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (du[i].isZero(0)) continue;
        mat_grad += du[i] * st.cond_embeds[i].transpose();
        de_cond[i] += matrix.gamma().transpose() * du[i];
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (drop_c) {
            // condensed embedding is the raw embedding; merge the paths
            Eigen::VectorXd de = de_raw[i] + de_cond[i];
            if (!de.isZero(0)) encoder.accumulate_grad(st.raw_traces[i], de, enc_grads);
        } else {
            if (!de_raw[i].isZero(0))
                encoder.accumulate_grad(st.raw_traces[i], de_raw[i], enc_grads);
            if (!de_cond[i].isZero(0))
                encoder.accumulate_grad(st.cond_traces[i], de_cond[i], enc_grads);
        }
    }
}

} // namespace

TrainedArtifacts train(const Corpus& corpus, const TrainingConfig& config, LlmClient& client,
                       CondenseCache* cache) {
    config.validate();
    auto t0 = std::chrono::steady_clock::now();

    EncoderConfig ecfg = config.encoder;
    Encoder encoder(ecfg);
    WatermarkMatrix matrix(config.len, ecfg.dim, config.seed + 1, config.matrix_init_scale);

    std::vector<EpisodeData> episodes;
    std::vector<std::uint64_t> episode_seeds;
    for (int r = 0; r < config.episodes; ++r) {
        std::uint64_t s = config.seed + 7919ULL * static_cast<std::uint64_t>(r + 1);
        episode_seeds.push_back(s);
        episodes.push_back(draw_episode(corpus, config, s));
    }

    AdamW enc_opt(0.9, 0.999, 1e-8, config.weight_decay);
    AdamW mat_opt(0.9, 0.999, 1e-8, config.weight_decay);
    std::unordered_map<std::uint64_t, CondensedList> memo;

    const bool update_encoder =
        encoder.trainable() && config.ablation != Ablation::freeze_alpha;
    const long total_steps = static_cast<long>(config.epochs) * config.episodes;
    long step = 0;

    TrainingReport report;
    report.ablation = to_string(config.ablation);
    ForwardState st;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        for (int r = 0; r < config.episodes; ++r) {
            int resamples = 0;
            while (!episode_forward(episodes[static_cast<std::size_t>(r)], config, encoder,
                                    matrix, client, cache, memo, st)) {
                if (++resamples > 8)
                    throw DegenerateEpisodeError(
                        "episode " + std::to_string(r) +
                        " keeps producing an empty positive-pair set");
                std::clog << "[mizero] degenerate episode " << r << ", resampling\n";
                episode_seeds[static_cast<std::size_t>(r)] += 1000003ULL;
                episodes[static_cast<std::size_t>(r)] =
                    draw_episode(corpus, config, episode_seeds[static_cast<std::size_t>(r)]);
            }
            const auto& ep = episodes[static_cast<std::size_t>(r)];
            LossBundle lb = compute_losses(ep, config, st);

            auto enc_grads = encoder.zero_grads();
            Eigen::MatrixXd mat_grad = Eigen::MatrixXd::Zero(matrix.len(), matrix.dim());
            episode_backward(ep, config, encoder, matrix, st, enc_grads, mat_grad);

            if (update_encoder) {
                auto dir = enc_opt.step(enc_grads, encoder.parameters());
                encoder.apply_gradient_update(
                    dir, cosine_decay_lr(config.lr_encoder_start, config.lr_encoder_floor, step,
                                         total_steps));
            }
            {
                std::vector<Eigen::MatrixXd> params{matrix.gamma()};
                auto dir = mat_opt.step({mat_grad}, params);
                matrix.gamma() -= config.lr_matrix * dir[0];
            }
            ++step;

            EpisodeRecord rec;
            rec.epoch = epoch;
            rec.episode = r;
            rec.l_ce = lb.l_ce_soft;
            rec.l_con = lb.l_con;
            rec.l_w = lb.l_w;
            rec.l_o = lb.l_o;
            rec.l_total = lb.total;
            rec.hard_ce = lb.hard_ce;
            rec.pp_size = static_cast<int>(st.pairs.pp.size());
            rec.neg_size = static_cast<int>(st.pairs.neg.size());
            report.records.push_back(rec);
        }
    }

    // Freeze the anchor with the final parameters on the last episode.
    const auto& last = episodes.back();
    if (!episode_forward(last, config, encoder, matrix, client, cache, memo, st))
        throw DegenerateEpisodeError("final forward pass produced an empty positive-pair set");

    TrainedArtifacts art;
    art.anchor = st.anchor;
    art.anchor.style_id = corpus.style_id();
    art.anchor.encoder_fingerprint = encoder.fingerprint();
    art.anchor.matrix_fingerprint = matrix.fingerprint();
    art.final_pairs = st.pairs;
    art.snapshot_samples = last.samples;
    art.snapshot_features = st.raw_feats;
    art.encoder = std::make_shared<Encoder>(std::move(encoder));
    art.matrix = std::make_shared<WatermarkMatrix>(std::move(matrix));
    if (cache) {
        report.cache_hits = cache->hits();
        report.cache_misses = cache->misses();
    }
    report.elapsed_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    art.report = std::move(report);
    return art;
}

TrainedArtifacts ablate(const Corpus& corpus, TrainingConfig config, Ablation drop,
                        LlmClient& client, CondenseCache* cache) {
    if (drop == Ablation::none) throw ContractError("ablate: specify a component to drop");
    config.ablation = drop;
    return train(corpus, config, client, cache);
}

} // namespace mizero
