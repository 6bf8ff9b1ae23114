#include "dashapp/optimizer.hpp"

#include <cmath>

#include "dashapp/errors.hpp"

namespace dashapp {

VariantConfig VariantConfig::from_theory(Variant variant,
                                         const TheoryParams& tp, int B) {
  VariantConfig c;
  c.variant = variant;
  c.gamma = tp.gamma_max;
  c.a = tp.a;
  c.b = tp.b;
  c.B = B;
  if (tp.p_page) c.p_page = *tp.p_page;
  if (tp.p_mega) c.p_mega = *tp.p_mega;
  if (tp.B_init) c.B_init = static_cast<int>(*tp.B_init);
  if (tp.B_prime) c.B_prime = static_cast<int>(*tp.B_prime);
  return c;
}

Engine::Engine(const Problem& problem, std::vector<Compressor> compressors,
               ParticipationScheme scheme, VariantConfig config,
               std::uint64_t seed, Eigen::VectorXd x0)
    : problem_(&problem),
      compressors_(std::move(compressors)),
      scheme_(std::move(scheme)),
      config_(config),
      seed_(seed) {
  const int n = problem.n_nodes();
  const int dim = problem.dim();
  if (static_cast<int>(compressors_.size()) != n) {
    throw InvalidArgumentError("Engine: need one compressor per node");
  }
  for (const auto& c : compressors_) {
    if (c.dim() != dim) {
      throw DimensionError("Engine: compressor dimension", dim, c.dim());
    }
  }
  if (scheme_.n() != n) {
    throw InvalidArgumentError("Engine: participation scheme n mismatch");
  }
  if (x0.size() != dim) {
    throw DimensionError("Engine: x0", dim, static_cast<int>(x0.size()));
  }
  if (config_.gamma < 0.0) {
    throw InvalidArgumentError("Engine: gamma must be >= 0");
  }
  if (!(config_.a > 0.0) || config_.a > 1.0 || !(config_.b > 0.0) ||
      config_.b > 1.0) {
    throw InvalidArgumentError("Engine: momenta a, b must lie in (0, 1]");
  }
  if (config_.B < 1) throw InvalidArgumentError("Engine: B must be >= 1");
  switch (config_.variant) {
    case Variant::Page:
      if (!(config_.p_page > 0.0) || config_.p_page > 1.0) {
        throw InvalidArgumentError("Engine: p_page must lie in (0, 1]");
      }
      break;
    case Variant::FiniteMvr:
      if (config_.B > problem.m()) {
        throw InvalidArgumentError("Engine: finite-mvr requires B <= m");
      }
      break;
    case Variant::Mvr:
      if (config_.B_init < 1) {
        throw InvalidArgumentError("Engine: B_init must be >= 1");
      }
      break;
    case Variant::SyncMvr:
      if (!(config_.p_mega > 0.0) || config_.p_mega > 1.0) {
        throw InvalidArgumentError("Engine: p_mega must lie in (0, 1]");
      }
      if (config_.B_prime < config_.B) {
        throw InvalidArgumentError("Engine: sync-mvr requires B' >= B");
      }
      if (config_.B_init < 1) {
        throw InvalidArgumentError("Engine: B_init must be >= 1");
      }
      break;
    case Variant::Gradient:
      break;
  }

  state_.x = std::move(x0);
  state_.g.resize(n);
  state_.h.resize(n);
  const bool stochastic_init = (config_.variant == Variant::Mvr ||
                                config_.variant == Variant::SyncMvr);
  for (int i = 0; i < n; ++i) {
    if (stochastic_init) {
      Rng rng = stream_rng(seed_, streams::kInitBatch, 0, i);
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim);
      for (int k = 0; k < config_.B_init; ++k) {
        acc += problem.grad_stochastic_at(i, problem.draw_xi(i, rng),
                                          state_.x);
      }
      state_.h[i] = acc / config_.B_init;
    } else {
      state_.h[i] = problem.grad_full(i, state_.x);
    }
    state_.g[i] = state_.h[i];
  }
  if (config_.variant == Variant::FiniteMvr) {
    state_.h_ij.resize(n);
    for (int i = 0; i < n; ++i) {
      state_.h_ij[i].resize(dim, problem.m());
      for (int j = 0; j < problem.m(); ++j) {
        state_.h_ij[i].col(j) = problem.grad_sample(i, j, state_.x);
      }
    }
  }
  state_.g_server = Eigen::VectorXd::Zero(dim);
  for (const auto& gi : state_.g) state_.g_server += gi;
  state_.g_server /= n;
}

Eigen::VectorXd Engine::compute_k(int node, const Eigen::VectorXd& x_new,
                                  const Eigen::VectorXd& x_old, int coin,
                                  int round) {
  const Problem& pb = *problem_;
  switch (config_.variant) {
    case Variant::Gradient: {
      const Eigen::VectorXd gn = pb.grad_full(node, x_new);
      const Eigen::VectorXd go = pb.grad_full(node, x_old);
      return gn - go - config_.b * (state_.h[node] - go);
    }
    case Variant::Page: {
      if (coin == 1) {
        const Eigen::VectorXd gn = pb.grad_full(node, x_new);
        const Eigen::VectorXd go = pb.grad_full(node, x_old);
        return gn - go -
               (config_.b / config_.p_page) * (state_.h[node] - go);
      }
      Rng rng = stream_rng(seed_, streams::kBatch, round, node);
      Eigen::VectorXd k = Eigen::VectorXd::Zero(pb.dim());
      for (int t = 0; t < config_.B; ++t) {
        const int j = static_cast<int>(rng.uniform_index(pb.m()));
        k += pb.grad_sample(node, j, x_new) - pb.grad_sample(node, j, x_old);
      }
      return k / config_.B;
    }
    case Variant::FiniteMvr: {
      Rng rng = stream_rng(seed_, streams::kBatch, round, node);
      const std::vector<int> batch =
          sample_subset_without_replacement(pb.m(), config_.B, rng);
      Eigen::MatrixXd& rows = state_.h_ij[node];
      const double scale = static_cast<double>(pb.m()) / config_.B;
      Eigen::VectorXd k = Eigen::VectorXd::Zero(pb.dim());
      for (int j : batch) {
        const Eigen::VectorXd gn = pb.grad_sample(node, j, x_new);
        const Eigen::VectorXd go = pb.grad_sample(node, j, x_old);
        const Eigen::VectorXd k_ij =
            scale * (gn - go - config_.b * (rows.col(j) - go));
        rows.col(j) += k_ij / scheme_.p_a();
        k += k_ij;
      }
      return k / pb.m();
    }
    case Variant::Mvr: {
      Rng rng = stream_rng(seed_, streams::kBatch, round, node);
      Eigen::VectorXd sum_new = Eigen::VectorXd::Zero(pb.dim());
      Eigen::VectorXd sum_old = Eigen::VectorXd::Zero(pb.dim());
      for (int t = 0; t < config_.B; ++t) {
        const Xi xi = pb.draw_xi(node, rng);
        sum_new += pb.grad_stochastic_at(node, xi, x_new);
        sum_old += pb.grad_stochastic_at(node, xi, x_old);
      }
      sum_new /= config_.B;
      sum_old /= config_.B;
      return sum_new - sum_old - config_.b * (state_.h[node] - sum_old);
    }
    case Variant::SyncMvr: {
      Rng rng = stream_rng(seed_, streams::kBatch, round, node);
      const int batch = (coin == 1) ? config_.B_prime : config_.B;
      Eigen::VectorXd sum_new = Eigen::VectorXd::Zero(pb.dim());
      Eigen::VectorXd sum_old = Eigen::VectorXd::Zero(pb.dim());
      for (int t = 0; t < batch; ++t) {
        const Xi xi = pb.draw_xi(node, rng);
        sum_new += pb.grad_stochastic_at(node, xi, x_new);
        sum_old += pb.grad_stochastic_at(node, xi, x_old);
      }
      sum_new /= batch;
      sum_old /= batch;
      if (coin == 1) {
        return sum_new - sum_old -
               (config_.b / config_.p_mega) * (state_.h[node] - sum_old);
      }
      return sum_new - sum_old;
    }
  }
  return Eigen::VectorXd::Zero(problem_->dim());
}

void Engine::apply_round(const Mask& mask, int coin) {
  const int n = problem_->n_nodes();
  const int dim = problem_->dim();
  if (static_cast<int>(mask.size()) != n) {
    throw DimensionError("Engine: mask", n, static_cast<int>(mask.size()));
  }
  const int t = state_.round;
  const double pa = scheme_.p_a();
  const Eigen::VectorXd x_old = state_.x;
  const Eigen::VectorXd x_new = state_.x - config_.gamma * state_.g_server;

  // Sync-mvr mega rounds bypass the compressor.
  const bool uncompressed =
      (config_.variant == Variant::SyncMvr && coin == 1);

  Eigen::VectorXd message_sum = Eigen::VectorXd::Zero(dim);
  int participants = 0;
  long long coords = 0;
  for (int i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    ++participants;
    const Eigen::VectorXd k = compute_k(i, x_new, x_old, coin, t);
    const Eigen::VectorXd h_pre = state_.h[i];
    state_.h[i] += k / pa;
    const Eigen::VectorXd u =
        k / pa - (config_.a / pa) * (state_.g[i] - h_pre);
    if (uncompressed) {
      state_.g[i] += u;
      message_sum += u;
      coords += dim;
    } else {
      Rng rng = stream_rng(seed_, streams::kCompress, t, i);
      const CompressedMessage msg = compressors_[i].compress(u, rng);
      msg.add_to(state_.g[i]);
      msg.add_to(message_sum);
      coords += static_cast<long long>(msg.coords_sent());
    }
  }
  state_.g_server += message_sum / n;
  state_.x = x_new;
  state_.round = t + 1;
  state_.last_participants = participants;
  state_.last_coords = coords;
  state_.coords_sent_total += coords;

  if (!state_.x.allFinite() || !state_.g_server.allFinite()) {
    throw DivergenceError(state_.round,
                          "non-finite iterate or server estimator");
  }
}

void Engine::step() {
  const int t = state_.round;
  Mask mask;
  {
    Rng rng = stream_rng(seed_, streams::kParticipation, t, 0);
    mask = scheme_.sample_round(rng);
  }
  int coin = 0;
  if (config_.variant == Variant::Page) {
    Rng rng = stream_rng(seed_, streams::kCoin, t, 0);
    coin = rng.bernoulli(config_.p_page) ? 1 : 0;
  } else if (config_.variant == Variant::SyncMvr) {
    Rng rng = stream_rng(seed_, streams::kCoin, t, 0);
    coin = rng.bernoulli(config_.p_mega) ? 1 : 0;
  }
  apply_round(mask, coin);
}

void Engine::step_forced(const Mask& mask, int coin) {
  apply_round(mask, coin);
}

RunRecord Engine::run(int T, std::optional<double> f_star) {
  if (T < 1) {
    throw InvalidArgumentError("Engine::run: invalid horizon, T must be >= 1");
  }
  RunRecord rec;
  rec.rounds.reserve(T);
  rec.init_coords_total =
      static_cast<long long>(problem_->n_nodes()) * problem_->dim();
  rec.f_star = f_star;
  int hat_round;
  {
    Rng rng = stream_rng(seed_, streams::kOutputDraw, 0, 0);
    hat_round = static_cast<int>(rng.uniform_index(T));
  }
  rec.x_hat_round = hat_round;
  for (int t = 0; t < T; ++t) {
    RoundRow row;
    row.t = t;
    row.f = problem_->value(state_.x);
    const Eigen::VectorXd grad = problem_->grad(state_.x);
    row.grad_norm_sq = grad.squaredNorm();
    if (!std::isfinite(row.f) || !std::isfinite(row.grad_norm_sq)) {
      throw DivergenceError(t, "non-finite objective value");
    }
    if (t == 0 && f_star.has_value()) {
      rec.delta0_estimate = row.f - *f_star;
    }
    if (t == hat_round) rec.x_hat = state_.x;
    step();
    row.coords_sent_cum = state_.coords_sent_total;
    row.participants = state_.last_participants;
    rec.rounds.push_back(row);
  }
  rec.x_final = state_.x;
  rec.f_final = problem_->value(state_.x);
  rec.grad_norm_sq_final = problem_->grad(state_.x).squaredNorm();
  return rec;
}

double Engine::server_aggregate_gap() const {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(problem_->dim());
  for (const auto& gi : state_.g) mean += gi;
  mean /= problem_->n_nodes();
  return (state_.g_server - mean).norm();
}

double Engine::h_consistency_gap() const {
  if (config_.variant != Variant::FiniteMvr) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < problem_->n_nodes(); ++i) {
    const Eigen::VectorXd mean = state_.h_ij[i].rowwise().mean();
    worst = std::max(worst, (state_.h[i] - mean).norm());
  }
  return worst;
}

}  // namespace dashapp
