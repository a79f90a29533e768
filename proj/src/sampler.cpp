#include "homeadv/sampler.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace homeadv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxDeltaH = 1000.0;

double log_sum_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Log density and gradient, with any failure mapped to -inf.
double safe_eval(const LogDensity& target, const std::vector<double>& q, std::vector<double>& grad) {
    for (double v : q)
        if (!std::isfinite(v)) return -kInf;
    double lp;
    try {
        lp = target.log_density_gradient(q, grad);
    } catch (const std::domain_error&) {
        return -kInf;
    }
    if (!std::isfinite(lp)) return -kInf;
    for (double g : grad)
        if (!std::isfinite(g)) return -kInf;
    return lp;
}

struct PhasePoint {
    std::vector<double> q;
    std::vector<double> p;
    std::vector<double> grad;
    double log_density = 0.0;
};

// Dual averaging of the log step size toward a target acceptance statistic.
class StepSizeAdapter {
public:
    explicit StepSizeAdapter(double delta) : delta_(delta) {}

    void restart(double step_size) {
        mu_ = std::log(10.0 * step_size);
        counter_ = 0.0;
        s_bar_ = 0.0;
        x_bar_ = 0.0;
    }

    double learn(double accept_stat) {
        counter_ += 1.0;
        accept_stat = std::min(accept_stat, 1.0);
        double eta = 1.0 / (counter_ + kT0);
        s_bar_ = (1.0 - eta) * s_bar_ + eta * (delta_ - accept_stat);
        double x = mu_ - s_bar_ * std::sqrt(counter_) / kGamma;
        double x_eta = std::pow(counter_, -kKappa);
        x_bar_ = (1.0 - x_eta) * x_bar_ + x_eta * x;
        return std::exp(x);
    }

    double final_step_size() const { return std::exp(x_bar_); }

private:
    static constexpr double kGamma = 0.05;
    static constexpr double kKappa = 0.75;
    static constexpr double kT0 = 10.0;

    double delta_;
    double mu_ = 0.0;
    double counter_ = 0.0;
    double s_bar_ = 0.0;
    double x_bar_ = 0.0;
};

// Diagonal metric estimated over doubling windows inside the warmup; 15% of
// warmup runs before the first window and 10% after the last.
class MetricAdapter {
public:
    MetricAdapter(std::size_t warmup, std::size_t dim) : warmup_(warmup), mean_(dim), m2_(dim) {
        init_buffer_ = static_cast<std::size_t>(0.15 * static_cast<double>(warmup));
        term_buffer_ = static_cast<std::size_t>(0.10 * static_cast<double>(warmup));
        std::size_t middle = warmup - std::min(warmup, init_buffer_ + term_buffer_);
        window_size_ = std::min<std::size_t>(25, middle);
        enabled_ = middle > 0;
        next_window_ = init_buffer_ + window_size_ - 1;
    }

    // Returns true when `inv_metric` was updated.
    bool learn(const std::vector<double>& q, std::vector<double>& inv_metric) {
        if (!enabled_) return false;
        if (in_window()) add(q);
        if (counter_ == next_window_ && counter_ != warmup_) {
            compute_next_window();
            double n = static_cast<double>(count_);
            for (std::size_t i = 0; i < inv_metric.size(); ++i) {
                double var = count_ > 1 ? m2_[i] / (n - 1.0) : 1.0;
                inv_metric[i] = (n / (n + 5.0)) * var + 1e-3 * (5.0 / (n + 5.0));
            }
            reset();
            ++counter_;
            return true;
        }
        ++counter_;
        return false;
    }

private:
    bool in_window() const {
        return counter_ >= init_buffer_ && counter_ < warmup_ - term_buffer_ && counter_ != warmup_;
    }

    void compute_next_window() {
        std::size_t last = warmup_ - term_buffer_ - 1;
        if (next_window_ == last) return;
        window_size_ *= 2;
        next_window_ = counter_ + window_size_;
        if (next_window_ != last && next_window_ + 2 * window_size_ >= warmup_ - term_buffer_)
            next_window_ = last;
    }

    void add(const std::vector<double>& q) {
        ++count_;
        double n = static_cast<double>(count_);
        for (std::size_t i = 0; i < q.size(); ++i) {
            double delta = q[i] - mean_[i];
            mean_[i] += delta / n;
            m2_[i] += delta * (q[i] - mean_[i]);
        }
    }

    void reset() {
        count_ = 0;
        std::fill(mean_.begin(), mean_.end(), 0.0);
        std::fill(m2_.begin(), m2_.end(), 0.0);
    }

    std::size_t warmup_;
    std::size_t init_buffer_ = 0;
    std::size_t term_buffer_ = 0;
    std::size_t window_size_ = 0;
    std::size_t next_window_ = 0;
    std::size_t counter_ = 0;
    bool enabled_ = false;
    std::size_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

// One chain of the No-U-Turn sampler with multinomial trajectory sampling and
// a diagonal Euclidean metric.
class NutsChain {
public:
    NutsChain(const LogDensity& target, std::mt19937_64& rng, int max_depth)
        : target_(target), rng_(rng), max_depth_(max_depth), inv_metric_(target.dimension(), 1.0) {
        auto n = target.dimension();
        z_.p.assign(n, 0.0);
        z_.grad.assign(n, 0.0);
    }

    void set_position(const std::vector<double>& q) {
        z_.q = q;
        z_.log_density = safe_eval(target_, z_.q, z_.grad);
        if (z_.log_density == -kInf) throw SamplerError("initial point has non-finite log density");
    }

    const std::vector<double>& position() const { return z_.q; }
    std::vector<double>& inv_metric() { return inv_metric_; }
    double step_size() const { return step_size_; }
    void set_step_size(double eps) { step_size_ = eps; }

    // Doubles or halves the step size until one leapfrog step crosses an
    // acceptance probability of 0.8.
    void init_step_size() {
        PhasePoint start = z_;
        auto trial = [&] {
            z_ = start;
            sample_momentum();
            double h0 = hamiltonian(z_);
            leapfrog(z_, step_size_);
            double h = hamiltonian(z_);
            if (std::isnan(h)) h = kInf;
            return h0 - h;
        };
        const double threshold = std::log(0.8);
        int direction = trial() > threshold ? 1 : -1;
        while (true) {
            double delta_h = trial();
            if (direction == 1 && !(delta_h > threshold)) break;
            if (direction == -1 && !(delta_h < threshold)) break;
            step_size_ = direction == 1 ? 2.0 * step_size_ : 0.5 * step_size_;
            if (step_size_ > 1e7) throw SamplerError("step size diverged upward during initialization");
            if (step_size_ == 0.0) throw SamplerError("step size collapsed to zero during initialization");
        }
        z_ = start;
    }

    DrawStats transition() {
        sample_momentum();
        const double h0 = hamiltonian(z_);

        PhasePoint z_fwd = z_;
        PhasePoint z_bck = z_;
        PhasePoint z_sample = z_;
        PhasePoint z_propose = z_;

        auto sharp = [&](const std::vector<double>& p) {
            std::vector<double> out(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) out[i] = inv_metric_[i] * p[i];
            return out;
        };

        std::vector<double> p_fwd_fwd = z_.p;
        std::vector<double> p_sharp_fwd_fwd = sharp(z_.p);
        std::vector<double> p_fwd_bck = z_.p;
        std::vector<double> p_sharp_fwd_bck = p_sharp_fwd_fwd;
        std::vector<double> p_bck_fwd = z_.p;
        std::vector<double> p_sharp_bck_fwd = p_sharp_fwd_fwd;
        std::vector<double> p_bck_bck = z_.p;
        std::vector<double> p_sharp_bck_bck = p_sharp_fwd_fwd;

        std::vector<double> rho = z_.p;
        const std::size_t n = rho.size();
        double log_sum_weight = 0.0;
        int n_leapfrog = 0;
        double sum_metro_prob = 0.0;
        sum_abs_energy_error_ = 0.0;
        divergent_ = false;
        int depth = 0;

        while (depth < max_depth_) {
            std::vector<double> rho_fwd(n, 0.0);
            std::vector<double> rho_bck(n, 0.0);
            bool valid_subtree;
            double log_sum_weight_subtree = -kInf;

            if (uniform_(rng_) > 0.5) {
                z_ = z_fwd;
                rho_bck = rho;
                p_bck_fwd = p_fwd_bck;
                p_sharp_bck_fwd = p_sharp_fwd_bck;
                valid_subtree = build_tree(depth, z_propose, p_sharp_fwd_bck, p_sharp_fwd_fwd, rho_fwd, p_fwd_bck,
                                           p_fwd_fwd, h0, step_size_, n_leapfrog, log_sum_weight_subtree,
                                           sum_metro_prob);
                z_fwd = z_;
            } else {
                z_ = z_bck;
                rho_fwd = rho;
                p_fwd_bck = p_bck_fwd;
                p_sharp_fwd_bck = p_sharp_bck_fwd;
                valid_subtree = build_tree(depth, z_propose, p_sharp_bck_fwd, p_sharp_bck_bck, rho_bck, p_bck_fwd,
                                           p_bck_bck, h0, -step_size_, n_leapfrog, log_sum_weight_subtree,
                                           sum_metro_prob);
                z_bck = z_;
            }
            if (!valid_subtree) break;
            ++depth;

            if (log_sum_weight_subtree > log_sum_weight) {
                z_sample = z_propose;
            } else if (uniform_(rng_) < std::exp(log_sum_weight_subtree - log_sum_weight)) {
                z_sample = z_propose;
            }
            log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);

            for (std::size_t i = 0; i < n; ++i) rho[i] = rho_bck[i] + rho_fwd[i];
            bool persist = criterion(p_sharp_bck_bck, p_sharp_fwd_fwd, rho);
            std::vector<double> rho_ext(n);
            for (std::size_t i = 0; i < n; ++i) rho_ext[i] = rho_bck[i] + p_fwd_bck[i];
            persist = persist && criterion(p_sharp_bck_bck, p_sharp_fwd_bck, rho_ext);
            for (std::size_t i = 0; i < n; ++i) rho_ext[i] = rho_fwd[i] + p_bck_fwd[i];
            persist = persist && criterion(p_sharp_bck_fwd, p_sharp_fwd_fwd, rho_ext);
            if (!persist) break;
        }

        z_ = z_sample;
        DrawStats stats;
        stats.accept_stat = n_leapfrog > 0 ? sum_metro_prob / n_leapfrog : 0.0;
        stats.divergent = divergent_;
        stats.tree_depth = depth;
        stats.n_leapfrog = n_leapfrog;
        stats.energy = hamiltonian(z_);
        stats.energy_error = n_leapfrog > 0 ? sum_abs_energy_error_ / n_leapfrog : 0.0;
        stats.step_size = step_size_;
        return stats;
    }

private:
    static bool criterion(const std::vector<double>& p_sharp_minus, const std::vector<double>& p_sharp_plus,
                          const std::vector<double>& rho) {
        return dot(p_sharp_plus, rho) > 0.0 && dot(p_sharp_minus, rho) > 0.0;
    }

    void sample_momentum() {
        for (std::size_t i = 0; i < z_.p.size(); ++i) z_.p[i] = normal_(rng_) / std::sqrt(inv_metric_[i]);
    }

    double hamiltonian(const PhasePoint& z) const {
        if (z.log_density == -kInf) return kInf;
        double k = 0.0;
        for (std::size_t i = 0; i < z.p.size(); ++i) k += inv_metric_[i] * z.p[i] * z.p[i];
        return -z.log_density + 0.5 * k;
    }

    void leapfrog(PhasePoint& z, double eps) {
        const std::size_t n = z.q.size();
        for (std::size_t i = 0; i < n; ++i) z.p[i] += 0.5 * eps * z.grad[i];
        for (std::size_t i = 0; i < n; ++i) z.q[i] += eps * inv_metric_[i] * z.p[i];
        z.log_density = safe_eval(target_, z.q, z.grad);
        if (z.log_density == -kInf) {
            std::fill(z.grad.begin(), z.grad.end(), 0.0);
            return;
        }
        for (std::size_t i = 0; i < n; ++i) z.p[i] += 0.5 * eps * z.grad[i];
    }

    bool build_tree(int depth, PhasePoint& z_propose, std::vector<double>& p_sharp_beg,
                    std::vector<double>& p_sharp_end, std::vector<double>& rho, std::vector<double>& p_beg,
                    std::vector<double>& p_end, double h0, double eps, int& n_leapfrog, double& log_sum_weight,
                    double& sum_metro_prob) {
        const std::size_t n = rho.size();
        if (depth == 0) {
            leapfrog(z_, eps);
            ++n_leapfrog;
            double h = hamiltonian(z_);
            if (std::isnan(h)) h = kInf;
            if (h - h0 > kMaxDeltaH) divergent_ = true;
            sum_abs_energy_error_ += std::isfinite(h) ? std::abs(h - h0) : kMaxDeltaH;
            log_sum_weight = log_sum_exp(log_sum_weight, h0 - h);
            sum_metro_prob += h0 - h > 0.0 ? 1.0 : std::exp(h0 - h);
            z_propose = z_;
            for (std::size_t i = 0; i < n; ++i) {
                p_sharp_beg[i] = inv_metric_[i] * z_.p[i];
                rho[i] += z_.p[i];
            }
            p_sharp_end = p_sharp_beg;
            p_beg = z_.p;
            p_end = p_beg;
            return !divergent_;
        }

        double log_sum_weight_init = -kInf;
        std::vector<double> p_init_end(n);
        std::vector<double> p_sharp_init_end(n);
        std::vector<double> rho_init(n, 0.0);
        if (!build_tree(depth - 1, z_propose, p_sharp_beg, p_sharp_init_end, rho_init, p_beg, p_init_end, h0, eps,
                        n_leapfrog, log_sum_weight_init, sum_metro_prob))
            return false;

        PhasePoint z_propose_final = z_;
        double log_sum_weight_final = -kInf;
        std::vector<double> p_final_beg(n);
        std::vector<double> p_sharp_final_beg(n);
        std::vector<double> rho_final(n, 0.0);
        if (!build_tree(depth - 1, z_propose_final, p_sharp_final_beg, p_sharp_end, rho_final, p_final_beg, p_end, h0,
                        eps, n_leapfrog, log_sum_weight_final, sum_metro_prob))
            return false;

        double log_sum_weight_subtree = log_sum_exp(log_sum_weight_init, log_sum_weight_final);
        log_sum_weight = log_sum_exp(log_sum_weight, log_sum_weight_subtree);
        if (log_sum_weight_final > log_sum_weight_subtree) {
            z_propose = z_propose_final;
        } else if (uniform_(rng_) < std::exp(log_sum_weight_final - log_sum_weight_subtree)) {
            z_propose = z_propose_final;
        }

        std::vector<double> rho_subtree(n);
        for (std::size_t i = 0; i < n; ++i) {
            rho_subtree[i] = rho_init[i] + rho_final[i];
            rho[i] += rho_subtree[i];
        }
        bool persist = criterion(p_sharp_beg, p_sharp_end, rho_subtree);
        std::vector<double> rho_ext(n);
        for (std::size_t i = 0; i < n; ++i) rho_ext[i] = rho_init[i] + p_final_beg[i];
        persist = persist && criterion(p_sharp_beg, p_sharp_final_beg, rho_ext);
        for (std::size_t i = 0; i < n; ++i) rho_ext[i] = rho_final[i] + p_init_end[i];
        persist = persist && criterion(p_sharp_init_end, p_sharp_end, rho_ext);
        return persist;
    }

    const LogDensity& target_;
    std::mt19937_64& rng_;
    int max_depth_;
    std::vector<double> inv_metric_;
    double step_size_ = 1.0;
    PhasePoint z_;
    bool divergent_ = false;
    double sum_abs_energy_error_ = 0.0;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct ChainOutput {
    Matrix draws;
    std::vector<DrawStats> stats;
    double step_size = 0.0;
    std::vector<double> inv_metric;
};

ChainOutput run_chain(const LogDensity& target, const SamplerConfig& config, std::size_t chain) {
    auto rng = chain_stream(config.seed, chain);
    NutsChain nuts(target, rng, config.max_tree_depth);
    nuts.set_position(initialize_chain(target, rng));
    nuts.init_step_size();

    StepSizeAdapter step_adapter(config.target_accept);
    step_adapter.restart(nuts.step_size());
    MetricAdapter metric_adapter(config.warmup, target.dimension());

    ChainOutput out;
    out.draws = Matrix(config.retained(), target.dimension());
    out.stats.reserve(config.retained());
    std::size_t warmup_divergences = 0;

    for (std::size_t it = 0; it < config.iterations; ++it) {
        DrawStats stats = nuts.transition();
        if (it < config.warmup) {
            if (stats.divergent) ++warmup_divergences;
            nuts.set_step_size(step_adapter.learn(stats.accept_stat));
            if (metric_adapter.learn(nuts.position(), nuts.inv_metric())) {
                nuts.init_step_size();
                step_adapter.restart(nuts.step_size());
            }
            if (it + 1 == config.warmup) {
                if (warmup_divergences == config.warmup)
                    throw SamplerError("every warmup transition diverged in chain " + std::to_string(chain + 1));
                nuts.set_step_size(step_adapter.final_step_size());
            }
            continue;
        }
        const auto& q = nuts.position();
        std::copy(q.begin(), q.end(), out.draws.row(it - config.warmup).begin());
        out.stats.push_back(stats);
    }
    out.step_size = nuts.step_size();
    out.inv_metric = nuts.inv_metric();
    return out;
}

} // namespace

void SamplerConfig::validate() const {
    if (chains < 1) throw std::invalid_argument("chains must be >= 1");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (warmup >= iterations) throw std::invalid_argument("warmup must be smaller than iterations");
    if (!(target_accept > 0.0 && target_accept < 1.0)) throw std::invalid_argument("target_accept must be in (0, 1)");
    if (max_tree_depth < 1) throw std::invalid_argument("max_tree_depth must be >= 1");
}

std::size_t PosteriorDraws::divergences() const {
    std::size_t n = 0;
    for (const auto& chain : stats)
        for (const auto& s : chain) n += s.divergent ? 1 : 0;
    return n;
}

std::vector<std::vector<double>> PosteriorDraws::coordinate(std::size_t index) const {
    std::vector<std::vector<double>> out;
    out.reserve(chains.size());
    for (const auto& c : chains) out.push_back(c.column(index));
    return out;
}

std::mt19937_64 chain_stream(std::uint64_t seed, std::size_t chain) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chain), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

std::vector<double> initialize_chain(const LogDensity& target, std::mt19937_64& rng, int max_attempts) {
    std::uniform_real_distribution<double> init(-2.0, 2.0);
    std::vector<double> q(target.dimension());
    std::vector<double> grad(target.dimension());
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        for (auto& v : q) v = init(rng);
        if (safe_eval(target, q, grad) != -kInf) return q;
    }
    throw SamplerError("could not find a finite initial point after " + std::to_string(max_attempts) + " attempts");
}

PosteriorDraws sample_draws(const LogDensity& target, const SamplerConfig& config, const ChainCallback& on_chain_done) {
    config.validate();
    if (target.dimension() == 0) throw std::invalid_argument("target has dimension 0");

    std::size_t workers = config.threads;
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, config.chains);

    std::vector<ChainOutput> outputs(config.chains);
    std::vector<std::exception_ptr> errors(config.chains);
    std::atomic<std::size_t> next{0};
    std::mutex callback_mutex;

    auto worker = [&] {
        for (std::size_t c = next++; c < config.chains; c = next++) {
            auto start = std::chrono::steady_clock::now();
            try {
                outputs[c] = run_chain(target, config, c);
            } catch (...) {
                errors[c] = std::current_exception();
                continue;
            }
            if (on_chain_done) {
                std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
                std::lock_guard lock(callback_mutex);
                on_chain_done(c, elapsed.count());
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    PosteriorDraws draws;
    for (auto& o : outputs) {
        draws.chains.push_back(std::move(o.draws));
        draws.stats.push_back(std::move(o.stats));
        draws.step_sizes.push_back(o.step_size);
        draws.inv_metric.push_back(std::move(o.inv_metric));
    }
    return draws;
}

std::vector<double> FitResult::constrained_draws(std::size_t index) const {
    const ParameterBlock* block = nullptr;
    for (const auto& b : layout.blocks())
        if (index >= b.offset && index < b.offset + b.size) block = &b;
    if (block == nullptr) throw std::out_of_range("parameter index out of range");
    std::vector<double> out;
    for (const auto& c : draws.chains)
        for (std::size_t r = 0; r < c.rows(); ++r) {
            if (block->noncentered)
                out.push_back(constrain(c.row(r), layout)[index]);
            else
                out.push_back(block->log_scale ? std::exp(c(r, index)) : c(r, index));
        }
    return out;
}

std::vector<double> FitResult::constrained_draws(BlockKind kind, int league, std::size_t component) const {
    const auto& block = layout.at(kind, league);
    if (component >= block.size) throw std::out_of_range("block component out of range");
    return constrained_draws(block.offset + component);
}

std::vector<LeagueInfo> league_info(const std::vector<LeagueDataset>& datasets) {
    std::vector<LeagueInfo> out;
    for (const auto& ds : datasets) out.push_back({ds.league_id, ds.t0, ds.seasons, ds.num_games()});
    return out;
}

FitResult sample(const ModelContext& ctx, const SamplerConfig& config, const ChainCallback& on_chain_done) {
    auto start = std::chrono::steady_clock::now();
    FitResult fit;
    fit.spec = ctx.spec();
    fit.config = config;
    fit.layout = ctx.layout();
    fit.leagues = league_info(ctx.datasets());
    fit.draws = sample_draws(ctx, config, on_chain_done);

    std::vector<Matrix> constrained;
    for (const auto& c : fit.draws.chains) {
        Matrix m(c.rows(), c.cols());
        for (std::size_t r = 0; r < c.rows(); ++r) {
            auto values = constrain(c.row(r), fit.layout);
            std::copy(values.begin(), values.end(), m.row(r).begin());
        }
        constrained.push_back(std::move(m));
    }
    if (constrained.size() >= 2)
        fit.diagnostics = summarize_diagnostics(constrained, fit.layout, fit.draws.divergences());
    else
        fit.diagnostics.divergences = fit.draws.divergences();
    fit.loglik = pointwise_loglik(ctx, fit.draws.chains);
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    fit.wall_seconds = elapsed.count();
    return fit;
}

} // namespace homeadv
