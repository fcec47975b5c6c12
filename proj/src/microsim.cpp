#include "herdsim/microsim.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "herdsim/errors.hpp"
#include "herdsim/sde_engine.hpp"

namespace herdsim {

RateTable transition_rates(const MicroState& s, const ModelParams& p) {
    const double Nf = double(s.n_fund), No = double(s.n_opt), Np = double(s.n_pess);
    RateTable r;
    r.f_to_o = Nf * (0.5 * p.eps_fc + No);
    r.f_to_p = Nf * (0.5 * p.eps_fc + Np);
    r.o_to_f = No * (p.eps_cf + Nf);
    r.p_to_f = Np * (p.eps_cf + Nf);
    r.o_to_p = No * p.freq_ratio * (p.eps_cc + Np);
    r.p_to_o = Np * p.freq_ratio * (p.eps_cc + No);
    return r;
}

double activity_factor(const MicroState& s, const ModelParams& p) {
    const double nf = std::max(double(s.n_fund), 0.5) / double(s.total());
    return inv_tau(nf, p);
}

MicroTransition gillespie_step(const MicroState& s, const ModelParams& p, Rng& rng) {
    const RateTable r = transition_rates(s, p);
    const double total = r.total();
    if (!(total > 0.0)) {
        throw std::runtime_error("gillespie_step: absorbing state, total rate is zero");
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    MicroTransition out;
    // the activity feedback rescales every channel alike, so it only
    // shortens the waiting time; the channel choice is unaffected
    out.waiting_time = -std::log1p(-unif(rng)) / (total * activity_factor(s, p));
    out.state = s;
    out.state.t_scaled += out.waiting_time;

    const double u = unif(rng) * total;
    double acc = r.f_to_o;
    if (u < acc) {
        --out.state.n_fund; ++out.state.n_opt;
    } else if (u < (acc += r.f_to_p)) {
        --out.state.n_fund; ++out.state.n_pess;
    } else if (u < (acc += r.o_to_f)) {
        --out.state.n_opt; ++out.state.n_fund;
    } else if (u < (acc += r.p_to_f)) {
        --out.state.n_pess; ++out.state.n_fund;
    } else if (u < (acc += r.o_to_p)) {
        --out.state.n_opt; ++out.state.n_pess;
    } else {
        --out.state.n_pess; ++out.state.n_opt;
    }
    return out;
}

MicroResult simulate_micro(std::int64_t n_agents, const ModelParams& p,
                           std::uint64_t n_events, double sample_dt,
                           std::uint64_t burn_in_events) {
    if (n_agents < 3) throw ConfigError("simulate_micro: need at least 3 agents");
    if (!(sample_dt > 0.0)) throw ConfigError("simulate_micro: sample_dt must be > 0");
    p.validate();

    Rng rng = make_rng(p.seed, Stream::micro);
    MicroState s;
    s.n_fund = std::llround(double(n_agents) * p.fixed_point_nf());
    s.n_fund = std::max<std::int64_t>(1, std::min(n_agents - 2, s.n_fund));
    s.n_opt = (n_agents - s.n_fund + 1) / 2;
    s.n_pess = n_agents - s.n_fund - s.n_opt;

    for (std::uint64_t i = 0; i < burn_in_events; ++i) {
        s = gillespie_step(s, p, rng).state;
    }
    s.t_scaled = 0.0;

    MicroResult out;
    out.sample_dt = sample_dt;
    out.n_events = n_events;
    out.samples.reserve(std::size_t(std::min<std::uint64_t>(n_events, 1u << 22)));

    // Inlined event loop, same draw order and arithmetic as gillespie_step.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double inv_n = 1.0 / double(n_agents);
    double t = 0.0, next_sample = 0.0;
    double w_nf = 0.0, w_nf2 = 0.0, w_xi = 0.0, w_xi2 = 0.0;
    double Nf = double(s.n_fund), No = double(s.n_opt), Np = double(s.n_pess);
    for (std::uint64_t i = 0; i < n_events; ++i) {
        const double r_fo = Nf * (0.5 * p.eps_fc + No);
        const double r_fp = Nf * (0.5 * p.eps_fc + Np);
        const double r_of = No * (p.eps_cf + Nf);
        const double r_pf = Np * (p.eps_cf + Nf);
        const double r_op = No * p.freq_ratio * (p.eps_cc + Np);
        const double r_po = Np * p.freq_ratio * (p.eps_cc + No);
        const double total = r_fo + r_fp + r_of + r_pf + r_op + r_po;
        if (!(total > 0.0)) {
            throw std::runtime_error("simulate_micro: absorbing state");
        }
        const double nf_clamped = std::max(Nf, 0.5) * inv_n;
        const double base = 1.0 + p.feedback_gain * (1.0 - nf_clamped) / nf_clamped;
        const double g = p.feedback_exp == 2.0 ? base * base
                                               : std::pow(base, p.feedback_exp);
        const double wait = -std::log1p(-unif(rng)) / (total * g);

        const double nf = Nf * inv_n;
        const double nc = No + Np;
        const double xi = nc > 0.0 ? (No - Np) / nc : 0.0;
        w_nf += nf * wait;
        w_nf2 += nf * nf * wait;
        w_xi += xi * wait;
        w_xi2 += xi * xi * wait;
        const double t_next = t + wait;
        while (next_sample < t_next) {
            out.samples.push_back({next_sample, nf, xi, nc > 0.0});
            next_sample += sample_dt;
        }
        t = t_next;

        const double u = unif(rng) * total;
        double acc = r_fo;
        if (u < acc) {
            --Nf; ++No;
        } else if (u < (acc += r_fp)) {
            --Nf; ++Np;
        } else if (u < (acc += r_of)) {
            --No; ++Nf;
        } else if (u < (acc += r_pf)) {
            --Np; ++Nf;
        } else if (u < (acc += r_op)) {
            --No; ++Np;
        } else {
            --Np; ++No;
        }
    }
    s.n_fund = std::int64_t(Nf);
    s.n_opt = std::int64_t(No);
    s.n_pess = std::int64_t(Np);
    s.t_scaled = t;
    out.elapsed_scaled = t;
    if (s.t_scaled > 0.0) {
        out.mean_nf = w_nf / s.t_scaled;
        out.var_nf = w_nf2 / s.t_scaled - out.mean_nf * out.mean_nf;
        out.mean_xi = w_xi / s.t_scaled;
        out.var_xi = w_xi2 / s.t_scaled - out.mean_xi * out.mean_xi;
    }
    return out;
}

void write_micro_csv(const MicroResult& r, std::ostream& out) {
    out << "t_scaled,n_f,xi,valid\n";
    out.precision(9);
    for (const auto& s : r.samples) {
        out << s.t_scaled << ',' << s.n_f << ',' << s.xi << ',' << (s.xi_valid ? 1 : 0) << '\n';
    }
}

} // namespace herdsim
