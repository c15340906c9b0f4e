#include "spectral_rl/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace spectral {

double SpectralQTable::aggregate(int s, int a) const {
    double sum = 0.0;
    double weight = 1.0;
    for (int i = 0; i < codec_.num_components(); ++i) {
        sum += weight * at(s, a, i);
        weight *= codec_.base;
    }
    return sum;
}

int argmax_tiebreak_low(std::span<const double> values) {
    int best = 0;
    for (int a = 1; a < static_cast<int>(values.size()); ++a)
        if (values[a] > values[best]) best = a;
    return best;
}

int greedy_action(const QTable& table, int s) {
    int best = 0;
    for (int a = 1; a < table.num_actions(); ++a)
        if (table.at(s, a) > table.at(s, best)) best = a;
    return best;
}

int greedy_action(const SpectralQTable& table, int s) {
    int best = 0;
    double best_value = table.aggregate(s, 0);
    for (int a = 1; a < table.num_actions(); ++a) {
        const double v = table.aggregate(s, a);
        if (v > best_value) {
            best = a;
            best_value = v;
        }
    }
    return best;
}

void q_backup(QTable& table, int s, int a, double r, int s2, bool terminal,
              double alpha, double gamma) {
    double next_max = 0.0;
    if (!terminal) {
        next_max = table.at(s2, 0);
        for (int a2 = 1; a2 < table.num_actions(); ++a2)
            next_max = std::max(next_max, table.at(s2, a2));
    }
    table.at(s, a) += alpha * (r + gamma * next_max - table.at(s, a));
}

void spectral_q_backup(SpectralQTable& table, int s, int a, double r, int s2,
                       bool terminal, double alpha, double gamma) {
    const CodecConfig& codec = table.codec();
    std::vector<double> components(static_cast<size_t>(codec.num_components()));
    decompose_into(r, codec, components);
    const int next_greedy = terminal ? -1 : greedy_action(table, s2);
    for (int i = 0; i < codec.num_components(); ++i) {
        const double bootstrap = terminal ? 0.0 : table.at(s2, next_greedy, i);
        table.at(s, a, i) +=
            alpha * (components[static_cast<size_t>(i)] + gamma * bootstrap - table.at(s, a, i));
    }
}

EquivalenceReport check_equivalence(const TabularMDP& mdp, long steps, std::uint64_t seed,
                                    const CodecConfig& codec, double alpha, double gamma,
                                    double epsilon) {
    EquivalenceReport report;
    const double bound = max_representable(codec);
    for (double r : mdp.rewards) {
        if (std::abs(r) > bound) {
            report.overflow = true;
            return report;
        }
    }

    QTable std_table(mdp.num_states, mdp.num_actions);
    SpectralQTable spec_table(mdp.num_states, mdp.num_actions, codec);

    // One shared generator drives exploration and dynamics for both learners,
    // so any behavioral divergence is attributable to the value estimates.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> random_action(0, mdp.num_actions - 1);

    int state = mdp.start_state;
    int episode_steps = 0;
    for (long t = 0; t < steps; ++t) {
        int action_std, action_spec;
        if (unit(rng) < epsilon) {
            action_std = action_spec = random_action(rng);
        } else {
            action_std = greedy_action(std_table, state);
            action_spec = greedy_action(spec_table, state);
        }
        if (action_std != action_spec) report.identical_actions = false;

        const double r = mdp.reward(state, action_std);
        const int next_state = mdp.sample_next(state, action_std, rng);

        q_backup(std_table, state, action_std, r, next_state, false, alpha, gamma);
        spectral_q_backup(spec_table, state, action_spec, r, next_state, false, alpha, gamma);

        for (int s = 0; s < mdp.num_states; ++s)
            for (int a = 0; a < mdp.num_actions; ++a)
                report.max_abs_deviation =
                    std::max(report.max_abs_deviation,
                             std::abs(std_table.at(s, a) - spec_table.aggregate(s, a)));

        state = next_state;
        if (mdp.horizon > 0 && ++episode_steps >= mdp.horizon) {
            state = mdp.start_state;
            episode_steps = 0;
        }
        ++report.steps_run;
    }
    return report;
}

}  // namespace spectral
