#ifndef ITA_SEMANTICS_HPP
#define ITA_SEMANTICS_HPP

#include "ita/model.hpp"

#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ita {

class semantics_error : public std::runtime_error {
public:
    explicit semantics_error(const std::string& msg, int step = -1)
        : std::runtime_error(step >= 0 ? "step " + std::to_string(step) + ": " + msg : msg),
          step(step) {}
    int step;
};

/// (state, valuation, beta); beta records whether time has elapsed since the
/// last discrete step. Reachable configurations keep clocks above the state's
/// level at 0.
struct Configuration {
    int state = -1;
    Valuation v;
    bool beta = false;

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.state == b.state && a.v == b.v && a.beta == b.beta;
    }
};

struct RunStep {
    enum class Kind { Time, Fire };
    Kind kind = Kind::Time;
    Rational delay;       // Time
    int transition = -1;  // Fire

    static RunStep time(Rational d) { return {Kind::Time, std::move(d), -1}; }
    static RunStep fire(int t) { return {Kind::Fire, Rational(0), t}; }
};

using Run = std::vector<RunStep>;
using TimedWord = std::vector<std::pair<std::string, Rational>>;

inline std::string word_str(const TimedWord& w) {
    std::string s;
    for (const auto& [a, t] : w) s += "(" + a + "," + t.str() + ")";
    return s;
}

inline Configuration initial_configuration(const ITAModel& m) {
    if (m.initial < 0) throw semantics_error("model has no initial state");
    return {m.initial, Valuation(m.clock_count), false};
}

/// Only the active clock x_{level(q)} evolves. Urgent states admit only
/// zero-duration steps; a zero step leaves the configuration unchanged.
inline Configuration time_step(const ITAModel& m, const Configuration& c, const Rational& d) {
    if (d.sign() < 0) throw semantics_error("negative time step");
    if (d.is_zero()) return c;
    if (m.policy_of(c.state) == Policy::Urgent)
        throw semantics_error("urgent state '" + m.state_name(c.state) +
                              "': only time steps of duration 0 are allowed");
    Configuration out = c;
    out.v[m.level_of(c.state)] += d;
    out.beta = true;
    return out;
}

inline Configuration discrete_step(const ITAModel& m, const Configuration& c, int transition) {
    const TransitionDecl& t = m.transitions.at(static_cast<std::size_t>(transition));
    if (t.source != c.state)
        throw semantics_error("transition #" + std::to_string(transition) + " does not leave state '" +
                              m.state_name(c.state) + "'");
    if (m.policy_of(c.state) == Policy::Delayed && !c.beta)
        throw semantics_error("delayed state '" + m.state_name(c.state) +
                              "': discrete steps are forbidden before time elapses");
    if (!t.guard_satisfied(c.v))
        throw semantics_error("guard of transition #" + std::to_string(transition) + " unsatisfied");
    return {t.target, apply_update(c.v, t.update), false};
}

struct ReplayResult {
    Configuration final;
    TimedWord word;
    Rational total_time;
};

/// Folds a run from the initial configuration, emitting (letter, timestamp)
/// for non-epsilon discrete steps. Failures carry the offending step index.
inline ReplayResult replay(const ITAModel& m, const Run& steps) {
    ReplayResult r{initial_configuration(m), {}, Rational(0)};
    for (std::size_t i = 0; i < steps.size(); ++i) {
        try {
            const RunStep& s = steps[i];
            if (s.kind == RunStep::Kind::Time) {
                r.final = time_step(m, r.final, s.delay);
                r.total_time += s.delay;
            } else {
                const TransitionDecl& t = m.transitions.at(static_cast<std::size_t>(s.transition));
                r.final = discrete_step(m, r.final, s.transition);
                if (!t.action.empty()) r.word.emplace_back(t.action, r.total_time);
            }
        } catch (const semantics_error& e) {
            throw semantics_error(e.what(), static_cast<int>(i));
        } catch (const std::out_of_range&) {
            throw semantics_error("unknown transition id", static_cast<int>(i));
        }
    }
    return r;
}

/// True iff the witness replays, emits exactly `word`, and ends in a final state.
inline bool accepts(const ITAModel& m, const TimedWord& word, const Run& witness) {
    try {
        ReplayResult r = replay(m, witness);
        return r.word == word && m.states.at(static_cast<std::size_t>(r.final.state)).is_final;
    } catch (const semantics_error&) {
        return false;
    }
}

namespace detail {

/// Closed rational interval with optional open endpoints; used to solve the
/// one-variable guard systems that appear when picking a delay.
struct DelayInterval {
    std::optional<Rational> lo, hi;
    bool lo_strict = false, hi_strict = false;
    bool empty = false;

    void intersect_ge(const Rational& v, bool strict) {
        if (!lo || v > *lo || (v == *lo && strict)) {
            lo = v;
            lo_strict = strict;
        }
        check();
    }
    void intersect_le(const Rational& v, bool strict) {
        if (!hi || v < *hi || (v == *hi && strict)) {
            hi = v;
            hi_strict = strict;
        }
        check();
    }
    void check() {
        if (lo && hi && (*lo > *hi || (*lo == *hi && (lo_strict || hi_strict)))) empty = true;
    }
};

/// Valid delays d >= 0 such that guard(v + d*e_level) holds; nullopt when the
/// constraint set is not an interval requirement (never happens: atoms are linear).
inline DelayInterval guard_delays(const TransitionDecl& t, const Valuation& v, int level) {
    DelayInterval iv;
    iv.intersect_ge(Rational(0), false);
    for (const GuardAtom& atom : t.guard) {
        Rational slope = atom.expr.coeff(level);
        Rational value = atom.expr.evaluate(v);
        // (value + slope*d) op 0
        if (slope.is_zero()) {
            if (!comparator_holds(value.sign(), atom.op)) iv.empty = true;
            continue;
        }
        Rational root = -value / slope;
        switch (atom.op) {
            case Comparator::EQ:
                iv.intersect_ge(root, false);
                iv.intersect_le(root, false);
                break;
            case Comparator::LT:
            case Comparator::LE: {
                bool strict = atom.op == Comparator::LT;
                if (slope.sign() > 0)
                    iv.intersect_le(root, strict);
                else
                    iv.intersect_ge(root, strict);
                break;
            }
            case Comparator::GT:
            case Comparator::GE: {
                bool strict = atom.op == Comparator::GT;
                if (slope.sign() > 0)
                    iv.intersect_ge(root, strict);
                else
                    iv.intersect_le(root, strict);
                break;
            }
        }
        if (iv.empty) break;
    }
    return iv;
}

inline Rational pick_in_interval(const DelayInterval& iv, std::mt19937_64& rng, int max_den) {
    Rational lo = iv.lo.value_or(Rational(0));
    if (iv.hi && *iv.hi == lo) return lo;  // point interval (both ends non-strict by construction)
    std::uniform_int_distribution<int> den_dist(1, max_den);
    int den = den_dist(rng);
    Rational width = iv.hi ? (*iv.hi - lo) : Rational(2);
    std::uniform_int_distribution<long> num_dist(iv.lo_strict ? 1 : 0, 4 * den);
    Rational offset = width * Rational(num_dist(rng), 4L * den + 1);
    if (iv.lo_strict && offset.is_zero()) offset = width * Rational(1, 4L * den + 1);
    Rational d = lo + offset;
    if (iv.hi && (d > *iv.hi || (d == *iv.hi && iv.hi_strict))) d = lo + width * Rational(1, 2);
    return d;
}

}  // namespace detail

/// Deterministic under `seed`; every returned run replays successfully.
inline std::vector<Run> random_runs(const ITAModel& m, int count, int max_steps, std::uint64_t seed,
                                    int max_denominator = 8) {
    std::mt19937_64 rng(seed);
    std::vector<Run> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int r = 0; r < count; ++r) {
        Run run;
        Configuration c = initial_configuration(m);
        for (int s = 0; s < max_steps; ++s) {
            int level = m.level_of(c.state);
            Policy pol = m.policy_of(c.state);
            // Candidate moves: (transition id, delay interval before firing).
            struct Move {
                int transition;
                detail::DelayInterval delays;
            };
            std::vector<Move> moves;
            for (int tid : m.outgoing[static_cast<std::size_t>(c.state)]) {
                detail::DelayInterval iv =
                    detail::guard_delays(m.transitions[static_cast<std::size_t>(tid)], c.v, level);
                if (pol == Policy::Urgent) {
                    iv.intersect_ge(Rational(0), false);
                    iv.intersect_le(Rational(0), false);
                } else if (pol == Policy::Delayed && !c.beta) {
                    iv.intersect_ge(Rational(0), true);
                }
                if (!iv.empty) moves.push_back({tid, iv});
            }
            bool may_idle = pol != Policy::Urgent;
            if (moves.empty() && !may_idle) break;
            std::uniform_int_distribution<std::size_t> pick(0, moves.size() + (may_idle ? 0 : -1));
            std::size_t choice = pick(rng);
            if (choice == moves.size()) {
                // idle for a while and stop extending this run with a move
                if (may_idle) {
                    detail::DelayInterval any;
                    any.intersect_ge(Rational(0), false);
                    Rational d = detail::pick_in_interval(any, rng, max_denominator);
                    if (!d.is_zero()) {
                        run.push_back(RunStep::time(d));
                        c = time_step(m, c, d);
                    }
                }
                break;
            }
            const Move& mv = moves[choice];
            Rational d = detail::pick_in_interval(mv.delays, rng, max_denominator);
            if (!d.is_zero()) {
                run.push_back(RunStep::time(d));
                c = time_step(m, c, d);
            }
            run.push_back(RunStep::fire(mv.transition));
            c = discrete_step(m, c, mv.transition);
        }
        out.push_back(std::move(run));
    }
    return out;
}

/// One step per line: `time p/q` or `fire <transition-id>`.
inline std::string render_run(const Run& run) {
    std::string out;
    for (const RunStep& s : run) {
        if (s.kind == RunStep::Kind::Time)
            out += "time " + s.delay.str() + "\n";
        else
            out += "fire " + std::to_string(s.transition) + "\n";
    }
    return out;
}

inline Run parse_run(const std::string& text) {
    Run run;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "time") {
            std::string lit;
            if (!(ls >> lit)) throw semantics_error("missing delay on line " + std::to_string(lineno));
            run.push_back(RunStep::time(Rational::parse(lit)));
        } else if (kw == "fire") {
            int tid;
            if (!(ls >> tid)) throw semantics_error("missing transition id on line " + std::to_string(lineno));
            run.push_back(RunStep::fire(tid));
        } else {
            throw semantics_error("unknown run step '" + kw + "' on line " + std::to_string(lineno));
        }
    }
    return run;
}

}  // namespace ita

#endif  // ITA_SEMANTICS_HPP
