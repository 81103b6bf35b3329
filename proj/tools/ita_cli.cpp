// Command-line front end for the ITA verification toolkit: parse/validate,
// simulation, class-graph emission, reachability (two procedures), ITA⁻
// transformation, untimed-language extraction, and TCTL model checking.

#include "ita/emit.hpp"
#include "ita/itaminus.hpp"
#include "ita/lpreach.hpp"
#include "ita/parser.hpp"
#include "ita/tctl.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr int kExitTrue = 0;
constexpr int kExitFalse = 1;
constexpr int kExitIncomplete = 2;
constexpr int kExitInputError = 3;
constexpr int kExitResourceCap = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ita::ITAModel load_model(const std::string& path) {
    ita::ITAModel m = ita::parse_ita(read_file(path));
    std::vector<std::string> violations = m.validate();
    if (!violations.empty()) {
        std::string msg = "model is not a well-formed ITA:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::runtime_error(msg);
    }
    return m;
}

struct CommonOpts {
    std::size_t max_classes = 100000;
    std::size_t max_exprs = 4096;
    int depth = 64;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--max-classes", c.max_classes, "class-graph node cap");
    cmd->add_option("--max-exprs", c.max_exprs, "expression cap per level");
    cmd->add_option("--depth", c.depth, "bounded search depth");
    cmd->add_option("--jobs", c.jobs, "worker threads for exploration/search");
}

int cmd_validate(const std::string& path, bool require_minus) {
    ita::ITAModel m = ita::parse_ita(read_file(path));
    std::vector<std::string> violations = m.validate();
    if (!violations.empty()) {
        for (const auto& v : violations) std::cout << v << "\n";
        return kExitFalse;
    }
    if (require_minus) {
        auto [ok, why] = m.is_ita_minus();
        if (!ok) {
            for (const auto& v : why) std::cout << v << "\n";
            return kExitFalse;
        }
    }
    std::cout << "ok\n";
    return kExitTrue;
}

int cmd_simulate(const std::string& path, const std::string& run_path) {
    ita::ITAModel m = load_model(path);
    ita::Run run = run_path.empty() ? ita::Run{} : ita::parse_run(read_file(run_path));
    ita::ReplayResult r = ita::replay(m, run);
    std::cout << "state " << m.state_name(r.final.state) << "\n";
    std::cout << "clocks " << r.final.v.str() << "\n";
    std::cout << "beta " << (r.final.beta ? "true" : "false") << "\n";
    std::cout << "time " << r.total_time.str() << "\n";
    std::cout << "word " << ita::word_str(r.word) << "\n";
    return kExitTrue;
}

int cmd_classgraph(const std::string& path, bool as_json, const std::string& formula,
                   bool dump_exprs, const CommonOpts& c) {
    ita::ITAModel m = load_model(path);
    std::vector<ita::LinExpr> comparisons;
    if (!formula.empty()) {
        ita::FormulaPtr f = ita::parse_formula(formula);
        ita::collect_comparisons(*f, comparisons);
    }
    ita::ExpressionBuildOptions eopts{c.max_exprs};
    ita::Analysis a = ita::analyze(m, comparisons, eopts);
    if (dump_exprs) {
        for (int k = 1; k <= a.esets.levels(); ++k) {
            const auto& ek = a.esets.at(k);
            for (std::size_t i = 0; i < ek.size(); ++i)
                std::cout << "E" << k << "[" << i << "] " << ek[i].str() << " ("
                          << ita::expr_tag_str(a.esets.tag(k, static_cast<int>(i))) << ")\n";
        }
        return kExitTrue;
    }
    ita::ExploreOptions xopts{c.max_classes, c.jobs};
    ita::ClassGraph g = ita::explore(a, xopts);
    if (as_json)
        std::cout << ita::to_json(a, g).dump(2) << "\n";
    else
        std::cout << ita::to_dot(a, g);
    return kExitTrue;
}

int cmd_reach(const std::string& path, const std::string& target, const std::string& label,
              const std::string& method, const CommonOpts& c) {
    ita::ITAModel m = load_model(path);
    auto pred = [&](const ita::StateDecl& s) {
        if (!target.empty() && s.name == target) return true;
        if (!label.empty() && s.labels.count(label)) return true;
        return false;
    };
    if (target.empty() && label.empty()) throw std::runtime_error("need --target or --label");

    ita::Json j;
    j["schema"] = 1;
    j["model"] = m.name;
    bool use_graph = method == "classgraph" || method == "both";
    bool use_bounded = method == "bounded" || method == "both";

    bool graph_reach = false;
    if (use_graph) {
        ita::Analysis a = ita::analyze(m, {}, ita::ExpressionBuildOptions{c.max_exprs});
        ita::ClassGraph g = ita::explore(a, ita::ExploreOptions{c.max_classes, c.jobs});
        ita::ReachAnswer ans = ita::reachable(a, g, pred);
        graph_reach = ans.reachable;
        j["classgraph"]["reachable"] = ans.reachable;
        j["classgraph"]["classes"] = g.nodes.size();
        j["classgraph"]["path_length"] = ans.path_edges.size();
    }

    bool bounded_hit = false, bounded_complete = false;
    if (use_bounded) {
        // the bounded procedure runs on ITA⁻; transform first when needed
        const ita::ITAModel* search_model = &m;
        std::optional<ita::ItaMinusResult> info;
        if (!m.is_ita_minus().first) {
            info = ita::to_ita_minus(m);
            search_model = &info->model;
            j["bounded"]["transformed"] = true;
        }
        auto expanded_pred = [&](const ita::StateDecl& s) {
            if (!info) return pred(s);
            // expanded states keep their base labels; match on those plus base name
            int base = info->base_state[static_cast<std::size_t>(
                info->model.find_state(s.name))];
            return pred(m.states[static_cast<std::size_t>(base)]);
        };
        ita::ReachOptions ropts;
        ropts.depth = c.depth;
        ropts.jobs = c.jobs;
        ita::ReachResult res = ita::bounded_reach(*search_model, expanded_pred, ropts);
        bounded_hit = res.hit;
        bounded_complete = res.complete;
        ita::Run witness = res.witness;
        if (info && res.hit) witness = ita::map_run_from_expanded(*info, witness);
        j["bounded"]["reachable"] = res.hit;
        j["bounded"]["complete"] = res.complete;
        j["bounded"]["depth"] = c.depth;
        j["bounded"]["bound"] = res.bound.str();
        if (res.hit) {
            j["bounded"]["witness"] = ita::render_run(witness);
            ita::ReplayResult rr = ita::replay(m, witness);
            j["bounded"]["witness_word"] = ita::word_str(rr.word);
        }
        if (!m.is_ita_minus().first) {
            j["bounded"]["general_bound"] =
                "(" + std::to_string(m.clock_count + 2) + ")^" +
                std::to_string(ita::general_bound_exponent(static_cast<int>(m.transitions.size()),
                                                           m.clock_count, ita::constant_bits(m)));
        }
    }

    std::cout << j.dump(2) << "\n";
    if (use_graph) return graph_reach ? kExitTrue : kExitFalse;
    if (bounded_hit) return kExitTrue;
    return bounded_complete ? kExitFalse : kExitIncomplete;
}

int cmd_to_ita_minus(const std::string& path, const std::string& out_path) {
    ita::ITAModel m = load_model(path);
    ita::ItaMinusResult r = ita::to_ita_minus(m);
    std::string text = r.model.render();
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << text;
        std::cout << "wrote " << out_path << " (" << r.model.states.size() << " states, "
                  << r.model.transitions.size() << " transitions)\n";
    }
    return kExitTrue;
}

int cmd_untimed(const std::string& path, bool keep_eps, const CommonOpts& c) {
    ita::ITAModel m = load_model(path);
    ita::Analysis a = ita::analyze(m, {}, ita::ExpressionBuildOptions{c.max_exprs});
    ita::ClassGraph g = ita::explore(a, ita::ExploreOptions{c.max_classes, c.jobs});
    ita::FiniteAutomaton fa = ita::untimed_automaton(a, g);
    if (!keep_eps) fa = fa.eliminate_epsilon();
    std::cout << ita::to_json(fa).dump(2) << "\n";
    return kExitTrue;
}

int cmd_check(const std::string& path, const std::string& formula_text, const CommonOpts& c) {
    ita::ITAModel m = load_model(path);
    ita::FormulaFragment frag;
    ita::FormulaPtr f = ita::parse_formula(formula_text, &frag);

    ita::Json j;
    j["schema"] = 1;
    j["model"] = m.name;
    j["formula"] = formula_text;

    if (frag == ita::FormulaFragment::TctlCInt) {
        ita::CIntResult res =
            ita::check_tctl_cint(m, *f, ita::ExpressionBuildOptions{c.max_exprs},
                                 ita::ExploreOptions{c.max_classes, c.jobs});
        j["fragment"] = "tctl_c_int";
        j["verdict"] = res.verdict;
        j["procedure"] = "class-graph-ctl";
        j["complete"] = true;
        j["classes"] = res.graph.nodes.size();
        std::cout << j.dump(2) << "\n";
        return res.verdict ? kExitTrue : kExitFalse;
    }

    // TCTL_p: the search procedures need an ITA⁻; transform when necessary.
    // Expanded states keep their base labels, so predicates evaluate unchanged.
    ita::ITAModel checked = m;
    std::optional<ita::ItaMinusResult> info;
    if (!m.is_ita_minus().first) {
        info = ita::to_ita_minus(m);
        checked = info->model;
        j["transformed"] = true;
    }
    ita::TctlPOptions popts;
    popts.depth = c.depth;

    std::function<ita::TctlPOutcome(const ita::Formula&)> evalp =
        [&](const ita::Formula& sub) -> ita::TctlPOutcome {
        switch (sub.kind) {
            case ita::Formula::Kind::Until: {
                ita::StatePred p = ita::pred_of(sub.args[0]);
                ita::StatePred r = ita::pred_of(sub.args[1]);
                bool strict = sub.bound_op == ita::Comparator::LT || sub.bound_op == ita::Comparator::GT;
                bool lower = sub.bound_op == ita::Comparator::LE || sub.bound_op == ita::Comparator::LT;
                if (sub.universal)
                    return lower ? ita::check_AU_bounded_below(checked, p, r, sub.bound, strict, popts)
                                 : ita::check_AU_bounded_above(checked, p, r, sub.bound, strict, popts);
                return lower ? ita::check_EU_bounded_below(checked, p, r, sub.bound, strict, popts)
                             : ita::check_EU_bounded_above(checked, p, r, sub.bound, strict, popts);
            }
            case ita::Formula::Kind::Not: {
                ita::TctlPOutcome inner = evalp(*sub.args[0]);
                inner.verdict = !inner.verdict;
                return inner;
            }
            case ita::Formula::Kind::And: {
                ita::TctlPOutcome lhs = evalp(*sub.args[0]);
                ita::TctlPOutcome rhs = evalp(*sub.args[1]);
                ita::TctlPOutcome out;
                out.verdict = lhs.verdict && rhs.verdict;
                out.complete = lhs.complete && rhs.complete;
                out.procedure = "boolean";
                return out;
            }
            case ita::Formula::Kind::Or: {
                ita::TctlPOutcome lhs = evalp(*sub.args[0]);
                ita::TctlPOutcome rhs = evalp(*sub.args[1]);
                ita::TctlPOutcome out;
                out.verdict = lhs.verdict || rhs.verdict;
                out.complete = lhs.complete && rhs.complete;
                out.procedure = "boolean";
                return out;
            }
            default: {
                ita::TctlPOutcome out;
                out.verdict = ita::eval_prop(sub, checked.states[static_cast<std::size_t>(
                                                      checked.initial)]);
                out.complete = true;
                out.procedure = "propositional";
                return out;
            }
        }
    };

    ita::TctlPOutcome res = evalp(*f);
    j["fragment"] = "tctl_p";
    j["verdict"] = res.verdict;
    j["procedure"] = res.procedure;
    j["complete"] = res.complete;
    if (res.witness) {
        ita::Run shown = *res.witness;
        if (info) shown = ita::map_run_from_expanded(*info, shown);
        j["witness"] = ita::render_run(shown);
    }
    std::cout << j.dump(2) << "\n";
    if (!res.complete) return kExitIncomplete;
    return res.verdict ? kExitTrue : kExitFalse;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ITA verification toolkit"};
    app.require_subcommand(1);

    std::string path, run_path, formula, target, label, method = "classgraph", out_path;
    bool require_minus = false, as_json = false, dump_exprs = false, keep_eps = false;
    CommonOpts common;

    CLI::App* validate = app.add_subcommand("validate", "parse and structurally validate a model");
    validate->add_option("model", path)->required();
    validate->add_flag("--require-ita-minus", require_minus, "also check the ITA- restriction");

    CLI::App* simulate = app.add_subcommand("simulate", "replay a run file");
    simulate->add_option("model", path)->required();
    simulate->add_option("--run", run_path, "run file (time p/q | fire id per line)");

    CLI::App* classgraph = app.add_subcommand("classgraph", "build and emit the class graph");
    classgraph->add_option("model", path)->required();
    classgraph->add_flag("--json", as_json, "JSON instead of DOT");
    classgraph->add_flag("--dot", "DOT output (default)");
    classgraph->add_option("--formula", formula, "extend the expression sets with a formula's comparisons");
    classgraph->add_flag("--dump-expressions", dump_exprs, "print the E_k sets and exit");
    add_common(classgraph, common);

    CLI::App* reach = app.add_subcommand("reach", "decide state reachability");
    reach->add_option("model", path)->required();
    reach->add_option("--target", target, "state name");
    reach->add_option("--label", label, "atomic proposition");
    reach->add_option("--method", method)->check(CLI::IsMember({"classgraph", "bounded", "both"}));
    add_common(reach, common);

    CLI::App* tominus = app.add_subcommand("to-ita-minus", "emit the language-equivalent ITA-");
    tominus->add_option("model", path)->required();
    tominus->add_option("-o,--output", out_path, "output .ita file (default: stdout)");

    CLI::App* untimed = app.add_subcommand("untimed", "emit the untimed-language automaton");
    untimed->add_option("model", path)->required();
    untimed->add_flag("--keep-eps", keep_eps, "skip epsilon elimination");
    add_common(untimed, common);

    CLI::App* check = app.add_subcommand("check", "model-check a TCTL formula");
    check->add_option("model", path)->required();
    check->add_option("--formula", formula)->required();
    add_common(check, common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(path, require_minus);
        if (simulate->parsed()) return cmd_simulate(path, run_path);
        if (classgraph->parsed()) return cmd_classgraph(path, as_json, formula, dump_exprs, common);
        if (reach->parsed()) return cmd_reach(path, target, label, method, common);
        if (tominus->parsed()) return cmd_to_ita_minus(path, out_path);
        if (untimed->parsed()) return cmd_untimed(path, keep_eps, common);
        if (check->parsed()) return cmd_check(path, formula, common);
    } catch (const ita::cap_error& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return kExitResourceCap;
    } catch (const ita::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ita::semantics_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
