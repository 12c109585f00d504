#include "iwk1/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include "iwk1/phipsi.hpp"
#include "iwk1/zeta.hpp"

namespace iwk1 {

namespace {

struct Options {
    std::string command;
    std::string group, datum, tuple, element;
    std::optional<int> i, j, k, precision, level;
    std::string report = "text";
};

class Report {
public:
    explicit Report(bool tsv) : tsv_(tsv) {}
    void put(const std::string& key, const std::string& value) { lines_.push_back(key + (tsv_ ? "\t" : "=") + value); }
    void check(const std::string& key, bool ok, const std::string& suffix = {}) {
        put(key, std::string(ok ? "PASS" : "FAIL") + suffix);
        all_ &= ok;
    }
    bool all() const { return all_; }
    void fail() { all_ = false; }
    std::vector<std::string> take() { return std::move(lines_); }

private:
    bool tsv_;
    bool all_ = true;
    std::vector<std::string> lines_;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string idx(const std::string& key, int i) { return key + "[" + std::to_string(i) + "]"; }

GroupModel load_model(const Options& o) {
    if (o.group.empty()) throw UsageError("--group is required");
    GroupSpec s = load_group_spec(o.group);
    if (o.level) s.level = *o.level;
    if (o.precision) s.precision = *o.precision;
    return GroupModel(s);
}

Zmod model_ctx(const GroupModel& G) { return Zmod(G.p(), G.precision()); }

RingElement need_element(const Options& o, const GroupModel& G) {
    if (o.element.empty()) throw UsageError("--element is required");
    return parse_element(o.element, G, model_ctx(G));
}

// Trace elements are shown on class representatives.
std::string format_trace(const TraceElement& t, const GroupModel& G) {
    RingElement r(t.group_ptr(), t.ctx());
    const auto& cls = t.group().classes();
    for (std::size_t c = 0; c < cls.size(); ++c) r.set(cls[c].front(), t.coeff(static_cast<int>(c)));
    return format_element(r, G);
}

std::vector<int> layers_of(const Options& o, const GroupModel& G) {
    if (o.i) {
        if (*o.i < 0 || *o.i > G.e()) throw UsageError("--i out of range");
        return {*o.i};
    }
    std::vector<int> out;
    for (int i = 0; i <= G.e(); ++i) out.push_back(i);
    return out;
}

void validate_inner(const Options& o, Report& r) {
    if (!o.datum.empty()) {
        auto d = load_zeta_datum(o.datum);
        r.put("VALID", "true");
        r.put("P", std::to_string(d.p()));
        r.put("F", std::to_string(d.f()));
        r.put("DEPTH", std::to_string(d.depth()));
        r.put("LEVEL", std::to_string(d.level()));
        r.put("MODULUS", std::to_string(d.modulus(d.level())));
        r.put("ORDER", std::to_string(d.model(d.level()).group().order()));
        return;
    }
    auto G = load_model(o);
    r.put("VALID", "true");
    r.put("P", std::to_string(G.p()));
    r.put("E", std::to_string(G.e()));
    r.put("LEVEL", std::to_string(G.level()));
    r.put("PRECISION", std::to_string(G.precision()));
    r.put("ORDER", std::to_string(G.group().order()));
    r.put("CLASSES", std::to_string(G.group().class_count()));
}

// Invalid input is a failed check here, not a usage error.
void cmd_validate(const Options& o, Report& r) {
    const std::string& path = o.datum.empty() ? o.group : o.datum;
    if (path.empty()) throw UsageError("--group or --datum is required");
    if (!std::ifstream(path)) throw UsageError("cannot open " + path);
    try {
        validate_inner(o, r);
    } catch (const Error& e) {
        r.put("VALID", "false");
        r.put("ERROR", e.kind());
        r.fail();
    }
}

void cmd_classes(const Options& o, Report& r) {
    auto G = load_model(o);
    const auto classes = G.conjugacy_classes();
    const auto crit = G.conjugacy_classes_by_criterion();
    r.put("CLASS_COUNT", std::to_string(classes.size()));
    auto key = [](const ConjClass& c) {
        std::set<GroupElement> s(c.members.begin(), c.members.end());
        return s;
    };
    std::set<std::set<GroupElement>> a, b;
    for (const auto& c : classes) a.insert(key(c));
    for (const auto& c : crit) b.insert(key(c));
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& cl = classes[c];
        const int rep = G.index(cl.representative);
        r.put(idx("CLASS", static_cast<int>(c)), format_element(RingElement::basis(G.group_ptr(), Zmod(G.p(), 1), rep), G) +
                                                      " size=" + std::to_string(cl.members.size()) +
                                                      " stratum=" + std::to_string(cl.stratum));
    }
    r.check("CRITERION_MATCH", a == b);
}

void cmd_special(const Options& o, Report& r) {
    auto G = load_model(o);
    const auto s = G.is_special_type();
    r.put("SPECIAL_TYPE", s.special ? "true" : "false");
    if (s.witness) r.put("WITNESS", "(e" + std::to_string(s.witness->first + 1) + "," + std::to_string(s.witness->second) + ")");
}

void cmd_theta(const Options& o, Report& r) {
    auto G = load_model(o);
    const auto x = need_element(o, G);
    for (int i : layers_of(o, G)) r.put(idx("THETA", i), format_layer_element(theta(G, i, x), G, *G.layer(i, i)));
}

void cmd_beta(const Options& o, Report& r) {
    auto G = load_model(o);
    const auto t = to_trace(need_element(o, G));
    for (int i : layers_of(o, G)) r.put(idx("BETA", i), format_layer_element(beta(G, i, t), G, *G.layer(i, i)));
}

LayerTuple need_tuple(const Options& o, const GroupModel& G, LayerTuple::Flavor f) {
    if (o.tuple.empty()) throw UsageError("--tuple is required");
    return load_tuple(o.tuple, G, model_ctx(G), f);
}

void cmd_tau(const Options& o, Report& r) {
    auto G = load_model(o);
    const auto t = tau(G, need_tuple(o, G, LayerTuple::Flavor::additive));
    r.put("PRECISION", std::to_string(t.precision()));
    r.put("TAU", format_trace(t, G));
}

void cmd_intlog(const Options& o, Report& r) {
    auto G = load_model(o);
    const auto t = integral_log_L(G, need_element(o, G));
    // meaningful one digit below the working precision
    r.put("PRECISION", std::to_string(G.precision() - 1));
    r.put("INTLOG", format_trace(t.truncate(std::max(G.precision() - 1, 1)), G));
}

void put_check_report(const CheckReport& rep, Report& r) {
    for (const auto& line : rep.lines) r.check(line.key, line.pass);
    r.check("RESULT", rep.pass());
    if (!rep.pass()) r.put("FIRST_FAILING_LAYER", std::to_string(rep.first_failing_layer()));
}

void cmd_check_psi(const Options& o, Report& r) {
    auto G = load_model(o);
    put_check_report(check_psi(G, need_tuple(o, G, LayerTuple::Flavor::additive)), r);
}

void cmd_check_phi(const Options& o, Report& r) {
    auto G = load_model(o);
    const bool special = G.is_special_type().special;
    r.put("FORM", special ? "special" : "general");
    put_check_report(check_phi(G, need_tuple(o, G, LayerTuple::Flavor::multiplicative), special), r);
}

void cmd_additive(const Options& o, Report& r) {
    auto G = load_model(o);
    const auto a = additive_theorem_verify(G);
    r.check("TAU_BETA", a.tau_beta_identity);
    r.check("LATTICES_EQUAL", a.lattices_equal);
    r.check("SPACES_EQUAL", a.spaces_equal);
    r.put("BETA_RANK", std::to_string(a.beta_rank));
    r.put("CONSTRAINT_RANK", std::to_string(a.constraint_rank));
    r.put("BETA_HOWELL_ROWS", std::to_string(a.beta_howell_rows));
    r.put("NAIVE_HOWELL_ROWS", std::to_string(a.naive_howell_rows));
    r.check("RESULT", a.pass());
}

void cmd_diagram(const Options& o, Report& r) {
    auto G = load_model(o);
    const auto x = need_element(o, G);
    const int keep = G.precision() - 1;
    if (keep < 1) throw UsageError("diagram-verify needs precision >= 2");
    const auto viaL = L_phi_to_psi(G, theta_tuple(G, x));
    const auto viaBeta = beta_tuple(G, integral_log_L(G, x));
    for (int i = 0; i <= G.e(); ++i) {
        const auto s = static_cast<std::size_t>(i);
        r.check(idx("DIAGRAM", i), viaL.x[s].truncate(keep) == viaBeta.x[s].truncate(keep));
    }
    const bool special = G.is_special_type().special;
    for (int i = 1; i <= G.e(); ++i) {
        r.check(idx("COMPAT_GENERAL", i), layer_L_compat(G, i, x, CompatForm::general));
        if (special) r.check(idx("COMPAT_SPECIAL", i), layer_L_compat(G, i, x, CompatForm::special));
    }
    r.check("RESULT", r.all());
}

int need_k(const Options& o) {
    if (!o.k) throw UsageError("--k is required");
    if (*o.k < 1) throw UsageError("--k must be positive");
    return *o.k;
}

void cmd_bernoulli(const Options& o, Report& r) {
    if (!o.k || *o.k < 0) throw UsageError("--k >= 0 is required");
    r.put(idx("BERNOULLI", *o.k), to_string(bernoulli(*o.k)));
}

ZetaDatum need_datum(const Options& o) {
    if (o.datum.empty()) throw UsageError("--datum is required");
    return load_zeta_datum(o.datum);
}

int datum_level(const Options& o, const ZetaDatum& d) {
    const int j = o.level ? *o.level : d.level();
    if (j < d.depth() || j > d.level()) throw UsageError("--level outside [depth, datum level]");
    return j;
}

int datum_layer(const Options& o, const ZetaDatum& d) {
    const int i = o.i ? *o.i : 0;
    if (i < 0 || i > d.depth()) throw UsageError("--i outside [0, depth]");
    return i;
}

// Class of a single group element on layer i, from --element.
std::optional<int> element_class(const Options& o, const ZetaDatum& d, int i, int j) {
    if (o.element.empty()) return std::nullopt;
    const GroupModel& G = d.model(j);
    const auto L = G.layer(i, i);
    const auto x = parse_layer_element(o.element, G, *L, Zmod(d.p(), 1));
    std::optional<int> found;
    for (int g = 0; g < x.size(); ++g) {
        if (!x.coeff(g)) continue;
        if (found || x.coeff(g) != 1) throw UsageError("--element must name one class");
        found = g;
    }
    if (!found) throw UsageError("--element must name one class");
    return found;
}

std::string class_name(const ZetaDatum& d, int i, int j, int x) {
    const GroupModel& G = d.model(j);
    const auto L = G.layer(i, i);
    return format_layer_element(RingElement::basis(L->group_ptr(), Zmod(d.p(), 1), x), G, *L);
}

void cmd_partial_zeta(const Options& o, Report& r) {
    const auto d = need_datum(o);
    const int j = datum_level(o, d), i = datum_layer(o, d), k = need_k(o);
    const auto only = element_class(o, d, i, j);
    const int q = d.model(j).layer(i, i)->group().order();
    for (int x = 0; x < q; ++x) {
        if (only && *only != x) continue;
        r.put("ZETA[" + class_name(d, i, j, x) + "]", to_string(partial_zeta_layer(d, i, j, x, k)));
    }
}

void cmd_delta(const Options& o, Report& r) {
    const auto d = need_datum(o);
    const int j = datum_level(o, d), i = datum_layer(o, d), k = need_k(o);
    const auto only = element_class(o, d, i, j);
    const auto eps = only ? LocallyConstantFn::delta(d, i, j, *only) : LocallyConstantFn::constant(d, i, j, 1);
    const auto v = delta_value(d, eps, k);
    r.put("DELTA", to_string(v));
    r.put("P_INTEGRAL", v == 0 || rational_valuation(v, d.p()) >= 0 ? "true" : "false");
}

void cmd_zeta_approx(const Options& o, Report& r) {
    const auto d = need_datum(o);
    const int i = datum_layer(o, d);
    const int j = o.j ? *o.j : d.level();
    if (j < std::max(i, d.depth()) || j > d.level()) throw UsageError("--j outside [max(i, depth), datum level]");
    const int k = o.k ? *o.k : static_cast<int>(d.p() - 1);
    if (k < 1 || static_cast<u64>(k) % (d.p() - 1) != 0) throw UsageError("--k must be a positive multiple of p-1");
    const auto z = zeta_approx(d, i, j, k);
    r.put("PRECISION", std::to_string(z.precision()));
    r.put("ZETA_APPROX", format_layer_element(z, d.model(j), *d.model(j).layer(i, i)));
}

std::string mod_text(u64 p, int e) { return " mod " + std::to_string(p) + "^" + std::to_string(e); }

void cmd_dr(const Options& o, Report& r) {
    const auto d = need_datum(o);
    const int j = datum_level(o, d), k = need_k(o);
    if (!o.i) throw UsageError("--i is required");
    const int i = *o.i;
    if (i < 1 || i > d.depth()) throw UsageError("--i outside [1, depth]");
    const int j_inv = o.j ? *o.j : 0;
    const auto only = element_class(o, d, i, j);
    const int q = d.model(j).layer(i, i)->group().order();
    bool all = true;
    int modexp = i - j_inv;
    for (int x = 0; x < q; ++x) {
        if (only && *only != x) continue;
        const auto res = dr_congruence_check(d, i, j_inv, LocallyConstantFn::delta(d, i, j, x), k);
        modexp = res.modulus_exponent;
        all &= res.pass;
        if (q > 1) r.check("DR[" + class_name(d, i, j, x) + "]", res.pass);
    }
    r.check("CONGRUENCE", all, mod_text(d.p(), std::max(modexp, 0)));
}

void cmd_ver(const Options& o, Report& r) {
    const auto d = need_datum(o);
    const int j = datum_level(o, d);
    const GroupModel& G = d.model(j);
    std::vector<RingElement> z;
    if (!o.tuple.empty()) {
        z = load_tuple(o.tuple, G, Zmod(d.p(), d.f() + j), LayerTuple::Flavor::additive).x;
    } else {
        const int k = o.k ? *o.k : static_cast<int>(d.p() - 1);
        if (k < 1 || static_cast<u64>(k) % (d.p() - 1) != 0) throw UsageError("--k must be a positive multiple of p-1");
        z = zeta_approx_tuple(d, j, k);
    }
    bool all = true;
    for (int i = 1; i <= d.depth(); ++i) {
        if (o.i && *o.i != i) continue;
        const bool ok = ver_congruence_check(G, z, i);
        all &= ok;
        r.check(idx("VER", i), ok);
    }
    r.check("CONGRUENCE", all, " in T" + mod_text(d.p(), d.f() + j));
}

const std::map<std::string, std::function<void(const Options&, Report&)>>& commands() {
    static const std::map<std::string, std::function<void(const Options&, Report&)>> table{
        {"validate", cmd_validate},
        {"classes", cmd_classes},
        {"special-type", cmd_special},
        {"theta", cmd_theta},
        {"beta", cmd_beta},
        {"tau", cmd_tau},
        {"intlog", cmd_intlog},
        {"check-psi", cmd_check_psi},
        {"check-phi", cmd_check_phi},
        {"additive-verify", cmd_additive},
        {"diagram-verify", cmd_diagram},
        {"bernoulli", cmd_bernoulli},
        {"partial-zeta", cmd_partial_zeta},
        {"delta", cmd_delta},
        {"zeta-approx", cmd_zeta_approx},
        {"dr-congruence", cmd_dr},
        {"ver-congruence", cmd_ver},
    };
    return table;
}

}  // namespace

CommandResult run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CommandResult result;
    Options o;
    CLI::App app{"finite-level K1 and zeta congruence checks"};
    std::vector<std::string> names;
    for (const auto& [name, fn] : commands()) names.push_back(name);
    app.add_option("command", o.command, "subcommand")->required()->check(CLI::IsMember(names));
    app.add_option("--group", o.group, "group file");
    app.add_option("--datum", o.datum, "zeta datum file");
    app.add_option("--tuple", o.tuple, "layer tuple file");
    app.add_option("--element", o.element, "group ring element");
    app.add_option("--i", o.i, "layer index");
    app.add_option("--j", o.j, "level for zeta-approx; j_inv for dr-congruence");
    app.add_option("--k", o.k, "weight k (values at 1-k)");
    app.add_option("--precision", o.precision, "coefficient precision N");
    app.add_option("--level", o.level, "quotient level j");
    app.add_option("--report", o.report, "text or tsv")->check(CLI::IsMember({"text", "tsv"}));

    std::vector<const char*> raw;
    for (const auto& a : argv) raw.push_back(a.c_str());
    if (raw.empty()) raw.push_back("iwk1");
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        result.exit_code = 0;
        return result;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        result.exit_code = 2;
        return result;
    }

    Report report(o.report == "tsv");
    try {
        commands().at(o.command)(o, report);
        result.exit_code = report.all() ? 0 : 1;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        result.exit_code = 2;
    } catch (const IntegralityFailure& e) {
        err << e.what() << "\n";
        result.exit_code = 3;
    } catch (const NonIntegralDelta& e) {
        err << e.what() << "\n";
        result.exit_code = 3;
    } catch (const PrecisionExhausted& e) {
        err << e.what() << "\n";
        result.exit_code = 3;
    } catch (const Error& e) {
        err << e.what() << "\n";
        result.exit_code = 2;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << "\n";
        result.exit_code = 2;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        result.exit_code = 2;
    }
    if (result.exit_code >= 2) return result;
    result.lines = report.take();
    for (const auto& line : result.lines) out << line << "\n";
    return result;
}

}  // namespace iwk1
