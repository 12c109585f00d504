#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "iwk1/cli.hpp"

using namespace iwk1;

namespace {

struct Run {
    CommandResult result;
    std::string out, err;
};

Run call(std::vector<std::string> args) {
    args.insert(args.begin(), "iwk1");
    std::ostringstream out, err;
    Run r{run(args, out, err), {}, {}};
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string data(const char* name) { return std::string(IWK1_DATA_DIR) + "/" + name; }

bool has_line(const Run& r, const std::string& line) {
    return std::find(r.result.lines.begin(), r.result.lines.end(), line) != r.result.lines.end();
}

}  // namespace

TEST_CASE("documented examples") {
    auto s = call({"special-type", "--group", data("E1.grp")});
    CHECK(s.result.exit_code == 0);
    CHECK(has_line(s, "SPECIAL_TYPE=true"));

    auto phi = call({"check-phi", "--group", data("E1.grp"), "--tuple", data("ones.tup")});
    CHECK(phi.result.exit_code == 0);

    auto dr = call({"dr-congruence", "--datum", data("kummer5.zd"), "--i", "1", "--k", "2"});
    CHECK(dr.result.exit_code == 0);
    CHECK(has_line(dr, "CONGRUENCE=PASS mod 5^1"));
}

TEST_CASE("exit codes follow the verdicts") {
    auto e2 = call({"special-type", "--group", data("E2.grp")});
    CHECK(e2.result.exit_code == 0);
    CHECK(has_line(e2, "SPECIAL_TYPE=false"));
    CHECK(has_line(e2, "WITNESS=(e3,0)"));

    // the all-ones tuple is multiplicatively trivial but not additively in Psi
    auto psi = call({"check-psi", "--group", data("E1.grp"), "--tuple", data("ones.tup")});
    CHECK(psi.result.exit_code == 1);
    CHECK(has_line(psi, "RESULT=FAIL"));

    CHECK(call({"bogus"}).result.exit_code == 2);
    CHECK(call({"theta", "--group", data("E1.grp")}).result.exit_code == 2);
    CHECK(call({"theta", "--group", data("nope.grp"), "--element", "1"}).result.exit_code == 2);
    CHECK(call({"bernoulli", "--k", "4", "--report", "xml"}).result.exit_code == 2);
    CHECK(call({"validate", "--group", data("ones.tup")}).result.exit_code == 1);
}

TEST_CASE("reports are deterministic and tsv is a relabeling") {
    const std::vector<std::string> args{"zeta-approx", "--datum", data("tower3.zd"), "--i", "1", "--j", "2", "--k", "2"};
    auto a = call(args), b = call(args);
    CHECK(a.result.exit_code == 0);
    CHECK(a.out == b.out);
    auto tsv_args = args;
    tsv_args.insert(tsv_args.end(), {"--report", "tsv"});
    auto t = call(tsv_args);
    std::string swapped = t.out;
    std::replace(swapped.begin(), swapped.end(), '\t', '=');
    CHECK(swapped == a.out);
}

TEST_CASE("group subcommands") {
    auto v = call({"validate", "--group", data("E1.grp"), "--level", "1"});
    CHECK(v.result.exit_code == 0);
    CHECK(has_line(v, "ORDER=27"));
    CHECK(has_line(v, "CLASSES=11"));

    auto c = call({"classes", "--group", data("E2.grp"), "--level", "1"});
    CHECK(c.result.exit_code == 0);
    CHECK(has_line(c, "CRITERION_MATCH=PASS"));

    auto th = call({"theta", "--group", data("E1.grp"), "--level", "1", "--precision", "2", "--element", "h@g^0"});
    CHECK(has_line(th, "THETA[1]=h^3@g^0"));

    auto add = call({"additive-verify", "--group", data("E1.grp"), "--level", "1", "--precision", "1"});
    CHECK(add.result.exit_code == 0);
    CHECK(has_line(add, "BETA_RANK=11"));

    auto dg = call({"diagram-verify", "--group", data("E1.grp"), "--level", "1", "--precision", "3", "--element",
                    "2 + h@g^0 + 1@g^1"});
    CHECK(dg.result.exit_code == 0);
    CHECK(has_line(dg, "COMPAT_SPECIAL[1]=PASS"));

    auto il = call({"intlog", "--group", data("E1.grp"), "--level", "1", "--precision", "3", "--element", "h@g^0"});
    CHECK(il.result.exit_code == 0);
    CHECK(has_line(il, "INTLOG=0"));
}

TEST_CASE("zeta subcommands") {
    auto b = call({"bernoulli", "--k", "12"});
    CHECK(has_line(b, "BERNOULLI[12]=-691/2730"));

    auto dr = call({"dr-congruence", "--datum", data("tower3.zd"), "--i", "1", "--k", "4", "--level", "1"});
    CHECK(dr.result.exit_code == 0);
    CHECK(has_line(dr, "CONGRUENCE=PASS mod 3^1"));

    auto ver = call({"ver-congruence", "--datum", data("tower3.zd"), "--level", "2"});
    CHECK(ver.result.exit_code == 0);
    CHECK(has_line(ver, "VER[1]=PASS"));

    auto pz = call({"partial-zeta", "--datum", data("trivial5.zd"), "--level", "1", "--k", "4", "--element", "1@g^0"});
    CHECK(pz.result.exit_code == 0);
    CHECK(pz.result.lines.size() == 1);

    auto d = call({"delta", "--datum", data("trivial5.zd"), "--level", "1", "--k", "4"});
    CHECK(has_line(d, "P_INTEGRAL=true"));

    CHECK(call({"zeta-approx", "--datum", data("trivial5.zd"), "--j", "1", "--k", "3"}).result.exit_code == 2);
    CHECK(call({"dr-congruence", "--datum", data("trivial5.zd"), "--i", "1", "--k", "2"}).result.exit_code == 2);
}
