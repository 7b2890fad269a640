#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nonloc/config.hpp>
#include <nonloc/errors.hpp>

#include <cstdio>
#include <fstream>
#include <string>

using namespace nonloc;

namespace {

const char* base_text = R"(# smallest complete run description
[kernel]
family = "zero_order"
sigma = 0.5
epsilon = 0.2

[domain]
intervals = [[-1.0, 1.0]]

[grid]
h_rule = "fixed"
h_target = 0.05
truncation = 2.0
)";

template <typename F>
std::string error_text(F&& f) {
    try {
        f();
    } catch (const config_error& e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string& msg, const char* needle) {
    return msg.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("serialization round trip is a fixed point") {
    const run_config cfg = run_config::parse_string(base_text, "base");
    const std::string canon = cfg.serialize();
    const run_config again = run_config::parse_string(canon, "base");
    CHECK(again.serialize() == canon);
    // Sections come out sorted, so the canonical form is order independent.
    const run_config shuffled = run_config::parse_string(
        "[grid]\nh_rule = \"fixed\"\nh_target = 0.05\ntruncation = 2.0\n"
        "[domain]\nintervals = [[-1.0, 1.0]]\n"
        "[kernel]\nepsilon = 0.2\nfamily = \"zero_order\"\nsigma = 0.5\n");
    CHECK(shuffled.serialize() == canon);
    // 17 significant digits keep non-representable decimals intact.
    const run_config frac = run_config::parse_string("[a]\nx = 0.1\n");
    const run_config frac2 = run_config::parse_string(frac.serialize());
    CHECK(frac2.number("a.x") == 0.1);
}

TEST_CASE("parse errors name the offending line") {
    CHECK(mentions(error_text([] { run_config::parse_string("[kernel\n", "f"); }),
                   "f:1: malformed section header"));
    CHECK(mentions(error_text([] { run_config::parse_string("x = 1\n", "f"); }),
                   "f:1: entry outside any [section]"));
    CHECK(mentions(error_text([] { run_config::parse_string("[a]\n\njust words\n", "f"); }),
                   "f:3: expected 'key = value'"));
    CHECK(mentions(error_text([] { run_config::parse_string("[a]\nk!ey = 1\n", "f"); }),
                   "f:2: invalid key name"));
    CHECK(mentions(error_text([] { run_config::parse_string("[a]\nx = 1\nx = 2\n", "f"); }),
                   "f:3: duplicate key 'a.x'"));
    CHECK(mentions(error_text([] { run_config::parse_string("[a]\nx = \"oops\n", "f"); }),
                   "f:2: unterminated string"));
    CHECK(mentions(error_text([] { run_config::parse_string("[a]\nx = [1, 2\n", "f"); }),
                   "f:2: unterminated array"));
    CHECK(mentions(error_text([] { run_config::parse_string("[a]\nx = 1 2\n", "f"); }),
                   "f:2: trailing characters"));
    CHECK(mentions(error_text([] { run_config::parse_string("[a]\nx = abc\n", "f"); }),
                   "cannot parse value 'abc'"));
    CHECK(mentions(error_text([] { run_config::parse_string("[a]\nx =\n", "f"); }),
                   "missing value"));
}

TEST_CASE("comments, empty arrays, and file parsing") {
    const run_config cfg = run_config::parse_string(
        "[a]\nx = 3 # inline comment\ns = \"has # inside\"\nempty = []\nflag = true\n");
    CHECK(cfg.number("a.x") == 3.0);
    CHECK(cfg.text("a.s") == "has # inside");
    CHECK(cfg.number_list("a.empty").empty());
    CHECK(cfg.boolean_or("a.flag", false));

    const std::string path = "roundtrip_tmp.toml";
    {
        std::ofstream out(path);
        out << base_text;
    }
    const run_config from_file = run_config::parse_file(path);
    CHECK(from_file.origin() == path);
    CHECK(from_file.serialize() == run_config::parse_string(base_text).serialize());
    std::remove(path.c_str());
    CHECK(mentions(error_text([] { run_config::parse_file("no_such_file.toml"); }),
                   "cannot open"));
}

TEST_CASE("overrides replace or add entries") {
    run_config cfg = run_config::parse_string(base_text, "base");
    cfg.apply_override("kernel.epsilon=0.1");
    CHECK(cfg.number("kernel.epsilon") == 0.1);
    cfg.apply_override("solver.tol=1e-8");
    CHECK(cfg.number("solver.tol") == 1e-8);
    cfg.apply_override("study.epsilons=[0.4, 0.2]");
    CHECK(cfg.number_list("study.epsilons") == std::vector<double>{0.4, 0.2});
    cfg.apply_override("kernel.family=\"anisotropic\"");
    CHECK(cfg.text("kernel.family") == "anisotropic");

    CHECK_THROWS_AS(cfg.apply_override("kernel.epsilon"), config_error);
    CHECK_THROWS_AS(cfg.apply_override("nodot=1"), config_error);
    CHECK_THROWS_AS(cfg.apply_override("a.b=not-a-value"), config_error);
}

TEST_CASE("typed accessors check kinds and report locations") {
    const run_config cfg = run_config::parse_string(base_text, "base");
    CHECK(cfg.has("kernel.sigma"));
    CHECK_FALSE(cfg.has("kernel.missing"));
    CHECK(cfg.number_or("kernel.missing", 7.0) == 7.0);
    CHECK(cfg.integer_or("solver.iters", 40) == 40);
    CHECK(cfg.text_or("grid.h_rule", "quarter_eps") == "fixed");
    CHECK(cfg.boolean_or("solver.verbose", false) == false);

    CHECK(mentions(error_text([&] { cfg.number("kernel.family"); }),
                   "base:3: expected a number ('kernel.family')"));
    CHECK(mentions(error_text([&] { cfg.text("kernel.sigma"); }),
                   "base:4: expected a string"));
    CHECK(mentions(error_text([&] { cfg.number("solver.absent"); }),
                   "missing required key 'solver.absent'"));

    const run_config kinds = run_config::parse_string(
        "[a]\nhalf = 2.5\nnum = 3\nlist = [1, \"x\"]\nflat = [1, 2]\n"
        "deep = [[1, 2, 3]]\nmix = [[1, \"y\"]]\n");
    CHECK(kinds.integer("a.num") == 3);
    CHECK(mentions(error_text([&] { kinds.integer("a.half"); }), "expected an integer"));
    CHECK(mentions(error_text([&] { kinds.boolean_or("a.num", true); }),
                   "expected true/false"));
    CHECK(mentions(error_text([&] { kinds.number_list("a.num"); }), "expected an array"));
    CHECK(mentions(error_text([&] { kinds.number_list("a.list"); }),
                   "expected an array of numbers"));
    CHECK(mentions(error_text([&] { kinds.pair_list("a.flat"); }),
                   "expected an array of [a, b] pairs"));
    CHECK(mentions(error_text([&] { kinds.pair_list("a.deep"); }),
                   "expected an array of [a, b] pairs"));
    CHECK(mentions(error_text([&] { kinds.pair_list("a.mix"); }),
                   "expected an array of [a, b] pairs"));
}

TEST_CASE("kernel and domain builders") {
    run_config cfg = run_config::parse_string(base_text, "base");
    const kernel_spec ks = cfg.make_kernel();
    CHECK(ks.family == kernel_family::zero_order);
    CHECK(ks.sigma == 0.5);
    CHECK(ks.epsilon == 0.2);
    const kernel_spec swept = cfg.make_kernel_with_epsilon(0.05);
    CHECK(swept.epsilon == 0.05);
    CHECK(swept.family == kernel_family::zero_order);

    const domain dom = cfg.make_domain();
    CHECK(dom.contains_closure(1.0));
    CHECK_FALSE(dom.contains_closure(1.01));

    cfg.apply_override("kernel.family=\"made_up\"");
    CHECK(mentions(error_text([&] { cfg.make_kernel(); }),
                   "unknown kernel family 'made_up'"));
    cfg.apply_override("kernel.family=\"zero_order\"");
    cfg.apply_override("kernel.sigma=1.5");
    CHECK_THROWS_AS(cfg.make_kernel(), config_error);

    // Singular kernels default to no scale; profiles feed the density table.
    const run_config sing = run_config::parse_string(
        "[kernel]\nfamily = \"singular_fractional\"\nsigma = 0.5\n"
        "[domain]\nintervals = [[-1.0, 1.0]]\n");
    CHECK(sing.make_kernel().epsilon == 0.0);
    const run_config tab = run_config::parse_string(
        "[kernel]\nfamily = \"general_j\"\nprofile = [[0.0, 1.0], [1.0, 0.0]]\n"
        "[domain]\nintervals = [[-1.0, 1.0]]\n");
    const kernel_spec kt = tab.make_kernel();
    CHECK(kt.base_density.r == std::vector<double>{0.0, 1.0});
    CHECK(kt.base_density.v == std::vector<double>{1.0, 0.0});
}

TEST_CASE("cross validation catches inconsistent run setups") {
    // The base config sits exactly at h = epsilon/4 and is fine.
    CHECK_NOTHROW(run_config::parse_string(base_text, "base").cross_validate());

    run_config coarse = run_config::parse_string(base_text, "base");
    coarse.apply_override("grid.h_target=0.2");
    CHECK(mentions(error_text([&] { coarse.cross_validate(); }),
                   "peak resolution needs h <= epsilon/4"));

    // A sweep member can violate the rule even when the headline scale is ok.
    run_config sweep = run_config::parse_string(base_text, "base");
    sweep.apply_override("study.epsilons=[0.4, 0.2, 0.1]");
    CHECK(mentions(error_text([&] { sweep.cross_validate(); }), "epsilon = 0.1"));
    sweep.apply_override("grid.h_rule=\"quarter_eps\"");
    CHECK_NOTHROW(sweep.cross_validate());
    sweep.apply_override("grid.h_rule=\"adaptive\"");
    CHECK(mentions(error_text([&] { sweep.cross_validate(); }),
                   "h_rule must be 'fixed' or 'quarter_eps'"));

    // Step weight against the kernel mass: l1 = pi/eps at sigma = 1/2.
    run_config stepw = run_config::parse_string(base_text, "base");
    stepw.apply_override("solver.a=0.1");
    CHECK(mentions(error_text([&] { stepw.cross_validate(); }),
                   "a <= 1/||K||_1"));
    stepw.apply_override("kernel.epsilon=0.05");
    stepw.apply_override("grid.h_target=0.0125");
    CHECK(mentions(error_text([&] { stepw.cross_validate(); }), "a <= 1/||K||_1"));
    stepw.apply_override("solver.a=0.015");
    CHECK_NOTHROW(stepw.cross_validate());

    // Time grid checks: divisibility, scheme names, explicit stability.
    run_config par = run_config::parse_string(base_text, "base");
    par.apply_override("parabolic.dt=0.3");
    CHECK(mentions(error_text([&] { par.cross_validate(); }),
                   "missing required key 'parabolic.t_final'"));
    par.apply_override("parabolic.t_final=50.0");
    CHECK(mentions(error_text([&] { par.cross_validate(); }), "dt must divide t_final"));
    par.apply_override("parabolic.dt=0.5");
    CHECK_NOTHROW(par.cross_validate());
    par.apply_override("parabolic.dt=-0.5");
    CHECK(mentions(error_text([&] { par.cross_validate(); }), "must be positive"));
    par.apply_override("parabolic.dt=0.5");
    par.apply_override("parabolic.scheme=\"leapfrog\"");
    CHECK(mentions(error_text([&] { par.cross_validate(); }),
                   "scheme must be 'implicit_euler' or 'explicit_euler'"));
    par.apply_override("parabolic.scheme=\"explicit_euler\"");
    CHECK(mentions(error_text([&] { par.cross_validate(); }),
                   "dt * ||K||_1 <= 1"));
    par.apply_override("parabolic.dt=0.05");
    CHECK_NOTHROW(par.cross_validate());

    run_config esing = run_config::parse_string(
        "[kernel]\nfamily = \"singular_fractional\"\nsigma = 0.5\n"
        "[domain]\nintervals = [[-1.0, 1.0]]\n"
        "[grid]\nh_target = 0.05\ntruncation = 2.0\n"
        "[parabolic]\ndt = 0.5\nt_final = 50.0\nscheme = \"explicit_euler\"\n");
    CHECK(mentions(error_text([&] { esing.cross_validate(); }),
                   "explicit stepping needs an integrable kernel"));
}
