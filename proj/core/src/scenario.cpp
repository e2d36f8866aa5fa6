#include "sublab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "sublab/dp.hpp"
#include "sublab/errors.hpp"
#include "sublab/expectation.hpp"
#include "sublab/g_heat.hpp"
#include "sublab/harness.hpp"
#include "sublab/inequalities.hpp"
#include "sublab/random_instances.hpp"

namespace sublab {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

const json& field(const json& j, const char* name) {
    const auto it = j.find(name);
    if (it == j.end()) fail(std::string("missing field '") + name + "'");
    return *it;
}

double num(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_number()) fail(std::string("field '") + name + "' must be a number");
    return v.get<double>();
}

double num_or(const json& j, const char* name, double fallback) {
    return j.contains(name) ? num(j, name) : fallback;
}

// --- descriptor decoding -------------------------------------------------

struct PhiSpec {
    TestFunction fn;
    double clip;
    std::string label;
};

PhiSpec decode_phi(const json& j) {
    if (!j.is_object()) fail("phi descriptor must be an object");
    const std::string type = field(j, "type").get<std::string>();
    const double clip = num_or(j, "clip", 8.0);
    const int ppu = static_cast<int>(num_or(j, "points_per_unit", 64));
    if (type == "pos_part") return {TestFunction::positive_part_clipped(clip), clip, type};
    if (type == "identity") return {TestFunction::identity_clipped(clip), clip, type};
    if (type == "abs") return {TestFunction::abs_clipped(clip), clip, type};
    if (type == "square") return {TestFunction::clipped_power(2, clip, ppu), clip, type};
    if (type == "cube") return {TestFunction::clipped_power(3, clip, ppu), clip, type};
    if (type == "power") {
        const double p = num(j, "p");
        return {TestFunction::clipped_abs_power(p, clip, ppu), clip, type};
    }
    if (type == "pwl") {
        const json& bp = field(j, "breakpoints");
        const json& vals = field(j, "values");
        if (!bp.is_array() || !vals.is_array()) fail("pwl: breakpoints/values must be arrays");
        std::vector<double> xs = bp.get<std::vector<double>>();
        std::vector<double> vs = vals.get<std::vector<double>>();
        const double radius =
            xs.empty() ? 0.0 : std::max(std::fabs(xs.front()), std::fabs(xs.back()));
        return {TestFunction(std::move(xs), std::move(vs)), radius, type};
    }
    fail("unknown phi type '" + type + "'");
}

DistributionFamily decode_family(const json& j) {
    if (!j.is_array() || j.empty()) fail("family must be a nonempty array of members");
    std::vector<StepDistribution> members;
    for (const json& m : j) {
        if (!m.is_array() || m.empty()) fail("family member must be a nonempty array of atoms");
        std::vector<Atom> atoms;
        for (const json& a : m) {
            if (!a.is_array() || a.size() != 2) fail("atom must be [point, weight]");
            atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
        members.emplace_back(std::move(atoms));
    }
    return DistributionFamily(std::move(members));
}

GCoefficients decode_g(const json& j) {
    const json& g = field(j, "g");
    if (!g.is_array() || g.size() != 2) fail("field 'g' must be [sigma_lower_sq, sigma_upper_sq]");
    return GCoefficients(g[0].get<double>(), g[1].get<double>());
}

std::vector<int> decode_n_list(const json& j) {
    const json& v = field(j, "n_list");
    if (!v.is_array() || v.empty()) fail("field 'n_list' must be a nonempty array");
    std::vector<int> out;
    for (const json& e : v) {
        const int n = e.get<int>();
        if (n < 1) fail("n_list entries must be >= 1");
        out.push_back(n);
    }
    return out;
}

GridPolicy decode_policy(const json& j, double default_dx) {
    GridPolicy p;
    p.dx = num_or(j, "dx", default_dx);
    p.padding = num_or(j, "padding", 1.0);
    p.cfl_safety = num_or(j, "cfl", 0.5);
    if (!(p.dx > 0.0)) fail("field 'dx' must be > 0");
    return p;
}

PathFunctional decode_functional(const json& j) {
    const json& f = field(j, "functional");
    const std::string kind = field(f, "type").get<std::string>();
    if (kind == "terminal") return PathFunctional::terminal(decode_phi(field(f, "phi")).fn);
    if (kind == "running_max") return PathFunctional::running_max(decode_phi(field(f, "phi")).fn);
    if (kind == "skeleton") {
        const json& times = field(f, "times");
        const json& comps = field(f, "components");
        if (!times.is_array() || !comps.is_array() || times.size() != comps.size())
            fail("skeleton: 'times' and 'components' must be arrays of equal size");
        std::vector<double> ts = times.get<std::vector<double>>();
        std::vector<TestFunction> cs;
        for (const json& c : comps) cs.push_back(decode_phi(c).fn);
        return PathFunctional::skeleton(std::move(ts), std::move(cs));
    }
    fail("unknown functional type '" + kind + "'");
}

// --- report plumbing -----------------------------------------------------

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ordered_json row_json(const ReportRow& r) {
    ordered_json j;
    j["scenario_id"] = r.scenario_id;
    j["kind"] = r.kind;
    j["status"] = r.status;
    auto put = [&j](const char* name, const std::optional<double>& v) {
        if (v && !std::isnan(*v))
            j[name] = *v;
        else
            j[name] = nullptr;
    };
    if (r.n)
        j["n"] = *r.n;
    else
        j["n"] = nullptr;
    put("prelimit", r.prelimit);
    put("limit", r.limit);
    put("gap", r.gap);
    put("lhs", r.lhs);
    put("rhs", r.rhs);
    put("slack", r.slack);
    put("grid_dx", r.grid_dx);
    put("clip", r.clip);
    if (r.seed)
        j["seed"] = *r.seed;
    else
        j["seed"] = nullptr;
    return j;
}

// Context handed to the per-kind runners.
struct RunContext {
    const Scenario& sc;
    std::uint64_t seed;
    json params;
    RunReport rep;

    ReportRow row() const {
        ReportRow r;
        r.scenario_id = sc.id;
        r.kind = sc.kind;
        r.grid_dx = rep.grid_dx > 0 ? std::optional<double>(rep.grid_dx) : std::nullopt;
        r.clip = rep.clip > 0 ? std::optional<double>(rep.clip) : std::nullopt;
        r.seed = seed;
        return r;
    }
};

// --- kind runners ---------------------------------------------------------

void run_gnormal(RunContext& ctx) {
    const json& p = ctx.params;
    const PhiSpec phi = decode_phi(field(p, "phi"));
    const double rho = num(p, "rho");
    const GCoefficients g = decode_g(p);
    const GridPolicy policy = decode_policy(p, 0.02);
    const double expected = num(p, "expected");
    const double tolerance = num(p, "tolerance");

    HeatSolveConfig cfg = p.contains("grid_radius")
                              ? HeatSolveConfig{Grid::symmetric(num(p, "grid_radius"), policy.dx),
                                                policy.cfl_safety}
                              : policy.pde_config(phi.fn, g.sigma_upper_sq, rho);
    ctx.rep.grid_dx = cfg.grid.dx();
    ctx.rep.clip = phi.clip;
    ctx.rep.time_steps = g_heat_step_count(rho, g, cfg);

    const double value = g_normal_expect(phi.fn, rho, g, cfg);
    const double gap = std::fabs(value - expected);
    ctx.rep.status = gap <= tolerance ? "pass" : "fail";

    ReportRow r = ctx.row();
    r.prelimit = value;
    r.limit = expected;
    r.gap = gap;
    ctx.rep.rows.push_back(std::move(r));

    ordered_json details;
    details["value"] = value;
    details["expected"] = expected;
    details["tolerance"] = tolerance;
    details["form"] = "explicit-march-from-terminal-data";
    ctx.rep.details_json = details.dump();
}

ordered_json lindeberg_json(const LindebergReport& rep) {
    ordered_json j;
    ordered_json sums = ordered_json::array();
    for (const auto& [eps, v] : rep.truncation_sums)
        sums.push_back(ordered_json{{"eps", eps}, {"sum", v}});
    j["truncation_sums"] = std::move(sums);
    j["var_sum_upper"] = rep.var_sum_upper;
    j["rho_gap"] = rep.rho_gap;
    j["r_gap"] = rep.r_gap;
    j["mean_sum"] = rep.mean_sum;
    j["worst_state"] = rep.worst_state;
    return j;
}

void convergence_rows(RunContext& ctx, const ConvergenceTable& table,
                      const std::string& id_suffix = "") {
    for (const ConvergenceRow& cr : table.rows) {
        ReportRow r = ctx.row();
        if (!id_suffix.empty()) r.scenario_id += id_suffix;
        r.n = cr.n;
        r.prelimit = cr.prelimit;
        if (!std::isnan(cr.limit)) r.limit = cr.limit;
        if (!std::isnan(cr.gap)) r.gap = cr.gap;
        ctx.rep.rows.push_back(std::move(r));
    }
}

// Shared by clt/fclt: scaled i.i.d. builder plus Lindeberg bookkeeping.
struct CltSetup {
    DistributionFamily base;
    std::vector<int> n_list;
    GridPolicy policy;
    GCoefficients g;
    double rho;
    double r_target;
    std::vector<double> eps_list;
    double lindeberg_tol;

    explicit CltSetup(const json& p)
        : base(decode_family(field(p, "base_family"))),
          n_list(decode_n_list(p)),
          policy(decode_policy(p, 1.0 / 64)),
          g(decode_g(p)),
          rho(num_or(p, "rho", 1.0)),
          r_target(num_or(p, "r_target", g.sigma_lower_sq / g.sigma_upper_sq)),
          eps_list(p.contains("eps_list") ? field(p, "eps_list").get<std::vector<double>>()
                                          : std::vector<double>{0.25, 1.0}),
          lindeberg_tol(num_or(p, "lindeberg_tol", 1e-9)) {}

    KernelArray build(int n) const {
        return KernelArray::iid(n, base.scaled(1.0 / std::sqrt(static_cast<double>(n))));
    }

    // Largest condition value across the n_list; everything in the report
    // other than var_sum_upper is expected to vanish.
    double check(ordered_json& details) const {
        double worst = 0.0;
        ordered_json per_n = ordered_json::array();
        for (int n : n_list) {
            const LindebergReport rep =
                lindeberg_conditions(build(n), eps_list, rho, r_target);
            for (const auto& [eps, v] : rep.truncation_sums) worst = std::max(worst, v);
            worst = std::max({worst, rep.rho_gap, rep.r_gap, rep.mean_sum});
            ordered_json entry = lindeberg_json(rep);
            entry["n"] = n;
            per_n.push_back(std::move(entry));
        }
        details["lindeberg"] = std::move(per_n);
        return worst;
    }
};

void run_clt(RunContext& ctx) {
    const json& p = ctx.params;
    const CltSetup setup(p);
    const PhiSpec phi = decode_phi(field(p, "phi"));
    const double monotone_tol = num_or(p, "monotone_tol", 1e-9);
    const double final_ratio_max = num_or(p, "final_ratio_max", 0.0);

    ctx.rep.grid_dx = setup.policy.dx;
    ctx.rep.clip = phi.clip;

    ordered_json details;
    const double lindeberg_worst = setup.check(details);
    const ConvergenceTable table =
        clt_gap([&setup](int n) { return setup.build(n); }, phi.fn, setup.n_list, setup.rho,
                setup.g, setup.policy);
    convergence_rows(ctx, table);

    bool ok = lindeberg_worst <= setup.lindeberg_tol;
    for (std::size_t i = 1; i < table.rows.size(); ++i)
        ok = ok && table.rows[i].gap <= table.rows[i - 1].gap + monotone_tol;
    if (final_ratio_max > 0.0 && table.rows.size() >= 2)
        ok = ok && table.rows.back().gap <= final_ratio_max * table.rows.front().gap;
    ctx.rep.status = ok ? "pass" : "fail";

    details["lindeberg_worst"] = lindeberg_worst;
    ctx.rep.details_json = details.dump();
}

void run_fclt(RunContext& ctx) {
    const json& p = ctx.params;
    const CltSetup setup(p);
    const PathFunctional functional = decode_functional(p);
    const double monotone_tol = num_or(p, "monotone_tol", 0.0);

    ctx.rep.grid_dx = setup.policy.dx;

    ordered_json details;
    const double lindeberg_worst = setup.check(details);
    const ConvergenceTable table =
        fclt_gap([&setup](int n) { return setup.build(n); }, functional, setup.n_list,
                 setup.rho, setup.g, setup.policy);
    convergence_rows(ctx, table);

    bool ok = lindeberg_worst <= setup.lindeberg_tol;
    if (functional.kind() == PathFunctional::Kind::RunningMax) {
        // successive Cauchy gaps must strictly decrease
        double prev = kNaN;
        for (const ConvergenceRow& r : table.rows) {
            if (std::isnan(r.gap)) continue;
            if (!std::isnan(prev)) ok = ok && r.gap < prev - monotone_tol;
            prev = r.gap;
        }
    } else if (table.rows.size() >= 2) {
        ok = ok && table.rows.back().gap < table.rows.front().gap - monotone_tol;
    }
    ctx.rep.status = ok ? "pass" : "fail";

    details["lindeberg_worst"] = lindeberg_worst;
    ctx.rep.details_json = details.dump();
}

InstanceCaps decode_caps(const json& p, bool nonpositive_mean) {
    InstanceCaps caps;
    caps.max_steps = static_cast<int>(num_or(p, "max_steps", 5));
    caps.max_atoms = static_cast<int>(num_or(p, "max_atoms", 3));
    caps.max_members = static_cast<int>(num_or(p, "max_members", 3));
    caps.scale = num_or(p, "scale", 1.0);
    caps.on_grid_dx = num_or(p, "on_grid_dx", 0.0);
    caps.nonpositive_mean = nonpositive_mean;
    return caps;
}

void summary_row(RunContext& ctx, long count, const InequalityReport& worst,
                 double min_slack) {
    ReportRow r = ctx.row();
    r.n = count;
    r.lhs = worst.lhs;
    r.rhs = worst.rhs;
    r.slack = min_slack;
    ctx.rep.rows.push_back(std::move(r));
}

void run_rosenthal(RunContext& ctx) {
    const json& p = ctx.params;
    const std::string variant = field(p, "variant").get<std::string>();
    const double pw = num_or(p, "p", 2.0);
    const long instances = static_cast<long>(num_or(p, "instances", 100));
    const double slack_floor = num_or(p, "slack_floor", -1e-9);

    const bool independent = variant == "independent";
    const bool suffix = variant == "suffix_sq";
    if (!independent && !suffix && variant != "max_sq" && variant != "max_p")
        fail("unknown rosenthal variant '" + variant + "'");
    const double c_p_default = independent ? 8.0 : std::pow(2.0, 2.0 * pw) * pw * pw;
    const double c_p = num_or(p, "c_p", c_p_default);
    const InstanceCaps caps = decode_caps(p, suffix);

    Rng rng(ctx.seed);
    double min_slack = HUGE_VAL;
    double empirical_c = 0.0;
    InequalityReport worst{0, 0, HUGE_VAL, "none"};
    ordered_json items = ordered_json::array();
    for (long i = 0; i < instances; ++i) {
        InequalityReport rep{};
        if (independent) {
            const int n = rng.uniform_int(1, caps.max_steps);
            std::vector<DistributionFamily> fams;
            for (int k = 0; k < n; ++k) fams.push_back(random_family(rng, caps));
            rep = independent_rosenthal_check(fams, pw, c_p);
        } else {
            const KernelArray arr = random_kernel_array(rng, caps);
            const RosenthalVariant v = suffix ? RosenthalVariant::SuffixSquared
                                      : variant == "max_sq" ? RosenthalVariant::MaxSquared
                                                            : RosenthalVariant::MaxPower;
            rep = rosenthal_check(arr, pw, v, c_p);
        }
        if (rep.slack < min_slack) {
            min_slack = rep.slack;
            worst = rep;
        }
        if (rep.rhs > 0.0) empirical_c = std::max(empirical_c, c_p * rep.lhs / rep.rhs);
        items.push_back(ordered_json{{"lhs", rep.lhs},
                                     {"rhs", rep.rhs},
                                     {"slack", rep.slack},
                                     {"instance", rep.instance}});
    }
    ctx.rep.status = min_slack >= slack_floor ? "pass" : "fail";
    summary_row(ctx, instances, worst, min_slack);

    ordered_json details;
    details["variant"] = variant;
    details["p"] = pw;
    details["c_p"] = c_p;
    details["min_slack"] = min_slack;
    details["empirical_smallest_constant"] = empirical_c;
    details["instances"] = std::move(items);
    ctx.rep.details_json = details.dump();
}

void run_exponential(RunContext& ctx) {
    const json& p = ctx.params;
    const long instances = static_cast<long>(num_or(p, "instances", 100));
    const double slack_floor = num_or(p, "slack_floor", -1e-9);
    const double ramp_width = num_or(p, "ramp_width", 1e-6);
    const InstanceCaps caps = decode_caps(p, /*nonpositive_mean=*/true);

    Rng rng(ctx.seed);
    double min_slack = HUGE_VAL;
    InequalityReport worst{0, 0, HUGE_VAL, "none"};
    ordered_json items = ordered_json::array();
    for (long i = 0; i < instances; ++i) {
        const KernelArray arr = random_kernel_array(rng, caps);
        const double y = arr.c_max() * 1.3 + 0.05;
        const double A = worst_path_variance(arr);
        const double target = rng.uniform(0.4, 1.8) * std::max(std::sqrt(A), 0.1);
        // keep x away from the reachable final sums so the ramp bracket is
        // the exact capacity
        const std::vector<double> sums = reachable_states(arr).back();
        double x = target;
        double width = ramp_width;
        const auto it = std::lower_bound(sums.begin(), sums.end(), target);
        if (it == sums.end()) {
            x = std::max(sums.back() + 0.5, 0.1);
        } else if (it == sums.begin()) {
            x = target; // below every reachable sum; capacity is flat here
            if (std::fabs(*it - x) < 2.0 * width) x = *it - 4.0 * width;
            if (x <= 0.0) x = *it / 2.0;
        } else {
            const double gap_len = *it - *(it - 1);
            x = 0.5 * (*it + *(it - 1));
            width = std::min(width, 0.25 * gap_len);
        }
        if (x <= 0.0) x = std::max(sums.back() + 0.5, 0.1);
        const InequalityReport rep = exponential_inequality_check(arr, x, y, width);
        if (rep.slack < min_slack) {
            min_slack = rep.slack;
            worst = rep;
        }
        items.push_back(ordered_json{{"lhs", rep.lhs},
                                     {"rhs", rep.rhs},
                                     {"slack", rep.slack},
                                     {"x", x},
                                     {"y", y},
                                     {"A", A},
                                     {"instance", rep.instance}});
    }
    ctx.rep.status = min_slack >= slack_floor ? "pass" : "fail";
    summary_row(ctx, instances, worst, min_slack);

    ordered_json details;
    details["min_slack"] = min_slack;
    details["instances"] = std::move(items);
    ctx.rep.details_json = details.dump();
}

void run_counterexample(RunContext& ctx) {
    const json& p = ctx.params;
    const double tau = num(p, "tau");
    const double a = num(p, "a");
    CounterexampleConfig cfg;
    cfg.dx = num_or(p, "dx", cfg.dx);
    cfg.dx_compose = num_or(p, "dx_compose", cfg.dx_compose);
    cfg.cfl_safety = num_or(p, "cfl", cfg.cfl_safety);
    cfg.clip_sigmas = num_or(p, "clip_sigmas", cfg.clip_sigmas);
    cfg.points_per_unit = static_cast<int>(num_or(p, "points_per_unit", cfg.points_per_unit));
    cfg.bounds_tol = num_or(p, "bounds_tol", cfg.bounds_tol);
    cfg.composition_tol = num_or(p, "composition_tol", cfg.composition_tol);

    const CounterexampleReport rep = counterexample_check(tau, a, cfg);
    ctx.rep.grid_dx = cfg.dx;
    ctx.rep.clip = rep.clip_xi;
    ctx.rep.status = rep.consistent ? "pass" : "fail";

    ReportRow r = ctx.row();
    r.prelimit = rep.third_moment_xi;
    r.limit = rep.third_moment_sum;
    r.gap = std::fabs(rep.third_moment_sum - rep.third_moment_xi);
    r.lhs = rep.bound_upper;
    r.rhs = rep.scaled_lower_bound;
    r.slack = rep.scaled_lower_bound - rep.bound_upper; // certificate margin
    ctx.rep.rows.push_back(std::move(r));

    ordered_json details;
    details["tau"] = tau;
    details["a"] = a;
    details["third_moment_xi"] = rep.third_moment_xi;
    details["third_moment_sum"] = rep.third_moment_sum;
    details["bound_lower"] = rep.bound_lower;
    details["bound_upper"] = rep.bound_upper;
    details["scaled_lower_bound"] = rep.scaled_lower_bound;
    details["clip_xi"] = rep.clip_xi;
    details["clip_sum"] = rep.clip_sum;
    details["tail_bound"] = rep.tail_bound;
    details["within_bounds"] = rep.within_bounds;
    details["composition_consistent"] = rep.composition_consistent;
    details["contradiction_holds"] = rep.contradiction_holds;
    details["form"] = "explicit-march-from-terminal-data";
    ctx.rep.details_json = details.dump();
}

void run_levy(RunContext& ctx) {
    const json& p = ctx.params;
    const GCoefficients g = decode_g(p);
    const std::vector<int> n_list = decode_n_list(p);
    const GridPolicy policy = decode_policy(p, 1.0 / 64);
    const double monotone_tol = num_or(p, "monotone_tol", 0.0);
    const json& phis_j = field(p, "phis");
    if (!phis_j.is_array() || phis_j.empty()) fail("field 'phis' must be a nonempty array");
    std::vector<PhiSpec> phis;
    for (const json& pj : phis_j) phis.push_back(decode_phi(pj));

    ctx.rep.grid_dx = policy.dx;

    std::vector<TestFunction> fns;
    for (const PhiSpec& s : phis) fns.push_back(s.fn);
    const std::vector<ConvergenceTable> tables = levy_demo(g, n_list, fns, policy);

    // Exact structural checks of the per-step statistics: zero conditional
    // means and the declared variance band scaled by 1/n.
    bool structural = true;
    ordered_json steps = ordered_json::array();
    for (int n : n_list) {
        const KernelArray arr = KernelArray::iid(n, levy_step_family(g, n));
        const StepStats st = conditional_step_stats(arr, 1);
        const bool means_zero = st.mean_upper == 0.0 && st.mean_lower == 0.0;
        const bool band_ok =
            std::fabs(st.var_upper * n - g.sigma_upper_sq) <= 4e-16 * g.sigma_upper_sq * n &&
            std::fabs(st.var_lower * n - g.sigma_lower_sq) <= 4e-16 * g.sigma_upper_sq * n;
        structural = structural && means_zero && band_ok;
        steps.push_back(ordered_json{{"n", n},
                                     {"mean_upper", st.mean_upper},
                                     {"mean_lower", st.mean_lower},
                                     {"var_upper", st.var_upper},
                                     {"var_lower", st.var_lower}});
    }

    bool ok = structural;
    for (std::size_t t = 0; t < tables.size(); ++t) {
        const std::string suffix = tables.size() > 1 ? "[" + std::to_string(t) + "]" : "";
        convergence_rows(ctx, tables[t], suffix);
        const auto& rows = tables[t].rows;
        if (rows.size() >= 2) ok = ok && rows.back().gap <= rows.front().gap + monotone_tol;
    }
    ctx.rep.status = ok ? "pass" : "fail";

    ordered_json details;
    details["structural_exact"] = structural;
    details["step_stats"] = std::move(steps);
    ctx.rep.details_json = details.dump();
}

// --- axioms ---------------------------------------------------------------

TestFunction random_pl(Rng& rng, bool nonneg = false) {
    const int k = rng.uniform_int(3, 6);
    std::vector<double> xs;
    while (static_cast<int>(xs.size()) < k) {
        const double x = rng.uniform(-4.0, 4.0);
        bool dup = false;
        for (double e : xs) dup = dup || std::fabs(e - x) < 1e-6;
        if (!dup) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    std::vector<double> vs(xs.size());
    for (double& v : vs) v = nonneg ? rng.uniform(0.0, 5.0) : rng.uniform(-5.0, 5.0);
    return TestFunction(std::move(xs), std::move(vs));
}

void run_axioms(RunContext& ctx) {
    const json& p = ctx.params;
    const long checks = static_cast<long>(num_or(p, "checks", 1000));
    const double slack_floor = num_or(p, "slack_floor", -1e-9);
    InstanceCaps caps;
    caps.max_atoms = 4;
    caps.max_members = 3;
    caps.scale = 3.0;

    struct Property {
        const char* name;
        double min_margin = HUGE_VAL;
        long violations = 0;
    };
    std::vector<Property> props = {{"monotonicity"}, {"constant_preserving"},
                                   {"sub_additivity"}, {"positive_homogeneity"},
                                   {"conjugate_dominance"}, {"holder_p2"},
                                   {"translation"}};

    Rng rng(ctx.seed);
    for (long i = 0; i < checks; ++i) {
        const DistributionFamily fam = random_family(rng, caps);
        const TestFunction phi = random_pl(rng);
        const TestFunction psi = random_pl(rng);

        double margins[7];
        margins[0] = expect_step(fam, phi + random_pl(rng, /*nonneg=*/true)) -
                     expect_step(fam, phi);
        const double c = rng.uniform(-5.0, 5.0);
        margins[1] = -std::fabs(expect_step(fam, TestFunction::constant(c)) - c);
        margins[2] = expect_step(fam, phi) + expect_step(fam, psi) -
                     expect_step(fam, phi + psi);
        const double lambda = rng.uniform(0.0, 3.0);
        margins[3] = -std::fabs(expect_step(fam, phi.scaled(lambda)) -
                                lambda * expect_step(fam, phi));
        margins[4] = expect_step(fam, phi) - conjugate_expect_step(fam, phi);
        const double xy = expect_fn(fam, [&](double x) { return std::fabs(phi(x) * psi(x)); });
        const double xx = expect_fn(fam, [&](double x) { return phi(x) * phi(x); });
        const double yy = expect_fn(fam, [&](double x) { return psi(x) * psi(x); });
        margins[5] = std::sqrt(xx) * std::sqrt(yy) - xy;
        margins[6] = -std::fabs(expect_step(fam, phi.shifted(c)) -
                                (expect_step(fam, phi) + c));

        for (int j = 0; j < 7; ++j) {
            props[static_cast<std::size_t>(j)].min_margin =
                std::min(props[static_cast<std::size_t>(j)].min_margin, margins[j]);
            if (margins[j] < slack_floor) ++props[static_cast<std::size_t>(j)].violations;
        }
    }

    bool ok = true;
    for (const Property& pr : props) {
        ReportRow r = ctx.row();
        r.scenario_id += std::string("/") + pr.name;
        r.n = checks;
        r.slack = pr.min_margin;
        ctx.rep.rows.push_back(std::move(r));
        ok = ok && pr.violations == 0;
    }
    ctx.rep.status = ok ? "pass" : "fail";

    ordered_json details;
    ordered_json per = ordered_json::array();
    for (const Property& pr : props)
        per.push_back(ordered_json{{"property", pr.name},
                                   {"min_margin", pr.min_margin},
                                   {"violations", pr.violations}});
    details["properties"] = std::move(per);
    ctx.rep.details_json = details.dump();
}

using KindRunner = void (*)(RunContext&);

KindRunner runner_for(const std::string& kind) {
    if (kind == "gnormal") return run_gnormal;
    if (kind == "clt") return run_clt;
    if (kind == "fclt") return run_fclt;
    if (kind == "rosenthal") return run_rosenthal;
    if (kind == "exponential") return run_exponential;
    if (kind == "counterexample") return run_counterexample;
    if (kind == "levy") return run_levy;
    if (kind == "axioms") return run_axioms;
    return nullptr;
}

// Decode-only pass used by parse_scenarios to reject bad configs early.
void validate_params(const std::string& kind, const json& p) {
    if (kind == "gnormal") {
        decode_phi(field(p, "phi"));
        num(p, "rho");
        decode_g(p);
        num(p, "expected");
        num(p, "tolerance");
    } else if (kind == "clt") {
        const CltSetup setup(p);
        (void)setup;
        decode_phi(field(p, "phi"));
    } else if (kind == "fclt") {
        const CltSetup setup(p);
        (void)setup;
        decode_functional(p);
    } else if (kind == "rosenthal") {
        const std::string variant = field(p, "variant").get<std::string>();
        if (variant != "suffix_sq" && variant != "max_sq" && variant != "max_p" &&
            variant != "independent")
            fail("unknown rosenthal variant '" + variant + "'");
        if (variant == "max_p" && num_or(p, "p", 2.0) < 2.0) fail("max_p needs p >= 2");
    } else if (kind == "exponential") {
        (void)num_or(p, "instances", 100);
    } else if (kind == "counterexample") {
        const double tau = num(p, "tau");
        if (!(tau > 0.0) || !(tau < 1.0)) fail("field 'tau' must lie in (0, 1)");
        num(p, "a");
    } else if (kind == "levy") {
        decode_g(p);
        decode_n_list(p);
        const json& phis = field(p, "phis");
        if (!phis.is_array() || phis.empty()) fail("field 'phis' must be a nonempty array");
        for (const json& pj : phis) decode_phi(pj);
    } else if (kind == "axioms") {
        (void)num_or(p, "checks", 1000);
    } else {
        fail("unknown kind '" + kind + "'");
    }
}

RunReport run_one(const Scenario& sc, std::uint64_t default_seed) {
    RunReport result;
    result.scenario_id = sc.id;
    result.kind = sc.kind;
    result.details_json = "{}";
    const auto start = std::chrono::steady_clock::now();
    try {
        json params = json::parse(sc.params_json);
        const std::uint64_t seed = params.contains("seed")
                                       ? params["seed"].get<std::uint64_t>()
                                       : (default_seed ^ fnv1a(sc.id));
        result.seed = seed;
        RunContext ctx{sc, seed, std::move(params), RunReport{}};
        ctx.rep.scenario_id = sc.id;
        ctx.rep.kind = sc.kind;
        ctx.rep.seed = seed;
        ctx.rep.details_json = "{}";
        const KindRunner fn = runner_for(sc.kind);
        if (!fn) fail("unknown kind '" + sc.kind + "'");
        fn(ctx);
        result = std::move(ctx.rep);
    } catch (const std::exception& e) {
        result.status = "error";
        result.message = e.what();
        result.rows.clear();
    }
    result.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return result;
}

} // namespace

std::vector<std::string> scenario_kinds() {
    return {"gnormal", "clt",            "fclt", "rosenthal",
            "exponential", "counterexample", "levy", "axioms"};
}

std::vector<Scenario> parse_scenarios_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(origin + ": " + e.what());
    }
    if (!root.is_object() || !root.contains("scenarios") || !root["scenarios"].is_array())
        throw std::runtime_error(origin + ": expected an object with a 'scenarios' array");

    std::vector<Scenario> out;
    std::vector<std::string> seen;
    for (const json& sj : root["scenarios"]) {
        if (!sj.is_object()) throw std::runtime_error(origin + ": scenario must be an object");
        Scenario sc;
        try {
            sc.id = field(sj, "id").get<std::string>();
            sc.kind = field(sj, "kind").get<std::string>();
            validate_params(sc.kind, sj);
        } catch (const std::exception& e) {
            const std::string id = sj.contains("id") && sj["id"].is_string()
                                       ? sj["id"].get<std::string>()
                                       : "<unnamed>";
            throw std::runtime_error(origin + ": scenario '" + id + "': " + e.what());
        }
        for (const std::string& s : seen)
            if (s == sc.id)
                throw std::runtime_error(origin + ": duplicate scenario id '" + sc.id + "'");
        seen.push_back(sc.id);
        sc.params_json = sj.dump();
        out.push_back(std::move(sc));
    }
    return out;
}

std::vector<Scenario> parse_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenarios_text(ss.str(), path);
}

std::vector<RunReport> run(const std::vector<Scenario>& scenarios, int parallelism,
                           std::uint64_t default_seed) {
    if (parallelism < 1) throw std::invalid_argument("run: parallelism must be >= 1");
    std::vector<RunReport> out(scenarios.size());
    std::size_t next = 0;
    while (next < scenarios.size()) {
        const std::size_t batch =
            std::min<std::size_t>(static_cast<std::size_t>(parallelism),
                                  scenarios.size() - next);
        std::vector<std::future<RunReport>> futures;
        futures.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            const Scenario& sc = scenarios[next + i];
            futures.push_back(std::async(std::launch::async,
                                         [&sc, default_seed] { return run_one(sc, default_seed); }));
        }
        for (std::size_t i = 0; i < batch; ++i) out[next + i] = futures[i].get();
        next += batch;
    }
    return out;
}

const char* const kCsvHeader =
    "scenario_id,kind,status,n,prelimit,limit,gap,lhs,rhs,slack,grid_dx,clip,seed";

std::string to_csv(const std::vector<RunReport>& reports) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    auto cell = [&os](const std::optional<double>& v) {
        os << ',';
        if (v && !std::isnan(*v)) os << fmt(*v);
    };
    for (const RunReport& rep : reports) {
        for (const ReportRow& r : rep.rows) {
            os << r.scenario_id << ',' << r.kind << ',' << rep.status;
            os << ',';
            if (r.n) os << *r.n;
            cell(r.prelimit);
            cell(r.limit);
            cell(r.gap);
            cell(r.lhs);
            cell(r.rhs);
            cell(r.slack);
            cell(r.grid_dx);
            cell(r.clip);
            os << ',';
            if (r.seed) os << *r.seed;
            os << "\n";
        }
        if (rep.rows.empty()) {
            // error reports still appear, with empty numeric cells
            os << rep.scenario_id << ',' << rep.kind << ',' << rep.status
               << ",,,,,,,,,," << rep.seed << "\n";
        }
    }
    return os.str();
}

std::string to_json(const std::vector<RunReport>& reports) {
    ordered_json arr = ordered_json::array();
    for (const RunReport& rep : reports) {
        ordered_json j;
        j["scenario_id"] = rep.scenario_id;
        j["kind"] = rep.kind;
        j["status"] = rep.status;
        j["message"] = rep.message;
        ordered_json rows = ordered_json::array();
        for (const ReportRow& r : rep.rows) {
            ordered_json rj = row_json(r);
            rj["status"] = rep.status;
            rows.push_back(std::move(rj));
        }
        j["rows"] = std::move(rows);
        j["grid_dx"] = rep.grid_dx;
        j["time_steps"] = rep.time_steps;
        j["clip"] = rep.clip;
        j["seed"] = rep.seed;
        j["wall_ms"] = rep.wall_ms;
        j["details"] = ordered_json::parse(rep.details_json.empty() ? "{}" : rep.details_json);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

void emit(const std::vector<RunReport>& reports, const std::string& format,
          const std::string& out_dir) {
    if (format != "csv" && format != "json")
        throw std::invalid_argument("emit: format must be 'csv' or 'json'");
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path path =
        std::filesystem::path(out_dir) / (format == "csv" ? "reports.csv" : "reports.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot write " + path.string());
    out << (format == "csv" ? to_csv(reports) : to_json(reports));
    if (!out) throw std::runtime_error("emit: write failed for " + path.string());
}

bool all_passed(const std::vector<RunReport>& reports) {
    for (const RunReport& r : reports)
        if (r.status != "pass") return false;
    return true;
}

} // namespace sublab
