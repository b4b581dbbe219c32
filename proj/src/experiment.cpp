#include "udn/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "udn/analytic.hpp"
#include "udn/format.hpp"
#include "udn/rate_cdf.hpp"

namespace udn
{
namespace
{
using nlohmann::json;

constexpr char const* artifact_version = "1.0.0";

//---------------------------------------------------------------------------//
// Schema
//---------------------------------------------------------------------------//

struct FieldDoc
{
    char const* name;
    //! Space-separated experiment names, or "*" for all
    char const* experiments;
    char const* default_text;
    char const* help;
};

// Single source for parsing (allowed keys) and describe()
FieldDoc const fields[] = {
    {"experiment", "*", "required",
     "one of coverage, rate-cdf, min-tau, tradeoff, coord-eval, coord-savings"},
    {"master_seed", "*", "required", "unsigned 64-bit master seed"},
    {"output_dir", "*", "\"results\"", "root directory for run folders"},
    {"channel", "*", "{}", "channel parameters, see below"},
    {"lambda_an", "coverage rate-cdf", "100", "AN density per km^2"},
    {"lambda_ue", "coverage rate-cdf", "100",
     "background UE density per km^2 (0 allowed)"},
    {"n_trials", "coverage rate-cdf min-tau tradeoff", "100000",
     "Monte Carlo trials (min-tau/tradeoff: per tau, default 10000)"},
    {"activity", "coverage rate-cdf",
     "\"all_active\" (coverage), \"load_based\" (rate-cdf)",
     "interferer activity model: load_based or all_active"},
    {"theta_db_grid", "coverage", "[-10, -6, 0, 6, 10]",
     "SIR thresholds in dB"},
    {"engine", "rate-cdf min-tau tradeoff",
     "\"montecarlo\" (rate-cdf), \"semianalytic\" (min-tau, tradeoff)",
     "montecarlo or semianalytic"},
    {"n_grid", "rate-cdf", "512", "semianalytic CDF grid size (3..2048)"},
    {"r0_grid", "min-tau",
     "[0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.2, 0.5, 1, 2, 4, 5, 6, 7, 8]",
     "target median rates in bps/Hz"},
    {"tau_lo", "min-tau", "0.001", "lower end of the tau bracket"},
    {"tau_hi", "min-tau", "1000", "upper end of the tau bracket"},
    {"tolerance", "min-tau", "0.01", "relative tolerance on the median rate"},
    {"mc_lambda_an", "min-tau tradeoff", "100",
     "AN density held fixed by the Monte Carlo engine"},
    {"base_lambda_an", "tradeoff", "5", "initial AN density per km^2"},
    {"base_lambda_ue", "tradeoff", "100", "initial UE density per km^2"},
    {"densification_factor", "tradeoff", "100",
     "final AN density over initial AN density"},
    {"x_grid", "tradeoff", "[1, 2, 5, 10, 20, 50, 100]",
     "UE density growth factors, ascending"},
    {"tau_grid", "coord-eval coord-savings",
     "[0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50, 100]",
     "densification ratios (AN count = round(tau * n_ues))"},
    {"n_ues", "coord-eval coord-savings", "50", "UEs per realization"},
    {"window_side_m", "coord-eval coord-savings", "1000",
     "side of the square deployment area in meters"},
    {"n_rb", "coord-eval coord-savings", "4", "orthogonal resource blocks"},
    {"n_realizations", "coord-eval coord-savings", "100",
     "independent realizations per tau"},
    {"policies", "coord-eval coord-savings",
     "[\"baseline\", \"policy1\", \"policy2\"]",
     "policies to evaluate (savings need baseline)"},
    {"target_rates", "coord-savings", "[0.1, 0.5, 1]",
     "guaranteed-rate targets in bps/Hz"},
};

FieldDoc const channel_fields[] = {
    {"alpha", "*", "4", "path-loss exponent (> 2)"},
    {"d0_m", "*", "1", "reference distance in meters"},
    {"fading", "*", "\"rayleigh\"", "rayleigh or none"},
    {"noise_psd_dbm_hz", "*",
     "\"off\" (typical-UE experiments), -174 (coord-*)",
     "noise density in dBm/Hz, or \"off\"/\"-inf\" for interference-limited"},
    {"bandwidth_hz", "*", "10e6", "system bandwidth"},
    {"tx_power_dbm", "*", "30", "AN transmit power (cap for power control)"},
    {"theta0_db", "*", "-6", "service threshold; rate is zero below it"},
    {"n_subchannels", "*", "10", "subchannels N of the typical-UE model"},
};

struct ExperimentDoc
{
    char const* name;
    char const* summary;
    char const* tables;
};

ExperimentDoc const experiments[] = {
    {"coverage",
     "Typical-UE SIR coverage probability versus threshold, estimated by "
     "Monte Carlo; result.json also carries the analytic value.",
     "coverage.csv (theta_db, prob, stderr)"},
    {"rate-cdf",
     "Typical-UE rate distribution from either engine (the rate CDF plot).",
     "rate_cdf.csv (rate_bps_hz, cdf)"},
    {"min-tau",
     "Minimum densification ratio reaching each target median rate, with "
     "the low-rate linear and high-rate exponential fits in result.json.",
     "min_tau.csv (r0, tau_min)"},
    {"tradeoff",
     "Densification exploitation tradeoff: relative median rate versus "
     "relative UE density after multiplying the AN density by "
     "densification_factor, with the area capacity of each point.",
     "tradeoff.csv (x, rate_ratio, area_capacity)"},
    {"coord-eval",
     "Guaranteed (minimum) UE rate versus tau for the uncoordinated "
     "baseline and the two coordination policies.",
     "coord.csv (tau, policy, mean_min_rate, stderr)"},
    {"coord-savings",
     "Densification ratio savings of the coordination policies over the "
     "baseline at each guaranteed-rate target.",
     "coord.csv (tau, policy, mean_min_rate, stderr), "
     "savings.csv (target_rate, policy, savings_pct)"},
};

bool applies(FieldDoc const& f, std::string const& experiment)
{
    std::string const list = f.experiments;
    if (list == "*")
        return true;
    std::istringstream is(list);
    std::string word;
    while (is >> word)
    {
        if (word == experiment)
            return true;
    }
    return false;
}

bool is_coord(std::string const& e)
{
    return e == "coord-eval" || e == "coord-savings";
}

//---------------------------------------------------------------------------//
// Parsing helpers
//---------------------------------------------------------------------------//

class Reader
{
  public:
    Reader(json const& obj, std::string prefix,
           std::vector<std::string>& violations)
        : obj_(obj), prefix_(std::move(prefix)), out_(violations)
    {
    }

    bool has(char const* key) const { return obj_.contains(key); }

    void fail(std::string const& key, std::string const& msg)
    {
        out_.push_back("field '" + prefix_ + key + "': " + msg);
    }

    double number(char const* key, double fallback)
    {
        if (!has(key))
            return fallback;
        auto const& v = obj_.at(key);
        if (!v.is_number())
        {
            fail(key, "must be a number");
            return fallback;
        }
        return v.get<double>();
    }

    double positive(char const* key, double fallback)
    {
        double const v = number(key, fallback);
        if (!(v > 0) || !std::isfinite(v))
            fail(key, "must be positive and finite");
        return v;
    }

    std::uint64_t count(char const* key, std::uint64_t fallback,
                        std::uint64_t min_value = 1)
    {
        if (!has(key))
            return fallback;
        auto const& v = obj_.at(key);
        if (!v.is_number_unsigned()
            && !(v.is_number_integer() && v.get<long long>() >= 0))
        {
            fail(key, "must be a non-negative integer");
            return fallback;
        }
        auto const n = v.get<std::uint64_t>();
        if (n < min_value)
            fail(key, "must be at least " + std::to_string(min_value));
        return n;
    }

    std::string text(char const* key, std::string fallback)
    {
        if (!has(key))
            return fallback;
        auto const& v = obj_.at(key);
        if (!v.is_string())
        {
            fail(key, "must be a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(char const* key, std::vector<double> fallback)
    {
        if (!has(key))
            return fallback;
        auto const& v = obj_.at(key);
        if (!v.is_array() || v.empty())
        {
            fail(key, "must be a non-empty array of numbers");
            return fallback;
        }
        std::vector<double> out;
        for (auto const& e : v)
        {
            if (!e.is_number())
            {
                fail(key, "must be a non-empty array of numbers");
                return fallback;
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    void reject_unknown(std::set<std::string> const& allowed)
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
        {
            if (!allowed.count(it.key()))
                out_.push_back("unknown field '" + prefix_ + it.key() + "'");
        }
    }

  private:
    json const& obj_;
    std::string prefix_;
    std::vector<std::string>& out_;
};

void check_grid(Reader& r, char const* key, std::vector<double> const& grid,
                bool ascending)
{
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (!std::isfinite(grid[i]))
        {
            r.fail(key, "values must be finite");
            return;
        }
        if (ascending && !(grid[i] > 0))
        {
            r.fail(key, "values must be positive");
            return;
        }
        if (ascending && i > 0 && !(grid[i] > grid[i - 1]))
        {
            r.fail(key, "values must be strictly ascending");
            return;
        }
    }
}

ChannelParams parse_channel(json const& doc, std::string const& experiment,
                            std::vector<std::string>& violations)
{
    ChannelParams p;
    if (is_coord(experiment))
        p.noise_psd_dbm_hz = -174;
    if (!doc.contains("channel"))
        return p;
    auto const& obj = doc.at("channel");
    if (!obj.is_object())
    {
        violations.push_back("field 'channel': must be an object");
        return p;
    }
    Reader r(obj, "channel.", violations);
    std::set<std::string> allowed;
    for (auto const& f : channel_fields)
        allowed.insert(f.name);
    r.reject_unknown(allowed);

    p.alpha = r.number("alpha", p.alpha);
    p.d0_m = r.number("d0_m", p.d0_m);
    auto const fading = r.text("fading", "rayleigh");
    if (fading == "rayleigh")
        p.fading = Fading::rayleigh;
    else if (fading == "none")
        p.fading = Fading::none;
    else
        r.fail("fading", "must be \"rayleigh\" or \"none\"");

    if (obj.contains("noise_psd_dbm_hz"))
    {
        auto const& v = obj.at("noise_psd_dbm_hz");
        if (v.is_string()
            && (v.get<std::string>() == "off" || v.get<std::string>() == "-inf"))
        {
            p.noise_psd_dbm_hz = -std::numeric_limits<double>::infinity();
        }
        else if (v.is_number() && std::isfinite(v.get<double>()))
        {
            p.noise_psd_dbm_hz = v.get<double>();
        }
        else
        {
            r.fail("noise_psd_dbm_hz", "must be a number, \"off\" or \"-inf\"");
        }
    }
    p.bandwidth_hz = r.number("bandwidth_hz", p.bandwidth_hz);
    p.tx_power_dbm = r.number("tx_power_dbm", p.tx_power_dbm);
    p.theta0_db = r.number("theta0_db", p.theta0_db);
    p.n_subchannels = static_cast<int>(
        r.count("n_subchannels", static_cast<std::uint64_t>(p.n_subchannels)));
    try
    {
        p.validate();
    }
    catch (InvalidParameter const& e)
    {
        violations.push_back(std::string("channel: ") + e.what());
    }
    return p;
}

ExperimentConfig parse_into(json const& doc,
                            std::vector<std::string>& violations)
{
    ExperimentConfig c;
    c.source = doc;
    if (!doc.is_object())
    {
        violations.push_back("config must be a JSON object");
        return c;
    }
    Reader r(doc, "", violations);

    if (!doc.contains("experiment"))
    {
        violations.push_back("field 'experiment': missing (required)");
        return c;
    }
    c.experiment = r.text("experiment", "");
    auto const& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    {
        std::string list;
        for (auto const& n : names)
            list += (list.empty() ? "" : ", ") + n;
        r.fail("experiment", "unknown experiment '" + c.experiment
                                 + "' (valid: " + list + ")");
        return c;
    }
    std::string const& e = c.experiment;

    std::set<std::string> allowed;
    for (auto const& f : fields)
    {
        if (applies(f, e))
            allowed.insert(f.name);
    }
    r.reject_unknown(allowed);

    if (!doc.contains("master_seed"))
        violations.push_back("field 'master_seed': missing (required)");
    else
        c.master_seed = r.count("master_seed", 0, 0);
    c.output_dir = r.text("output_dir", c.output_dir);
    if (c.output_dir.empty())
        r.fail("output_dir", "must not be empty");
    c.channel = parse_channel(doc, e, violations);

    auto read_activity = [&](InterfererActivity fallback) {
        auto const a = r.text("activity", fallback == InterfererActivity::all_active
                                              ? "all_active"
                                              : "load_based");
        if (a == "all_active")
            return InterfererActivity::all_active;
        if (a != "load_based")
            r.fail("activity", "must be \"load_based\" or \"all_active\"");
        return InterfererActivity::load_based;
    };
    auto read_engine = [&](EngineKind fallback) {
        auto const name = r.text("engine", to_string(fallback));
        try
        {
            return engine_from_string(name);
        }
        catch (InvalidParameter const& err)
        {
            r.fail("engine", err.what());
            return fallback;
        }
    };

    if (e == "coverage" || e == "rate-cdf")
    {
        c.lambda_an = r.positive("lambda_an", c.lambda_an);
        c.lambda_ue = r.number("lambda_ue", c.lambda_ue);
        if (!(c.lambda_ue >= 0) || !std::isfinite(c.lambda_ue))
            r.fail("lambda_ue", "must be finite and non-negative");
        c.n_trials = r.count("n_trials", c.n_trials);
    }
    if (e == "coverage")
    {
        c.activity = read_activity(InterfererActivity::all_active);
        c.theta_db_grid = r.numbers("theta_db_grid", {-10, -6, 0, 6, 10});
        check_grid(r, "theta_db_grid", c.theta_db_grid, false);
        if (!c.channel.interference_limited())
            violations.push_back(
                "channel: coverage requires noise_psd_dbm_hz = \"off\"");
        if (c.activity != InterfererActivity::all_active
            && c.channel.n_subchannels != 1)
        {
            r.fail("activity",
                   "coverage needs all_active interferers or n_subchannels = 1");
        }
    }
    if (e == "rate-cdf")
    {
        c.activity = read_activity(InterfererActivity::load_based);
        c.engine = read_engine(EngineKind::montecarlo);
        c.n_grid = r.count("n_grid", c.n_grid, 3);
        if (c.n_grid > 2048)
            r.fail("n_grid", "must be at most 2048");
        if (c.engine == EngineKind::semianalytic && !(c.lambda_ue > 0))
            r.fail("lambda_ue", "semianalytic engine needs a positive density");
    }
    if (e == "min-tau" || e == "tradeoff")
    {
        c.engine = read_engine(EngineKind::semianalytic);
        c.n_trials = r.count("n_trials", 10000);
        c.mc_lambda_an = r.positive("mc_lambda_an", c.mc_lambda_an);
    }
    if (e == "min-tau")
    {
        c.r0_grid = r.numbers("r0_grid", {0.01, 0.02, 0.03, 0.04, 0.05, 0.1,
                                          0.2, 0.5, 1, 2, 4, 5, 6, 7, 8});
        check_grid(r, "r0_grid", c.r0_grid, true);
        c.tau_lo = r.positive("tau_lo", c.tau_lo);
        c.tau_hi = r.positive("tau_hi", c.tau_hi);
        c.tolerance = r.positive("tolerance", c.tolerance);
        if (!(c.tau_lo < c.tau_hi))
            r.fail("tau_lo", "must be below tau_hi");
    }
    if (e == "tradeoff")
    {
        c.base_lambda_an = r.positive("base_lambda_an", c.base_lambda_an);
        c.base_lambda_ue = r.positive("base_lambda_ue", c.base_lambda_ue);
        c.densification_factor
            = r.positive("densification_factor", c.densification_factor);
        c.x_grid = r.numbers("x_grid", {1, 2, 5, 10, 20, 50, 100});
        check_grid(r, "x_grid", c.x_grid, true);
    }
    if (is_coord(e))
    {
        c.curve.tau_grid = r.numbers(
            "tau_grid", {0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 50, 100});
        check_grid(r, "tau_grid", c.curve.tau_grid, true);
        c.curve.n_ues = r.count("n_ues", c.curve.n_ues);
        double const side = r.positive("window_side_m", 1000);
        if (side > 0 && std::isfinite(side))
            c.curve.window = Window::square({0, 0}, side);
        c.curve.n_rb = r.count("n_rb", c.curve.n_rb);
        c.curve.n_realizations
            = r.count("n_realizations", c.curve.n_realizations);
        c.curve.params = c.channel;
        c.curve.master_seed = c.master_seed;
        if (c.channel.interference_limited())
            violations.push_back(
                "channel: coordination requires a finite noise_psd_dbm_hz");

        c.policies = {PolicyId::baseline, PolicyId::policy1, PolicyId::policy2};
        if (doc.contains("policies"))
        {
            auto const& v = doc.at("policies");
            c.policies.clear();
            if (!v.is_array() || v.empty())
                r.fail("policies", "must be a non-empty array of names");
            else
            {
                for (auto const& p : v)
                {
                    try
                    {
                        if (!p.is_string())
                            throw InvalidParameter("policy names are strings");
                        c.policies.push_back(
                            policy_from_string(p.get<std::string>()));
                    }
                    catch (InvalidParameter const& err)
                    {
                        r.fail("policies", err.what());
                    }
                }
            }
        }
    }
    if (e == "coord-savings")
    {
        c.target_rates = r.numbers("target_rates", {0.1, 0.5, 1});
        check_grid(r, "target_rates", c.target_rates, false);
        for (double g : c.target_rates)
        {
            if (!(g > 0))
            {
                r.fail("target_rates", "values must be positive");
                break;
            }
        }
        if (std::find(c.policies.begin(), c.policies.end(), PolicyId::baseline)
            == c.policies.end())
        {
            r.fail("policies", "savings are relative to baseline; include it");
        }
    }

    // Cross-field: the semianalytic bracket must straddle every target
    if (e == "min-tau" && violations.empty()
        && c.engine == EngineKind::semianalytic)
    {
        try
        {
            SemianalyticRateModel const lo(c.tau_lo, c.channel);
            SemianalyticRateModel const hi(c.tau_hi, c.channel);
            double const m_lo = lo.median();
            double const m_hi = hi.median();
            for (double r0 : c.r0_grid)
            {
                if (!(m_lo < r0 && r0 <= m_hi))
                {
                    r.fail("r0_grid",
                           "target " + format_number(r0)
                               + " is outside the median range ["
                               + format_number(m_lo) + ", "
                               + format_number(m_hi)
                               + "] of the tau bracket");
                }
            }
        }
        catch (Error const& err)
        {
            violations.push_back(std::string("tau bracket: ") + err.what());
        }
    }
    return c;
}

std::string utc_stamp()
{
    auto const now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

json to_json(ChannelParams const& p)
{
    json j;
    j["alpha"] = p.alpha;
    j["d0_m"] = p.d0_m;
    j["fading"] = p.fading == Fading::rayleigh ? "rayleigh" : "none";
    if (p.interference_limited())
        j["noise_psd_dbm_hz"] = "off";
    else
        j["noise_psd_dbm_hz"] = p.noise_psd_dbm_hz;
    j["bandwidth_hz"] = p.bandwidth_hz;
    j["tx_power_dbm"] = p.tx_power_dbm;
    j["theta0_db"] = p.theta0_db;
    j["n_subchannels"] = p.n_subchannels;
    return j;
}

//! JSON cannot hold infinities; store them as strings.
json finite_or_text(double v)
{
    if (std::isfinite(v))
        return v;
    return format_number(v);
}

//---------------------------------------------------------------------------//
// Runners
//---------------------------------------------------------------------------//

void run_coverage(ExperimentConfig const& c, int workers, RunResult& out)
{
    SimSpec spec;
    spec.lambda_an = c.lambda_an;
    spec.lambda_ue = c.lambda_ue;
    spec.params = c.channel;
    spec.n_trials = c.n_trials;
    spec.master_seed = c.master_seed;
    spec.activity = c.activity;
    auto const est = estimate_coverage(spec, c.theta_db_grid, {workers});

    std::ostringstream os;
    os << "theta_db,prob,stderr\n";
    json rows = json::array();
    for (auto const& e : est)
    {
        os << format_number(e.theta_db) << ',' << format_number(e.probability)
           << ',' << format_number(e.std_error) << '\n';
        json row{{"theta_db", e.theta_db},
                 {"prob", e.probability},
                 {"stderr", e.std_error}};
        if (c.activity == InterfererActivity::all_active)
        {
            row["analytic"] = coverage_probability(db_to_linear(e.theta_db),
                                                   c.channel.alpha, 1.0);
        }
        rows.push_back(row);
    }
    out.tables.emplace_back("coverage.csv", os.str());
    out.record["tables"].push_back({{"name", "coverage"},
                                    {"file", "coverage.csv"},
                                    {"engine", "montecarlo"},
                                    {"trials", c.n_trials}});
    out.record["summary"] = {{"coverage", rows}};
}

void run_rate_cdf(ExperimentConfig const& c, int workers, RunResult& out)
{
    RateCdf cdf;
    json prov{{"name", "rate_cdf"},
              {"file", "rate_cdf.csv"},
              {"engine", to_string(c.engine)}};
    if (c.engine == EngineKind::montecarlo)
    {
        SimSpec spec;
        spec.lambda_an = c.lambda_an;
        spec.lambda_ue = c.lambda_ue;
        spec.params = c.channel;
        spec.n_trials = c.n_trials;
        spec.master_seed = c.master_seed;
        spec.activity = c.activity;
        cdf = simulate_typical_rate(spec, {workers});
        prov["trials"] = c.n_trials;
    }
    else
    {
        cdf = rate_cdf_semianalytic(c.lambda_an / c.lambda_ue, c.channel,
                                    c.n_grid);
        prov["trials"] = 0;
    }
    std::ostringstream os;
    write_csv(os, cdf);
    out.tables.emplace_back("rate_cdf.csv", os.str());
    out.record["tables"].push_back(prov);
    out.record["summary"] = {{"tau", finite_or_text(c.lambda_an / c.lambda_ue)},
                             {"outage", cdf.zero_mass()},
                             {"median", finite_or_text(quantile(cdf, 0.5))}};
}

EngineConfig engine_config(ExperimentConfig const& c, int workers)
{
    EngineConfig ec;
    ec.kind = c.engine;
    ec.params = c.channel;
    ec.mc_trials = c.n_trials;
    ec.master_seed = c.master_seed;
    ec.mc_lambda_an = c.mc_lambda_an;
    ec.workers = workers;
    return ec;
}

void run_min_tau(ExperimentConfig const& c, int workers, RunResult& out)
{
    MedianRateEngine engine(engine_config(c, workers));
    std::vector<MinTauRow> rows;
    json detail = json::array();
    for (double r0 : c.r0_grid)
    {
        PlannerQuery q;
        q.target_median_rate = r0;
        q.tau_lo = c.tau_lo;
        q.tau_hi = c.tau_hi;
        q.tolerance = c.tolerance;
        auto const res = min_tau(q, engine);
        rows.push_back({r0, res.tau_min});
        detail.push_back({{"r0", r0},
                          {"tau_min", res.tau_min},
                          {"median_at_tau", res.median_at_tau},
                          {"iterations", res.iterations},
                          {"within_tolerance", res.within_tolerance}});
    }
    std::ostringstream os;
    write_min_tau_csv(os, rows);
    out.tables.emplace_back("min_tau.csv", os.str());
    out.record["tables"].push_back(
        {{"name", "min_tau"},
         {"file", "min_tau.csv"},
         {"engine", to_string(c.engine)},
         {"trials", c.engine == EngineKind::montecarlo ? c.n_trials : 0}});

    json summary{{"rows", detail}};
    std::vector<double> lo_r, lo_t, hi_r, hi_log_t;
    for (auto const& row : rows)
    {
        if (row.r0 <= 0.05)
        {
            lo_r.push_back(row.r0);
            lo_t.push_back(row.tau_min);
        }
        if (row.r0 >= 4)
        {
            hi_r.push_back(row.r0);
            hi_log_t.push_back(std::log(row.tau_min));
        }
    }
    if (!lo_r.empty())
        summary["low_rate_spread"] = proportionality_spread(lo_r, lo_t);
    if (hi_r.size() >= 2)
    {
        auto const fit = linear_fit(hi_r, hi_log_t);
        summary["high_rate_log_fit"] = {{"slope", fit.slope},
                                        {"intercept", fit.intercept},
                                        {"r_squared", fit.r_squared}};
    }
    out.record["summary"] = summary;
}

void run_tradeoff(ExperimentConfig const& c, int workers, RunResult& out)
{
    MedianRateEngine engine(engine_config(c, workers));
    auto const curve = tradeoff_curve(c.base_lambda_an, c.base_lambda_ue,
                                      c.densification_factor, c.x_grid, engine);
    auto const cap = area_capacity(curve);
    std::ostringstream os;
    write_tradeoff_csv(os, curve, cap);
    out.tables.emplace_back("tradeoff.csv", os.str());
    out.record["tables"].push_back(
        {{"name", "tradeoff"},
         {"file", "tradeoff.csv"},
         {"engine", to_string(c.engine)},
         {"trials", c.engine == EngineKind::montecarlo ? c.n_trials : 0}});

    // λ'_UE · r'_0 is reported next to the AN-weighted capacity for context
    json ue_weighted = json::array();
    std::size_t ue_argmax = 0;
    double best = -1;
    for (std::size_t i = 0; i < curve.points.size(); ++i)
    {
        auto const& p = curve.points[i];
        double const v = c.base_lambda_ue * p.ue_density_ratio * p.rate_ratio
                         * curve.base_median;
        ue_weighted.push_back(v);
        if (v >= best)
        {
            best = v;
            ue_argmax = i;
        }
    }
    out.record["summary"]
        = {{"base_median", curve.base_median},
           {"argmax_x", cap.points[cap.argmax].ue_density_ratio},
           {"ue_weighted_capacity", ue_weighted},
           {"ue_weighted_argmax_x", curve.points[ue_argmax].ue_density_ratio}};
}

void run_coord(ExperimentConfig const& c, int workers, RunResult& out)
{
    auto const curves = guaranteed_rate_curves(c.curve, c.policies, workers);
    std::ostringstream os;
    write_coord_csv(os, curves);
    out.tables.emplace_back("coord.csv", os.str());
    out.record["tables"].push_back({{"name", "coord"},
                                    {"file", "coord.csv"},
                                    {"engine", "coordination"},
                                    {"trials", c.curve.n_realizations}});
    if (c.experiment != "coord-savings")
        return;

    auto const rows = densification_savings(c.target_rates, curves);
    std::ostringstream ss;
    write_savings_csv(ss, rows);
    out.tables.emplace_back("savings.csv", ss.str());
    out.record["tables"].push_back({{"name", "savings"},
                                    {"file", "savings.csv"},
                                    {"engine", "coordination"},
                                    {"trials", c.curve.n_realizations}});
    json detail = json::array();
    for (auto const& r : rows)
    {
        detail.push_back({{"target_rate", r.target_rate},
                          {"policy", to_string(r.policy)},
                          {"tau_required", r.tau_required},
                          {"savings_pct", r.savings_pct}});
    }
    out.record["summary"] = {{"savings", detail}};
}

std::uint64_t fnv1a(std::string const& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

//---------------------------------------------------------------------------//

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "invalid config";
        for (auto const& v : violations)
            msg += "\n  " + v;
        return msg;
    }())
    , violations_(std::move(violations))
{
}

std::vector<std::string> const& experiment_names()
{
    static std::vector<std::string> const names = [] {
        std::vector<std::string> n;
        for (auto const& e : experiments)
            n.push_back(e.name);
        return n;
    }();
    return names;
}

std::vector<std::string> validate_config(nlohmann::json const& doc)
{
    std::vector<std::string> violations;
    parse_into(doc, violations);
    return violations;
}

ExperimentConfig parse_config(nlohmann::json const& doc)
{
    std::vector<std::string> violations;
    auto c = parse_into(doc, violations);
    if (!violations.empty())
        throw ConfigError(std::move(violations));
    return c;
}

nlohmann::json read_config_file(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file '" + path.string() + "'");
    try
    {
        return nlohmann::json::parse(in);
    }
    catch (nlohmann::json::parse_error const& e)
    {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
}

std::string describe_experiment(std::string const& name)
{
    ExperimentDoc const* doc = nullptr;
    for (auto const& e : experiments)
    {
        if (name == e.name)
            doc = &e;
    }
    if (!doc)
    {
        std::string list;
        for (auto const& n : experiment_names())
            list += (list.empty() ? "" : ", ") + n;
        throw InvalidParameter("unknown experiment '" + name
                               + "'; valid experiments: " + list);
    }

    std::ostringstream os;
    os << doc->name << "\n  " << doc->summary << "\n  output: " << doc->tables
       << "\n\nfields (name, default, meaning):\n";
    for (auto const& f : fields)
    {
        if (applies(f, name))
        {
            os << "  " << f.name << " = " << f.default_text << "\n      "
               << f.help << '\n';
        }
    }
    os << "\nchannel fields:\n";
    for (auto const& f : channel_fields)
    {
        os << "  " << f.name << " = " << f.default_text << "\n      " << f.help
           << '\n';
    }
    return os.str();
}

std::string config_hash(nlohmann::json const& doc)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(doc.dump())));
    return buf;
}

RunResult run_experiment(ExperimentConfig const& config, int workers)
{
    RunResult out;
    out.record["artifact_version"] = artifact_version;
    out.record["experiment"] = config.experiment;
    out.record["master_seed"] = config.master_seed;
    out.record["config"] = config.source;
    out.record["config_hash"] = config_hash(config.source);
    out.record["channel"] = to_json(config.channel);
    out.record["tables"] = json::array();

    auto const start = std::chrono::steady_clock::now();
    std::string const& e = config.experiment;
    if (e == "coverage")
        run_coverage(config, workers, out);
    else if (e == "rate-cdf")
        run_rate_cdf(config, workers, out);
    else if (e == "min-tau")
        run_min_tau(config, workers, out);
    else if (e == "tradeoff")
        run_tradeoff(config, workers, out);
    else if (is_coord(e))
        run_coord(config, workers, out);
    else
        throw InvalidParameter("unknown experiment '" + e + "'");
    std::chrono::duration<double> const elapsed
        = std::chrono::steady_clock::now() - start;
    out.record["wall_time_s"] = elapsed.count();
    return out;
}

std::filesystem::path write_run(RunResult const& result,
                                std::filesystem::path const& root)
{
    namespace fs = std::filesystem;
    std::string const base = utc_stamp() + "-"
                             + std::to_string(
                                 result.record.at("master_seed").get<std::uint64_t>());
    fs::path const parent
        = root / result.record.at("experiment").get<std::string>();
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec)
        throw IoError("cannot create '" + parent.string() + "': " + ec.message());

    fs::path dir = parent / base;
    for (int k = 1; fs::exists(dir); ++k)
        dir = parent / (base + "-" + std::to_string(k));
    fs::create_directory(dir, ec);
    if (ec)
        throw IoError("cannot create '" + dir.string() + "': " + ec.message());

    auto put = [&](std::string const& name, std::string const& text) {
        std::ofstream f(dir / name, std::ios::binary);
        f << text;
        if (!f)
            throw IoError("cannot write '" + (dir / name).string() + "'");
    };
    for (auto const& [name, text] : result.tables)
        put(name, text);
    put("result.json", result.record.dump(2) + "\n");
    return dir;
}

}  // namespace udn
