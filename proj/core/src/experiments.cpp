#include "swipt/experiments.hpp"

#include "swipt/ehm_p1.hpp"
#include "swipt/ehm_p2.hpp"
#include "swipt/metrics.hpp"
#include "swipt/wsehm_p3.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace swipt {

using nlohmann::json;

const char* to_string(SweepAxis a) {
    return a == SweepAxis::power ? "power" : "secrecy_target";
}

const char* to_string(SolverKind s) {
    switch (s) {
        case SolverKind::p1: return "p1";
        case SolverKind::p2: return "p2";
        case SolverKind::p3: return "p3";
    }
    return "unknown";
}

void SweepSpec::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("sweep: " + m); };
    if (trials < 1) fail("trials must be >= 1");
    if (values.empty()) fail("values must be nonempty");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1])) fail("values must be strictly increasing");
    if (axis == SweepAxis::power) {
        if (axis_unit != "dBW" && axis_unit != "dBm" && axis_unit != "W")
            fail("power axis unit must be dBW, dBm or W");
        if (axis_unit == "W")
            for (double v : values)
                if (!(v > 0.0)) fail("power values in W must be positive");
    } else {
        if (axis_unit != "bits") fail("secrecy_target axis unit must be bits");
        for (double v : values)
            if (!(v >= 0.0)) fail("secrecy targets must be nonnegative");
    }
}

SweepSpec parse_sweep(const std::string& json_text) {
    SweepSpec s;
    try {
        const json j = json::parse(json_text);
        const std::string axis = j.at("axis").get<std::string>();
        if (axis == "power") s.axis = SweepAxis::power;
        else if (axis == "secrecy_target") s.axis = SweepAxis::secrecy_target;
        else throw std::invalid_argument("sweep: unknown axis '" + axis + "'");
        s.axis_unit = j.value("axis_unit", s.axis == SweepAxis::power ? "dBW" : "bits");
        s.values = j.at("values").get<std::vector<double>>();
        s.trials = j.value("trials", 1);
        const std::string solver = j.at("solver").get<std::string>();
        if (solver == "p1") s.solver = SolverKind::p1;
        else if (solver == "p2") s.solver = SolverKind::p2;
        else if (solver == "p3") s.solver = SolverKind::p3;
        else throw std::invalid_argument("sweep: unknown solver '" + solver + "'");
        if (j.contains("flags")) {
            const json& f = j.at("flags");
            s.flags.an_enabled = f.value("an_enabled", s.flags.an_enabled);
            s.flags.we_cancellation = f.value("we_cancellation", s.flags.we_cancellation);
            s.flags.force_we_zero = f.value("force_we_zero", s.flags.force_we_zero);
            s.flags.force_v_zero = f.value("force_v_zero", s.flags.force_v_zero);
        }
        s.output_dir = j.value("output_dir", s.output_dir);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("sweep: ") + e.what());
    }
    s.validate();
    return s;
}

SweepSpec load_sweep(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("sweep: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep(ss.str());
}

std::string sweep_to_json(const SweepSpec& s) {
    json j{{"axis", to_string(s.axis)},
           {"axis_unit", s.axis_unit},
           {"values", s.values},
           {"trials", s.trials},
           {"solver", to_string(s.solver)},
           {"flags",
            {{"an_enabled", s.flags.an_enabled},
             {"we_cancellation", s.flags.we_cancellation},
             {"force_we_zero", s.flags.force_we_zero},
             {"force_v_zero", s.flags.force_v_zero}}},
           {"output_dir", s.output_dir}};
    return j.dump(2);
}

void apply_seed_override(ScenarioConfig& cfg) {
    const char* env = std::getenv("SWIPT_SEED");
    if (env == nullptr || *env == '\0') return;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
        throw std::invalid_argument(std::string("SWIPT_SEED is not an unsigned integer: ") + env);
    cfg.seed = v;
}

ScenarioConfig at_axis_value(const ScenarioConfig& cfg, const SweepSpec& spec, double value) {
    ScenarioConfig c = cfg;
    if (spec.axis == SweepAxis::power) {
        if (spec.axis_unit == "W") c.power = value;
        else if (spec.axis_unit == "dBm") c.power = dbm_to_watts(value);
        else c.power = dbm_to_watts(value + 30.0);
    } else {
        c.c0_bits = value;
        c.r0_bits = value;
    }
    return c;
}

TrialResult run_trial(const ScenarioConfig& cfg, const SweepSpec& spec, int trial) {
    const ChannelSet cs = draw_channels(cfg, static_cast<std::uint64_t>(trial));
    TrialResult r;
    r.trial = trial;
    switch (spec.solver) {
        case SolverKind::p1: {
            const P1Problem p = make_p1_problem(cs, cfg.power, bits_to_nats(cfg.c0_bits));
            const P1Solution s = solve_p1(p, cfg.tol);
            r.feasible = s.feasible;
            r.energy = s.energy;
            r.report = s.report;
            if (s.feasible) {
                r.secrecy_margin = secrecy_capacity_p1(p.h, p.g, s.wi) - p.c0;
                r.power_used = trace_real(s.wi) + trace_real(s.we);
            }
            break;
        }
        case SolverKind::p2: {
            P2Options o;
            o.force_we_zero = spec.flags.force_we_zero;
            const P2Problem p = make_p1_problem(cs, cfg.power, bits_to_nats(cfg.c0_bits));
            const P2Solution s = solve_p2(p, cfg.tol, o);
            r.feasible = s.feasible;
            r.energy = s.energy;
            r.report = s.report;
            if (s.feasible) {
                r.secrecy_margin = secrecy_rate_p2(p.h, p.g, s.wi, s.we) - p.c0;
                r.power_used = trace_real(s.wi) + trace_real(s.we);
            }
            break;
        }
        case SolverKind::p3: {
            P3Problem p = make_p3_problem(cs, cfg.power, bits_to_nats(cfg.r0_bits));
            p.ir_cancels_energy = spec.flags.we_cancellation;
            p.force_we_zero = spec.flags.force_we_zero;
            p.force_v_zero = spec.flags.force_v_zero || !spec.flags.an_enabled;
            const P3Solution s = solve_p3(p, cfg.tol);
            r.feasible = s.feasible;
            r.energy = s.energy;
            r.report = s.report;
            if (s.feasible) {
                const auto slack = true_slacks(p, s.x);
                r.secrecy_margin = *std::min_element(slack.begin(), slack.end());
                r.power_used = s.x.total_trace();
            }
            break;
        }
    }
    r.wall_time_s = r.report.wall_time_s;
    return r;
}

ResultRow summarize(double axis_value, const std::vector<TrialResult>& trials, bool with_kkt) {
    ResultRow row;
    row.axis_value = axis_value;
    double sum = 0.0, time = 0.0, kkt = 0.0;
    for (const auto& t : trials) {
        time += t.wall_time_s;
        if (!t.feasible) continue;
        ++row.feasible_trials;
        sum += t.energy;
        if (with_kkt && t.report.kkt) kkt += t.report.kkt->max();
    }
    if (!trials.empty()) row.mean_wall_time_s = time / static_cast<double>(trials.size());
    if (row.feasible_trials == 0) {
        row.mean_energy = std::nan("");
        row.std_energy = std::nan("");
        if (with_kkt) row.mean_kkt_residual = std::nan("");
        return row;
    }
    row.mean_energy = sum / row.feasible_trials;
    if (row.feasible_trials > 1) {
        double ss = 0.0;
        for (const auto& t : trials)
            if (t.feasible) ss += (t.energy - row.mean_energy) * (t.energy - row.mean_energy);
        row.std_energy = std::sqrt(ss / (row.feasible_trials - 1));
    }
    if (with_kkt) row.mean_kkt_residual = kkt / row.feasible_trials;
    return row;
}

SweepResult run_sweep(const ScenarioConfig& cfg, const SweepSpec& spec, int threads) {
    spec.validate();
    cfg.validate();
    if (spec.solver != SolverKind::p3 && cfg.k != 1)
        throw std::invalid_argument("sweep: p1 and p2 are single-ER solvers (k must be 1)");
    const std::size_t nv = spec.values.size();
    const std::size_t nt = static_cast<std::size_t>(spec.trials);
    std::vector<ScenarioConfig> configs;
    for (double v : spec.values) {
        configs.push_back(at_axis_value(cfg, spec, v));
        configs.back().validate();
    }

    SweepResult res;
    res.trials.assign(nv, std::vector<TrialResult>(nt));
    const std::size_t total = nv * nt;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= total) return;
            const std::size_t vi = job / nt, ti = job % nt;
            try {
                res.trials[vi][ti] = run_trial(configs[vi], spec, static_cast<int>(ti));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = total;
            }
        }
    };
    unsigned count = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
    count = static_cast<unsigned>(std::min<std::size_t>(count, total));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    const bool with_kkt = spec.solver == SolverKind::p3;
    for (std::size_t vi = 0; vi < nv; ++vi)
        res.rows.push_back(summarize(spec.values[vi], res.trials[vi], with_kkt));
    return res;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return csv_escape(ss.str());
}

}  // namespace

std::string rows_to_csv(const std::vector<ResultRow>& rows, bool with_kkt) {
    std::string out = "axis_value,mean_energy,std_energy,feasible_trials,mean_wall_time_s";
    if (with_kkt) out += ",mean_kkt_residual";
    out += "\r\n";
    for (const auto& r : rows) {
        out += number(r.axis_value) + "," + number(r.mean_energy) + "," + number(r.std_energy) +
               "," + std::to_string(r.feasible_trials) + "," + number(r.mean_wall_time_s);
        if (with_kkt) out += "," + number(r.mean_kkt_residual.value_or(std::nan("")));
        out += "\r\n";
    }
    return out;
}

void write_sweep_artifacts(const SweepResult& result, const SweepSpec& spec,
                           const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "reports", ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
    auto write = [](const fs::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << text;
        if (!out) throw std::runtime_error("write failed for " + path.string());
    };
    write(fs::path(dir) / "results.csv", rows_to_csv(result.rows, spec.solver == SolverKind::p3));
    for (std::size_t vi = 0; vi < result.trials.size(); ++vi) {
        for (const auto& t : result.trials[vi]) {
            json j = json::parse(report_to_json(t.report));
            j["axis_value"] = spec.values[vi];
            j["trial"] = t.trial;
            j["feasible"] = t.feasible;
            j["energy"] = t.energy;
            j["secrecy_margin_nats"] = t.secrecy_margin;
            j["power_used"] = t.power_used;
            write(fs::path(dir) / "reports" /
                      ("v" + std::to_string(vi) + "_t" + std::to_string(t.trial) + ".json"),
                  j.dump(2));
        }
    }
}

}  // namespace swipt
