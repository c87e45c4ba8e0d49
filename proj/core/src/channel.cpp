#include "swipt/channel.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace swipt {

using nlohmann::json;

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("scenario: " + m); };
    if (n_t < 1 || n_i < 1) fail("antenna counts must be positive");
    if (k < 1) fail("k must be >= 1");
    const auto uk = static_cast<std::size_t>(k);
    if (n_e.size() != uk || d_e.size() != uk || sigma2_e.size() != uk || eta.size() != uk ||
        mu.size() != uk)
        fail("per-ER lists must have k entries");
    for (int n : n_e)
        if (n < 1) fail("n_e entries must be positive");
    if (!(d_i > 1.0)) fail("d_i must exceed the 1 m reference distance");
    for (double d : d_e)
        if (!(d > 1.0)) fail("d_e entries must exceed the 1 m reference distance");
    if (!(sigma2_i > 0.0) || !(power > 0.0) || !(a0 > 0.0)) fail("powers must be positive");
    for (double s : sigma2_e)
        if (!(s > 0.0)) fail("sigma2_e entries must be positive");
    for (double e : eta)
        if (!(e > 0.0 && e <= 1.0)) fail("eta entries must lie in (0, 1]");
    for (double m : mu)
        if (!(m >= 0.0)) fail("mu entries must be nonnegative");
    if (!(c0_bits >= 0.0) || !(r0_bits >= 0.0)) fail("secrecy targets must be nonnegative");
}

ScenarioConfig default_scenario(int num_er) {
    ScenarioConfig c;
    c.k = num_er;
    c.n_e.assign(num_er, 3);
    c.d_e.assign(num_er, 7.0);
    c.sigma2_i = dbm_to_watts(-5.0);
    c.sigma2_e.assign(num_er, dbm_to_watts(-5.0));
    c.power = dbm_to_watts(40.0);
    c.eta.assign(num_er, 0.8);
    c.mu.assign(num_er, 1.0);
    return c;
}

namespace {

template <class T>
std::vector<T> per_er(const json& j, const char* key, std::size_t k, std::vector<T> fallback) {
    if (!j.contains(key)) {
        if (fallback.size() == 1 && k > 1) fallback.assign(k, fallback[0]);
        return fallback;
    }
    const json& v = j.at(key);
    if (v.is_array()) return v.get<std::vector<T>>();
    return std::vector<T>(k, v.get<T>());
}

void read_tolerances(const json& j, SolverTolerances& t) {
#define SWIPT_TOL(name) \
    if (j.contains(#name)) t.name = j.at(#name).get<decltype(t.name)>();
    SWIPT_TOL(eps1) SWIPT_TOL(eps2) SWIPT_TOL(zeta) SWIPT_TOL(alpha_scan_floor) SWIPT_TOL(r2) SWIPT_TOL(lambda0)
    SWIPT_TOL(mu0) SWIPT_TOL(max_taylor_rounds) SWIPT_TOL(max_ellipsoid_restarts)
    SWIPT_TOL(q1_factor) SWIPT_TOL(spectral_step) SWIPT_TOL(xi1) SWIPT_TOL(xi2) SWIPT_TOL(xi3) SWIPT_TOL(t0)
    SWIPT_TOL(mu_t) SWIPT_TOL(armijo_beta) SWIPT_TOL(armijo_sigma) SWIPT_TOL(max_gp_iters)
    SWIPT_TOL(p2_rel_tol) SWIPT_TOL(max_p2_rounds) SWIPT_TOL(max_p3_outer)
    SWIPT_TOL(feasibility_margin) SWIPT_TOL(feasibility_rounds)
#undef SWIPT_TOL
}

json tolerances_json(const SolverTolerances& t) {
    return json{{"eps1", t.eps1},
                {"eps2", t.eps2},
                {"zeta", t.zeta},
                {"alpha_scan_floor", t.alpha_scan_floor},
                {"r2", t.r2},
                {"lambda0", t.lambda0},
                {"mu0", t.mu0},
                {"max_taylor_rounds", t.max_taylor_rounds},
                {"max_ellipsoid_restarts", t.max_ellipsoid_restarts},
                {"q1_factor", t.q1_factor},
                {"spectral_step", t.spectral_step},
                {"xi1", t.xi1},
                {"xi2", t.xi2},
                {"xi3", t.xi3},
                {"t0", t.t0},
                {"mu_t", t.mu_t},
                {"armijo_beta", t.armijo_beta},
                {"armijo_sigma", t.armijo_sigma},
                {"max_gp_iters", t.max_gp_iters},
                {"p2_rel_tol", t.p2_rel_tol},
                {"max_p2_rounds", t.max_p2_rounds},
                {"max_p3_outer", t.max_p3_outer},
                {"feasibility_margin", t.feasibility_margin},
                {"feasibility_rounds", t.feasibility_rounds}};
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("scenario: expected a JSON object");

    ScenarioConfig c = default_scenario(j.value("k", 1));
    try {
        c.n_t = j.value("n_t", c.n_t);
        c.n_i = j.value("n_i", c.n_i);
        const auto k = static_cast<std::size_t>(c.k);
        c.n_e = per_er<int>(j, "n_e", k, c.n_e);
        c.d_i = j.value("d_i", c.d_i);
        c.d_e = per_er<double>(j, "d_e", k, c.d_e);
        c.gamma = j.value("gamma", c.gamma);
        c.a0 = j.value("a0", c.a0);
        if (j.contains("sigma2_i_dbm")) c.sigma2_i = dbm_to_watts(j.at("sigma2_i_dbm").get<double>());
        if (j.contains("sigma2_e_dbm")) {
            auto v = per_er<double>(j, "sigma2_e_dbm", k, {});
            c.sigma2_e.clear();
            for (double x : v) c.sigma2_e.push_back(dbm_to_watts(x));
        }
        if (j.contains("p_dbm") && j.contains("p_dbw"))
            throw std::invalid_argument("scenario: give p_dbm or p_dbw, not both");
        if (j.contains("p_dbm")) c.power = dbm_to_watts(j.at("p_dbm").get<double>());
        if (j.contains("p_dbw")) c.power = dbm_to_watts(j.at("p_dbw").get<double>() + 30.0);
        c.c0_bits = j.value("c0_bits", c.c0_bits);
        c.r0_bits = j.value("r0_bits", c.r0_bits);
        c.eta = per_er<double>(j, "eta", k, c.eta);
        c.mu = per_er<double>(j, "mu", k, c.mu);
        c.seed = j.value("seed", c.seed);
        if (j.contains("tolerances")) read_tolerances(j.at("tolerances"), c.tol);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario: bad field: ") + e.what());
    }
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string scenario_to_json(const ScenarioConfig& c) {
    std::vector<double> se;
    for (double s : c.sigma2_e) se.push_back(watts_to_dbm(s));
    json j{{"n_t", c.n_t},
           {"n_i", c.n_i},
           {"k", c.k},
           {"n_e", c.n_e},
           {"d_i", c.d_i},
           {"d_e", c.d_e},
           {"gamma", c.gamma},
           {"a0", c.a0},
           {"sigma2_i_dbm", watts_to_dbm(c.sigma2_i)},
           {"sigma2_e_dbm", se},
           {"p_dbm", watts_to_dbm(c.power)},
           {"c0_bits", c.c0_bits},
           {"r0_bits", c.r0_bits},
           {"eta", c.eta},
           {"mu", c.mu},
           {"seed", c.seed},
           {"tolerances", tolerances_json(c.tol)}};
    return j.dump(2);
}

double path_loss(double d, double gamma, double a0) {
    constexpr double d0 = 1.0;
    if (!(d > d0)) throw std::invalid_argument("path_loss: distance must exceed 1 m");
    return a0 * std::pow(d / d0, -gamma);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull))) {}

std::uint64_t CounterRng::next_u64() noexcept {
    return splitmix64(key_ ^ splitmix64(counter_++));
}

double CounterRng::uniform() noexcept {
    // 53 random bits, shifted off zero
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
}

cd CounterRng::complex_normal(double variance) noexcept {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

ChannelSet make_channels(const ScenarioConfig& cfg, CMatrix h, std::vector<CMatrix> g) {
    ChannelSet cs;
    cs.config = cfg;
    cs.raw_h = h * std::sqrt(cfg.sigma2_i);
    for (std::size_t k = 0; k < g.size(); ++k)
        cs.raw_g.push_back(g[k] * std::sqrt(cfg.sigma2_e.at(k)));
    cs.h = std::move(h);
    cs.g = std::move(g);
    return cs;
}

ChannelSet draw_channels(const ScenarioConfig& cfg, std::uint64_t trial_index) {
    cfg.validate();
    CounterRng rng(cfg.seed, trial_index);
    ChannelSet cs;
    cs.config = cfg;
    const double var_i = path_loss(cfg.d_i, cfg.gamma, cfg.a0);
    cs.raw_h.resize(cfg.n_t, cfg.n_i);
    for (int c = 0; c < cfg.n_i; ++c)
        for (int r = 0; r < cfg.n_t; ++r) cs.raw_h(r, c) = rng.complex_normal(var_i);
    cs.h = cs.raw_h / std::sqrt(cfg.sigma2_i);
    for (int k = 0; k < cfg.k; ++k) {
        const double var_e = path_loss(cfg.d_e[k], cfg.gamma, cfg.a0);
        CMatrix raw(cfg.n_t, cfg.n_e[k]);
        for (int c = 0; c < cfg.n_e[k]; ++c)
            for (int r = 0; r < cfg.n_t; ++r) raw(r, c) = rng.complex_normal(var_e);
        cs.g.push_back(raw / std::sqrt(cfg.sigma2_e[k]));
        cs.raw_g.push_back(std::move(raw));
    }
    return cs;
}

}  // namespace swipt
