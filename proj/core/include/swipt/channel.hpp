#pragma once

#include "swipt/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace swipt {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
inline double bits_to_nats(double bits) { return bits * 0.69314718055994530942; }
inline double nats_to_bits(double nats) { return nats / 0.69314718055994530942; }

// Solver knobs. Defaults follow the published experiment setup except where
// the decisions log says otherwise (dual center, see ehm_p1.hpp).
struct SolverTolerances {
    // P1: ellipsoid / Taylor loop / golden section
    double eps1 = 1e-3;
    double eps2 = 1e-3;
    double zeta = 1e-3;              // relative to the bracket left by the scan
    double alpha_scan_floor = 1e-6;  // smallest split tried by the halving scan
    double r2 = 10.0;
    double lambda0 = 1.0;
    double mu0 = 1.0;
    int max_taylor_rounds = 100;
    int max_ellipsoid_restarts = 6;
    // gradient projection / barrier
    double q1_factor = 0.1;  // q1 = q1_factor * P
    bool spectral_step = false;
    double xi1 = 1e-3;
    double xi2 = 1e-6;
    double xi3 = 1e-3;
    double t0 = 1.0;
    double mu_t = 3.0;
    double armijo_beta = 0.5;
    double armijo_sigma = 1e-4;
    int max_gp_iters = 2000;
    // P2 sequential rounds
    double p2_rel_tol = 1e-3;
    int max_p2_rounds = 50;
    int max_p3_outer = 50;
    // feasibility repair: required slack above the secrecy target, nats
    double feasibility_margin = 1e-3;
    int feasibility_rounds = 50;
};

struct ScenarioConfig {
    int n_t = 5;
    int n_i = 3;
    int k = 1;
    std::vector<int> n_e{3};
    double d_i = 9.0;
    std::vector<double> d_e{7.0};
    double gamma = 3.0;
    double a0 = 1.0;
    double sigma2_i = 0.0;           // watts
    std::vector<double> sigma2_e;    // watts, one per ER
    double power = 10.0;             // watts
    double c0_bits = 3.0;
    double r0_bits = 3.0;
    std::vector<double> eta{0.8};
    std::vector<double> mu{1.0};
    std::uint64_t seed = 1;
    SolverTolerances tol;

    void validate() const;  // throws std::invalid_argument
};

// Published single-ER setup (5x3x3, -5 dBm noise, 9 m / 7 m, P = 10 dBW).
ScenarioConfig default_scenario(int num_er = 1);

ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& cfg);

struct ChannelSet {
    CMatrix h;                 // n_t x n_i, noise-normalized
    std::vector<CMatrix> g;    // n_t x n_e[k], noise-normalized
    CMatrix raw_h;
    std::vector<CMatrix> raw_g;
    ScenarioConfig config;

    int k() const { return static_cast<int>(g.size()); }
};

double path_loss(double d, double gamma, double a0);

ChannelSet draw_channels(const ScenarioConfig& cfg, std::uint64_t trial_index);

// Builds a ChannelSet from explicit normalized matrices (tests, tiny oracles).
ChannelSet make_channels(const ScenarioConfig& cfg, CMatrix h, std::vector<CMatrix> g);

// Counter-based stream: value i of stream (seed, trial) is a pure function of
// (seed, trial, i).
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;
    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;  // in (0, 1)
    double normal() noexcept;
    cd complex_normal(double variance) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace swipt
