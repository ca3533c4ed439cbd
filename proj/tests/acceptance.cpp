// Acceptance run: one PASS/FAIL line per criterion. Usage: vfrl_acceptance [out_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ais_oracle.hpp"
#include "gradcheck.hpp"
#include "vfrl/ais.hpp"
#include "vfrl/checkpoint.hpp"
#include "vfrl/cli.hpp"
#include "vfrl/config.hpp"
#include "vfrl/csv.hpp"
#include "vfrl/ddpg.hpp"
#include "vfrl/river_env.hpp"
#include "vfrl/validation.hpp"
#include "vfrl/vessel.hpp"

using namespace vfrl;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr int kGradNets = 20;
constexpr double kGradTol = 1e-5;
constexpr double kGradSeconds = 10.0;
constexpr int kArSteps = 100000;
constexpr double kArTol = 0.05;
constexpr double kArSeconds = 5.0;
constexpr double kArgmaxGrid = 0.01;
constexpr double kPeakReference = 1.6829493802358942e-3;
constexpr double kPeakTol = 1e-6;
constexpr int kComfortPairs = 1000;
constexpr int kLognormalDraws = 10000;
constexpr double kLognormalTol = 0.03;
constexpr int kIntegrationSteps = 10000;
constexpr int kDeterminismEpisodes = 5;
constexpr int kTrainEpisodes = 1000;
constexpr std::uint64_t kTrainSeed = 1;
constexpr int kEvalEpisodes = 20;
constexpr double kMinSteadyGap = 100.0;
constexpr double kMaxComfortRms = 0.05;
constexpr double kTrainSeconds = 900.0;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != cli::kOk) std::fprintf(stderr, "cli failed: %s", err.str().c_str());
  return code;
}

void gradient_suite() {
  Timer timer;
  Rng rng = make_rng(2024, Stream::kInit);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int i = 0; i < kGradNets; ++i) {
    const bool actor = i % 2 == 0;
    Mlp net(actor ? std::vector<std::size_t>{7, 32, 32, 1} : std::vector<std::size_t>{8, 32, 32, 1},
            actor ? OutputActivation::kTanh : OutputActivation::kIdentity);
    net.init_uniform(rng);
    const test::GradCheckResult r = test::check_mlp_gradients(net, rng, 3);
    worst = std::max(worst, r.max_rel_error);
    checked += r.checked;
  }
  const double t = timer.seconds();
  report("gradient_suite", worst < kGradTol && t < kGradSeconds,
         fmt("%d nets, %zu entries, max rel error %.3g (< %.0e), %.2f s (< %.0f s)", kGradNets,
             checked, worst, kGradTol, t, kGradSeconds));
}

void ar_stationarity() {
  Timer timer;
  const EnvConfig c;
  const char* names[] = {"leader_speed", "depth", "cross_section", "stream"};
  const ArProcess* procs[] = {&c.leader_speed, &c.depth, &c.cross_section, &c.stream};
  bool pass = true;
  std::string detail;
  for (int k = 0; k < 4; ++k) {
    ArProcess p = *procs[k];
    p.current = p.stationary_mean();
    Rng rng = make_rng(31, Stream::kEnv, static_cast<std::uint64_t>(k));
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < kArSteps; ++i) {
      const double x = ar_step(p, standard_normal(rng));
      sum += x;
      sq += x * x;
    }
    const double mean = sum / kArSteps;
    const double var = sq / kArSteps - mean * mean;
    const double m_ref = procs[k]->stationary_mean();
    const double v_ref = procs[k]->stationary_variance();
    // A zero mean is judged relative to the standard deviation.
    const double m_err = std::abs(mean - m_ref) / (m_ref != 0.0 ? std::abs(m_ref) : std::sqrt(v_ref));
    const double v_err = std::abs(var - v_ref) / v_ref;
    pass = pass && m_err < kArTol && v_err < kArTol;
    detail += fmt("%s mean %.4g (ref %.4g, err %.3f) var %.4g (ref %.4g, err %.3f); ", names[k],
                  mean, m_ref, m_err, var, v_ref, v_err);
  }
  const double t = timer.seconds();
  report("ar_stationarity", pass && t < kArSeconds, detail + fmt("%.2f s (< %.0f s)", t, kArSeconds));
}

void reward_shape() {
  const EnvConfig c;
  double best_t = 0.0, best_f = -1.0;
  for (int i = 1; i <= static_cast<int>(2000.0 / kArgmaxGrid); ++i) {
    const double t = i * kArgmaxGrid;
    const double f = reward_safety(t, c.mu_t, c.sigma_t);
    if (f > best_f) {
      best_f = f;
      best_t = t;
    }
  }
  const double mode = std::exp(c.mu_t - c.sigma_t * c.sigma_t);
  const bool argmax_ok = std::abs(best_t - mode) <= kArgmaxGrid;
  const double peak = reward_safety(std::exp(5.41), c.mu_t, c.sigma_t);
  const bool peak_ok = std::abs(peak - kPeakReference) < kPeakTol;

  Rng rng(77);
  const double p_max = VesselParams{}.max_power;
  int exact = 0;
  for (int i = 0; i < kComfortPairs; ++i) {
    const double now = uniform(rng, 0.0, p_max);
    const double prev = uniform(rng, 0.0, p_max);
    const double frac = (now - prev) / p_max;
    exact += reward_comfort(now, prev, c.dt, p_max) == -(frac * frac) ? 1 : 0;
  }
  report("reward_shape", argmax_ok && peak_ok && exact == kComfortPairs,
         fmt("argmax %.2f s vs mode %.4f s; f(e^5.41) = %.10g (ref %.10g); comfort exact on %d/%d",
             best_t, mode, peak, kPeakReference, exact, kComfortPairs));
}

void lognormal_recovery() {
  Rng rng(5);
  std::lognormal_distribution<double> dist(5.41, 1.06);
  std::vector<double> draws(kLognormalDraws);
  for (double& d : draws) d = dist(rng);
  const ais::LognormalFit fit = ais::fit_lognormal(draws);
  const bool fit_ok =
      std::abs(fit.mu - 5.41) <= kLognormalTol && std::abs(fit.sigma - 1.06) <= kLognormalTol;

  const ais::Tracks tracks = ais::synthesize_random_corpus(10, 400, 12);
  const ais::ExtractionParams params;
  const auto fast = ais::extract_events(tracks, params);
  const auto slow = test::brute_force_events(tracks, params);
  report("lognormal_recovery", fit_ok && fast == slow && !fast.empty(),
         fmt("mu %.4f sigma %.4f (tol %.2f); 10-vessel corpus: %zu events, oracle %zu, %s", fit.mu,
             fit.sigma, kLognormalTol, fast.size(), slow.size(),
             fast == slow ? "identical" : "different"));
}

void integration_exactness() {
  // Dyadic inputs: every partial sum is exact, so equality must hold.
  VesselState s{1.5, 0.25, 0.0};
  const double a = 0.125, dt = 0.5;
  for (int i = 0; i < kIntegrationSteps; ++i) s = step(s, a, dt);
  const double t = kIntegrationSteps * dt;
  const bool exact = s.speed == 0.25 + a * t && s.position == 1.5 + 0.25 * t + 0.5 * a * t * t;

  // General inputs: the recursive-summation rounding bound n * eps * sum|terms|.
  VesselState g{0.0, 3.7, 0.0};
  const double ga = -0.00031, gdt = 1.0;
  for (int i = 0; i < kIntegrationSteps; ++i) g = step(g, ga, gdt);
  const double gt = kIntegrationSteps * gdt;
  const double n_eps = kIntegrationSteps * std::numeric_limits<double>::epsilon();
  const double v_ref = 3.7 + ga * gt;
  const double x_ref = 3.7 * gt + 0.5 * ga * gt * gt;
  const double v_bound = n_eps * (3.7 + std::abs(ga) * gt);
  const double x_bound = n_eps * (3.7 * gt + std::abs(ga) * gt * gt);
  const double v_err = std::abs(g.speed - v_ref);
  const double x_err = std::abs(g.position - x_ref);
  report("integration_exactness", exact && v_err <= v_bound && x_err <= x_bound,
         fmt("dyadic case %s; general case |dv| %.2g (bound %.2g), |dx| %.2g (bound %.2g) over %d "
             "steps",
             exact ? "exact" : "inexact", v_err, v_bound, x_err, x_bound, kIntegrationSteps));
}

void determinism(const fs::path& dir) {
  const std::string episodes = std::to_string(kDeterminismEpisodes);
  bool ran = true;
  for (const char* name : {"det_a", "det_b"}) {
    ran = ran && run_cli({"train", "--seed", "42", "--episodes", episodes, "--out",
                          (dir / name).string(), "--quiet"}) == cli::kOk;
  }
  const std::string a = ran ? slurp(dir / "det_a" / "metrics.csv") : "";
  const bool same = ran && !a.empty() && a == slurp(dir / "det_b" / "metrics.csv");

  bool round_trip = false;
  std::size_t probes = 0;
  if (ran) {
    const DdpgAgent original = load_checkpoint(dir / "det_a" / "final.rflw");
    save_checkpoint(original, dir / "det_a" / "resaved.rflw");
    const DdpgAgent back = load_checkpoint(dir / "det_a" / "resaved.rflw");
    round_trip = slurp(dir / "det_a" / "final.rflw") == slurp(dir / "det_a" / "resaved.rflw");
    Rng rng(8);
    for (; probes < 1000; ++probes) {
      Observation o;
      o.speed = uniform(rng, 0.0, 1.2);
      o.power = uniform(rng, 0.0, 1.0);
      o.gap = uniform(rng, -0.1, 1.5);
      o.rel_speed = uniform(rng, -0.5, 0.5);
      o.depth = uniform(rng, 0.0, 4.0);
      o.cross_section = uniform(rng, 0.3, 2.0);
      o.stream = uniform(rng, -0.3, 0.3);
      if (original.actor_output(o) != back.actor_output(o)) {
        round_trip = false;
        break;
      }
    }
  }
  report("determinism", same && round_trip,
         fmt("metrics CSVs of two seed-42 runs %s (%zu bytes); checkpoint round trip %s over %zu "
             "observations",
             same ? "byte-identical" : "differ", a.size(), round_trip ? "bit-exact" : "mismatch",
             probes));
}

void training(const fs::path& dir) {
  Timer timer;
  const fs::path run = dir / "train";
  const int code = run_cli({"train", "--seed", std::to_string(kTrainSeed), "--episodes",
                            std::to_string(kTrainEpisodes), "--out", run.string(), "--quiet"});
  const double train_s = timer.seconds();
  if (code != cli::kOk) {
    report("training_efficacy", false, "training run failed");
    report("string_stability", false, "no checkpoint");
    return;
  }

  std::vector<double> rewards;
  {
    std::ifstream in(run / "metrics.csv");
    const CsvTable table = CsvTable::read(
        in, "metrics.csv",
        {"episode", "reward", "steps", "collision", "min_gap_m", "mean_critic_loss"});
    for (std::size_t r = 0; r < table.rows(); ++r) rewards.push_back(table.number(r, "reward"));
  }
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 50; ++i) {
    first += rewards[static_cast<std::size_t>(i)] / 50.0;
    last += rewards[rewards.size() - 50 + static_cast<std::size_t>(i)] / 50.0;
  }

  const DdpgAgent agent = load_checkpoint(run / "final.rflw");
  const EnvConfig env;
  const VesselParams vessel;
  int collisions = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  double worst_rms = 0.0, mean_rms = 0.0;
  for (int k = 1; k <= kEvalEpisodes; ++k) {
    const ScenarioResult r =
        run_scenario(agent, default_scenario(ScenarioKind::kSinusoidal, static_cast<std::uint64_t>(k)),
                     env, vessel);
    collisions += r.metrics.collision ? 1 : 0;
    min_gap = std::min(min_gap, r.metrics.min_gap_steady.front());
    worst_rms = std::max(worst_rms, r.metrics.comfort_rms_steady.front());
    mean_rms += r.metrics.comfort_rms_steady.front() / kEvalEpisodes;
  }
  const double total_s = timer.seconds();

  report("training_efficacy.a_reward_improves", last > first,
         fmt("%d episodes seed %llu: first-50 mean %.4f, last-50 mean %.4f", kTrainEpisodes,
             static_cast<unsigned long long>(kTrainSeed), first, last));
  report("training_efficacy.b_no_collisions", collisions == 0,
         fmt("%d collisions in %d sinusoidal evaluations", collisions, kEvalEpisodes));
  report("training_efficacy.c_steady_gap", min_gap > kMinSteadyGap,
         fmt("smallest steady-phase gap %.1f m (> %.0f m)", min_gap, kMinSteadyGap));
  report("training_efficacy.d_comfort", worst_rms < kMaxComfortRms,
         fmt("steady dP/P_max RMS worst %.4f, mean %.4f (< %.2f)", worst_rms, mean_rms,
             kMaxComfortRms));
  report("training_efficacy.runtime", total_s < kTrainSeconds,
         fmt("training %.0f s, total %.0f s (< %.0f s)", train_s, total_s, kTrainSeconds));

  const ScenarioResult platoon =
      run_scenario(agent, default_scenario(ScenarioKind::kPlatoon, 1), env, vessel);
  const double ratio = platoon.metrics.string_stability_ratio.value_or(
      std::numeric_limits<double>::infinity());
  report("string_stability", ratio < 1.0 && !platoon.metrics.collision,
         fmt("5-follower platoon on the jump schedule: ratio %.3f (< 1), collision %s", ratio,
             platoon.metrics.collision ? "yes" : "no"));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::remove_all(dir);
  fs::create_directories(dir);
  try {
    gradient_suite();
    ar_stationarity();
    reward_shape();
    lognormal_recovery();
    integration_exactness();
    determinism(dir);
    training(dir);
  } catch (const std::exception& e) {
    report("acceptance_run", false, std::string("exception: ") + e.what());
  }
  std::printf("%d failing criteria\n", failures);
  return failures == 0 ? 0 : 1;
}
