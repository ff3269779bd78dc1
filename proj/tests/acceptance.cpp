// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Sweeps are read from the shipped figure configs.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "iabsim.hpp"
#include "support/properties.hpp"

using namespace iabsim;

namespace {

constexpr double kDualPdrFloor = 0.95;
constexpr double kSinglePdrCeiling = 0.70;
constexpr double kPdrGap = 0.20;
constexpr double kRuntimeBudgetS = 300.0;
constexpr std::size_t kBurstSeedsNeeded = 8;
constexpr double kAoiWithinFas = 1.25;
constexpr double kImbalanceRatio = 0.85;
constexpr std::size_t kScalabilityUes = 14;

int failures = 0;

void report(bool ok, const std::string& id, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << id << "  " << what << "  [" << detail << "]" << std::endl;
  if (!ok) ++failures;
}

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

SweepSpec load(const std::string& name) { return parse_config(std::string(IABSIM_CONFIG_DIR) + "/" + name); }

const SummaryRow* find_mean(const SweepResult& r, Policy p, PathMode pm, auto match) {
  for (const auto& a : r.aggregates)
    if (a.seed == "mean" && a.policy == p && a.path_mode == pm && match(a)) return &a;
  return nullptr;
}

// Every RFAS row seen in any experiment, for the stability criterion.
std::vector<SummaryRow> rfas_rows;

void collect_rfas(const std::vector<SummaryRow>& rows) {
  for (const auto& r : rows)
    if (r.policy == Policy::RFAS) rfas_rows.push_back(r);
}

void resilience() {
  SweepSpec spec = load("fig3_resilience.conf");
  const auto t0 = std::chrono::steady_clock::now();
  SweepResult r = run_sweep(spec);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  collect_rfas(r.runs);

  bool all_dual = true;
  std::ostringstream dual_detail;
  for (double p : spec.p_blk_values) {
    auto* d = find_mean(r, Policy::RFAS, PathMode::DualPath, [&](const SummaryRow& a) { return a.p_blk == p; });
    const double v = d ? d->pdr : 0.0;
    all_dual &= v >= kDualPdrFloor;
    dual_detail << "p=" << num(p, 2) << ":" << num(v) << " ";
  }
  report(all_dual, "C1.dual", "dual-path RFAS PDR >= 0.95 at every p_blk (10-seed mean)", dual_detail.str());

  const double worst = spec.p_blk_values.back();
  auto* s = find_mean(r, Policy::RFAS, PathMode::SinglePath, [&](const SummaryRow& a) { return a.p_blk == worst; });
  auto* d = find_mean(r, Policy::RFAS, PathMode::DualPath, [&](const SummaryRow& a) { return a.p_blk == worst; });
  const double sp = s ? s->pdr : 1.0;
  const double dp = d ? d->pdr : 0.0;
  report(sp <= kSinglePdrCeiling && dp - sp >= kPdrGap, "C1.single",
         "single-path PDR at p_blk=0.30 <= 0.70 with gap >= 0.20 to dual-path",
         "single=" + num(sp) + " dual=" + num(dp) + " gap=" + num(dp - sp));
  report(secs < kRuntimeBudgetS, "C1.runtime", "resilience sweep under 5 minutes",
         num(secs, 1) + " s for " + std::to_string(r.runs.size()) + " runs");
}

std::vector<std::uint64_t> burst_fas_overflow_seeds;
std::size_t burst_seed_count = 0;

void burst() {
  SweepSpec spec = load("fig4_burst.conf");
  std::size_t passing = 0;
  std::ostringstream detail;
  for (std::uint64_t seed : spec.seeds) {
    ScenarioConfig c = spec.base;
    c.seed = seed;
    BurstScenarioResult b = run_burst_scenario(c, spec.name);
    collect_rfas({b.of(Policy::RFAS).summary});
    const auto& rf = b.of(Policy::RFAS);
    const auto& qa = b.of(Policy::QAS);
    const auto& fa = b.of(Policy::FAS);
    const bool ok = rf.post_burst_aoi < qa.post_burst_aoi && rf.peak_queue <= c.buffer_cap && fa.peak_queue > c.buffer_cap;
    passing += ok;
    if (fa.summary.overflow_count > 0) burst_fas_overflow_seeds.push_back(seed);
    detail << "s" << seed << (ok ? "+" : "-") << " ";
  }
  burst_seed_count = spec.seeds.size();
  report(passing >= kBurstSeedsNeeded, "C3.burst",
         "RFAS post-burst AoI < QAS, RFAS peak <= 8, FAS peak > 8 on >= 8 of 10 seeds",
         std::to_string(passing) + "/" + std::to_string(spec.seeds.size()) + " seeds: " + detail.str());
}

void scalability() {
  SweepSpec spec = load("fig5_scalability.conf");
  SweepResult r = run_sweep(spec);
  collect_rfas(r.runs);
  auto at = [&](Policy p) {
    return find_mean(r, p, PathMode::DualPath, [](const SummaryRow& a) { return a.ue_count == kScalabilityUes; });
  };
  const auto* rf = at(Policy::RFAS);
  const auto* qa = at(Policy::QAS);
  const auto* fa = at(Policy::FAS);
  if (!rf || !qa || !fa) {
    report(false, "C4.order", "scalability sweep has a 14-UE cell for every policy", "missing cell");
    return;
  }
  report(fa->mean_aoi <= rf->mean_aoi && rf->mean_aoi < qa->mean_aoi, "C4.order",
         "mean AoI at 14 UEs ordered FAS <= RFAS < QAS (10-seed mean)",
         "FAS=" + num(fa->mean_aoi, 2) + " RFAS=" + num(rf->mean_aoi, 2) + " QAS=" + num(qa->mean_aoi, 2));
  report(rf->mean_aoi <= kAoiWithinFas * fa->mean_aoi, "C4.near_fas", "RFAS mean AoI within 25% of FAS at 14 UEs",
         "ratio=" + num(rf->mean_aoi / fa->mean_aoi));
  report(rf->imbalance_mean <= kImbalanceRatio * fa->imbalance_mean, "C4.imbalance",
         "RFAS imbalance <= 0.85 x FAS at 14 UEs",
         "RFAS=" + num(rf->imbalance_mean) + " FAS=" + num(fa->imbalance_mean) +
             " ratio=" + num(rf->imbalance_mean / fa->imbalance_mean));
}

void traffic_modes() {
  SweepSpec spec = load("fig6_traffic.conf");
  SweepResult r = run_sweep(spec);
  collect_rfas(r.runs);
  auto mixed = [](const SummaryRow& a) { return a.traffic_mode == TrafficMode::Mixed; };
  const auto* rf = find_mean(r, Policy::RFAS, PathMode::DualPath, mixed);
  const auto* fa = find_mean(r, Policy::FAS, PathMode::DualPath, mixed);
  const bool ok = rf && fa && rf->imbalance_mean <= kImbalanceRatio * fa->imbalance_mean;
  report(ok, "C4.mixed_imbalance", "RFAS imbalance <= 0.85 x FAS in mixed traffic mode",
         rf && fa ? "RFAS=" + num(rf->imbalance_mean) + " FAS=" + num(fa->imbalance_mean) +
                        " ratio=" + num(rf->imbalance_mean / fa->imbalance_mean)
                  : "missing cell");
}

void stability() {
  std::size_t overflowing = 0;
  double worst = 0.0;
  for (const auto& r : rfas_rows) {
    overflowing += r.overflow_count > 0;
    worst = std::max(worst, r.max_occupancy);
  }
  report(overflowing == 0 && worst <= 8.0, "C2.rfas", "every RFAS run: overflow_count = 0 and max occupancy <= 8",
         std::to_string(rfas_rows.size()) + " runs, " + std::to_string(overflowing) + " overflowing, max occupancy " +
             num(worst, 0));
  report(burst_fas_overflow_seeds.size() == burst_seed_count && burst_seed_count > 0, "C2.fas_burst",
         "FAS burst run records overflow_count > 0 on every burst seed",
         std::to_string(burst_fas_overflow_seeds.size()) + "/" + std::to_string(burst_seed_count) + " seeds");
}

void properties() {
  const std::uint64_t seed = props::property_seed();
  std::cout << "property seed " << seed << " (set IABSIM_PROPERTY_SEED to replay)" << std::endl;
  struct Check {
    const char* id;
    const char* what;
    props::Outcome outcome;
  };
  const Check checks[] = {
      {"C5.a", "schedules independent and maximal", props::schedules_independent_and_maximal(seed)},
      {"C5.b", "greedy <= exact MWIS on 500 instances, equal when conflict-free", props::greedy_bounded_by_exact(seed)},
      {"C5.c", "destination AoI equals t - freshest delivered timestamp", props::destination_age_matches_timestamps(seed)},
      {"C5.d", "hop recursion equals timestamp AoI with <= 1 packet per queue", props::hop_recursion_matches_timestamps(seed)},
      {"C5.e", "packet conservation every slot", props::packets_conserved(seed)},
      {"C5.f", "blockage chain stationary within 0.01 over 10^6 slots", props::channel_stationary(seed)},
      {"C5.g", "identical traces for identical seeds", props::traces_reproducible(seed)},
      {"C5.h", "route validators accept all generated flows", props::routes_valid(seed)},
  };
  for (const auto& c : checks) report(c.outcome.ok, c.id, c.what, c.outcome.ok ? "seed " + std::to_string(seed) : c.outcome.detail);
}

}  // namespace

int main() {
  try {
    resilience();
    burst();
    scalability();
    traffic_modes();
    stability();
    properties();
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 2;
  }
  std::cout << (failures ? std::to_string(failures) + " criterion line(s) failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
