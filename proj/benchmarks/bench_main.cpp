#include <benchmark/benchmark.h>

#include <cmath>
#include <numeric>

#include "aqmap/gpm_nn.hpp"
#include "aqmap/planner.hpp"
#include "aqmap/rng.hpp"
#include "aqmap/sensing.hpp"

using namespace aqmap;

namespace {

// square-ish planar grid with about n cubes
GridSpec grid_for(std::size_t n) {
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  return GridSpec::lattice({side, side, 1});
}

SyntheticField world(const GridSpec& g, Scenario s) {
  return generate_field(g, PlumeParams{}, s, FieldConfig{}, 7);
}

SampleSet complete_pass(const SyntheticField& f) {
  const auto src = MeasurementSource::synthetic(f, 0.03, 7);
  SampleSet out;
  for (std::size_t c = 0; c < f.truth.size(); ++c) out.push_back(src.measure(c, 0));
  return out;
}

}  // namespace

static void BM_GreedyTrajectory(benchmark::State& state) {
  const GridSpec g = grid_for(static_cast<std::size_t>(state.range(0)));
  Eigen::MatrixXd mag = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(g.cube_count()), 5);
  const PdtField pdt = pdt_from_magnitudes(mag);
  SelectionSet sel;
  sel.members.resize(g.cube_count());
  std::iota(sel.members.begin(), sel.members.end(), std::size_t{0});
  BatteryModel battery;
  battery.budget = 1e9;
  std::size_t comparisons = 0;
  for (auto _ : state) {
    const Trajectory t = greedy_trajectory(sel, 0, battery, pdt, g);
    comparisons = t.comparisons;
    benchmark::DoNotOptimize(t.cubes.data());
  }
  state.counters["cubes"] = static_cast<double>(g.cube_count());
  state.counters["comparisons"] = static_cast<double>(comparisons);
  state.SetComplexityN(static_cast<benchmark::IterationCount>(g.cube_count()));
}
BENCHMARK(BM_GreedyTrajectory)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

static void BM_Fit(benchmark::State& state) {
  const GridSpec g = GridSpec::lattice({10, 10, 1});
  const SampleSet samples = complete_pass(world(g, Scenario::planar));
  FitOptions opt;
  opt.neurons = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto [model, report] = fit(samples, PlumeParams{}, opt);
    benchmark::DoNotOptimize(model.beta.data());
  }
}
BENCHMARK(BM_Fit)->Arg(0)->Arg(100)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_ComputePdt(benchmark::State& state) {
  const GridSpec g = GridSpec::lattice({4, 4, 10});
  const SyntheticField f = world(g, Scenario::volumetric);
  FitOptions opt;
  opt.neurons = static_cast<std::size_t>(state.range(0));
  const auto [model, report] = fit(complete_pass(f), PlumeParams{}, opt);
  for (auto _ : state) {
    const PdtField pdt = compute_pdt(model, g, f.wind);
    benchmark::DoNotOptimize(pdt.pdt.data());
  }
}
BENCHMARK(BM_ComputePdt)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
