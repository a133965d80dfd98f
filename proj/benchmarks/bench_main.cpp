#include <benchmark/benchmark.h>

#include "biphoton/analysis.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/state.hpp"

using namespace biphoton;

namespace {

DetectorConfig single_thread(std::uint64_t seed) {
  DetectorConfig d;
  d.rng_seed = seed;
  d.threads = 1;
  return d;
}

}  // namespace

static void BM_SamplePair(benchmark::State& s) {
  const auto st = oam_state(2, 2, Sign::plus);
  Rng rng = substream(1, 0, 0);
  for (auto _ : s) benchmark::DoNotOptimize(sample_pair(st, rng));
  s.SetItemsProcessed(s.iterations());
}
BENCHMARK(BM_SamplePair);

static void BM_HeraldedImaging(benchmark::State& s) {
  const auto st = oam_state(2, 2, Sign::plus);
  const SectorMask mask(0.0, kPi / static_cast<double>(s.range(0)));
  const auto events = static_cast<std::uint64_t>(1) << 16;
  for (auto _ : s) benchmark::DoNotOptimize(run_heralded_imaging(st, mask, events, single_thread(2)));
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(events));
}
BENCHMARK(BM_HeraldedImaging)->Arg(4)->Arg(90)->Unit(benchmark::kMillisecond);

static void BM_HeraldedImagingPairs(benchmark::State& s) {
  const auto st = oam_state(2, 2, Sign::plus);
  const SectorMask mask(0.0, kPi / 4);
  const auto events = static_cast<std::uint64_t>(1) << 16;
  for (auto _ : s)
    benchmark::DoNotOptimize(run_heralded_imaging(st, mask, events, single_thread(3), HeraldMode::pairs));
  s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(events));
}
BENCHMARK(BM_HeraldedImagingPairs)->Unit(benchmark::kMillisecond);

static void BM_AzimuthalProfile(benchmark::State& s) {
  const auto st = oam_state(2, 2, Sign::plus);
  const auto img = run_singles_imaging(st, 200'000, single_thread(4));
  const Field2D f = img.as_field();
  for (auto _ : s)
    benchmark::DoNotOptimize(azimuthal_profile(f, img.grid, Annulus(0.5, 2.0), static_cast<std::size_t>(s.range(0)), true));
}
BENCHMARK(BM_AzimuthalProfile)->Arg(90)->Arg(360);

static void BM_FringeCount(benchmark::State& s) {
  std::vector<double> p(static_cast<std::size_t>(s.range(0)));
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = 1.0 + std::cos(6.0 * kTwoPi * static_cast<double>(i) / static_cast<double>(p.size()));
  for (auto _ : s) benchmark::DoNotOptimize(fringe_count(p));
}
BENCHMARK(BM_FringeCount)->Arg(90)->Arg(360);

static void BM_MakeState(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(oam_state(2, 3, Sign::minus));
}
BENCHMARK(BM_MakeState)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
