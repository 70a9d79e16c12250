#include <benchmark/benchmark.h>

#include "foldskit/builtins.hpp"
#include "foldskit/catalog.hpp"
#include "foldskit/dsl.hpp"
#include "foldskit/indiscernibility.hpp"
#include "foldskit/logic.hpp"
#include "foldskit/morphisms.hpp"

using namespace folds;

namespace {

void BM_DeriveSignature(benchmark::State& state) {
  auto sig = builtin_signature("cat+E");
  BottomFamily fam;
  fam.members.resize(sig->sort_count());
  fam.members[sig->sort("O")] = numbered_names(static_cast<std::size_t>(state.range(0)), "o");
  for (auto _ : state) benchmark::DoNotOptimize(derive_signature(sig, fam));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DeriveSignature)->DenseRange(1, 6)->Complexity();

void BM_DeriveStructure(benchmark::State& state) {
  auto m = category_from_table(linear_order(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(derive_structure(m));
}
BENCHMARK(BM_DeriveStructure)->DenseRange(2, 6);

void BM_IndiscernibilityGroup(benchmark::State& state) {
  auto m = category_from_table(cyclic_group(static_cast<std::size_t>(state.range(0))));
  SortId o = m.signature().sort("O");
  for (auto _ : state) benchmark::DoNotOptimize(count_indiscernibilities(m, o, 0, 0));
}
BENCHMARK(BM_IndiscernibilityGroup)->DenseRange(1, 6);

void BM_UnivalenceLinearOrder(benchmark::State& state) {
  auto m = category_from_table(linear_order(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(is_univalent(m));
}
BENCHMARK(BM_UnivalenceLinearOrder)->DenseRange(2, 5);

void BM_EnumerateMorphisms(benchmark::State& state) {
  auto m = category_from_table(linear_order(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_morphisms(m, m));
}
BENCHMARK(BM_EnumerateMorphisms)->DenseRange(2, 4);

void BM_CheckCategoryAxioms(benchmark::State& state) {
  auto theory = builtin_theory("cat_axioms");
  auto m = category_from_table(cyclic_group(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(check_theory(m, *theory));
}
BENCHMARK(BM_CheckCategoryAxioms)->DenseRange(2, 8, 2);

void BM_ParseStructure(benchmark::State& state) {
  auto m = category_from_table(cyclic_group(static_cast<std::size_t>(state.range(0))));
  auto text = serialize(m);
  for (auto _ : state) benchmark::DoNotOptimize(parse_structure(text, m.signature_ptr()));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseStructure)->RangeMultiplier(2)->Range(2, 16);

}  // namespace
BENCHMARK_MAIN();
