// Timings at the sizes of the two reviews the tool was built for:
// 870 papers with 24 tags and 3 note fields, and 310 papers with 62 tags and
// 5 note fields, options per tag between 3 and 24.
#include <benchmark/benchmark.h>

#include "generators.hpp"
#include "littag/database.hpp"
#include "littag/query.hpp"
#include "littag/reconcile.hpp"
#include "littag/report.hpp"
#include "littag/tagging.hpp"

namespace {

using namespace littag;

struct Corpus {
  CategoriesSchema schema;
  ZoteroExport exp;
  TagDatabase db;
  std::string bytes;
};

Corpus make_corpus(std::uint64_t seed, std::size_t rows, std::size_t tags, std::size_t notes) {
  testing::Rng rng(seed);
  Corpus c;
  c.schema = testing::scaled_schema(rng, tags, notes, 3, 24);
  c.exp = testing::random_export(rng, {.rows = rows});
  c.db = testing::random_database(rng, c.schema, c.exp, 0.6);
  c.bytes = serialize_database(c.db);
  return c;
}

// state.range(0): 0 = 870 x 24 + 3, 1 = 310 x 62 + 5
const Corpus& corpus(std::int64_t which) {
  static const Corpus large = make_corpus(870, 870, 24, 3);
  static const Corpus wide = make_corpus(310, 310, 62, 5);
  return which == 0 ? large : wide;
}

void BM_Create(benchmark::State& state) {
  const auto& c = corpus(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(create_database(c.exp, c.schema));
}
BENCHMARK(BM_Create)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Save(benchmark::State& state) {
  const auto& c = corpus(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serialize_database(c.db));
}
BENCHMARK(BM_Save)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Load(benchmark::State& state) {
  const auto& c = corpus(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(load_database(c.bytes, c.schema));
}
BENCHMARK(BM_Load)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Filter(benchmark::State& state) {
  const auto& c = corpus(state.range(0));
  auto expr = parse_filter("Tag0 == \"opt1\" | has(Tag1, \"opt2\") & !empty(Note0) | contains(Title, \"ice\")");
  for (auto _ : state) benchmark::DoNotOptimize(eval_filter(c.db, expr));
}
BENCHMARK(BM_Filter)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Crosstab(benchmark::State& state) {
  const auto& c = corpus(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(crosstab(c.db, "Tag0", "Tag1"));
}
BENCHMARK(BM_Crosstab)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Counts(benchmark::State& state) {
  const auto& c = corpus(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(option_counts(c.db));
}
BENCHMARK(BM_Counts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sync(benchmark::State& state) {
  const auto& c = corpus(state.range(0));
  testing::Rng rng(1);
  auto next = testing::perturb_export(rng, c.exp, 0.05, 20);
  for (auto _ : state) benchmark::DoNotOptimize(sync(c.db, next));
}
BENCHMARK(BM_Sync)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Relink(benchmark::State& state) {
  const auto& c = corpus(state.range(0));
  testing::Rng rng(2);
  auto fresh = testing::rekey_export(rng, c.exp);
  for (auto _ : state) benchmark::DoNotOptimize(relink(c.db, fresh));
}
BENCHMARK(BM_Relink)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Report(benchmark::State& state) {
  const auto& c = corpus(state.range(0));
  ReportSpec spec;
  for (const auto* tag : c.schema.tags()) {
    if (tag->kind == TagKind::Note) {
      spec.notes.push_back(tag->name);
    } else {
      spec.tags.push_back(tag->name);
    }
  }
  spec.crosstabs = {{"Tag0", "Tag1"}};
  spec.include_option_counts = true;
  for (auto _ : state) benchmark::DoNotOptimize(build_report(c.db, spec, UtcInstant{}));
}
BENCHMARK(BM_Report)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
