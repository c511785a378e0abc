#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "littag/citations.hpp"
#include "littag/database.hpp"
#include "littag/filter.hpp"
#include "littag/schema.hpp"

// Hand-rolled random generators for property tests. Everything is driven by
// one seeded engine so a failing seed can be replayed.
namespace littag::testing {

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive
bool chance(Rng& rng, double p);
template <class T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[uniform(rng, 0, items.size() - 1)];
}

struct SchemaShape {
  std::size_t min_tags = 1;
  std::size_t max_tags = 10;
  std::size_t notes = 0;  // extra note fields on top of the random tags
  std::size_t min_options = 1;
  std::size_t max_options = 6;
  std::size_t max_groups = 3;
  bool awkward_names = true;  // spaces, commas, quotes in names and options
};

CategoriesSchema random_schema(Rng& rng, const SchemaShape& shape = {});

// Exactly `tags` non-note tags (selection kinds only when `selection_only`)
// plus `notes` note fields; option counts uniform in [min_options, max_options].
CategoriesSchema scaled_schema(Rng& rng, std::size_t tags, std::size_t notes, std::size_t min_options,
                               std::size_t max_options);

struct ExportShape {
  std::size_t rows = 20;
  double doi_rate = 0.7;
  bool unique_titles = true;
  bool awkward_text = true;  // commas, quotes, newlines, non-ASCII
};

std::string random_key(Rng& rng);
ZoteroExport random_export(Rng& rng, const ExportShape& shape = {});

// Random valid cell for a tag; `fill` is the probability of a non-empty cell.
CellValue random_cell(Rng& rng, const TagDefinition& tag, double fill = 0.7);

TagDatabase random_database(Rng& rng, const CategoriesSchema& schema, const ZoteroExport& exp, double fill = 0.7);

// Random filter over the database's header. Literals are drawn partly from
// actual cell values so that predicates hit as well as miss.
FilterExpr random_filter(Rng& rng, const TagDatabase& db, int depth = 3);

// Random export perturbation: drops and appends records, edits titles.
ZoteroExport perturb_export(Rng& rng, const ZoteroExport& exp, double drop_rate, std::size_t additions);

// Same export with fresh keys (the same papers in another library).
ZoteroExport rekey_export(Rng& rng, const ZoteroExport& exp);

}  // namespace littag::testing
