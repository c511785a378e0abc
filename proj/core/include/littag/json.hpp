#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "littag/database.hpp"
#include "littag/error.hpp"
#include "littag/query.hpp"
#include "littag/reconcile.hpp"
#include "littag/schema.hpp"
#include "littag/tagging.hpp"

// JSON renderings shared by the CLI and the service, so both front ends emit
// byte-identical bodies for the same result. Member order is fixed.
namespace littag::json {

using Json = nlohmann::ordered_json;

// Two-space indent, trailing newline.
std::string dump(const Json& value);

Json error_body(const Error& e);

Json schema(const CategoriesSchema& s);
Json schema_delta(const SchemaDelta& d);

// {"Key": ..., "<column>": "<serialized cell>", ...} in header order.
Json row(const TagDatabase& db, const DatabaseRow& r);
Json rows(const TagDatabase& db, const std::vector<std::size_t>& indices);

Json option_counts(const OptionCounts& c);
Json crosstab(const CrossTab& t);
Json sync_report(const SyncReport& r);
Json conform_report(const ConformReport& r);
Json diff_report(const DiffReport& r);
Json merge_report(const MergeReport& r);
Json relink_report(const RelinkReport& r);
Json replace_result(const ReplaceResult& r);

}  // namespace littag::json
