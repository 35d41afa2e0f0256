#pragma once

// The shipped corpus: presentation files plus a manifest of machine-checkable
// claims, grouped by entry. Each claim names the operation that checks it.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace obstrukt::corpus {

using Json = nlohmann::ordered_json;

std::filesystem::path default_dir();

struct ClaimResult {
  std::string id;
  std::string op;
  bool pass = false;
  std::string detail;
};

struct EntryReport {
  std::string id;
  std::vector<ClaimResult> claims;
  bool pass() const;
};

/// Throws Error(UnknownEntry) when no entry has this id.
EntryReport verify(const std::string& entry_id, const std::filesystem::path& dir = default_dir());
std::vector<std::string> entry_ids(const std::filesystem::path& dir = default_dir());

/// {entries: [{id, title, claims, variants, reconciled, flagged}]}. `flagged`
/// is set when an as-printed variant fails to compile.
Json list_entries_json(const std::filesystem::path& dir = default_dir());
/// {entries: [{id, status, claims: [{id, op, status, detail}]}], status}
Json verify_json(const std::string& entry_id, const std::filesystem::path& dir = default_dir());
Json verify_all_json(const std::filesystem::path& dir = default_dir());

}  // namespace obstrukt::corpus
