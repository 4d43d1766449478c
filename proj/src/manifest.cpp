// Copyright 2026 The gknn Authors
// SPDX-License-Identifier: Apache-2.0

#include "gknn/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "gknn/error.hpp"

namespace gknn {

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.embeddings = j.at("embeddings").get<std::string>();
      e.logits = j.at("logits").get<std::string>();
      e.reference = j.value("reference", std::string());
      if (e.embeddings.is_relative()) e.embeddings = base / e.embeddings;
      if (e.logits.is_relative()) e.logits = base / e.logits;
      if (j.contains("lang_frames") && !j["lang_frames"].is_null()) {
        std::vector<std::uint8_t> langs;
        for (const auto& v : j["lang_frames"]) {
          const int x = v.get<int>();
          if (x != 0 && x != 1) throw Error(ErrorKind::kFormat, "lang_frames entries must be 0 or 1");
          langs.push_back(static_cast<std::uint8_t>(x));
        }
        e.lang_frames = std::move(langs);
      }
      if (!seen.insert(e.id).second) {
        throw Error(ErrorKind::kFormat, "duplicate id \"" + e.id + "\"");
      }
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::kFormat, where + ex.what());
    } catch (const Error& ex) {
      throw Error(ex.kind(), where + ex.what());
    }
  }
  return entries;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["embeddings"] = e.embeddings.generic_string();
    j["logits"] = e.logits.generic_string();
    j["reference"] = e.reference;
    if (e.lang_frames) j["lang_frames"] = *e.lang_frames;
    out << j.dump() << '\n';
  }
}

}  // namespace gknn
