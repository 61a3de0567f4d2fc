#pragma once

#include "catenc/report.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace catenc {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
// Digest of a file's bytes; throws IngestError if unreadable.
std::string file_digest(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  Json flags = Json::object();
  Json seeds = Json::object();
  Json inputs = Json::object();  // path -> FNV-1a 64 hex digest
  Json outputs = Json::array();
  Json notes = Json::object();
  std::string version;
  std::string started;
  std::string finished;

  Json to_json() const;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
std::string utc_timestamp();

namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIngest = 3;
inline constexpr int kExitEncoder = 4;

int run(int argc, char** argv);
// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cli
}  // namespace catenc
