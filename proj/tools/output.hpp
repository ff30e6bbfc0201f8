#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace cli {

namespace fs = std::filesystem;

struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<double>> rows;
};

// fixed layout: header line, then every value at 17 significant digits
void write_csv(const fs::path& path, const Table& t);

void write_json(const fs::path& path, const nlohmann::json& j);

// SHA-1 of "blob <size>\0<content>", the id git gives the same file
std::string git_blob_sha1(const std::string& content);

std::string read_file(const fs::path& path);

// "2" for 2.0, "0.5" for 0.5; used in file names
std::string tag(double v);

}  // namespace cli
