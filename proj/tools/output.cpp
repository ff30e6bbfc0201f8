#include "output.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cli {

void write_csv(const fs::path& path, const Table& t) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  for (size_t c = 0; c < t.cols.size(); ++c) std::fprintf(f, "%s%s", c ? "," : "", t.cols[c].c_str());
  std::fputc('\n', f);
  for (const auto& r : t.rows) {
    if (r.size() != t.cols.size()) {
      std::fclose(f);
      throw std::logic_error("row width does not match header in " + path.string());
    }
    for (size_t c = 0; c < r.size(); ++c) std::fprintf(f, "%s%.17g", c ? "," : "", r[c]);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream o(path);
  if (!o) throw std::runtime_error("cannot write " + path.string());
  o << j.dump(2) << '\n';
}

std::string git_blob_sha1(const std::string& content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob += content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr))
    throw std::runtime_error("SHA-1 failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s.push_back(hex[md[i] >> 4]);
    s.push_back(hex[md[i] & 15]);
  }
  return s;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tag(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace cli
