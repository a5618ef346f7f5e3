// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#include "sasv/io.hpp"

#include "sasv/errors.hpp"
#include "sasv/rng.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

namespace sasv::io {

std::vector<unsigned char> read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open for reading: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

std::vector<std::string> read_lines(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open for reading: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_file(const std::filesystem::path &path, const void *data, size_t n) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open for writing: " + path.string());
  out.write(static_cast<const char *>(data), static_cast<std::streamsize>(n));
  if (!out)
    throw IoError("write failed: " + path.string());
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  write_file(path, text.data(), text.size());
}

std::vector<std::string> split_fields(const std::string &line) {
  std::vector<std::string> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t')
      ++j;
    if (j > i)
      fields.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool files_equal(const std::filesystem::path &a, const std::filesystem::path &b) {
  return read_file(a) == read_file(b);
}

uint64_t tree_hash(const std::filesystem::path &root) {
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::recursive_directory_iterator(root))
    if (entry.is_regular_file())
      files.push_back(std::filesystem::relative(entry.path(), root));
  std::sort(files.begin(), files.end());
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto &rel : files) {
    std::string name = rel.generic_string();
    h = fnv1a64(name.data(), name.size(), h);
    h = fnv1a64("\0", 1, h);
    auto bytes = read_file(root / rel);
    h = fnv1a64(bytes.data(), bytes.size(), h);
  }
  return h;
}

uint32_t crc32(const void *data, size_t n, uint32_t crc) {
  static const auto table = [] {
    std::array<uint32_t, 256> t{};
    for (uint32_t i = 0; i < 256; ++i) {
      uint32_t c = i;
      for (int k = 0; k < 8; ++k)
        c = (c & 1u) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  const auto *p = static_cast<const unsigned char *>(data);
  uint32_t c = crc ^ 0xffffffffu;
  for (size_t i = 0; i < n; ++i)
    c = table[(c ^ p[i]) & 0xffu] ^ (c >> 8);
  return c ^ 0xffffffffu;
}

void put_u32(std::vector<unsigned char> &out, uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u64(std::vector<unsigned char> &out, uint64_t v) {
  put_u32(out, static_cast<uint32_t>(v & 0xffffffffull));
  put_u32(out, static_cast<uint32_t>(v >> 32));
}

void put_f32(std::vector<unsigned char> &out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

uint32_t get_u32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint64_t get_u64(const unsigned char *p) {
  return static_cast<uint64_t>(get_u32(p)) |
         (static_cast<uint64_t>(get_u32(p + 4)) << 32);
}

float get_f32(const unsigned char *p) {
  uint32_t bits = get_u32(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

} // namespace sasv::io
