// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#ifndef SASV_IO_HPP
#define SASV_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sasv::io {

/// Read a whole file as bytes. Throws IoError if unreadable.
std::vector<unsigned char> read_file(const std::filesystem::path &path);

/// Read a text file split into lines. LF and CRLF both accepted; the
/// terminating newline does not produce an empty trailing line.
std::vector<std::string> read_lines(const std::filesystem::path &path);

/// Write bytes, creating parent directories as needed.
void write_file(const std::filesystem::path &path, const void *data, size_t n);
void write_text(const std::filesystem::path &path, const std::string &text);

/// Split on runs of spaces/tabs, dropping empty fields.
std::vector<std::string> split_fields(const std::string &line);

bool files_equal(const std::filesystem::path &a, const std::filesystem::path &b);

/// Order-independent content hash of a directory tree: FNV-1a over
/// (sorted relative path, file bytes) pairs.
uint64_t tree_hash(const std::filesystem::path &root);

/// CRC-32 (IEEE 802.3 polynomial, reflected). Used as the checkpoint
/// section digest; see docs/checkpoint-format.md.
uint32_t crc32(const void *data, size_t n, uint32_t crc = 0);

// Little-endian scalar encode/decode, independent of host byte order.
void put_u32(std::vector<unsigned char> &out, uint32_t v);
void put_u64(std::vector<unsigned char> &out, uint64_t v);
void put_f32(std::vector<unsigned char> &out, float v);
uint32_t get_u32(const unsigned char *p);
uint64_t get_u64(const unsigned char *p);
float get_f32(const unsigned char *p);

} // namespace sasv::io

#endif
