#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tourmon/date.hpp"
#include "tourmon/error.hpp"
#include "tourmon/sha256.hpp"

namespace tourmon {

// Immutable archived copy of one fetched page. All downstream stages read
// snapshots, never the live web.
struct RawSnapshot {
  std::string snapshot_id;  // sha256 hex of body
  std::string source_url;
  Timestamp fetched_at;
  int http_status = 0;
  std::string body;
  std::string content_type;

  static RawSnapshot make(std::string url, Timestamp at, int status,
                          std::string body, std::string content_type) {
    RawSnapshot s;
    s.snapshot_id = sha256_hex(body);
    s.source_url = std::move(url);
    s.fetched_at = at;
    s.http_status = status;
    s.body = std::move(body);
    s.content_type = std::move(content_type);
    return s;
  }
};

namespace detail {

inline std::filesystem::path body_path(const std::filesystem::path& dir,
                                       const std::string& id) {
  return dir / id.substr(0, 2) / (id + ".body");
}

inline std::filesystem::path meta_path(const std::filesystem::path& dir,
                                       const std::string& id) {
  return dir / id.substr(0, 2) / (id + ".meta.json");
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + p.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return data;
}

// Write-then-rename so concurrent writers and crashed runs never leave a
// torn file under the final name.
inline void write_file_atomic(const std::filesystem::path& target,
                              const std::string& data) {
  static std::atomic<std::uint64_t> counter{0};
  auto tmp = target;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("rename failed for " + target.string() + ": " + ec.message());
  }
}

}  // namespace detail

// Stores a snapshot under <archive>/<first2-of-hash>/<hash>.body plus a
// .meta.json sidecar. Re-storing an identical body is a no-op; a body that
// hashes to an existing id but differs byte-wise aborts.
inline std::string store_snapshot(const RawSnapshot& snap,
                                  const std::filesystem::path& archive_dir) {
  std::string id = sha256_hex(snap.body);
  auto body_p = detail::body_path(archive_dir, id);
  auto meta_p = detail::meta_path(archive_dir, id);
  std::filesystem::create_directories(body_p.parent_path());

  if (std::filesystem::exists(body_p)) {
    std::string existing = detail::read_file(body_p);
    if (existing != snap.body)
      throw IntegrityError("hash collision with differing body for id " + id);
    return id;  // idempotent
  }

  nlohmann::ordered_json meta = {
      {"url", snap.source_url},
      {"fetched_at", snap.fetched_at.rfc3339()},
      {"http_status", snap.http_status},
      {"content_type", snap.content_type},
  };
  detail::write_file_atomic(body_p, snap.body);
  detail::write_file_atomic(meta_p, meta.dump(2) + "\n");
  return id;
}

inline RawSnapshot load_snapshot(const std::string& snapshot_id,
                                 const std::filesystem::path& archive_dir) {
  auto body_p = detail::body_path(archive_dir, snapshot_id);
  auto meta_p = detail::meta_path(archive_dir, snapshot_id);
  if (!std::filesystem::exists(body_p) || !std::filesystem::exists(meta_p))
    throw NotFoundError("snapshot not found: " + snapshot_id);

  RawSnapshot s;
  s.snapshot_id = snapshot_id;
  s.body = detail::read_file(body_p);
  if (sha256_hex(s.body) != snapshot_id)
    throw IntegrityError("archived body does not match its id: " + snapshot_id);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(detail::read_file(meta_p));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bad snapshot sidecar " + meta_p.string() + ": " + e.what());
  }
  s.source_url = meta.at("url").get<std::string>();
  s.fetched_at = parse_rfc3339(meta.at("fetched_at").get<std::string>());
  s.http_status = meta.at("http_status").get<int>();
  s.content_type = meta.at("content_type").get<std::string>();
  return s;
}

// All ids in the archive, sorted (deterministic parse order).
inline std::vector<std::string> list_snapshot_ids(
    const std::filesystem::path& archive_dir) {
  std::vector<std::string> ids;
  if (!std::filesystem::exists(archive_dir)) return ids;
  for (const auto& sub : std::filesystem::directory_iterator(archive_dir)) {
    if (!sub.is_directory()) continue;
    for (const auto& f : std::filesystem::directory_iterator(sub.path())) {
      auto name = f.path().filename().string();
      if (name.size() == 64 + 5 && name.ends_with(".body"))
        ids.push_back(name.substr(0, 64));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace tourmon
