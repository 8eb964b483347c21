#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace polref::io {

/// Reads a whole file; throws Error(IoError) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames over `path`. Throws Error(PersistError).
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Advisory exclusive lock held on `<path>.lock` for the lifetime of the object.
class FileLock {
public:
    explicit FileLock(const std::filesystem::path& path);
    ~FileLock();
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace polref::io
