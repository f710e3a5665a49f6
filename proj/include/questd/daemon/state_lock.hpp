#pragma once

#include <filesystem>

namespace questd::daemon {

/// Exclusive advisory lock on a file in the state directory, held for the object's lifetime.
class StateLock {
public:
    /// Throws StateLocked when another process holds the lock.
    explicit StateLock(const std::filesystem::path& path);
    ~StateLock();
    StateLock(const StateLock&) = delete;
    StateLock& operator=(const StateLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace questd::daemon
