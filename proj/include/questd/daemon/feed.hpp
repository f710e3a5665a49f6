#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

namespace questd::daemon {

/// Ordered broadcast hub. One writer publishes lines; each subscriber keeps its own cursor,
/// so every subscriber sees the same sequence.
class Feed {
public:
    explicit Feed(std::size_t capacity = 10'000);

    /// Returns the sequence number assigned to the line.
    std::uint64_t publish(std::string line);

    /// Sequence number the next published line will get; new subscribers start here.
    std::uint64_t head() const;

    struct Batch {
        std::vector<std::string> lines;
        /// The subscriber fell behind the retained window; it should resync from GET /state.
        bool lagged = false;
        bool closed = false;
    };

    /// Waits until lines at or after `cursor` exist, the timeout passes or the feed closes.
    /// Advances `cursor` past the returned lines.
    Batch wait(std::uint64_t& cursor, std::chrono::milliseconds timeout);

    void close();

private:
    mutable std::mutex mutex_;
    std::condition_variable changed_;
    std::deque<std::string> lines_;
    std::uint64_t first_seq_ = 0;
    std::size_t capacity_;
    bool closed_ = false;
};

}  // namespace questd::daemon
