#include "questd/daemon/feed.hpp"

namespace questd::daemon {

Feed::Feed(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

std::uint64_t Feed::publish(std::string line) {
    std::uint64_t seq;
    {
        std::lock_guard lock(mutex_);
        seq = first_seq_ + lines_.size();
        lines_.push_back(std::move(line));
        if (lines_.size() > capacity_) {
            lines_.pop_front();
            ++first_seq_;
        }
    }
    changed_.notify_all();
    return seq;
}

std::uint64_t Feed::head() const {
    std::lock_guard lock(mutex_);
    return first_seq_ + lines_.size();
}

Feed::Batch Feed::wait(std::uint64_t& cursor, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    changed_.wait_for(lock, timeout, [&] { return closed_ || cursor < first_seq_ + lines_.size(); });
    Batch batch;
    batch.closed = closed_;
    if (cursor < first_seq_) {
        batch.lagged = true;
        cursor = first_seq_;
    }
    for (auto seq = cursor; seq < first_seq_ + lines_.size(); ++seq) batch.lines.push_back(lines_[seq - first_seq_]);
    cursor = first_seq_ + lines_.size();
    return batch;
}

void Feed::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    changed_.notify_all();
}

}  // namespace questd::daemon
