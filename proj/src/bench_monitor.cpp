#include <unistd.h>

#include <fstream>
#include <sstream>
#include <string>

#include "syntab/bench/bench.hpp"

namespace syntab::bench {

namespace {

// Total user+system clock ticks consumed by this process. The comm field in
// /proc/self/stat may contain spaces, so parsing restarts after the closing
// parenthesis; utime and stime are kernel fields 14 and 15, which is tokens
// 11 and 12 of the remainder.
bool read_cpu_ticks(double& ticks) {
    std::ifstream in("/proc/self/stat");
    if (!in) return false;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t close = content.rfind(')');
    if (close == std::string::npos) return false;
    std::istringstream rest(content.substr(close + 1));
    std::string token;
    double utime = 0.0;
    double stime = 0.0;
    for (int i = 0; rest >> token; ++i) {
        if (i == 11) utime = std::stod(token);
        if (i == 12) {
            stime = std::stod(token);
            ticks = utime + stime;
            return true;
        }
    }
    return false;
}

bool read_memory_percent(double& percent) {
    std::ifstream statm("/proc/self/statm");
    long total_pages = 0;
    long resident_pages = 0;
    if (!(statm >> total_pages >> resident_pages)) return false;

    std::ifstream meminfo("/proc/meminfo");
    std::string line;
    while (std::getline(meminfo, line)) {
        std::istringstream fields(line);
        std::string key;
        double value = 0.0;
        if (fields >> key >> value && key == "MemTotal:" && value > 0.0) {
            const double resident_kb =
                static_cast<double>(resident_pages) * (sysconf(_SC_PAGESIZE) / 1024.0);
            percent = 100.0 * resident_kb / value;
            return true;
        }
    }
    return false;
}

}  // namespace

void ResourceMonitor::start() {
    started_ = std::chrono::steady_clock::now();
    degraded_ = !read_cpu_ticks(start_ticks_);
    stopping_ = false;
    memory_percents_.clear();
    worker_ = std::thread([this] {
        std::unique_lock<std::mutex> lock(mutex_);
        for (;;) {
            if (wake_.wait_for(lock, std::chrono::milliseconds(500),
                               [this] { return stopping_; })) {
                break;
            }
            lock.unlock();
            sample_memory();
            lock.lock();
        }
    });
}

void ResourceMonitor::sample_memory() {
    double percent = 0.0;
    if (read_memory_percent(percent)) {
        memory_percents_.push_back(percent);
    } else {
        degraded_ = true;
    }
}

ResourceSummary ResourceMonitor::stop() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        stopping_ = true;
    }
    wake_.notify_all();
    if (worker_.joinable()) worker_.join();
    sample_memory();  // short runs still get one snapshot

    ResourceSummary summary;
    summary.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    summary.samples = memory_percents_.size();

    double end_ticks = 0.0;
    const long ticks_per_second = sysconf(_SC_CLK_TCK);
    if (!degraded_ && read_cpu_ticks(end_ticks) && ticks_per_second > 0 &&
        summary.wall_clock_seconds > 0.0) {
        const double cpu_seconds = (end_ticks - start_ticks_) / static_cast<double>(ticks_per_second);
        summary.avg_cpu_percent = 100.0 * cpu_seconds / summary.wall_clock_seconds;
    } else {
        degraded_ = true;
    }
    if (!memory_percents_.empty()) {
        double total = 0.0;
        for (double p : memory_percents_) total += p;
        summary.avg_memory_percent = total / static_cast<double>(memory_percents_.size());
    }
    summary.available = !degraded_;
    return summary;
}

}  // namespace syntab::bench
