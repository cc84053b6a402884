// diagnostics.hpp - error types and a process-wide warning sink

#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace bellmem {

// Thrown when a numerical routine cannot produce a trustworthy result
// (failed eigensolver, defective matrix, pole hit). The CLI maps it to exit 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown for malformed or inconsistent run configurations. The CLI maps it to exit 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct WarningSink {
    std::mutex mu;
    std::function<void(const std::string&)> fn = [](const std::string& msg) {
        std::clog << "bellmem: warning: " << msg << '\n';
    };
};

inline WarningSink& warning_sink() {
    static WarningSink sink;
    return sink;
}

}  // namespace detail

// Replace the warning handler; pass an empty function to silence warnings.
inline void set_warning_handler(std::function<void(const std::string&)> fn) {
    auto& sink = detail::warning_sink();
    std::lock_guard<std::mutex> lock(sink.mu);
    sink.fn = std::move(fn);
}

inline void warn(const std::string& msg) {
    auto& sink = detail::warning_sink();
    std::lock_guard<std::mutex> lock(sink.mu);
    if (sink.fn) sink.fn(msg);
}

}  // namespace bellmem
