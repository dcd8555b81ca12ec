#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace signfj::tools {

/// Doubles are printed with 17 significant digits so report values
/// round-trip bit-exactly through text.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Minimal streaming JSON writer (objects, arrays, scalars) with a fixed
/// number format; the reports here are small and flat.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}

    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& k) {
        separate();
        write_string(k);
        os_ << ':';
        pending_value_ = true;
        return *this;
    }

    JsonWriter& value(double v) { return scalar(fmt17(v)); }
    JsonWriter& value(int v) { return scalar(std::to_string(v)); }
    JsonWriter& value(std::int64_t v) { return scalar(std::to_string(v)); }
    JsonWriter& value(std::uint64_t v) { return scalar(std::to_string(v)); }
    JsonWriter& value(bool v) { return scalar(v ? "true" : "false"); }
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& value(const std::string& v) {
        separate();
        write_string(v);
        mark_written();
        return *this;
    }

    template <typename T>
    JsonWriter& kv(const std::string& k, const T& v) {
        key(k);
        return value(v);
    }

private:
    JsonWriter& open(char c) {
        separate();
        os_ << c;
        first_.push_back(true);
        pending_value_ = false;
        return *this;
    }

    JsonWriter& close(char c) {
        os_ << c;
        first_.pop_back();
        mark_written();
        return *this;
    }

    JsonWriter& scalar(const std::string& text) {
        separate();
        os_ << text;
        mark_written();
        return *this;
    }

    void separate() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!first_.empty()) {
            if (!first_.back()) os_ << ',';
        }
    }

    void mark_written() {
        if (!first_.empty()) first_.back() = false;
        pending_value_ = false;
    }

    void write_string(const std::string& s) {
        os_ << '"';
        for (char c : s) {
            switch (c) {
                case '"': os_ << "\\\""; break;
                case '\\': os_ << "\\\\"; break;
                case '\n': os_ << "\\n"; break;
                case '\r': os_ << "\\r"; break;
                case '\t': os_ << "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        os_ << buf;
                    } else {
                        os_ << c;
                    }
            }
        }
        os_ << '"';
    }

    std::ostream& os_;
    std::vector<bool> first_;
    bool pending_value_ = false;
};

} // namespace signfj::tools
