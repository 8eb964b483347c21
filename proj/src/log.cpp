#include "polref/log.hpp"

#include <iostream>
#include <mutex>

namespace polref::log {
namespace {

std::mutex sink_mutex;
Sink current_sink;

void append_value(std::string& out, const std::string& value) {
    bool needs_quotes = value.empty() || value.find_first_of(" \t\"=") != std::string::npos;
    if (!needs_quotes) {
        out += value;
        return;
    }
    out += '"';
    for (char c : value) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

void emit(const std::string& line) {
    std::lock_guard lock(sink_mutex);
    if (current_sink) {
        current_sink(line);
    } else {
        std::cerr << line << '\n';
    }
}

}  // namespace

std::string format(std::string_view stage, std::string_view name, std::initializer_list<Field> fields,
                   bool warning) {
    std::string line = "stage=";
    line += stage;
    line += " event=";
    line += name;
    if (warning) line += " level=warn";
    for (const auto& [key, value] : fields) {
        line += ' ';
        line += key;
        line += '=';
        append_value(line, value);
    }
    return line;
}

void event(std::string_view stage, std::string_view name, std::initializer_list<Field> fields) {
    emit(format(stage, name, fields, false));
}

void warn(std::string_view stage, std::string_view name, std::initializer_list<Field> fields) {
    emit(format(stage, name, fields, true));
}

void set_sink(Sink sink) {
    std::lock_guard lock(sink_mutex);
    current_sink = std::move(sink);
}

}  // namespace polref::log
