#pragma once

#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

// Structured log lines of the form `stage=<name> event=<event> key=value ...`.
namespace polref::log {

using Field = std::pair<std::string_view, std::string>;
using Sink = std::function<void(const std::string& line)>;

void event(std::string_view stage, std::string_view name, std::initializer_list<Field> fields = {});
void warn(std::string_view stage, std::string_view name, std::initializer_list<Field> fields = {});

/// Replace the output sink; an empty function restores the default (stderr).
void set_sink(Sink sink);

/// Formats one line without emitting it.
std::string format(std::string_view stage, std::string_view name, std::initializer_list<Field> fields,
                   bool warning);

}  // namespace polref::log
