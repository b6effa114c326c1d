#pragma once

#include "irstt/analysis.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace irstt {

struct RunConfig
{
    SweepSpec sweep;
    Index rip_samples = 1000;
    std::string out = "results"; // output directory
    bool strict = false;
    bool record_wall_time = false;
};

using KeyValue = std::pair<std::string, std::string>;

// Flat "key = value" text, '#' starts a comment. Overrides are applied after
// the text, in order. Throws ParseError (syntax, unknown key) and
// ValidationError (bad value, naming the key).
RunConfig parse_config(std::string_view text, const std::vector<KeyValue>& overrides = {});

// Reads `path` (IoError if unreadable) and parses it.
RunConfig load_config(const std::string& path, const std::vector<KeyValue>& overrides = {});

// "KEY=VALUE" -> {KEY, VALUE}; ParseError without '='.
KeyValue split_assignment(std::string_view s);

// Recognised keys in documentation order.
const std::vector<std::string>& config_keys();

} // namespace irstt
