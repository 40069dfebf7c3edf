// Copyright 2026 The Levelflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

namespace lftest {

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

/// Runs a shell command, capturing stdout; stderr passes through.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::string cli_path() {
#ifdef LEVELFLOW_CLI_PATH
  return LEVELFLOW_CLI_PATH;
#else
  if (const char* env = std::getenv("LEVELFLOW_CLI")) return env;
  throw std::runtime_error("LEVELFLOW_CLI_PATH not configured");
#endif
}

// --- minimal JSON-schema checker -------------------------------------------
//
// Covers the subset the shipped schema uses: type, required, properties,
// items, enum, and local $ref into #/$defs. Returns human-readable
// violations; empty means valid.

inline void validate_schema(const nlohmann::json& value,
                            const nlohmann::json& schema,
                            const nlohmann::json& root,
                            const std::string& path,
                            std::vector<std::string>& errors) {
  using nlohmann::json;
  if (schema.contains("$ref")) {
    const std::string ref = schema.at("$ref").get<std::string>();
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) {
      errors.push_back(path + ": unsupported $ref " + ref);
      return;
    }
    validate_schema(value, root.at("$defs").at(ref.substr(prefix.size())), root,
                    path, errors);
    return;
  }
  if (schema.contains("type")) {
    const std::string type = schema.at("type").get<std::string>();
    const bool ok =
        (type == "object" && value.is_object()) ||
        (type == "array" && value.is_array()) ||
        (type == "string" && value.is_string()) ||
        (type == "boolean" && value.is_boolean()) ||
        (type == "integer" && value.is_number_integer()) ||
        (type == "number" && value.is_number());
    if (!ok) {
      errors.push_back(path + ": expected " + type + ", got " +
                       std::string(value.type_name()));
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& candidate : schema.at("enum"))
      if (candidate == value) found = true;
    if (!found) errors.push_back(path + ": value not in enum");
  }
  if (schema.contains("required")) {
    for (const auto& key : schema.at("required"))
      if (!value.contains(key.get<std::string>()))
        errors.push_back(path + ": missing required key " +
                         key.get<std::string>());
  }
  if (schema.contains("properties") && value.is_object()) {
    for (const auto& [key, sub] : schema.at("properties").items())
      if (value.contains(key))
        validate_schema(value.at(key), sub, root, path + "." + key, errors);
  }
  if (schema.contains("items") && value.is_array()) {
    int i = 0;
    for (const auto& element : value) {
      validate_schema(element, schema.at("items"), root,
                      path + "[" + std::to_string(i) + "]", errors);
      ++i;
    }
  }
}

inline std::vector<std::string> check_against_def(const nlohmann::json& value,
                                                  const nlohmann::json& schema_doc,
                                                  const std::string& def_name) {
  std::vector<std::string> errors;
  validate_schema(value, schema_doc.at("$defs").at(def_name), schema_doc, "$",
                  errors);
  return errors;
}

}  // namespace lftest
