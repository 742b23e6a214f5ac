#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sfcr/instance.hpp"

namespace sfcr {

/// Schema or referential-integrity problem in a document, with a
/// JSON-pointer-style location.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string pointer, const std::string& what)
        : std::runtime_error("parse error at " + pointer + ": " + what),
          pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

inline constexpr int kSchemaVersion = 1;

nlohmann::json save_instance(const Instance& inst);
Instance load_instance(const nlohmann::json& doc);

nlohmann::json save_state(const Instance& inst, const NetworkState& state);
NetworkState load_state(const nlohmann::json& doc, const Instance& inst);

nlohmann::json save_solution(const Instance& inst, const ReconfigSolution& solution);
ReconfigSolution load_solution(const nlohmann::json& doc, const Instance& inst);

nlohmann::json breakdown_to_json(const CostBreakdown& cb);
CostBreakdown breakdown_from_json(const nlohmann::json& doc, const std::string& ptr);

void write_json_file(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::string& path);

} // namespace sfcr
