// Basic identifiers shared by every gossipsim module.

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace gossipsim {

using NodeId = std::uint32_t;
using Timestep = std::uint64_t;
using MessageId = std::uint64_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Raised for violated preconditions on user-supplied parameters.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace gossipsim
