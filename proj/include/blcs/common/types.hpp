#pragma once

#include <cstdint>

namespace blcs {

using Tick = std::int64_t;
using DomainId = int;
using NodeId = int;
using LinkId = int;
using ControllerId = int;
using LightpathId = std::int64_t;
using RequestId = std::int64_t;

}  // namespace blcs
