#pragma once

#include <json.hpp>

#include "rfp/sim/channel.hpp"
#include "rfp/sim/impairments.hpp"
#include "rfp/sim/ofdm.hpp"

namespace rfp::sim::detail {

using nlohmann::json;

json complex_json(cdouble z);
cdouble complex_from(const json& j);

json to_json(const DeviceProfile& p);
DeviceProfile device_from(const json& j);
json to_json(const ChannelProfile& p);
ChannelProfile channel_from(const json& j);
json to_json(const OfdmConfig& c);
OfdmConfig ofdm_from(const json& j);

}  // namespace rfp::sim::detail
