#pragma once

// Single include point for the vendored nlohmann::json header.
#include "json.hpp"
