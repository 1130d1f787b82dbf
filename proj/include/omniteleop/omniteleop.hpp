#pragma once

#include "omniteleop/config.hpp"
#include "omniteleop/error.hpp"
#include "omniteleop/gateway.hpp"
#include "omniteleop/geometry.hpp"
#include "omniteleop/gestures.hpp"
#include "omniteleop/interaction.hpp"
#include "omniteleop/jsonio.hpp"
#include "omniteleop/metrics.hpp"
#include "omniteleop/plant.hpp"
#include "omniteleop/runner.hpp"
#include "omniteleop/session.hpp"
#include "omniteleop/supervisor.hpp"
#include "omniteleop/wire.hpp"
