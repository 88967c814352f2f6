// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "xchan/capacity.hpp"
#include "xchan/channel.hpp"
#include "xchan/config.hpp"
#include "xchan/dof.hpp"
#include "xchan/error.hpp"
#include "xchan/orbit.hpp"
#include "xchan/parallel.hpp"
#include "xchan/phy.hpp"
#include "xchan/random.hpp"
#include "xchan/scheduler.hpp"
