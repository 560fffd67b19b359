#pragma once

#include "dronegrid/backhaul.hpp"
#include "dronegrid/charging.hpp"
#include "dronegrid/io.hpp"
#include "dronegrid/model.hpp"
#include "dronegrid/oracle.hpp"
#include "dronegrid/planner.hpp"
#include "dronegrid/runner.hpp"
#include "dronegrid/scoring.hpp"
#include "dronegrid/simulator.hpp"
#include "dronegrid/traces.hpp"
