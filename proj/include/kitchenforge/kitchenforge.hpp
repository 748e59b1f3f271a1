#pragma once

#include "archive.hpp"
#include "broker.hpp"
#include "catalog.hpp"
#include "decoder.hpp"
#include "error.hpp"
#include "instance.hpp"
#include "metrics.hpp"
#include "moead.hpp"
#include "objectives.hpp"
#include "oracle.hpp"
#include "report.hpp"
#include "scenario.hpp"
#include "scenario_io.hpp"
#include "service.hpp"
