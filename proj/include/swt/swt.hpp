#pragma once

#include "swt/numeric.hpp"
#include "swt/core.hpp"
#include "swt/engine.hpp"
#include "swt/offline.hpp"
#include "swt/algorithms.hpp"
#include "swt/generators.hpp"
#include "swt/io.hpp"
#include "swt/analysis.hpp"
#include "swt/verify.hpp"
#include "swt/registry.hpp"
#include "swt/cli.hpp"
