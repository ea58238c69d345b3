#pragma once

// Everything, in dependency order.

#include "callas/names.hpp"
#include "callas/ast.hpp"
#include "callas/types.hpp"
#include "callas/syntax.hpp"
#include "callas/state.hpp"
#include "callas/typecheck.hpp"
#include "callas/machine.hpp"
#include "callas/network.hpp"
#include "callas/gen.hpp"
#include "callas/safety.hpp"
#include "callas/scenario.hpp"
#include "callas/runtime.hpp"
