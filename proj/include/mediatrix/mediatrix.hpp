#pragma once

#include "mediatrix/error.hpp"
#include "mediatrix/logic.hpp"
#include "mediatrix/theory.hpp"
#include "mediatrix/engine.hpp"
#include "mediatrix/argument.hpp"
#include "mediatrix/agent.hpp"
#include "mediatrix/transcript.hpp"
#include "mediatrix/mediator.hpp"
#include "mediatrix/scenario.hpp"
#include "mediatrix/oracle.hpp"
