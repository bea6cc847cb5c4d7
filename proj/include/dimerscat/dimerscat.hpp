#pragma once

#include "dimerscat/errors.hpp"
#include "dimerscat/oscillator_basis.hpp"
#include "dimerscat/channel_kinematics.hpp"
#include "dimerscat/boundary_matching.hpp"
#include "dimerscat/observables.hpp"
#include "dimerscat/born_reference.hpp"
#include "dimerscat/sweep.hpp"
#include "dimerscat/output.hpp"
