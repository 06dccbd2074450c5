#pragma once

#include "parcnot/bounds.hpp"
#include "parcnot/circuit.hpp"
#include "parcnot/errors.hpp"
#include "parcnot/f2matrix.hpp"
#include "parcnot/layby.hpp"
#include "parcnot/matching.hpp"
#include "parcnot/synth_ancilla.hpp"
#include "parcnot/synth_free.hpp"
#include "parcnot/traversal.hpp"
#include "parcnot/trees.hpp"
