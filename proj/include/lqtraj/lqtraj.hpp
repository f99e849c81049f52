/*
   Copyright 2026 the lqtraj authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "lqtraj/coherent.hpp"
#include "lqtraj/errors.hpp"
#include "lqtraj/fock.hpp"
#include "lqtraj/lse.hpp"
#include "lqtraj/momentum.hpp"
#include "lqtraj/qnd.hpp"
#include "lqtraj/quadratic.hpp"
#include "lqtraj/quadrature.hpp"
#include "lqtraj/rng.hpp"
#include "lqtraj/util.hpp"
#include "lqtraj/wiener.hpp"
