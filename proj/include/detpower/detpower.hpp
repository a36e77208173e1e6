// Copyright 2026 The detpower Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header for the detpower library.

#ifndef DETPOWER_DETPOWER_HPP
#define DETPOWER_DETPOWER_HPP

#include "detpower/adaptive.hpp"
#include "detpower/closed_forms.hpp"
#include "detpower/eigen.hpp"
#include "detpower/error.hpp"
#include "detpower/exponents.hpp"
#include "detpower/finite.hpp"
#include "detpower/golden.hpp"
#include "detpower/io.hpp"
#include "detpower/matrix.hpp"
#include "detpower/optimizer.hpp"
#include "detpower/parallel.hpp"
#include "detpower/povm.hpp"
#include "detpower/state.hpp"

#endif
