// Copyright 2026 The regen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "regen/analysis.hpp"
#include "regen/bits.hpp"
#include "regen/chunk_file.hpp"
#include "regen/cluster.hpp"
#include "regen/codes.hpp"
#include "regen/crc.hpp"
#include "regen/error.hpp"
#include "regen/galois.hpp"
#include "regen/integrity.hpp"
#include "regen/layout.hpp"
#include "regen/matrix.hpp"
#include "regen/mbr.hpp"
#include "regen/msr.hpp"
#include "regen/rscode.hpp"
#include "regen/scenario.hpp"
